#pragma once

namespace lcoal {

inline constexpr const char* kVersion = "0.1.0";

}
