#pragma once

#include <stdexcept>
#include <string>

namespace lcoal {

// Violated precondition or malformed input. The CLI maps this to exit code 2
// and prints the message, which names the violated condition.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Divergence detection could not reach a verdict that the closed-form test
// agrees with. Raised instead of silently guessing near a regime boundary.
class InconclusiveError : public std::runtime_error {
 public:
  explicit InconclusiveError(const std::string& what) : std::runtime_error(what) {}
};

}
