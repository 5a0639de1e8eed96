#include "lcoal/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "lcoal/errors.hpp"
#include "lcoal/stats.hpp"

namespace lcoal {

FiniteBridge FiniteBridge::identity() { return FiniteBridge{}; }

FiniteBridge FiniteBridge::make(double slope, std::vector<Jump> jumps) {
  if (!(slope >= 0.0) || !(slope <= 1.0))
    throw DomainError("FiniteBridge: slope must lie in [0, 1]");
  std::sort(jumps.begin(), jumps.end(),
            [](const Jump& a, const Jump& b) { return a.u < b.u; });
  CompensatedSum sizes;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    if (!(jumps[i].u >= 0.0) || !(jumps[i].u < 1.0))
      throw DomainError("FiniteBridge: jump location must lie in [0, 1)");
    if (!(jumps[i].s > 0.0))
      throw DomainError("FiniteBridge: jump size must be positive");
    if (i > 0 && jumps[i].u == jumps[i - 1].u)
      throw DomainError("FiniteBridge: jump locations must be distinct");
    sizes.add(jumps[i].s);
  }
  if (std::abs(slope + sizes.value() - 1.0) > 1e-9)
    throw DomainError("FiniteBridge: slope + jump sizes must equal 1");

  FiniteBridge b;
  b.slope_ = slope;
  b.jumps_ = std::move(jumps);
  CompensatedSum prefix;
  b.prefix_.reserve(b.jumps_.size() + 1);  // the declared {0.0} leads it
  b.holes_.reserve(b.jumps_.size());
  for (const Jump& j : b.jumps_) {
    double lo = slope * j.u + prefix.value();
    b.holes_.push_back({lo, lo + j.s});
    prefix.add(j.s);
    b.prefix_.push_back(prefix.value());
  }
  return b;
}

double FiniteBridge::evaluate(double y) const {
  if (!(y >= 0.0) || !(y <= 1.0))
    throw DomainError("evaluate: argument must lie in [0, 1]");
  std::size_t c = 0;
  {
    std::size_t lo = 0, hi = jumps_.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (jumps_[mid].u <= y)
        lo = mid + 1;
      else
        hi = mid;
    }
    c = lo;  // number of jumps at or before y
  }
  double v = slope_ * y + prefix_[c];
  return std::min(v, 1.0);
}

FiniteBridge::Location FiniteBridge::locate(double v) const {
  std::size_t lo = 0, hi = holes_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (holes_[mid].lo <= v)
      lo = mid + 1;
    else
      hi = mid;
  }
  // lo = number of holes starting at or below v
  if (lo > 0 && v < holes_[lo - 1].hi)
    return {true, static_cast<int>(lo - 1)};
  return {false, static_cast<int>(lo)};
}

double FiniteBridge::inverse(double v) const {
  if (!(v >= 0.0) || !(v <= 1.0))
    throw DomainError("inverse: argument must lie in [0, 1]");
  if (v >= 1.0) return 1.0;  // inf over an empty set
  Location w = locate(v);
  if (w.in_hole) return jumps_[static_cast<std::size_t>(w.index)].u;
  // v >= hi of every hole below it, so the dust formula applies; with
  // slope 0 the holes tile [0,1) and this branch is unreachable for v < 1.
  double z = (v - prefix_[static_cast<std::size_t>(w.index)]) / slope_;
  return std::clamp(z, 0.0, 1.0);
}

FiniteBridge simple_bridge(double x, double u) {
  if (!(x > 0.0) || !(x < 1.0))
    throw DomainError("simple_bridge: x must lie in (0, 1)");
  if (!(u >= 0.0) || !(u < 1.0))
    throw DomainError("simple_bridge: u must lie in [0, 1)");
  return FiniteBridge::make(1.0 - x, {{u, x}});
}

double dust(const FiniteBridge& b) { return b.slope(); }

FiniteBridge compose(const FiniteBridge& first, const FiniteBridge& second) {
  // Jump of `first` at u: the result jumps by second's slope times its size
  // there, plus any jump of `second` whose inf-preimage under `first` is u.
  std::vector<Jump> raw;
  raw.reserve(first.jump_list().size() + second.jump_list().size());
  for (const Jump& j : first.jump_list())
    raw.push_back({j.u, second.slope() * j.s});
  for (const Jump& j : second.jump_list()) {
    double loc = first.inverse(j.u);
    if (loc >= 1.0) loc = std::nextafter(1.0, 0.0);
    raw.push_back({loc, j.s});
  }
  std::sort(raw.begin(), raw.end(),
            [](const Jump& a, const Jump& b) { return a.u < b.u; });
  std::vector<Jump> merged;
  for (const Jump& j : raw) {
    if (!merged.empty() && merged.back().u == j.u) {
      merged.back().s += j.s;
      std::cerr << "compose: merged coincident jump at u=" << j.u << "\n";
    } else {
      merged.push_back(j);
    }
  }
  return FiniteBridge::make(first.slope() * second.slope(), std::move(merged));
}

TrackedComposition compose_tracked(const FiniteBridge& first, double x,
                                   double u) {
  if (!(x > 0.0) || !(x < 1.0))
    throw DomainError("compose_tracked: x must lie in (0, 1)");
  if (!(u >= 0.0) || !(u < 1.0))
    throw DomainError("compose_tracked: u must lie in [0, 1)");
  for (const Hole& h : first.holes())
    if (u == h.lo || u == h.hi)
      throw BoundaryCollision("compose_tracked: u hits a hole boundary");

  FiniteBridge::Location w = first.locate(u);
  TrackedComposition out;
  int m = static_cast<int>(first.jump_list().size());
  std::vector<Jump> jumps;
  jumps.reserve(static_cast<std::size_t>(m) + 1);

  if (w.in_hole) {
    // Case B: the new factor's jump is absorbed by the hole containing u.
    for (int i = 0; i < m; ++i) {
      const Jump& j = first.jump_list()[static_cast<std::size_t>(i)];
      double s = (1.0 - x) * j.s;
      if (i == w.index) s += x;
      jumps.push_back({j.u, s});
    }
    out.absorbed_index = w.index;
    out.child_of.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out.child_of[static_cast<std::size_t>(i)] = i;
  } else {
    // Case A: u sits in first's dust; the new jump appears at the preimage
    // of u and opens a hole of size exactly x.
    double prefix_below = 0.0;
    for (int i = 0; i < w.index; ++i)
      prefix_below += first.jump_list()[static_cast<std::size_t>(i)].s;
    double loc = first.slope() > 0.0 ? (u - prefix_below) / first.slope() : u;
    loc = std::clamp(loc, 0.0, std::nextafter(1.0, 0.0));
    int p = 0;
    for (int i = 0; i < m; ++i) {
      const Jump& j = first.jump_list()[static_cast<std::size_t>(i)];
      if (j.u < loc) p = i + 1;
      if (j.u == loc)
        throw BoundaryCollision("compose_tracked: preimage hits a jump");
    }
    for (int i = 0; i < p; ++i) {
      const Jump& j = first.jump_list()[static_cast<std::size_t>(i)];
      jumps.push_back({j.u, (1.0 - x) * j.s});
    }
    jumps.push_back({loc, x});
    for (int i = p; i < m; ++i) {
      const Jump& j = first.jump_list()[static_cast<std::size_t>(i)];
      jumps.push_back({j.u, (1.0 - x) * j.s});
    }
    out.added_hole = true;
    out.new_hole_index = p;
    out.child_of.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      out.child_of[static_cast<std::size_t>(i)] = i < p ? i : i + 1;
  }
  out.result = FiniteBridge::make((1.0 - x) * first.slope(), std::move(jumps));
  if (out.added_hole)
    out.new_hole = out.result.holes()[static_cast<std::size_t>(out.new_hole_index)];
  return out;
}

Partition paintbox(const FiniteBridge& b, int n, Stream& rng) {
  if (n < 1) throw DomainError("paintbox: n must be positive");
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::map<double, int> dust_seen;
  int next_label = b.holes().empty() ? 1 : static_cast<int>(b.holes().size()) + 1;
  for (int i = 0; i < n; ++i) {
    double v = rng.next_double();
    FiniteBridge::Location w = b.locate(v);
    if (w.in_hole) {
      labels[static_cast<std::size_t>(i)] = w.index;
    } else {
      auto [it, fresh] = dust_seen.try_emplace(v, next_label);
      if (fresh) ++next_label;
      labels[static_cast<std::size_t>(i)] = it->second;
    }
  }
  return Partition::from_labels(labels);
}

double dust_remap(const FiniteBridge& b, double v) {
  if (!(v >= 0.0) || !(v <= 1.0))
    throw DomainError("dust_remap: argument must lie in [0, 1]");
  FiniteBridge::Location w = b.locate(v);
  if (w.in_hole) {
    const Hole& h = b.holes()[static_cast<std::size_t>(w.index)];
    double before = 0.0;
    for (int i = 0; i < w.index; ++i)
      before += b.holes()[static_cast<std::size_t>(i)].size();
    return b.slope() + before + (v - h.lo);
  }
  double holes_below = 0.0;
  for (int i = 0; i < w.index; ++i)
    holes_below += b.holes()[static_cast<std::size_t>(i)].size();
  return v - holes_below;
}

std::string serialize_bridge(const FiniteBridge& b) {
  std::ostringstream out;
  out << format_real(b.slope()) << ";";
  for (std::size_t i = 0; i < b.jump_list().size(); ++i) {
    if (i) out << ",";
    out << format_real(b.jump_list()[i].u) << ":"
        << format_real(b.jump_list()[i].s);
  }
  return out.str();
}

FiniteBridge parse_bridge(const std::string& text) {
  std::size_t semi = text.find(';');
  std::string head = semi == std::string::npos ? text : text.substr(0, semi);
  double slope = 0.0;
  try {
    std::size_t pos = 0;
    slope = std::stod(head, &pos);
    if (pos != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw DomainError("parse_bridge: bad slope '" + head + "'");
  }
  std::vector<Jump> jumps;
  if (semi != std::string::npos && semi + 1 < text.size()) {
    std::istringstream rest(text.substr(semi + 1));
    std::string pair;
    while (std::getline(rest, pair, ',')) {
      std::size_t colon = pair.find(':');
      if (colon == std::string::npos)
        throw DomainError("parse_bridge: jump needs 'u:s', got '" + pair + "'");
      try {
        std::size_t p1 = 0, p2 = 0;
        double u = std::stod(pair.substr(0, colon), &p1);
        double s = std::stod(pair.substr(colon + 1), &p2);
        if (p1 != colon || p2 != pair.size() - colon - 1)
          throw std::invalid_argument(pair);
        jumps.push_back({u, s});
      } catch (const std::exception&) {
        throw DomainError("parse_bridge: bad jump '" + pair + "'");
      }
    }
  }
  return FiniteBridge::make(slope, std::move(jumps));
}

namespace {

void svg_line(std::string& out, double x1, double y1, double x2, double y2,
              const char* style) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' %s/>\n", x1, y1,
                x2, y2, style);
  out += buf;
}

}  // namespace

std::string render_svg(const FiniteBridge& b) {
  // 480x480 plot area with a 40px margin; y axis points up, so values are
  // flipped when mapped to pixels.
  const double kM = 40.0, kW = 480.0;
  auto px = [&](double v) { return kM + kW * v; };
  auto py = [&](double v) { return kM + kW * (1.0 - v); };
  std::string out;
  out += "<svg xmlns='http://www.w3.org/2000/svg' width='560' height='560' "
         "viewBox='0 0 560 560'>\n";
  out += "<rect width='560' height='560' fill='white'/>\n";
  char buf[256];
  for (const Hole& h : b.holes()) {
    std::snprintf(buf, sizeof buf,
                  "<rect x='%.2f' y='%.2f' width='%.2f' height='%.2f' "
                  "fill='#d0d7e4'/>\n",
                  px(0.0), py(h.hi), kW, kW * (h.hi - h.lo));
    out += buf;
  }
  const char* axis = "stroke='black' stroke-width='1'";
  svg_line(out, px(0), py(0), px(1), py(0), axis);
  svg_line(out, px(0), py(0), px(0), py(1), axis);
  const char* graph = "stroke='#1f4e9c' stroke-width='2'";
  const char* riser = "stroke='#1f4e9c' stroke-width='1' stroke-dasharray='3,3'";
  // Walk jump to jump: dust segment, then the vertical riser at the jump.
  double y_prev = 0.0, v_prev = 0.0, acc = 0.0;
  for (const Jump& j : b.jump_list()) {
    double lo = b.slope() * j.u + acc;
    svg_line(out, px(y_prev), py(v_prev), px(j.u), py(lo), graph);
    svg_line(out, px(j.u), py(lo), px(j.u), py(lo + j.s), riser);
    acc += j.s;
    y_prev = j.u;
    v_prev = lo + j.s;
  }
  svg_line(out, px(y_prev), py(v_prev), px(1.0), py(1.0), graph);
  out += "</svg>\n";
  return out;
}

}
