#include "airysim/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "airysim/error.hpp"

namespace airy {

std::vector<std::int64_t> LatticePath::values() const {
  std::vector<std::int64_t> v(steps.size() + 1);
  v[0] = start;
  for (std::size_t i = 0; i < steps.size(); ++i) v[i + 1] = v[i] + steps[i];
  return v;
}

std::int64_t LatticePath::min_value() const {
  std::int64_t cur = start, best = start;
  for (auto s : steps) best = std::min(best, cur += s);
  return best;
}

LatticePath LatticePath::from_values(const std::vector<std::int64_t>& values, std::int64_t scale_N) {
  require(!values.empty(), ErrorCode::Domain, "path needs at least one value");
  LatticePath p{values[0], {}, scale_N};
  p.steps.reserve(values.size() - 1);
  for (std::size_t i = 1; i < values.size(); ++i) {
    const auto d = values[i] - values[i - 1];
    require(d >= -1 && d <= 1, ErrorCode::Domain, "consecutive values must differ by at most 1");
    p.steps.push_back(static_cast<std::int8_t>(d));
  }
  return p;
}

bool is_lazy_path(const LatticePath& p) {
  if (p.start < 0) return false;
  std::int64_t v = p.start;
  for (auto s : p.steps) {
    if (s == 0 && v != 0) return false;
    v += s;
    if (v < 0) return false;
  }
  return true;
}

bool is_ssrw_path(const LatticePath& p) {
  return std::none_of(p.steps.begin(), p.steps.end(), [](std::int8_t s) { return s == 0; });
}

bool is_twosided_path(const LatticePath& p) {
  std::int64_t v = p.start;
  for (auto s : p.steps) {
    if (s == 0 && v != 0) return false;
    v += s;
  }
  return true;
}

LatticePath sample_walk(WalkKind kind, std::size_t k, std::int64_t start, RngStream& s) {
  require(kind != WalkKind::Lazy || start >= 0, ErrorCode::Domain, "lazy walk needs start >= 0");
  LatticePath p{start, std::vector<std::int8_t>(k), 1};
  std::int64_t v = start;
  std::uint32_t bits = 0;
  int left = 0;
  auto next_bit = [&]() {
    if (left == 0) {
      bits = s.next_u32();
      left = 32;
    }
    const auto b = bits & 1u;
    bits >>= 1;
    --left;
    return b;
  };
  for (std::size_t i = 0; i < k; ++i) {
    std::int8_t step;
    if (v != 0 || kind == WalkKind::Ssrw) {
      step = next_bit() ? 1 : -1;
    } else if (kind == WalkKind::Lazy) {
      step = next_bit() ? 1 : 0;
    } else {
      // stay 1/2, up 1/4, down 1/4
      step = next_bit() ? 0 : (next_bit() ? 1 : -1);
    }
    p.steps[i] = step;
    v += step;
  }
  return p;
}

LatticePath skorokhod_map(const LatticePath& ssrw) {
  require(is_ssrw_path(ssrw), ErrorCode::Domain, "skorokhod_map expects a path without flat steps");
  LatticePath out{ssrw.start, ssrw.steps, ssrw.scale_N};
  std::int64_t v = ssrw.start;
  std::int64_t running_min = std::min<std::int64_t>(0, ssrw.start);
  for (auto& step : out.steps) {
    v += step;
    if (v < running_min) {
      running_min = v;
      step = 0;
    }
  }
  // The start itself may be negative; Gamma then lifts the whole path.
  if (ssrw.start < 0) out.start = 0;
  return out;
}

LatticePath skorokhod_inverse(const LatticePath& lazy) {
  require(is_lazy_path(lazy), ErrorCode::Domain, "skorokhod_inverse expects a lazy-walk path");
  LatticePath out{lazy.start, lazy.steps, lazy.scale_N};
  for (auto& step : out.steps)
    if (step == 0) step = -1;
  return out;
}

std::int64_t horizontal_count(const LatticePath& p) {
  std::int64_t v = p.start, count = 0;
  for (auto s : p.steps) {
    if (s == 0 && v == 0) ++count;
    v += s;
  }
  return count;
}

LatticePath strip_zero_horizontals(const LatticePath& p) {
  LatticePath out{p.start, {}, p.scale_N};
  out.steps.reserve(p.steps.size());
  std::int64_t v = p.start;
  for (auto s : p.steps) {
    if (!(s == 0 && v == 0)) out.steps.push_back(s);
    v += s;
  }
  return out;
}

LatticePath coupled_reflection(const LatticePath& twosided) {
  require(twosided.start >= 0, ErrorCode::Domain, "coupled reflection needs start >= 0");
  auto v = twosided.values();
  for (auto& x : v) x = x < 0 ? -x : x;
  return LatticePath::from_values(v, twosided.scale_N);
}

std::int64_t OccupationProfile::count_at(std::int64_t key) const {
  const auto it = counts.find(key);
  return it == counts.end() ? 0 : it->second;
}

std::int64_t OccupationProfile::total() const {
  std::int64_t t = 0;
  for (const auto& [k, c] : counts) t += c;
  return t;
}

OccupationProfile occupation_profile(const LatticePath& p, LevelLattice lattice) {
  OccupationProfile prof;
  prof.lattice = lattice;
  prof.normalization = 1.0 / std::cbrt(static_cast<double>(p.scale_N));
  std::int64_t v = p.start;
  for (auto s : p.steps) {
    const std::int64_t next = v + s;
    ++prof.counts[lattice == LevelLattice::Integer ? next : std::min(v, next)];
    v = next;
  }
  return prof;
}

std::string format_path(const LatticePath& p) {
  std::ostringstream os;
  os << p.start << ';';
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (i) os << ',';
    os << static_cast<int>(p.steps[i]);
  }
  return os.str();
}

LatticePath parse_path(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' '))
    text.remove_suffix(1);
  const auto semi = text.find(';');
  require(semi != std::string_view::npos, ErrorCode::Domain, "path text must contain ';'");
  LatticePath p;
  const auto head = text.substr(0, semi);
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), p.start);
  require(ec == std::errc() && ptr == head.data() + head.size(), ErrorCode::Domain, "bad path start");
  auto rest = text.substr(semi + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto tok = rest.substr(0, comma);
    int step = 0;
    auto [p2, ec2] = std::from_chars(tok.data(), tok.data() + tok.size(), step);
    require(ec2 == std::errc() && p2 == tok.data() + tok.size() && step >= -1 && step <= 1,
            ErrorCode::Domain, "path steps must be -1, 0 or 1");
    p.steps.push_back(static_cast<std::int8_t>(step));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return p;
}

SkorokhodReport validate_skorokhod(std::size_t k, std::int64_t start) {
  require(k <= 24, ErrorCode::Refused, "exhaustive enumeration limited to k <= 24");
  require(start >= 0, ErrorCode::Domain, "start must be nonnegative");
  SkorokhodReport rep;
  rep.k = k;
  rep.start = start;
  std::unordered_set<std::uint64_t> images;  // base-3 code of the mapped steps
  const std::uint64_t total = std::uint64_t{1} << k;
  LatticePath ssrw{start, std::vector<std::int8_t>(k), 1};
  for (std::uint64_t code = 0; code < total; ++code) {
    for (std::size_t i = 0; i < k; ++i) ssrw.steps[i] = ((code >> i) & 1u) ? 1 : -1;
    const LatticePath lazy = skorokhod_map(ssrw);
    ++rep.paths;
    if (is_lazy_path(lazy)) ++rep.lazy_outputs;
    if (skorokhod_inverse(lazy) == ssrw) ++rep.round_trips;
    if (horizontal_count(lazy) == std::max<std::int64_t>(0, -ssrw.min_value())) ++rep.horizontal_ok;
    std::uint64_t key = 0;
    for (auto s : lazy.steps) key = key * 3 + static_cast<std::uint64_t>(s + 1);
    images.insert(key);
  }
  rep.distinct_images = images.size();
  return rep;
}

}  // namespace airy
