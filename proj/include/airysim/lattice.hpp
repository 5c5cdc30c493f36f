#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "airysim/rng.hpp"

namespace airy {

/// Integer path stored as a start value and unit steps in {-1, 0, +1}.
/// scale_N records the normalization context (space unit N^{-1/3}, time
/// unit N^{-2/3}); it does not affect the combinatorics.
struct LatticePath {
  std::int64_t start = 0;
  std::vector<std::int8_t> steps;
  std::int64_t scale_N = 1;

  std::size_t length() const noexcept { return steps.size(); }
  std::vector<std::int64_t> values() const;
  std::int64_t min_value() const;

  static LatticePath from_values(const std::vector<std::int64_t>& values, std::int64_t scale_N = 1);
  bool operator==(const LatticePath& o) const { return start == o.start && steps == o.steps; }
};

/// Nonnegative, with flat steps only at value 0.
bool is_lazy_path(const LatticePath& p);
/// No flat steps.
bool is_ssrw_path(const LatticePath& p);
/// Flat steps only at value 0 (values may be negative).
bool is_twosided_path(const LatticePath& p);

enum class WalkKind { Lazy, Ssrw, TwoSided };

/// Lazy: at 0 stay or step up with probability 1/2 each, else +-1.
/// Ssrw: +-1. TwoSided: at 0 up 1/4, down 1/4, stay 1/2, else +-1.
LatticePath sample_walk(WalkKind kind, std::size_t k, std::int64_t start, RngStream& s);

/// Discrete Skorokhod map Gamma(Z)_i = Z_i + max_{j<=i} (-Z_j)_+. Each first
/// visit of a new negative running minimum becomes a flat step at zero.
LatticePath skorokhod_map(const LatticePath& ssrw);

/// Inverse of skorokhod_map: each flat step at zero becomes a down step to a
/// new running minimum.
LatticePath skorokhod_inverse(const LatticePath& lazy);

/// Number of steps i with value_{i-1} = value_i = 0.
std::int64_t horizontal_count(const LatticePath& p);

/// Drop every flat step at zero.
LatticePath strip_zero_horizontals(const LatticePath& p);

/// Pointwise absolute value of a two-sided path started at a nonnegative point.
LatticePath coupled_reflection(const LatticePath& twosided);

enum class LevelLattice { Integer, HalfInteger };

/// Visit counts per level. Integer: values at times 1..k. HalfInteger: for
/// each step, the level min(v_{i-1}, v_i) + 1/2 (stored by its lower
/// integer). Counts sum to k either way.
struct OccupationProfile {
  LevelLattice lattice = LevelLattice::Integer;
  std::map<std::int64_t, std::int64_t> counts;
  double normalization = 1.0;  // N^{-1/3}

  double level(std::int64_t key) const {
    return lattice == LevelLattice::Integer ? static_cast<double>(key) : static_cast<double>(key) + 0.5;
  }
  std::int64_t count_at(std::int64_t key) const;
  std::int64_t total() const;
};

OccupationProfile occupation_profile(const LatticePath& p, LevelLattice lattice);

/// `start;s1,s2,...,sk`.
std::string format_path(const LatticePath& p);
LatticePath parse_path(std::string_view text);

/// Outcome of the exhaustive check of the discrete bijection over all 2^k
/// simple-walk paths from `start`.
struct SkorokhodReport {
  std::size_t k = 0;
  std::int64_t start = 0;
  std::uint64_t paths = 0;
  std::uint64_t round_trips = 0;     // inverse(map(p)) == p
  std::uint64_t lazy_outputs = 0;    // map(p) satisfies the lazy invariants
  std::uint64_t distinct_images = 0;
  std::uint64_t horizontal_ok = 0;   // H(map(p)) == max(0, -min p)
  bool ok() const {
    return round_trips == paths && lazy_outputs == paths && distinct_images == paths &&
           horizontal_ok == paths;
  }
};

SkorokhodReport validate_skorokhod(std::size_t k, std::int64_t start);

}  // namespace airy
