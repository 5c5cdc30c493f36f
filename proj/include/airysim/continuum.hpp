#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "airysim/rng.hpp"

namespace airy {

/// Real path sampled on the uniform grid t_i = i * dt, i = 0..n_steps.
struct GridPath {
  double dt = 1.0;
  std::vector<double> values;

  std::size_t n_steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  double horizon() const noexcept { return dt * static_cast<double>(n_steps()); }

  /// CSV `t,value` per row.
  void write_csv(std::ostream& os) const;
};

/// Occupation density of a nonnegative path on bins [j da, (j+1) da).
/// masses[j] is (time spent in bin j) / da, so sum(masses) * da = horizon.
struct LocalTimeProfile {
  double bandwidth = 0.0;
  std::vector<double> masses;
  std::optional<double> L0;  // exact local time at zero when the sampler knows it

  double total_time() const;
  /// sum_j masses[j]^2 * da, the binned version of int (L^a)^2 da.
  double squared_integral() const;
  /// Same profile on bins of width factor * da.
  LocalTimeProfile coarsen(std::size_t factor) const;
};

enum class PathKind { BrownianMotion, Bridge };

/// Brownian motion from `start`, or a Brownian bridge start -> end built by
/// the mean adjustment b_t = start + W_t - (t/T)(W_T - (end - start)).
GridPath sample_path(PathKind kind, double start, std::optional<double> end, double T,
                     std::size_t n_steps, RngStream& s);

struct ReflectedPath {
  GridPath path;
  double L0 = 0.0;
};

/// Discrete Skorokhod map: R_i = B_i + max_{j<=i} (-B_j)_+, L0 = 2 max (-B)_+.
ReflectedPath reflect_with_local_time(const GridPath& p);

/// Minimum over [0, horizon] of the Brownian path interpolating the grid,
/// drawn exactly given the grid: on a segment a -> b of duration dt the
/// minimum is (a + b - sqrt((a - b)^2 - 2 dt ln U)) / 2.
double sample_path_minimum(const GridPath& p, RngStream& s);

/// Local time at zero accumulated by a Brownian bridge segment of duration dt
/// between grid values a and b (signed). Given the endpoints the segment law
/// is explicit: it touches zero with probability exp(-2ab/dt) when ab > 0
/// (surely otherwise), and conditional on touching, z = L / sqrt(dt) satisfies
/// (z + s)^2 = s^2 - 2 ln V with s = (|a| + |b|)/sqrt(dt) and V uniform. The
/// returned value uses the symmetric (semimartingale) normalization of the
/// signed path; the reflected path |B| carries twice this amount.
double segment_local_time(double a, double b, double dt, RngStream& s);

/// Signed path together with the exact-in-law local time at zero of its
/// absolute value, sampled segment by segment conditional on the grid.
struct AbsolutePath {
  GridPath path;       // |signed path|
  double L0 = 0.0;     // local time at zero of |signed path|
  bool touched = false;  // some segment reached zero
};

/// Reflect a signed Brownian-type path by absolute value and draw its local
/// time at zero conditional on the grid values.
AbsolutePath absolute_with_local_time(const GridPath& signed_path, RngStream& s);

/// |Brownian bridge 0 -> 0| on [0, T] with its local time at zero.
AbsolutePath sample_reflected_bridge_with_local_time(double T, std::size_t n_steps, RngStream& s);
GridPath sample_reflected_bridge(double T, std::size_t n_steps, RngStream& s);

/// Binned occupation density computed exactly on the piecewise-linear
/// interpolant. Requires p >= 0.
LocalTimeProfile local_time_profile(const GridPath& p, double bandwidth);

/// Trapezoid rule for int_0^T p dt.
double time_integral(const GridPath& p);

enum class BesselMethod { Modulus, Sde };

struct BesselBridge {
  GridPath b;
  std::optional<GridPath> driving;  // W~ for the SDE route
};

/// Three-dimensional Bessel bridge on [0, 1] from alpha_half to 0.
/// Modulus: norm of a 3-d Brownian bridge from (alpha_half, 0, 0) to the
/// origin (exact law on the grid). Sde: drift-implicit Euler for
/// db = (1/b - b/(1-t)) dt + dW~ with the floor b >= kBesselFloor, run up to
/// t = 1 - dt; the endpoint is pinned to 0.
BesselBridge sample_bessel3_bridge(double alpha_half, std::size_t n_steps, RngStream& s,
                                   BesselMethod method = BesselMethod::Modulus);
inline constexpr double kBesselFloor = 1e-6;

/// int_0^1 (1 - t) / b dt by the trapezoid rule, integrand set to 0 at t = 1.
double bessel_inverse_integral(const GridPath& b);

/// A = sqrt(12) (int r dt - int (L^a)^2 / 2 da) for a reflected bridge on [0, 1].
double functional_A(const GridPath& r, const LocalTimeProfile& profile);

/// Exact-law sampler A = Z - (sqrt 3 / 2) L0, Z standard normal independent of L0.
double sample_A_mixture(RngStream& s);

}  // namespace airy
