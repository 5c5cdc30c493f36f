#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "airysim/continuum.hpp"
#include "airysim/montecarlo.hpp"
#include "airysim/rng.hpp"
#include "airysim/spectral.hpp"

namespace airy {

enum class FkMode { Annealed, Quenched };

struct FkParams {
  double beta = 2.0;
  double w = 0.0;
  double T = 1.0;
  std::size_t n_steps = 4096;
  // Level bin width on the natural scale. <= 0 selects sqrt(T / n_steps),
  // which is 2^-6 sqrt(T) at the default 2^12 steps; bins near the
  // step scale keep the binned int L^2 close to unbiased.
  double delta_a = 0.0;
  std::uint64_t n_paths = 100000;
  FkMode mode = FkMode::Annealed;
  unsigned workers = 1;
  std::size_t n_chunks = 64;

  void validate() const;
  double bandwidth() const;
  ChunkPlan plan(const RngStream& s) const;
};

/// Brownian increments of the level noise W on bins [j da, (j+1) da).
/// Increment j is a pure function of (seed, stream, j), so the field is
/// unbounded and can be shared read-only across threads. A field may also
/// carry explicit increments (all levels beyond them are an error).
class NoiseField {
 public:
  static NoiseField generate(double delta_a, std::uint64_t seed, std::uint64_t stream_id);
  static NoiseField explicit_increments(double delta_a, std::vector<double> increments);
  static NoiseField zero(double delta_a);

  double bandwidth() const noexcept { return delta_a_; }
  double increment(std::size_t j) const;
  /// sum_j masses[j] * increment(j), the binned form of int L^a dW_a.
  double integrate(const LocalTimeProfile& profile) const;
  /// W on the grid a_j = j * da, j = 0..n (W_0 = 0).
  GridPath path(std::size_t n) const;

 private:
  enum class Kind { Generated, Explicit, Zero };
  Kind kind_ = Kind::Zero;
  double delta_a_ = 0.0;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::vector<double> increments_;
};

/// Log of the path weight: -int R / 2 + (level term) - w L0 / 2, where the
/// level term is int (L^a)^2 da / (2 beta) (annealed) or
/// int L^a dW_a / sqrt(beta) (quenched).
double log_path_weight(const AbsolutePath& path, const FkParams& p, const NoiseField* noise);

/// (U_T f)(x). Quenched mode requires `noise`; annealed mode ignores it.
MCEstimate fk_apply(const TestFunction& f, double x, const FkParams& p, const NoiseField* noise,
                    RngStream& s);

/// int_0^inf f(x) (U_T g)(x) dx with x drawn from the Exp(rate) law and
/// reweighted by f(x) e^{rate x} / rate.
MCEstimate fk_inner_product(const TestFunction& f, const TestFunction& g, const FkParams& p,
                            const NoiseField* noise, RngStream& s, double rate = 1.0);

struct KernelEstimate {
  MCEstimate kernel;
  /// Fraction of bridges x -> y that reached zero, and its exact value exp(-2xy/T).
  MCEstimate crossing;
  double crossing_expected = 0.0;
};

/// K_T(x, y) = p_T(x - y) E[(1 + 1{bridge x->y touches 0}) weight(|bridge|)].
KernelEstimate kernel_estimate(double x, double y, const FkParams& p, const NoiseField* noise,
                               RngStream& s);

/// sqrt(2 / (pi T)) E[exp(-(T^{3/2}/2)(int r - int L^2 / beta) - sqrt(T) w L0 / 2)]
/// over reflected bridges r on [0, 1] (annealed mean kernel at the origin).
MCEstimate expected_kernel_00(const FkParams& p, RngStream& s);

struct TraceEstimate {
  MCEstimate trace;     // trapezoid over [0, x_max]
  double tail = 0.0;    // estimate of int_{x_max}^inf, reported separately
  std::vector<double> grid;
  std::vector<MCEstimate> diagonal;
};

/// int_0^{x_max} E[K(x, x)] dx on n_x + 1 uniform nodes. The tail assumes the
/// exp(-T x / 2) decay of the potential term beyond x_max.
TraceEstimate trace_estimate(const FkParams& p, double x_max, std::size_t n_x, RngStream& s);

struct SemigroupResidual {
  MCEstimate residual;   // composed - direct
  MCEstimate composed;   // int K_{T1}(x, z) K_{T2}(z, y) dz
  MCEstimate direct;     // K_{T1 + T2}(x, y)
  std::size_t n_z = 0;
};

/// Quenched Chapman-Kolmogorov check for one noise realization. The z
/// integral is a trapezoid sum over a window around the free-kernel product
/// peak; p.n_steps is the step count for T1 + T2 and is split
/// proportionally. p.T is ignored; the level bin width is p.delta_a, or
/// sqrt((T1 + T2) / p.n_steps) when unset, and must match the noise.
SemigroupResidual chapman_kolmogorov_residual(double x, double y, double T1, double T2,
                                              const FkParams& p, const NoiseField& noise,
                                              RngStream& s, double points_per_sd = 5.0);

}  // namespace airy
