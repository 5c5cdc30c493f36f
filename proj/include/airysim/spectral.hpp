#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "airysim/rng.hpp"
#include "airysim/tridiag.hpp"

namespace airy {

/// Growth certificate |f(x)| <= c1 exp(c2 x^{1 - delta}), delta in (0, 1).
struct GrowthBound {
  double c1 = 1.0;
  double c2 = 0.0;
  double delta = 0.5;
};

struct TestFunction {
  std::function<double(double)> eval;
  GrowthBound growth;

  double operator()(double x) const { return eval(x); }

  /// Spot-check the certificate on a log grid of x in [1e-3, x_hi].
  bool check_growth(double x_hi = 1e4, int samples = 200) const;

  static TestFunction exponential(double rate);   // e^{-rate x}, rate >= 0
  static TestFunction constant(double c);
  static TestFunction indicator(double lo, double hi);
};

/// pi_N f: entry l = N^{1/6} int over [N^{-1/3} l, N^{-1/3}(l+1)) of f, l = 0..N.
struct ProjectedVector {
  std::int64_t N = 0;
  std::vector<double> entries;
};

/// Adaptive Simpson on [a, b] with relative tolerance `rel_tol` (absolute
/// floor rel_tol * 1e-3 * |coarse estimate| guards integrands near zero).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, int max_depth = 40);

ProjectedVector project_pi_N(const TestFunction& f, std::int64_t N);

/// (M / scale)^k v by k banded matrix-vector products; throws Numeric when an
/// intermediate infinity-norm exceeds 1e300.
std::vector<double> power_apply(const SymTridiagonal& M, std::span<const double> v,
                                std::int64_t k, double scale);

/// One sample of (pi_N f)^T (M / 2 sqrt N)^{floor(T N^{2/3})} (pi_N g) for a
/// fresh ModifiedM matrix drawn from `s`.
double bilinear_form(const TestFunction& f, const TestFunction& g, const ModelSpec& spec, double T,
                     RngStream& s);

/// Same with the projections precomputed (they do not depend on the seed).
double bilinear_form(const ProjectedVector& pf, const ProjectedVector& pg, const ModelSpec& spec,
                     double T, RngStream& s);

/// Number of eigenvalues strictly below x (Sturm sequence of the LDL^T pivots).
std::size_t sturm_count(const SymTridiagonal& M, double x);

/// The q largest eigenvalues (descending) by bisection on Sturm counts, to
/// absolute tolerance 1e-12 * ||M||_inf.
std::vector<double> top_eigenvalues(const SymTridiagonal& M, std::size_t q);

/// Lambda_{j,N} = N^{1/6} (2 sqrt N - lambda_j), j = 1..q, ascending.
std::vector<double> edge_fluctuations(const SymTridiagonal& M, std::size_t q, std::int64_t N);

/// ((lambda / 2 sqrt N)^{floor(T N^{2/3})}, exp(-T Lambda / 2)).
std::pair<double, double> heuristic_power_check(double lambda, double T, std::int64_t N);

/// Entry (l, l2) of (M / scale)^k by explicit enumeration of all index paths
/// with |l_{s-1} - l_s| <= 1. Refuses k > 24 or dim > 12.
double path_sum_entry(const SymTridiagonal& M, std::int64_t k, std::size_t l, std::size_t l2,
                      double scale);

}  // namespace airy
