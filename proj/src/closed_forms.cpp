#include "airysim/closed_forms.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "airysim/error.hpp"
#include "airysim/special.hpp"

namespace airy {

namespace {

const double kSqrt6Pi = std::sqrt(6.0 * std::numbers::pi);

double double_factorial_odd(int j) {  // (j-1)!! for even j, E[Z^j]
  double v = 1.0;
  for (int i = j - 1; i > 1; i -= 2) v *= i;
  return v;
}

double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

}  // namespace

double kernel00_shift(double w, double T) {
  return std::sqrt(T) * (T - 4.0 * w) / (4.0 * std::numbers::sqrt2);
}

double expected_kernel_00_beta2(double w, double T) {
  require(T > 0 && std::isfinite(T), ErrorCode::Domain, "T must be positive");
  const double c = kernel00_shift(w, T);
  const double pre = std::sqrt(2.0 / (std::numbers::pi * T)) * std::exp(T * T * T / 96.0);
  // e^{C^2}(erf C + 1) = erfcx(-C); for C < 0 the bracket is a small difference.
  const double bracket = c >= 0.0 ? 1.0 + std::sqrt(std::numbers::pi) * c * erfcx(-c)
                                  : mills_complement(-c);
  return pre * bracket;
}

ConditionalLaw conditional_law(double alpha) {
  require(alpha >= 0.0, ErrorCode::Domain, "alpha must be nonnegative");
  return {-alpha / 4.0, 1.0 / 12.0};
}

double mgf_A(double kappa) {
  const double u = std::sqrt(1.5) * kappa;
  const double bracket = u >= 0.0 ? mills_complement(u)
                                  : 1.0 - std::sqrt(std::numbers::pi) * u * erfcx(u);
  return std::exp(0.5 * kappa * kappa) * bracket;
}

double moment_L0(int m) {
  require(m >= 0, ErrorCode::Domain, "moment order must be nonnegative");
  return std::pow(2.0, 1.5 * m) * std::tgamma(1.0 + 0.5 * m);
}

double moment_A(int n) {
  require(n >= 1, ErrorCode::Domain, "moment order must be >= 1");
  require(n <= 30, ErrorCode::Domain, "moment order above 30 exceeds the factorial guard");
  const double c = std::sqrt(3.0) / 2.0;
  double sum = 0.0;
  for (int j = 0; j <= n; j += 2) {
    const int m = n - j;
    sum += binomial(n, j) * double_factorial_odd(j) * std::pow(-c, m) * moment_L0(m);
  }
  return sum;
}

double odd_moment_A(int n) {
  require(n >= 1 && n <= 15, ErrorCode::Domain, "odd-moment index must lie in [1, 15]");
  double ratio = 1.0;  // (2n-1)! / (n-1)!
  for (int i = n; i <= 2 * n - 1; ++i) ratio *= i;
  return -std::ldexp(ratio, n) / 4.0 * kSqrt6Pi;
}

double TableEntry::value() const {
  if (n % 2 == 1) return -sqrt6pi_coeff * kSqrt6Pi;
  return gaussian_part + excess;
}

TableEntry moment_table_entry(int n) {
  // Decomposed exactly as printed: odd rows as multiples of -sqrt(6 pi),
  // even rows as (standard Gaussian moment) + (excess).
  static constexpr std::array<std::array<double, 2>, kMomentTableSize> rows = {{
      {0.5, 0},
      {1, 6},
      {6, 0},
      {3, 108},
      {120, 0},
      {15, 2646},
      {3360, 0},
      {105, 85032},
      {120960, 0},
      {945, 3404430},
      {5322240, 0},
      {10395, 163446660},
      {276756480, 0},
      {135135, 9153449550.0},
  }};
  require(n >= 1 && n <= kMomentTableSize, ErrorCode::Domain, "table covers orders 1..14");
  const auto& r = rows[n - 1];
  if (n % 2 == 1) return {n, 0.0, 0.0, r[0]};
  return {n, r[0], r[1], 0.0};
}

double bridge_hit_zero_prob(double x, double y, double T) {
  require(T > 0, ErrorCode::Domain, "T must be positive");
  require(x >= 0 && y >= 0, ErrorCode::Domain, "endpoints must be nonnegative");
  return std::exp(-2.0 * x * y / T);
}

double bridge_local_time_density(double z, double x1, double y1) {
  require(z > 0, ErrorCode::Domain, "density defined for z > 0");
  const double s = z + x1 + y1;
  const double d = x1 - y1;
  return s * std::exp(0.5 * (d * d - s * s));
}

double density_L0_reflected_bridge(double alpha) {
  require(alpha > 0, ErrorCode::Domain, "alpha must be positive");
  return alpha / 4.0 * std::exp(-alpha * alpha / 8.0);
}

}  // namespace airy
