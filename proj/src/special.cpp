#include "airysim/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "airysim/error.hpp"

namespace airy {

namespace {

constexpr double kSwitch = 5.0;
constexpr int kLevels = 60;

// Tail R(x) of erfc(x) = exp(-x^2)/sqrt(pi) / (x + R(x)), where
// R(x) = (1/2) / (x + 1 / (x + (3/2) / (x + 2 / (x + ...)))).
double laplace_tail(double x) {
  double t = 0.0;
  for (int k = kLevels; k >= 1; --k) t = (0.5 * k) / (x + t);
  return t;
}

}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    if (x < -26.6) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < kSwitch) return std::exp(x * x) * std::erfc(x);
  if (std::isinf(x)) return 0.0;
  return 1.0 / (std::sqrt(std::numbers::pi) * (x + laplace_tail(x)));
}

double mills_complement(double x) {
  require(x >= 0.0, ErrorCode::Domain, "mills_complement needs x >= 0");
  if (x < kSwitch) return 1.0 - std::sqrt(std::numbers::pi) * x * erfcx(x);
  if (std::isinf(x)) return 0.0;
  const double r = laplace_tail(x);
  return r / (x + r);
}

}  // namespace airy
