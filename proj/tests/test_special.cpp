#include <doctest.h>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "airysim/special.hpp"

using namespace airy;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

double erfcx_oracle(double x) {
  const big X = x;
  return static_cast<double>(boost::multiprecision::exp(X * X) * boost::math::erfc(X));
}

double mills_oracle(double x) {
  const big X = x;
  const big v = 1 - boost::multiprecision::sqrt(boost::math::constants::pi<big>()) * X *
                        boost::multiprecision::exp(X * X) * boost::math::erfc(X);
  return static_cast<double>(v);
}

}  // namespace

TEST_CASE("erfcx against a 50-digit oracle") {
  double worst = 0;
  for (double x = -6.0; x <= 6.0; x += 0.0625) worst = std::max(worst, std::fabs(erfcx(x) / erfcx_oracle(x) - 1));
  for (double x : {7.0, 10.0, 26.0, 100.0, 1e3, 1e5, 1e8}) worst = std::max(worst, std::fabs(erfcx(x) / erfcx_oracle(x) - 1));
  CHECK(worst < 1e-13);
  CHECK(erfcx(0.0) == 1.0);
  CHECK(std::isinf(erfcx(-30.0)));
}

TEST_CASE("1 - sqrt(pi) x erfcx(x) without cancellation") {
  double worst = 0;
  for (double x : {0.0, 0.5, 1.0, 2.0, 4.9, 5.1, 8.0, 20.0, 1e3, 1e6}) {
    const double o = mills_oracle(x);
    worst = std::max(worst, std::fabs(mills_complement(x) - o) / std::fabs(o));
  }
  CHECK(worst < 1e-12);
  // Leading asymptotics 1/(2x^2) for large x.
  CHECK(mills_complement(1e4) == doctest::Approx(0.5e-8).epsilon(1e-6));
}
