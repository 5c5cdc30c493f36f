#pragma once

namespace airy {

// erf / erfc come from libm (correctly rounded to a few ulp in glibc). The
// scaled forms below are what the closed-form expressions actually need:
// they multiply exp(x^2)-sized factors against erfc-sized ones.

/// exp(x^2) * erfc(x). Direct product for x < 5, Laplace continued fraction
/// (60 levels, bottom-up) beyond. Negative x uses 2 exp(x^2) - erfcx(-x).
double erfcx(double x);

/// 1 - sqrt(pi) * x * erfcx(x) for x >= 0, without the cancellation that
/// the direct difference suffers as x grows (value ~ 1 / (2 x^2)).
double mills_complement(double x);

}  // namespace airy
