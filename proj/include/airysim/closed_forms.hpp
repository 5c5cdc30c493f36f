#pragma once

#include <string_view>

namespace airy {

/// Gaussian law of (int r dt - int L^2/2 da) for a reflected Brownian bridge
/// conditioned on its local time at zero.
struct ConditionalLaw {
  double mean;
  double variance;
};

/// C_{w;T} = sqrt(T) (T - 4w) / (4 sqrt 2).
double kernel00_shift(double w, double T);

/// E[K_T(0,0)] at beta = 2:
/// sqrt(2/(pi T)) e^{T^3/96} (1 + sqrt(pi) C e^{C^2} (erf C + 1)).
double expected_kernel_00_beta2(double w, double T);

ConditionalLaw conditional_law(double alpha);

/// E[exp(kappa A)] = e^{k^2/2} - sqrt(3 pi / 2) k e^{2k^2} erfc(sqrt(3/2) k),
/// evaluated as e^{k^2/2} (1 - sqrt(pi) u erfcx(u)) with u = sqrt(3/2) k.
/// The sqrt(pi) is what the Laplace transform of the L0 density produces and
/// what the moment table requires; without it E[A] would be -sqrt(3/2).
double mgf_A(double kappa);

/// E[(L0)^m] for the reflected-bridge local time at zero: 2^{3m/2} Gamma(1 + m/2).
double moment_L0(int m);

/// E[A^n] from A = Z - (sqrt 3 / 2) L0 by binomial expansion. n in [1, 30].
double moment_A(int n);

/// Odd-moment closed form: E[A^{2n-1}] = -(2^n (2n-1)! / (4 (n-1)!)) sqrt(6 pi).
double odd_moment_A(int n);

/// The printed moment table as (gaussian part, excess) for even orders and
/// the coefficient of -sqrt(6 pi) for odd orders; n in [1, 14].
struct TableEntry {
  int n;
  double gaussian_part;   // even n only
  double excess;          // even n only
  double sqrt6pi_coeff;   // odd n only: E[A^n] = -coeff * sqrt(6 pi)
  double value() const;
};
TableEntry moment_table_entry(int n);
constexpr int kMomentTableSize = 14;

/// P(min of Brownian bridge x -> y on [0,T] <= 0) = exp(-2xy/T).
double bridge_hit_zero_prob(double x, double y, double T);

/// Density on z > 0 of the local time at zero of a unit-time Brownian bridge
/// from x1 to y1 (both >= 0); the remaining mass 1 - e^{-2 x1 y1} is an atom at 0.
double bridge_local_time_density(double z, double x1, double y1);

/// (alpha/4) exp(-alpha^2/8).
double density_L0_reflected_bridge(double alpha);

}  // namespace airy
