#pragma once

#include <array>
#include <cstdint>

namespace airy {

/// Counter-based Philox4x32-10 stream.
///
/// The key is the 64-bit master seed; the 128-bit counter holds a 64-bit
/// block index in its low half and the stream id in its high half. Two
/// streams with equal (master_seed, stream_id) emit identical sequences and
/// distinct stream ids address disjoint counter ranges of the same keyed
/// bijection, so they never overlap.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

/// Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

inline RngStream make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return RngStream(master_seed, stream_id);
}

/// Inverse of the standard normal CDF (Wichura AS241, PPND16; relative
/// accuracy about 1e-16 over (0,1)).
double normal_quantile(double p);

/// Standard normal by inversion: exactly one uniform per variate.
double sample_std_normal(RngStream& s);

/// Gamma(shape, scale 1). Marsaglia-Tsang squeeze/rejection for shape >= 1;
/// shape < 1 boosts to shape + 1 and multiplies by U^{1/shape}.
double sample_gamma(RngStream& s, double shape);

/// Chi variate with `dof` degrees of freedom: sqrt(2 * Gamma(dof/2)).
double sample_chi(RngStream& s, double dof);

/// Local time at zero of a standard reflected Brownian bridge, density
/// (a/4) exp(-a^2/8) on (0, inf), drawn by inversion a = sqrt(-8 ln(1-U)).
double sample_local_time_zero_bridge(RngStream& s);
double local_time_zero_bridge_quantile(double u);

}  // namespace airy
