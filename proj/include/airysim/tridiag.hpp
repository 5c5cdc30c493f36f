#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "airysim/rng.hpp"

namespace airy {

/// Symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
class SymTridiagonal {
 public:
  SymTridiagonal() = default;
  SymTridiagonal(std::vector<double> diag, std::vector<double> offdiag);

  std::size_t dim() const noexcept { return diag_.size(); }
  std::span<const double> diag() const noexcept { return diag_; }
  std::span<const double> offdiag() const noexcept { return offdiag_; }
  double diag(std::size_t i) const { return diag_[i]; }
  double offdiag(std::size_t i) const { return offdiag_[i]; }

  /// Entry (i, j) of the full matrix; zero outside the band.
  double at(std::size_t i, std::size_t j) const;
  double inf_norm() const;

  /// Row-major dense copy, for oracles on small instances.
  std::vector<double> dense() const;

  /// CSV with header `index,diag,offdiag`; offdiag left blank on the last row.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> diag_;
  std::vector<double> offdiag_;
};

enum class ModelForm { DumitriuEdelman, SpikedH, ModifiedM };

struct ModelSpec {
  double beta = 2.0;
  double w = 0.0;
  std::int64_t N = 1;
  ModelForm form = ModelForm::ModifiedM;

  void validate() const;
};

/// ell_N = 1 - w N^{-1/3}.
double spike_value(std::int64_t N, double w);

/// floor(T N^{2/3}), robust to the roundoff of N^{2/3} at perfect cubes.
std::int64_t lattice_steps(double T, std::int64_t N);

/// Samplers for the ModifiedM entries a_m (m >= 1) and xi_m (m = 0..N-1).
/// The default is the Gaussian / chi scheme: a_m ~ Normal(0, 2/beta) and
/// sqrt(beta) (sqrt(N-m) + xi_m) ~ chi(beta (N-m)). Custom samplers must
/// meet the centred moment conditions with s_a^2/4 + s_xi^2 = 1/beta; those
/// conditions are not checked.
struct EntrySampler {
  std::function<double(RngStream&, std::int64_t m, const ModelSpec&)> diagonal;
  std::function<double(RngStream&, std::int64_t m, const ModelSpec&)> offdiag_fluct;

  static EntrySampler gaussian_chi();
};

/// The raw randomness of a ModifiedM build: a[0] = 0 by convention,
/// a[1..N] diagonal entries, xi[0..N-1] off-diagonal fluctuations.
struct ModelEntries {
  ModelSpec spec;
  std::vector<double> a;
  std::vector<double> xi;
};

struct Model {
  SymTridiagonal matrix;
  ModelEntries entries;  // populated for ModifiedM only
};

/// Draw the first `rows` rows (m = 0..rows-1) of the ModifiedM entries in the
/// same order build_model consumes the stream, so a truncated draw is a
/// prefix of the full one.
ModelEntries sample_edge_entries(const ModelSpec& spec, std::int64_t rows, RngStream& s,
                                 const EntrySampler& sampler = EntrySampler::gaussian_chi());

Model build_model(const ModelSpec& spec, RngStream& s,
                  const EntrySampler& sampler = EntrySampler::gaussian_chi());

struct GridPath;

/// x -> sqrt(beta) N^{-1/6} sum_{m=0}^{floor(N^{1/3} x)} (a_m/2 + xi_m) on the
/// lattice x in N^{-1/3} {0, 1, ...}, up to x_max.
GridPath noise_partial_sums(const ModelEntries& entries, double x_max);

}  // namespace airy
