#include "airysim/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "airysim/continuum.hpp"
#include "airysim/error.hpp"

namespace airy {

SymTridiagonal::SymTridiagonal(std::vector<double> diag, std::vector<double> offdiag)
    : diag_(std::move(diag)), offdiag_(std::move(offdiag)) {
  require(!diag_.empty(), ErrorCode::Domain, "matrix dimension must be positive");
  require(offdiag_.size() + 1 == diag_.size(), ErrorCode::DimMismatch,
          "offdiag length must be dim - 1");
  const auto finite = [](double v) { return std::isfinite(v); };
  require(std::all_of(diag_.begin(), diag_.end(), finite) &&
              std::all_of(offdiag_.begin(), offdiag_.end(), finite),
          ErrorCode::Numeric, "matrix entries must be finite");
}

double SymTridiagonal::at(std::size_t i, std::size_t j) const {
  if (i == j) return diag_[i];
  if (i + 1 == j) return offdiag_[i];
  if (j + 1 == i) return offdiag_[j];
  return 0.0;
}

double SymTridiagonal::inf_norm() const {
  double best = 0.0;
  const std::size_t n = dim();
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::fabs(diag_[i]);
    if (i > 0) row += std::fabs(offdiag_[i - 1]);
    if (i + 1 < n) row += std::fabs(offdiag_[i]);
    best = std::max(best, row);
  }
  return best;
}

std::vector<double> SymTridiagonal::dense() const {
  const std::size_t n = dim();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = at(i, j);
  return out;
}

void SymTridiagonal::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "index,diag,offdiag\n";
  for (std::size_t i = 0; i < dim(); ++i) {
    os << i << ',' << diag_[i] << ',';
    if (i + 1 < dim()) os << offdiag_[i];
    os << '\n';
  }
  os.precision(old);
}

void ModelSpec::validate() const {
  require(beta > 0 && std::isfinite(beta), ErrorCode::Domain, "beta must be positive");
  require(std::isfinite(w), ErrorCode::Domain, "w must be finite");
  require(N >= 1, ErrorCode::Domain, "N must be >= 1");
}

double spike_value(std::int64_t N, double w) {
  require(N >= 1, ErrorCode::Domain, "N must be >= 1");
  return 1.0 - w / std::cbrt(static_cast<double>(N));
}

std::int64_t lattice_steps(double T, std::int64_t N) {
  require(T >= 0 && std::isfinite(T), ErrorCode::Domain, "T must be nonnegative");
  require(N >= 1, ErrorCode::Domain, "N must be >= 1");
  const double c = std::cbrt(static_cast<double>(N));
  const double raw = T * c * c;
  return static_cast<std::int64_t>(std::floor(raw * (1.0 + 1e-12)));
}

EntrySampler EntrySampler::gaussian_chi() {
  EntrySampler e;
  e.diagonal = [](RngStream& s, std::int64_t, const ModelSpec& spec) {
    return std::sqrt(2.0 / spec.beta) * sample_std_normal(s);
  };
  e.offdiag_fluct = [](RngStream& s, std::int64_t m, const ModelSpec& spec) {
    const double dof = spec.beta * static_cast<double>(spec.N - m);
    return sample_chi(s, dof) / std::sqrt(spec.beta) - std::sqrt(static_cast<double>(spec.N - m));
  };
  return e;
}

ModelEntries sample_edge_entries(const ModelSpec& spec, std::int64_t rows, RngStream& s,
                                 const EntrySampler& sampler) {
  spec.validate();
  require(rows >= 0 && rows <= spec.N + 1, ErrorCode::Domain, "rows must lie in [0, N+1]");
  ModelEntries e{spec, {}, {}};
  e.a.reserve(rows);
  e.xi.reserve(rows);
  for (std::int64_t m = 0; m < rows; ++m) {
    e.a.push_back(m == 0 ? 0.0 : sampler.diagonal(s, m, spec));
    if (m < spec.N) e.xi.push_back(sampler.offdiag_fluct(s, m, spec));
  }
  return e;
}

namespace {

SymTridiagonal dumitriu_edelman(const ModelSpec& spec, RngStream& s) {
  const auto n = static_cast<std::size_t>(spec.N);
  const double inv_sqrt_beta = 1.0 / std::sqrt(spec.beta);
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = std::sqrt(2.0) * sample_std_normal(s) * inv_sqrt_beta;
    if (i + 1 < n) off[i] = sample_chi(s, spec.beta * static_cast<double>(n - 1 - i)) * inv_sqrt_beta;
  }
  return {std::move(diag), std::move(off)};
}

}  // namespace

Model build_model(const ModelSpec& spec, RngStream& s, const EntrySampler& sampler) {
  spec.validate();
  Model out;
  const double top = std::sqrt(static_cast<double>(spec.N)) * spike_value(spec.N, spec.w);
  switch (spec.form) {
    case ModelForm::DumitriuEdelman:
      out.matrix = dumitriu_edelman(spec, s);
      break;
    case ModelForm::SpikedH: {
      auto m = dumitriu_edelman(spec, s);
      std::vector<double> diag(m.diag().begin(), m.diag().end());
      diag[0] += top;
      out.matrix = SymTridiagonal(std::move(diag), {m.offdiag().begin(), m.offdiag().end()});
      break;
    }
    case ModelForm::ModifiedM: {
      out.entries = sample_edge_entries(spec, spec.N + 1, s, sampler);
      const auto n = static_cast<std::size_t>(spec.N) + 1;
      std::vector<double> diag(n), off(n - 1);
      diag[0] = top;
      for (std::size_t m = 1; m < n; ++m) diag[m] = out.entries.a[m];
      for (std::size_t m = 0; m + 1 < n; ++m)
        off[m] = std::sqrt(static_cast<double>(spec.N - static_cast<std::int64_t>(m))) +
                 out.entries.xi[m];
      out.matrix = SymTridiagonal(std::move(diag), std::move(off));
      break;
    }
  }
  return out;
}

GridPath noise_partial_sums(const ModelEntries& entries, double x_max) {
  const auto& spec = entries.spec;
  require(x_max >= 0 && std::isfinite(x_max), ErrorCode::Domain, "x_max must be nonnegative");
  const double c = std::cbrt(static_cast<double>(spec.N));
  const auto last = static_cast<std::int64_t>(std::floor(x_max * c * (1.0 + 1e-12)));
  require(last <= spec.N, ErrorCode::Domain, "x_max N^{1/3} exceeds N");
  require(last < static_cast<std::int64_t>(entries.a.size()), ErrorCode::Domain,
          "not enough sampled rows for x_max");
  const double scale = std::sqrt(spec.beta) / std::sqrt(c);  // sqrt(beta) N^{-1/6}
  std::vector<double> values(static_cast<std::size_t>(last) + 1);
  double sum = 0.0;
  for (std::int64_t m = 0; m <= last; ++m) {
    sum += 0.5 * entries.a[m];
    if (m < static_cast<std::int64_t>(entries.xi.size())) sum += entries.xi[m];
    values[m] = scale * sum;
  }
  return GridPath{1.0 / c, std::move(values)};
}

}  // namespace airy
