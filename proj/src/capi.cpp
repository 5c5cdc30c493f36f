#include "airysim/airysim.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "airysim/closed_forms.hpp"
#include "airysim/continuum.hpp"
#include "airysim/error.hpp"
#include "airysim/experiments.hpp"
#include "airysim/feynman_kac.hpp"
#include "airysim/lattice.hpp"
#include "airysim/montecarlo.hpp"
#include "airysim/spectral.hpp"
#include "airysim/tridiag.hpp"

struct airy_matrix {
  airy::Model model;
};

struct airy_noise {
  airy::NoiseField field;
};

namespace {

thread_local std::string g_last_error;

airy_status to_status(airy::ErrorCode c) {
  switch (c) {
    case airy::ErrorCode::Domain: return AIRY_ERR_DOMAIN;
    case airy::ErrorCode::Usage: return AIRY_ERR_USAGE;
    case airy::ErrorCode::Numeric: return AIRY_ERR_NUMERIC;
    case airy::ErrorCode::Refused: return AIRY_ERR_REFUSED;
    case airy::ErrorCode::DimMismatch: return AIRY_ERR_DIM;
  }
  return AIRY_ERR_INTERNAL;
}

template <typename F>
airy_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return AIRY_OK;
  } catch (const airy::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AIRY_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AIRY_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return AIRY_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) airy::fail(airy::ErrorCode::Usage, std::string(name) + " must not be null");
}

airy::TestFunction wrap(const airy_test_function& f) {
  need(reinterpret_cast<const void*>(f.fn), "test function");
  airy::TestFunction t;
  t.eval = [fn = f.fn, user = f.user](double x) { return fn(x, user); };
  t.growth = airy::GrowthBound{f.c1, f.c2, f.delta};
  return t;
}

airy::FkParams to_params(const airy_fk_params* p) {
  need(p, "params");
  airy::FkParams q;
  q.beta = p->beta;
  q.w = p->w;
  q.T = p->T;
  q.n_steps = p->n_steps;
  q.delta_a = p->delta_a;
  q.n_paths = p->n_paths;
  q.mode = p->quenched ? airy::FkMode::Quenched : airy::FkMode::Annealed;
  q.workers = p->workers == 0 ? 1 : p->workers;
  return q;
}

void put(airy_estimate* out, const airy::MCEstimate& e) {
  if (out) *out = airy_estimate{e.mean, e.std_error, e.n, e.seed};
}

void copy_text(const std::string& s, char* out, size_t cap) {
  need(out, "out");
  if (s.size() + 1 > cap) airy::fail(airy::ErrorCode::DimMismatch, "output buffer too small");
  std::memcpy(out, s.c_str(), s.size() + 1);
}

airy::ChunkPlan plan_for(uint64_t seed, uint64_t stream, unsigned workers) {
  return airy::ChunkPlan{seed, stream, 64, workers == 0 ? 1u : workers};
}

}  // namespace

extern "C" {

const char* airy_last_error(void) { return g_last_error.c_str(); }
const char* airy_version(void) { return "0.1.0"; }

airy_status airy_matrix_build(double beta, double w, int64_t N, airy_model_form form, uint64_t seed,
                              uint64_t stream, airy_matrix** out) {
  return guarded([&] {
    need(out, "out");
    airy::ModelSpec spec{beta, w, N, static_cast<airy::ModelForm>(form)};
    if (form < AIRY_FORM_DUMITRIU_EDELMAN || form > AIRY_FORM_MODIFIED_M)
      airy::fail(airy::ErrorCode::Usage, "unknown model form");
    airy::RngStream s(seed, stream);
    auto* m = new airy_matrix{airy::build_model(spec, s)};
    *out = m;
  });
}

airy_status airy_matrix_from_bands(const double* diag, const double* offdiag, size_t dim, airy_matrix** out) {
  return guarded([&] {
    need(out, "out");
    need(diag, "diag");
    if (dim > 1) need(offdiag, "offdiag");
    std::vector<double> d(diag, diag + dim);
    std::vector<double> e(offdiag, offdiag + (dim > 0 ? dim - 1 : 0));
    *out = new airy_matrix{airy::Model{airy::SymTridiagonal(std::move(d), std::move(e)), {}}};
  });
}

void airy_matrix_free(airy_matrix* m) { delete m; }

airy_status airy_matrix_dim(const airy_matrix* m, size_t* out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    *out = m->model.matrix.dim();
  });
}

airy_status airy_matrix_diag(const airy_matrix* m, double* out, size_t len) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    const auto d = m->model.matrix.diag();
    if (len != d.size()) airy::fail(airy::ErrorCode::DimMismatch, "diag length mismatch");
    std::copy(d.begin(), d.end(), out);
  });
}

airy_status airy_matrix_offdiag(const airy_matrix* m, double* out, size_t len) {
  return guarded([&] {
    need(m, "matrix");
    const auto e = m->model.matrix.offdiag();
    if (len != e.size()) airy::fail(airy::ErrorCode::DimMismatch, "offdiag length mismatch");
    if (len) need(out, "out");
    std::copy(e.begin(), e.end(), out);
  });
}

airy_status airy_matrix_write_csv(const airy_matrix* m, const char* path) {
  return guarded([&] {
    need(m, "matrix");
    need(path, "path");
    std::ofstream os(path);
    if (!os) airy::fail(airy::ErrorCode::Usage, std::string("cannot open ") + path);
    m->model.matrix.write_csv(os);
  });
}

airy_status airy_matrix_power_apply(const airy_matrix* m, const double* v, size_t len, int64_t k, double scale,
                                    double* out) {
  return guarded([&] {
    need(m, "matrix");
    need(v, "v");
    need(out, "out");
    const auto r = airy::power_apply(m->model.matrix, std::span<const double>(v, len), k, scale);
    std::copy(r.begin(), r.end(), out);
  });
}

airy_status airy_matrix_path_sum_entry(const airy_matrix* m, int64_t k, size_t l, size_t l2, double scale,
                                       double* out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    *out = airy::path_sum_entry(m->model.matrix, k, l, l2, scale);
  });
}

airy_status airy_matrix_top_eigenvalues(const airy_matrix* m, size_t q, double* out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    const auto ev = airy::top_eigenvalues(m->model.matrix, q);
    std::copy(ev.begin(), ev.end(), out);
  });
}

airy_status airy_matrix_edge_fluctuations(const airy_matrix* m, size_t q, int64_t N, double* out) {
  return guarded([&] {
    need(m, "matrix");
    need(out, "out");
    const auto ev = airy::edge_fluctuations(m->model.matrix, q, N);
    std::copy(ev.begin(), ev.end(), out);
  });
}

airy_status airy_matrix_noise_path(const airy_matrix* m, double x_max, double* dt, double* out, size_t cap,
                                   size_t* len) {
  return guarded([&] {
    need(m, "matrix");
    need(len, "len");
    if (m->model.entries.xi.empty())
      airy::fail(airy::ErrorCode::Usage, "noise path needs a ModifiedM build");
    const airy::GridPath g = airy::noise_partial_sums(m->model.entries, x_max);
    if (out != nullptr) {
      if (cap < g.values.size()) airy::fail(airy::ErrorCode::DimMismatch, "output buffer too small");
      std::copy(g.values.begin(), g.values.end(), out);
    }
    if (dt) *dt = g.dt;
    *len = g.values.size();
  });
}

airy_status airy_lattice_steps(double T, int64_t N, int64_t* out) {
  return guarded([&] {
    need(out, "out");
    *out = airy::lattice_steps(T, N);
  });
}

airy_status airy_heuristic_power_check(double lambda, double T, int64_t N, double* power, double* semigroup) {
  return guarded([&] {
    const auto [a, b] = airy::heuristic_power_check(lambda, T, N);
    if (power) *power = a;
    if (semigroup) *semigroup = b;
  });
}

airy_status airy_project(airy_test_function f, int64_t N, double* out, size_t len) {
  return guarded([&] {
    need(out, "out");
    const auto pv = airy::project_pi_N(wrap(f), N);
    if (len != pv.entries.size()) airy::fail(airy::ErrorCode::DimMismatch, "projection length is N + 1");
    std::copy(pv.entries.begin(), pv.entries.end(), out);
  });
}

airy_status airy_bilinear_form(airy_test_function f, airy_test_function g, double beta, double w, int64_t N,
                               double T, uint64_t seed, uint64_t stream, double* out) {
  return guarded([&] {
    need(out, "out");
    airy::RngStream s(seed, stream);
    *out = airy::bilinear_form(wrap(f), wrap(g), airy::ModelSpec{beta, w, N, airy::ModelForm::ModifiedM}, T, s);
  });
}

airy_status airy_bilinear_mean(airy_test_function f, airy_test_function g, double beta, double w, int64_t N,
                               double T, uint64_t seed, uint64_t stream, uint64_t n_seeds, unsigned workers,
                               airy_estimate* out) {
  return guarded([&] {
    need(out, "out");
    if (n_seeds < 2) airy::fail(airy::ErrorCode::Domain, "need at least two matrix seeds");
    const airy::ModelSpec spec{beta, w, N, airy::ModelForm::ModifiedM};
    spec.validate();
    const auto pf = airy::project_pi_N(wrap(f), N);
    const auto pg = airy::project_pi_N(wrap(g), N);
    // One matrix per chunk so that matrix i is fixed by (seed, stream, i).
    airy::ChunkPlan plan{seed, stream, static_cast<std::size_t>(n_seeds), workers == 0 ? 1u : workers};
    std::vector<double> vals(n_seeds);
    airy::for_each_chunk(plan, [&](std::size_t i, airy::RngStream& s) { vals[i] = airy::bilinear_form(pf, pg, spec, T, s); });
    airy::RunningMoments acc;
    for (double v : vals) acc.add(v);
    put(out, airy::MCEstimate{acc.mean, acc.std_error(), acc.n, seed});
  });
}

void airy_fk_params_default(airy_fk_params* p) {
  if (!p) return;
  const airy::FkParams d;
  *p = airy_fk_params{d.beta, d.w, d.T, d.n_steps, d.delta_a, d.n_paths, 0, 1};
}

airy_status airy_noise_generate(double delta_a, uint64_t seed, uint64_t stream, airy_noise** out) {
  return guarded([&] {
    need(out, "out");
    *out = new airy_noise{airy::NoiseField::generate(delta_a, seed, stream)};
  });
}

airy_status airy_noise_zero(double delta_a, airy_noise** out) {
  return guarded([&] {
    need(out, "out");
    *out = new airy_noise{airy::NoiseField::zero(delta_a)};
  });
}

void airy_noise_free(airy_noise* n) { delete n; }

airy_status airy_noise_values(const airy_noise* n, size_t count, double* out) {
  return guarded([&] {
    need(n, "noise");
    need(out, "out");
    const auto g = n->field.path(count);
    std::copy(g.values.begin(), g.values.end(), out);
  });
}

airy_status airy_fk_apply(airy_test_function f, double x, const airy_fk_params* p, const airy_noise* noise,
                          uint64_t seed, uint64_t stream, airy_estimate* out) {
  return guarded([&] {
    airy::RngStream s(seed, stream);
    put(out, airy::fk_apply(wrap(f), x, to_params(p), noise ? &noise->field : nullptr, s));
  });
}

airy_status airy_fk_inner_product(airy_test_function f, airy_test_function g, double rate, const airy_fk_params* p,
                                  const airy_noise* noise, uint64_t seed, uint64_t stream, airy_estimate* out) {
  return guarded([&] {
    airy::RngStream s(seed, stream);
    put(out, airy::fk_inner_product(wrap(f), wrap(g), to_params(p), noise ? &noise->field : nullptr, s, rate));
  });
}

airy_status airy_kernel_estimate(double x, double y, const airy_fk_params* p, const airy_noise* noise, uint64_t seed,
                                 uint64_t stream, airy_estimate* kernel, airy_estimate* crossing,
                                 double* crossing_expected) {
  return guarded([&] {
    airy::RngStream s(seed, stream);
    const auto k = airy::kernel_estimate(x, y, to_params(p), noise ? &noise->field : nullptr, s);
    put(kernel, k.kernel);
    put(crossing, k.crossing);
    if (crossing_expected) *crossing_expected = k.crossing_expected;
  });
}

airy_status airy_expected_kernel_00(const airy_fk_params* p, uint64_t seed, uint64_t stream, airy_estimate* out) {
  return guarded([&] {
    airy::RngStream s(seed, stream);
    put(out, airy::expected_kernel_00(to_params(p), s));
  });
}

airy_status airy_trace_estimate(const airy_fk_params* p, double x_max, size_t n_x, uint64_t seed, uint64_t stream,
                                airy_estimate* out, double* tail) {
  return guarded([&] {
    airy::RngStream s(seed, stream);
    const auto t = airy::trace_estimate(to_params(p), x_max, n_x, s);
    put(out, t.trace);
    if (tail) *tail = t.tail;
  });
}

airy_status airy_semigroup_residual(double x, double y, double T1, double T2, const airy_fk_params* p,
                                    const airy_noise* noise, uint64_t seed, uint64_t stream, airy_estimate* residual,
                                    airy_estimate* composed, airy_estimate* direct) {
  return guarded([&] {
    need(noise, "noise");
    airy::RngStream s(seed, stream);
    const auto r = airy::chapman_kolmogorov_residual(x, y, T1, T2, to_params(p), noise->field, s);
    put(residual, r.residual);
    put(composed, r.composed);
    put(direct, r.direct);
  });
}

airy_status airy_expected_kernel_00_beta2(double w, double T, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = airy::expected_kernel_00_beta2(w, T);
  });
}

airy_status airy_conditional_law(double alpha, double* mean, double* variance) {
  return guarded([&] {
    const auto law = airy::conditional_law(alpha);
    if (mean) *mean = law.mean;
    if (variance) *variance = law.variance;
  });
}

airy_status airy_mgf_A(double kappa, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = airy::mgf_A(kappa);
  });
}

airy_status airy_moment_A(int n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = airy::moment_A(n);
  });
}

airy_status airy_odd_moment_A(int n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = airy::odd_moment_A(n);
  });
}

airy_status airy_moment_L0(int m, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = airy::moment_L0(m);
  });
}

airy_status airy_moment_table_entry(int n, airy_table_entry* out) {
  return guarded([&] {
    need(out, "out");
    const auto e = airy::moment_table_entry(n);
    *out = airy_table_entry{e.n, e.gaussian_part, e.excess, e.sqrt6pi_coeff, e.value()};
  });
}

int airy_moment_table_size(void) { return airy::kMomentTableSize; }

airy_status airy_mixture_moments(uint64_t n_draws, int max_order, uint64_t seed, unsigned workers, double* means,
                                  double* std_errors) {
  return guarded([&] {
    need(means, "means");
    if (max_order < 1 || max_order > 15) airy::fail(airy::ErrorCode::Domain, "max_order must be in [1, 15]");
    if (n_draws < 2) airy::fail(airy::ErrorCode::Domain, "need at least two draws");
    const auto acc = airy::mc_reduce<airy::PowerSums>(
        plan_for(seed, 0, workers), n_draws, [&] { return airy::PowerSums(2 * max_order); },
        [](airy::PowerSums& ps, airy::RngStream& s) { ps.add(airy::sample_A_mixture(s)); });
    for (int p = 1; p <= max_order; ++p) {
      means[p - 1] = acc.moment(p);
      if (std_errors) std_errors[p - 1] = acc.moment_std_error(p);
    }
  });
}

airy_status airy_skorokhod_map_text(const char* path, char* out, size_t cap) {
  return guarded([&] {
    need(path, "path");
    copy_text(airy::format_path(airy::skorokhod_map(airy::parse_path(path))), out, cap);
  });
}

airy_status airy_skorokhod_inverse_text(const char* path, char* out, size_t cap) {
  return guarded([&] {
    need(path, "path");
    copy_text(airy::format_path(airy::skorokhod_inverse(airy::parse_path(path))), out, cap);
  });
}

airy_status airy_strip_zero_horizontals_text(const char* path, char* out, size_t cap) {
  return guarded([&] {
    need(path, "path");
    copy_text(airy::format_path(airy::strip_zero_horizontals(airy::parse_path(path))), out, cap);
  });
}

airy_status airy_horizontal_count_text(const char* path, int64_t* out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = airy::horizontal_count(airy::parse_path(path));
  });
}

airy_status airy_validate_skorokhod(size_t k, int64_t start, airy_skorokhod_report* out) {
  return guarded([&] {
    need(out, "out");
    const auto r = airy::validate_skorokhod(k, start);
    *out = airy_skorokhod_report{r.k,           r.start,           r.paths,         r.round_trips,
                                 r.lazy_outputs, r.distinct_images, r.horizontal_ok, r.ok() ? 1 : 0};
  });
}

airy_status airy_conditional_law_check(airy_law_route route, double alpha, double half_width, uint64_t n,
                                       size_t n_steps, double bandwidth, uint64_t seed, unsigned workers,
                                       airy_moment_check* out) {
  return guarded([&] {
    need(out, "out");
    const auto plan = plan_for(seed, static_cast<uint64_t>(route), workers);
    airy::GaussianMomentCheck c;
    switch (route) {
      case AIRY_ROUTE_BESSEL_MODULUS:
        c = airy::conditional_law_bessel_route(alpha, n, n_steps, airy::BesselMethod::Modulus, plan);
        break;
      case AIRY_ROUTE_BESSEL_SDE:
        c = airy::conditional_law_bessel_route(alpha, n, n_steps, airy::BesselMethod::Sde, plan);
        break;
      case AIRY_ROUTE_PATH_BINNING:
        c = airy::conditional_law_path_route(alpha, half_width, n, n_steps, bandwidth, plan);
        break;
      default:
        airy::fail(airy::ErrorCode::Usage, "unknown route");
    }
    *out = airy_moment_check{c.n,           c.mean,          c.mean_se,         c.variance,
                             c.variance_se, c.skewness,      c.skewness_se,     c.target_mean,
                             c.target_variance, c.mean_z(), c.variance_z(), c.skewness_z()};
  });
}

airy_status airy_ks_lazy_endpoint(size_t k, uint64_t n_samples, uint64_t seed, unsigned workers, double threshold,
                                  airy_ks_check* out) {
  return guarded([&] {
    need(out, "out");
    const auto r = airy::lazy_endpoint_ks(k, n_samples, plan_for(seed, 0, workers), threshold);
    *out = airy_ks_check{r.statistic, r.threshold, r.n, r.passed() ? 1 : 0};
  });
}

airy_status airy_ks_horizontal_local_time(size_t k, uint64_t n_samples, size_t n_steps_continuum, uint64_t seed,
                                          unsigned workers, double threshold, airy_ks_check* out) {
  return guarded([&] {
    need(out, "out");
    const auto r = airy::horizontal_vs_local_time_ks(k, n_samples, n_steps_continuum, plan_for(seed, 0, workers),
                                                     threshold);
    *out = airy_ks_check{r.statistic, r.threshold, r.n, r.passed() ? 1 : 0};
  });
}

}  // extern "C"
