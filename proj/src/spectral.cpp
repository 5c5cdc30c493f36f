#include "airysim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "airysim/error.hpp"

namespace airy {

bool TestFunction::check_growth(double x_hi, int samples) const {
  const double lo = std::log(1e-3), hi = std::log(x_hi);
  for (int i = 0; i < samples; ++i) {
    const double x = std::exp(lo + (hi - lo) * i / (samples - 1));
    const double bound = growth.c1 * std::exp(growth.c2 * std::pow(x, 1.0 - growth.delta));
    if (!(std::fabs(eval(x)) <= bound * (1.0 + 1e-12))) return false;
  }
  return true;
}

TestFunction TestFunction::exponential(double rate) {
  require(rate >= 0, ErrorCode::Domain, "exponential test function needs rate >= 0");
  return {[rate](double x) { return std::exp(-rate * x); }, {1.0, 0.0, 0.5}};
}

TestFunction TestFunction::constant(double c) {
  return {[c](double) { return c; }, {std::fabs(c), 0.0, 0.5}};
}

TestFunction TestFunction::indicator(double lo, double hi) {
  return {[lo, hi](double x) { return (x >= lo && x < hi) ? 1.0 : 0.0; }, {1.0, 0.0, 0.5}};
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Scale the tolerance by a magnitude estimate from a 4-panel pass.
  const double q1 = f(0.25 * (3 * a + b)), q3 = f(0.25 * (a + 3 * b));
  const double mag = (b - a) / 12.0 * (std::fabs(fa) + 4 * std::fabs(q1) + 2 * std::fabs(fm) +
                                       4 * std::fabs(q3) + std::fabs(fb));
  if (!std::isfinite(mag)) return std::numeric_limits<double>::quiet_NaN();
  const double tol = std::max(rel_tol * mag, std::numeric_limits<double>::min());
  return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

ProjectedVector project_pi_N(const TestFunction& f, std::int64_t N) {
  require(N >= 1, ErrorCode::Domain, "N must be >= 1");
  const double c = std::cbrt(static_cast<double>(N));
  const double h = 1.0 / c;
  const double scale = std::sqrt(c);  // N^{1/6}
  ProjectedVector out{N, std::vector<double>(static_cast<std::size_t>(N) + 1)};
  for (std::int64_t l = 0; l <= N; ++l) {
    const double a = static_cast<double>(l) * h, b = static_cast<double>(l + 1) * h;
    const double v = scale * adaptive_simpson(f.eval, a, b);
    require(std::isfinite(v), ErrorCode::Domain, "non-finite cell integral in pi_N");
    out.entries[l] = v;
  }
  return out;
}

std::vector<double> power_apply(const SymTridiagonal& M, std::span<const double> v, std::int64_t k,
                                double scale) {
  require(v.size() == M.dim(), ErrorCode::DimMismatch, "vector length must match matrix dimension");
  require(k >= 0, ErrorCode::Domain, "power must be nonnegative");
  require(scale > 0, ErrorCode::Domain, "scale must be positive");
  const std::size_t n = M.dim();
  std::vector<double> cur(v.begin(), v.end()), next(n);
  const auto d = M.diag();
  const auto e = M.offdiag();
  const double inv = 1.0 / scale;
  for (std::int64_t step = 0; step < k; ++step) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = d[i] * cur[i];
      if (i > 0) acc += e[i - 1] * cur[i - 1];
      if (i + 1 < n) acc += e[i] * cur[i + 1];
      next[i] = acc * inv;
      norm = std::max(norm, std::fabs(next[i]));
    }
    require(norm <= 1e300, ErrorCode::Numeric, "power_apply overflow guard tripped");
    cur.swap(next);
  }
  return cur;
}

double bilinear_form(const ProjectedVector& pf, const ProjectedVector& pg, const ModelSpec& spec,
                     double T, RngStream& s) {
  require(spec.form == ModelForm::ModifiedM, ErrorCode::Usage, "bilinear forms use the ModifiedM model");
  require(pf.N == spec.N && pg.N == spec.N, ErrorCode::DimMismatch, "projection built for another N");
  const Model model = build_model(spec, s);
  const std::int64_t k = lattice_steps(T, spec.N);
  const double scale = 2.0 * std::sqrt(static_cast<double>(spec.N));
  const auto mg = power_apply(model.matrix, pg.entries, k, scale);
  double acc = 0.0;
  for (std::size_t i = 0; i < mg.size(); ++i) acc += pf.entries[i] * mg[i];
  return acc;
}

double bilinear_form(const TestFunction& f, const TestFunction& g, const ModelSpec& spec, double T,
                     RngStream& s) {
  return bilinear_form(project_pi_N(f, spec.N), project_pi_N(g, spec.N), spec, T, s);
}

std::size_t sturm_count(const SymTridiagonal& M, double x) {
  const auto d = M.diag();
  const auto e = M.offdiag();
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  std::size_t count = 0;
  double q = d[0] - x;
  if (q == 0.0) q = -tiny;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    q = (d[i] - x) - e[i - 1] * e[i - 1] / q;
    if (q == 0.0) q = -tiny;
    if (q < 0) ++count;
  }
  return count;
}

std::vector<double> top_eigenvalues(const SymTridiagonal& M, std::size_t q) {
  const std::size_t n = M.dim();
  require(q >= 1 && q <= n, ErrorCode::Domain, "q out of range");
  const double norm = M.inf_norm();
  const double tol = 1e-12 * std::max(norm, 1e-300);
  double glo = std::numeric_limits<double>::infinity(), ghi = -glo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(M.offdiag(i - 1));
    if (i + 1 < n) r += std::fabs(M.offdiag(i));
    glo = std::min(glo, M.diag(i) - r);
    ghi = std::max(ghi, M.diag(i) + r);
  }
  glo -= tol;
  ghi += tol;
  std::vector<double> out(q);
  for (std::size_t j = 0; j < q; ++j) {
    // The (j+1)-th largest eigenvalue is the smallest x with count(x) >= n - j.
    const std::size_t target = n - j;
    double lo = glo, hi = ghi;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (sturm_count(M, mid) >= target) hi = mid;
      else lo = mid;
    }
    out[j] = 0.5 * (lo + hi);
  }
  return out;
}

std::vector<double> edge_fluctuations(const SymTridiagonal& M, std::size_t q, std::int64_t N) {
  require(N >= 1, ErrorCode::Domain, "N must be >= 1");
  const auto lambdas = top_eigenvalues(M, q);
  const double sqrt_n = std::sqrt(static_cast<double>(N));
  const double pre = std::pow(static_cast<double>(N), 1.0 / 6.0);
  std::vector<double> out(q);
  for (std::size_t j = 0; j < q; ++j) out[j] = pre * (2.0 * sqrt_n - lambdas[j]);
  return out;
}

std::pair<double, double> heuristic_power_check(double lambda, double T, std::int64_t N) {
  require(N >= 1, ErrorCode::Domain, "N must be >= 1");
  const double sqrt_n = std::sqrt(static_cast<double>(N));
  require(lambda <= 2.0 * sqrt_n, ErrorCode::Domain, "lambda must not exceed 2 sqrt N");
  const std::int64_t k = lattice_steps(T, N);
  const double ratio = lambda / (2.0 * sqrt_n);
  const double first = std::pow(ratio, static_cast<double>(k));
  const double big_lambda = std::pow(static_cast<double>(N), 1.0 / 6.0) * (2.0 * sqrt_n - lambda);
  return {first, std::exp(-T * big_lambda / 2.0)};
}

namespace {

double enumerate_paths(const SymTridiagonal& M, std::int64_t remaining, std::size_t pos,
                       std::size_t target, double inv_scale) {
  if (remaining == 0) return pos == target ? 1.0 : 0.0;
  const auto gap = static_cast<std::int64_t>(pos > target ? pos - target : target - pos);
  if (gap > remaining) return 0.0;
  double total = 0.0;
  for (int delta = -1; delta <= 1; ++delta) {
    if (delta < 0 && pos == 0) continue;
    const std::size_t next = pos + delta;
    if (next >= M.dim()) continue;
    const double entry = M.at(pos, next);
    if (entry == 0.0) continue;
    total += entry * inv_scale * enumerate_paths(M, remaining - 1, next, target, inv_scale);
  }
  return total;
}

}  // namespace

double path_sum_entry(const SymTridiagonal& M, std::int64_t k, std::size_t l, std::size_t l2,
                      double scale) {
  require(k >= 0, ErrorCode::Domain, "power must be nonnegative");
  require(k <= 24 && M.dim() <= 12, ErrorCode::Refused,
          "path enumeration limited to k <= 24 and dim <= 12");
  require(l < M.dim() && l2 < M.dim(), ErrorCode::Domain, "index out of range");
  require(scale > 0, ErrorCode::Domain, "scale must be positive");
  // Entry (l, l2) equals entry (l2, l); enumerating from the smaller index
  // makes the computed value symmetric bit for bit.
  return enumerate_paths(M, k, std::min(l, l2), std::max(l, l2), 1.0 / scale);
}

}  // namespace airy
