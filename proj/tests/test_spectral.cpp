#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "airysim/error.hpp"
#include "airysim/rng.hpp"
#include "airysim/spectral.hpp"
#include "airysim/tridiag.hpp"

using namespace airy;

namespace {

SymTridiagonal random_matrix(std::size_t n, std::uint64_t seed) {
  RngStream s = make_stream(seed, 99);
  std::vector<double> d(n), o(n - 1);
  for (auto& x : d) x = 2 * s.uniform() - 1;
  for (auto& x : o) x = 2 * s.uniform() - 1;
  return {d, o};
}

std::vector<double> dense_mul(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += a[i * n + k] * b[k * n + j];
  return c;
}

std::vector<double> dense_power(const SymTridiagonal& m, int k, double scale) {
  const std::size_t n = m.dim();
  std::vector<double> p(n * n, 0.0), a = m.dense();
  for (auto& x : a) x /= scale;
  for (std::size_t i = 0; i < n; ++i) p[i * n + i] = 1;
  for (int i = 0; i < k; ++i) p = dense_mul(p, a, n);
  return p;
}

// Cyclic Jacobi rotations on a dense symmetric matrix.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p * n + q] == 0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2 * a[p * n + q]);
        const double t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

}  // namespace

TEST_CASE("projection onto lattice cells") {
  for (std::int64_t N : {1, 8, 27, 1000}) {
    const auto p = project_pi_N(TestFunction::constant(1.0), N);
    REQUIRE(p.entries.size() == static_cast<std::size_t>(N + 1));
    for (double e : p.entries) CHECK(e == doctest::Approx(std::pow(double(N), -1.0 / 6)).epsilon(1e-12));
  }
  const TestFunction id{[](double x) { return x; }, {1.0, 1.0, 0.5}};
  const auto px = project_pi_N(id, 8);
  for (int l = 0; l <= 8; ++l)
    CHECK(px.entries[l] == doctest::Approx(std::pow(8.0, -1.0 / 6) * (l + 0.5) * 0.5).epsilon(1e-12));

  const auto f = TestFunction::exponential(0.7), g = TestFunction::indicator(0.2, 1.3);
  const TestFunction h{[&](double x) { return 2.5 * f(x) - 1.5 * g(x); }, {4.0, 0.0, 0.5}};
  const auto pf = project_pi_N(f, 64), pg = project_pi_N(g, 64), ph = project_pi_N(h, 64);
  for (std::size_t l = 0; l < ph.entries.size(); ++l)
    CHECK(std::fabs(ph.entries[l] - (2.5 * pf.entries[l] - 1.5 * pg.entries[l])) < 1e-12);

  const TestFunction bad{[](double x) { return x < 0.3 ? 1.0 / 0.0 : 0.0; }, {}};
  CHECK_THROWS_AS(project_pi_N(bad, 8), Error);
}

TEST_CASE("growth certificates") {
  CHECK(TestFunction::exponential(1.0).check_growth());
  CHECK(TestFunction::constant(-3.0).check_growth());
  const TestFunction fast{[](double x) { return std::exp(x); }, {1.0, 1.0, 0.5}};
  CHECK_FALSE(fast.check_growth());
}

TEST_CASE("power application") {
  const SymTridiagonal m22({2, 2}, {1});
  const std::vector<double> v{1, 0};
  CHECK(power_apply(m22, v, 0, 1.0) == v);
  CHECK(power_apply(m22, v, 2, 1.0) == std::vector<double>{5, 4});

  const auto m6 = random_matrix(6, 1);
  const std::vector<double> u{0.3, -1, 2, 0.5, 0.1, -0.7};
  const auto got = power_apply(m6, u, 3, 1.0);
  const auto p = dense_power(m6, 3, 1.0);
  for (int i = 0; i < 6; ++i) {
    double want = 0;
    for (int j = 0; j < 6; ++j) want += p[i * 6 + j] * u[j];
    CHECK(std::fabs(got[i] - want) < 1e-12);
  }

  const auto big = random_matrix(100, 2);
  std::vector<double> w(100);
  for (std::size_t i = 0; i < 100; ++i) w[i] = std::sin(0.1 * i);
  const auto one = power_apply(big, w, 50, 1.7);
  const auto two = power_apply(big, power_apply(big, w, 20, 1.7), 30, 1.7);
  double norm = 0, diff = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    norm = std::max(norm, std::fabs(one[i]));
    diff = std::max(diff, std::fabs(one[i] - two[i]));
  }
  CHECK(diff <= 1e-10 * norm);

  CHECK_THROWS_AS(power_apply(m22, std::vector<double>{1, 2, 3}, 1, 1.0), Error);
  CHECK_THROWS_AS(power_apply(SymTridiagonal({1e200}, {}), std::vector<double>{1e200}, 3, 1.0), Error);
}

TEST_CASE("bilinear forms") {
  SUBCASE("T = 0 reduces to a dot product") {
    const auto one = TestFunction::indicator(0.0, 1.0);
    RngStream s = make_stream(1, 0);
    CHECK(bilinear_form(one, one, {2.0, 0.0, 1000, ModelForm::ModifiedM}, 0.0, s) == doctest::Approx(1.0).epsilon(1e-10));
    RngStream s2 = make_stream(1, 0);
    const double v = bilinear_form(one, one, {2.0, 0.0, 2000, ModelForm::ModifiedM}, 0.0, s2);
    CHECK(std::fabs(v - 1.0) < std::pow(2000.0, -1.0 / 3));
  }
  SUBCASE("symmetry in f and g") {
    const auto f = TestFunction::exponential(1.0), g = TestFunction::indicator(0.1, 0.9);
    const ModelSpec spec{2.0, 0.5, 500, ModelForm::ModifiedM};
    RngStream a = make_stream(5, 5), b = make_stream(5, 5);
    const double fg = bilinear_form(f, g, spec, 1.0, a), gf = bilinear_form(g, f, spec, 1.0, b);
    CHECK(std::fabs(fg - gf) <= 1e-10 * std::fabs(fg));
  }
  SUBCASE("path-sum reconstruction at N = 4, k = 2") {
    const ModelSpec spec{2.0, 0.3, 4, ModelForm::ModifiedM};
    REQUIRE(lattice_steps(1.0, 4) == 2);
    const auto pf = project_pi_N(TestFunction::exponential(1.0), 4);
    const auto pg = project_pi_N(TestFunction::indicator(0.0, 1.2), 4);
    RngStream a = make_stream(9, 1), b = make_stream(9, 1);
    const double form = bilinear_form(pf, pg, spec, 1.0, a);
    const auto m = build_model(spec, b).matrix;
    double rebuilt = 0;
    for (std::size_t l = 0; l < 5; ++l)
      for (std::size_t l2 = 0; l2 < 5; ++l2)
        rebuilt += pf.entries[l] * pg.entries[l2] * path_sum_entry(m, 2, l, l2, 4.0);
    CHECK(std::fabs(form - rebuilt) < 1e-12);
  }
  CHECK_THROWS_AS(
      [] {
        RngStream s = make_stream(1, 1);
        bilinear_form(TestFunction::constant(1), TestFunction::constant(1), {2.0, 0.0, 10, ModelForm::SpikedH}, 1.0, s);
      }(),
      Error);
}

TEST_CASE("path sums") {
  const auto m = random_matrix(5, 3);
  CHECK(path_sum_entry(m, 0, 2, 2, 1.0) == 1.0);
  CHECK(path_sum_entry(m, 0, 2, 3, 1.0) == 0.0);
  CHECK(path_sum_entry(m, 1, 2, 3, 2.0) == m.offdiag(2) / 2.0);
  CHECK(path_sum_entry(m, 1, 1, 1, 2.0) == m.diag(1) / 2.0);
  CHECK(path_sum_entry(m, 1, 0, 3, 2.0) == 0.0);
  const auto p = dense_power(m, 6, 1.3);
  double worst = 0;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      worst = std::max(worst, std::fabs(path_sum_entry(m, 6, i, j, 1.3) - p[i * 5 + j]));
      CHECK(path_sum_entry(m, 6, i, j, 1.3) == path_sum_entry(m, 6, j, i, 1.3));
    }
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(path_sum_entry(m, 25, 0, 0, 1.0), Error);
  CHECK_THROWS_AS(path_sum_entry(random_matrix(13, 1), 2, 0, 0, 1.0), Error);
}

TEST_CASE("edge eigenvalues") {
  CHECK(edge_fluctuations(SymTridiagonal({0.5}, {}), 1, 1)[0] == doctest::Approx(1.5));
  CHECK(edge_fluctuations(SymTridiagonal({0, 0}, {1}), 1, 1)[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = random_matrix(6, seed);
    const auto oracle = jacobi_eigenvalues(m.dense(), 6);
    const auto got = top_eigenvalues(m, 6);
    for (int i = 0; i < 6; ++i) CHECK(std::fabs(got[i] - oracle[i]) < 1e-9);
  }
  RngStream s = make_stream(11, 0);
  const auto model = build_model({2.0, 0.0, 400, ModelForm::ModifiedM}, s).matrix;
  const auto top = top_eigenvalues(model, 4);
  const auto lam = edge_fluctuations(model, 4, 400);
  CHECK(std::is_sorted(lam.begin(), lam.end()));
  const double tol = 1e-12 * model.inf_norm();
  for (std::size_t q = 0; q < 4; ++q) {
    // Exactly q eigenvalues lie above the bracket just over lambda_{q+1}.
    CHECK(model.dim() - sturm_count(model, top[q] + 2 * tol) == q);
    CHECK(model.dim() - sturm_count(model, top[q] - 2 * tol) >= q + 1);
  }
  CHECK_THROWS_AS(edge_fluctuations(model, 402, 400), Error);
}

TEST_CASE("power heuristic") {
  const auto at_edge = heuristic_power_check(2 * std::sqrt(1e6), 1.0, 1000000);
  CHECK(at_edge.first == 1.0);
  CHECK(at_edge.second == 1.0);

  // lambda with Lambda = 1.
  const auto lambda_for = [](double N) { return 2 * std::sqrt(N) - std::pow(N, -1.0 / 6); };
  const auto big = heuristic_power_check(lambda_for(1e6), 1.0, 1000000);
  CHECK(std::fabs(big.first - 0.606531) < 2e-3);
  CHECK(big.second == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));

  double prev = 1, prev_scaled = 1e9;
  for (double N : {1e3, 1e4, 1e5, 1e6}) {
    const auto r = heuristic_power_check(lambda_for(N), 1.0, static_cast<std::int64_t>(N));
    const double d = std::fabs(r.first - r.second);
    CAPTURE(N);
    CHECK(d < prev);
    // The gap is bounded by c N^{-1/3} with a constant that does not grow.
    CHECK(d * std::cbrt(N) <= prev_scaled);
    prev = d;
    prev_scaled = d * std::cbrt(N) * (1 + 1e-12);
  }
  CHECK_THROWS_AS(heuristic_power_check(2 * std::sqrt(100.0) + 1, 1.0, 100), Error);
}
