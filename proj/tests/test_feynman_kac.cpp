#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "airysim/closed_forms.hpp"
#include "airysim/error.hpp"
#include "airysim/feynman_kac.hpp"
#include "stats.hpp"

using namespace airy;

namespace {

FkParams small(double T = 1.0, std::uint64_t paths = 4000, std::size_t steps = 512) {
  FkParams p;
  p.T = T;
  p.n_paths = paths;
  p.n_steps = steps;
  return p;
}

bool agree(const MCEstimate& a, const MCEstimate& b, double k = 3.0) {
  return std::fabs(a.mean - b.mean) <= k * std::hypot(a.std_error, b.std_error);
}

bool near(const MCEstimate& a, double v, double k = 3.0) { return std::fabs(a.mean - v) <= k * a.std_error; }

}  // namespace

TEST_CASE("parameter validation") {
  FkParams p;
  CHECK(p.bandwidth() == doctest::Approx(1.0 / 64));
  p.T = 4.0;
  CHECK(p.bandwidth() == doctest::Approx(2.0 / 64));
  p.delta_a = 0.01;
  CHECK(p.bandwidth() == 0.01);
  p.beta = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = FkParams{};
  p.n_paths = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = FkParams{};
  p.T = -1;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("noise fields") {
  const auto w = NoiseField::generate(0.01, 5, 2);
  CHECK(w.increment(17) == NoiseField::generate(0.01, 5, 2).increment(17));
  CHECK(w.increment(17) != NoiseField::generate(0.01, 5, 3).increment(17));
  std::vector<double> inc;
  for (std::size_t j = 0; j < 200000; ++j) inc.push_back(w.increment(j));
  const auto st = testing_stats::summarize(inc);
  CHECK(std::fabs(st.mean) < 3 * st.se());
  CHECK(std::fabs(st.var - 0.01) < 3 * testing_stats::variance_se(inc));
  const auto path = w.path(10);
  CHECK(path.values[0] == 0.0);
  CHECK(path.values[3] == doctest::Approx(w.increment(0) + w.increment(1) + w.increment(2)).epsilon(1e-15));

  const auto ex = NoiseField::explicit_increments(0.5, {1.0, -2.0});
  LocalTimeProfile prof{0.5, {3.0, 4.0}, std::nullopt};
  CHECK(ex.integrate(prof) == -5.0);
  CHECK(NoiseField::zero(0.5).integrate(prof) == 0.0);
  prof.masses.push_back(1.0);
  CHECK_THROWS_AS(ex.integrate(prof), Error);
  prof.bandwidth = 0.25;
  CHECK_THROWS_AS(NoiseField::zero(0.5).integrate(prof), Error);
}

TEST_CASE("short time acts as the identity") {
  const auto f = TestFunction::exponential(1.0);
  for (double beta : {1.0, 4.0}) {
    for (double w : {-1.0, 2.0}) {
      FkParams p = small(1e-4, 4000, 16);
      p.beta = beta;
      p.w = w;
      RngStream s = make_stream(1, 0);
      const auto e = fk_apply(f, 0.5, p, nullptr, s);
      CHECK(near(e, std::exp(-0.5)));
    }
  }
}

TEST_CASE("quenched without noise degenerates to the annealed weight at large beta") {
  const auto f = TestFunction::exponential(1.0);
  FkParams a = small(1.0, 20000, 256);
  a.beta = 1e9;
  FkParams q = a;
  q.mode = FkMode::Quenched;
  const auto zero = NoiseField::zero(a.bandwidth());
  RngStream s1 = make_stream(2, 0), s2 = make_stream(2, 1);
  const auto ea = fk_apply(f, 0.5, a, nullptr, s1);
  const auto eq = fk_apply(f, 0.5, q, &zero, s2);
  CHECK(agree(ea, eq));
  RngStream s3 = make_stream(2, 2);
  CHECK_THROWS_AS(fk_apply(f, 0.5, q, nullptr, s3), Error);
}

TEST_CASE("positivity") {
  FkParams p = small(1.0, 2000, 256);
  RngStream s = make_stream(3, 0);
  CHECK(fk_apply(TestFunction::indicator(0.0, 0.5), 1.0, p, nullptr, s).mean >= 0);
  p.mode = FkMode::Quenched;
  const auto noise = NoiseField::generate(p.bandwidth(), 3, 9);
  CHECK(fk_apply(TestFunction::exponential(2.0), 0.0, p, &noise, s).mean > 0);
  AbsolutePath path{GridPath{0.5, {0.0, 1.0, 0.2}}, 0.3, true};
  CHECK(std::isfinite(log_path_weight(path, p, &noise)));
}

TEST_CASE("kernel estimates") {
  FkParams p = small(1.0, 20000, 512);
  RngStream a = make_stream(4, 0), b = make_stream(4, 0);
  const auto kxy = kernel_estimate(0.3, 0.7, p, nullptr, a).kernel;
  const auto kyx = kernel_estimate(0.7, 0.3, p, nullptr, b).kernel;
  CHECK(agree(kxy, kyx));

  RngStream c = make_stream(4, 1);
  const auto far = kernel_estimate(6.0, 6.0, p, nullptr, c).kernel;
  CHECK(far.mean > 0);
  CHECK(far.mean < kxy.mean);

  SUBCASE("crossing frequency") {
    FkParams q = small(1.0, 100000, 64);
    RngStream s = make_stream(4, 2);
    const auto k = kernel_estimate(1.0, 1.0, q, nullptr, s);
    const double pr = std::exp(-2.0);
    CHECK(k.crossing_expected == doctest::Approx(pr).epsilon(1e-14));
    CHECK(std::fabs(k.crossing.mean - pr) <= 3 * std::sqrt(pr * (1 - pr) / 100000));
  }
  SUBCASE("origin kernel through the bridge decomposition") {
    FkParams q = small(1.0, 40000, 1024);
    RngStream s = make_stream(4, 3);
    CHECK(near(kernel_estimate(0.0, 0.0, q, nullptr, s).kernel, expected_kernel_00_beta2(0.0, 1.0)));
  }
}

TEST_CASE("expected kernel at the origin") {
  FkParams p = small(1.0, 40000, 4096);
  RngStream s = make_stream(5, 0);
  const auto e0 = expected_kernel_00(p, s);
  CHECK(near(e0, expected_kernel_00_beta2(0.0, 1.0)));
  CHECK(std::fabs(expected_kernel_00_beta2(0.0, 1.0) - 1.1183) < 1e-4);

  p.w = 0.25;
  RngStream s2 = make_stream(5, 1);
  const auto eq = expected_kernel_00(p, s2);
  CHECK(near(eq, std::sqrt(2 / std::numbers::pi) * std::exp(1.0 / 96)));

  SUBCASE("monotone in w with matched seeds") {
    std::vector<double> means;
    for (double w : {0.0, 5.0, 50.0}) {
      FkParams q = small(1.0, 20000, 1024);
      q.w = w;
      RngStream m = make_stream(5, 2);
      const auto e = expected_kernel_00(q, m);
      means.push_back(e.mean);
      if (w == 50.0) CHECK(near(e, expected_kernel_00_beta2(50.0, 1.0)));
    }
    CHECK(means[0] > means[1]);
    CHECK(means[1] > means[2]);
  }
}

TEST_CASE("trace") {
  FkParams p = small(1.0, 2000, 256);
  RngStream s = make_stream(6, 0);
  const auto coarse = trace_estimate(p, 8.0, 16, s);
  for (const auto& d : coarse.diagonal) CHECK(d.mean > 0);
  CHECK(coarse.tail >= 0);
  RngStream s2 = make_stream(6, 0);
  const auto fine = trace_estimate(p, 8.0, 32, s2);
  // Shared nodes reuse their streams.
  CHECK(fine.diagonal[2].mean == coarse.diagonal[1].mean);
  CHECK(std::fabs(fine.trace.mean - coarse.trace.mean) < fine.trace.std_error);

  // Sum exp(-T Lambda_q / 2) decreases in T only where the Lambda_q are
  // positive. A strong boundary term (w = 5) makes that the typical case; at
  // w = 0 the mean trace grows with T, as the origin kernel already does
  // (1.118 at T = 1 against about 29 at T = 4 in closed form).
  FkParams p1 = p, p4 = p;
  p1.w = p4.w = 5.0;
  p4.T = 4.0;
  RngStream s3 = make_stream(6, 0), s4 = make_stream(6, 0);
  const auto short_time = trace_estimate(p1, 8.0, 16, s3);
  const auto long_time = trace_estimate(p4, 8.0, 16, s4);
  CAPTURE(short_time.trace.mean);
  CAPTURE(long_time.trace.mean);
  CHECK(long_time.trace.mean < short_time.trace.mean);
  CHECK(expected_kernel_00_beta2(0.0, 4.0) > expected_kernel_00_beta2(0.0, 1.0));
}

TEST_CASE("semigroup residual") {
  FkParams p = small(1.0, 3000, 512);
  p.mode = FkMode::Quenched;
  p.delta_a = p.bandwidth();  // shared by the split horizons
  const auto noise = NoiseField::generate(p.bandwidth(), 7, 1);
  RngStream s = make_stream(7, 0);
  const auto r = chapman_kolmogorov_residual(0.5, 0.5, 0.5, 0.5, p, noise, s);
  CHECK(std::fabs(r.residual.mean) < 3 * r.residual.std_error);
  CHECK(r.n_z > 10);

  RngStream s2 = make_stream(7, 1);
  const auto tiny = chapman_kolmogorov_residual(0.5, 0.5, 0.5, 1e-4, p, noise, s2);
  CHECK(std::fabs(tiny.residual.mean) < 3 * tiny.residual.std_error);

  RngStream s3 = make_stream(7, 2), s4 = make_stream(7, 3);
  const auto ab = chapman_kolmogorov_residual(0.3, 0.6, 0.3, 0.7, p, noise, s3);
  const auto ba = chapman_kolmogorov_residual(0.3, 0.6, 0.7, 0.3, p, noise, s4);
  CHECK(agree(ab.residual, ba.residual));
}

TEST_CASE("averaging quenched operators recovers the annealed one") {
  const auto f = TestFunction::exponential(1.0);
  FkParams q = small(1.0, 1000, 256);
  q.mode = FkMode::Quenched;
  std::vector<double> means;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const auto noise = NoiseField::generate(q.bandwidth(), 1000 + k, 0);
    RngStream s = make_stream(8, k);
    means.push_back(fk_apply(f, 0.5, q, &noise, s).mean);
  }
  const auto st = testing_stats::summarize(means);
  FkParams a = small(1.0, 100000, 256);
  RngStream s = make_stream(8, 999);
  const auto ann = fk_apply(f, 0.5, a, nullptr, s);
  CHECK(std::fabs(st.mean - ann.mean) < 3 * std::hypot(st.se(), ann.std_error));
}

TEST_CASE("grid refinement of the origin kernel") {
  // The same continuous bridges observed on 8192 steps and on every other
  // point (4096 steps); local time at zero is shared.
  FkParams coarse;
  coarse.delta_a = 1.0 / 64;
  FkParams scaled = coarse;
  scaled.n_steps = 8192;
  scaled.delta_a = 0;  // default sqrt(T / n_steps)
  FkParams halved = scaled;
  halved.delta_a = 1.0 / 128;
  const double pre = std::sqrt(2 / std::numbers::pi);
  RunningMoments mc, ms, mh;
  RngStream s = make_stream(9, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto r = sample_reflected_bridge_with_local_time(1.0, 8192, s);
    AbsolutePath sub{GridPath{r.path.dt * 2, {}}, r.L0, r.touched};
    for (std::size_t j = 0; j < r.path.values.size(); j += 2) sub.path.values.push_back(r.path.values[j]);
    mc.add(pre * std::exp(log_path_weight(sub, coarse, nullptr)));
    ms.add(pre * std::exp(log_path_weight(r, scaled, nullptr)));
    mh.add(pre * std::exp(log_path_weight(r, halved, nullptr)));
  }
  CAPTURE(mc.mean);
  CAPTURE(ms.mean);
  CAPTURE(mh.mean);
  CHECK(std::fabs(ms.mean - mc.mean) < mc.std_error());
  // Halving the bin at only twice the steps doubles the per-bin sampling
  // noise, which inflates the binned int L^2; the shift is systematic.
  CHECK(std::fabs(mh.mean - mc.mean) < 3 * mc.std_error());
  CHECK(std::fabs(mc.mean - expected_kernel_00_beta2(0.0, 1.0)) < 3 * mc.std_error());
}
