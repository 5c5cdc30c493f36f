#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "airysim/closed_forms.hpp"
#include "airysim/continuum.hpp"
#include "airysim/error.hpp"
#include "airysim/experiments.hpp"
#include "stats.hpp"

using namespace airy;
using testing_stats::summarize;

namespace {

double folded_normal_cdf(double x) { return x <= 0 ? 0.0 : std::erf(x / std::numbers::sqrt2); }

double l0_cdf(double a) { return a <= 0 ? 0.0 : 1 - std::exp(-a * a / 8); }

}  // namespace

TEST_CASE("Brownian motion and bridge grids") {
  RngStream s = make_stream(1, 0);
  const auto b = sample_path(PathKind::Bridge, 0.0, 0.0, 1.0, 64, s);
  CHECK(b.values.back() == 0.0);
  CHECK(b.values.front() == 0.0);
  CHECK(b.dt == 1.0 / 64);
  const auto b2 = sample_path(PathKind::Bridge, 0.3, 1.7, 2.0, 10, s);
  CHECK(b2.values.front() == 0.3);
  CHECK(b2.values.back() == 1.7);
  CHECK_THROWS_AS(sample_path(PathKind::Bridge, 0.0, std::nullopt, 1.0, 8, s), Error);
  CHECK_THROWS_AS(sample_path(PathKind::BrownianMotion, 0.0, std::nullopt, 1.0, 0, s), Error);

  std::vector<double> ends, mids;
  for (int i = 0; i < 100000; ++i) {
    ends.push_back(sample_path(PathKind::BrownianMotion, 0.0, std::nullopt, 1.0, 16, s).values.back());
    mids.push_back(sample_path(PathKind::Bridge, 0.0, 0.0, 1.0, 16, s).values[8]);
  }
  CHECK(std::fabs(summarize(ends).var - 1.0) < 3 * testing_stats::variance_se(ends));
  CHECK(std::fabs(summarize(mids).var - 0.25) < 3 * testing_stats::variance_se(mids));

  std::ostringstream os;
  GridPath{0.5, {0.0, 1.0}}.write_csv(os);
  CHECK(os.str() == "t,value\n0,0\n0.5,1\n");
}

TEST_CASE("reflection with local time") {
  const GridPath pos{0.1, {0.5, 1.0, 0.2, 0.0, 0.3}};
  const auto r0 = reflect_with_local_time(pos);
  CHECK(r0.path.values == pos.values);
  CHECK(r0.L0 == 0.0);

  const auto r = reflect_with_local_time(GridPath{1.0, {1.0, -1.0, 0.0}});
  CHECK(r.path.values == std::vector<double>{1.0, 0.0, 1.0});
  CHECK(r.L0 == 2.0);

  RngStream s = make_stream(2, 0);
  std::vector<double> ends;
  bool nonneg = true;
  for (int i = 0; i < 100000; ++i) {
    const auto bm = sample_path(PathKind::BrownianMotion, 0.0, std::nullopt, 1.0, 4096, s);
    const auto rr = reflect_with_local_time(bm);
    for (double v : rr.path.values) nonneg = nonneg && v >= 0;
    ends.push_back(rr.path.values.back());
  }
  CHECK(nonneg);
  // The endpoint of Gamma(B) is B_T + sup(-B)_+, which has the law of |B_T|.
  CHECK(testing_stats::ks(ends, folded_normal_cdf) < 0.01);
}

TEST_CASE("exact path minimum") {
  // P(min of a Brownian motion over [0, 1] > -1) = 2 Phi(1) - 1.
  RngStream s = make_stream(3, 0);
  int above = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto bm = sample_path(PathKind::BrownianMotion, 0.0, std::nullopt, 1.0, 4, s);
    above += sample_path_minimum(bm, s) > -1.0;
  }
  const double p = std::erf(1.0 / std::numbers::sqrt2);
  CHECK(std::fabs(above / double(n) - p) < 3 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("reflected bridges") {
  RngStream s = make_stream(4, 0);
  std::vector<double> mids, l0;
  bool pinned = true;
  for (int i = 0; i < 100000; ++i) {
    const auto rb = sample_reflected_bridge_with_local_time(1.0, 256, s);
    pinned = pinned && rb.path.values.front() == 0.0 && rb.path.values.back() == 0.0;
    mids.push_back(rb.path.values[128]);
    l0.push_back(rb.L0);
  }
  CHECK(pinned);
  const auto st = summarize(mids);
  CHECK(std::fabs(st.mean - 0.5 * std::sqrt(2 / std::numbers::pi)) < 3 * st.se());
  CHECK(testing_stats::ks(l0, l0_cdf) < 0.02);
  CHECK(std::fabs(summarize(l0).mean - std::sqrt(2 * std::numbers::pi)) < 3 * summarize(l0).se());
}

TEST_CASE("local-time profiles") {
  const GridPath flat{0.25, {0.3, 0.3, 0.3, 0.3, 0.3}};
  const auto pf = local_time_profile(flat, 0.1);
  CHECK(pf.masses[3] == doctest::Approx(10.0).epsilon(1e-12));
  double rest = 0;
  for (std::size_t j = 0; j < pf.masses.size(); ++j)
    if (j != 3) rest += pf.masses[j];
  CHECK(rest == 0.0);

  const GridPath ramp{1.0, {0.0, 1.0}};
  const auto pr = local_time_profile(ramp, 0.25);
  for (int j = 0; j < 4; ++j) CHECK(pr.masses[j] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(pr.total_time() - 1.0) < 1e-12);

  RngStream s = make_stream(5, 0);
  for (int i = 0; i < 100; ++i) {
    const auto rb = sample_reflected_bridge(1.0 + i * 0.01, 1000, s);
    const auto prof = local_time_profile(rb, 0.0123);
    CHECK(std::fabs(prof.total_time() - rb.horizon()) < 1e-12);
    bool nonneg = true;
    for (double m : prof.masses) nonneg = nonneg && m >= 0;
    CHECK(nonneg);
    CHECK(std::fabs(prof.coarsen(4).total_time() - rb.horizon()) < 1e-12);
  }
  CHECK_THROWS_AS(local_time_profile(ramp, 0.0), Error);
  CHECK_THROWS_AS(local_time_profile(GridPath{1.0, {0.0, -0.1}}, 0.1), Error);
}

TEST_CASE("squared local time is stable under bandwidth refinement") {
  // Paired comparison on the same paths at n = 2^14.
  RngStream s = make_stream(6, 0);
  std::vector<double> coarse, fine;
  for (int i = 0; i < 10000; ++i) {
    const auto rb = sample_reflected_bridge(1.0, 16384, s);
    fine.push_back(local_time_profile(rb, 1.0 / 128).squared_integral());
    coarse.push_back(local_time_profile(rb, 1.0 / 64).squared_integral());
  }
  const double mc = summarize(coarse).mean, mf = summarize(fine).mean;
  CHECK(std::fabs(mc / mf - 1) < 0.01);
  // E int (L^a)^2 da for the reflected bridge: E[L0] from the bridge law
  // gives 3 sqrt(2 pi) / 4 (context for the finer bandwidth).
  CHECK(std::fabs(mf - 0.75 * std::sqrt(2 * std::numbers::pi)) < 4 * summarize(fine).se() + 0.01);
}

TEST_CASE("Bessel(3) bridge") {
  RngStream s = make_stream(7, 0);
  const auto m = sample_bessel3_bridge(1.0, 512, s, BesselMethod::Modulus);
  CHECK(m.b.values.front() == 1.0);
  CHECK(m.b.values.back() == 0.0);
  CHECK_FALSE(m.driving.has_value());
  const auto e = sample_bessel3_bridge(1.0, 512, s, BesselMethod::Sde);
  CHECK(e.b.values.front() == 1.0);
  CHECK(e.b.values.back() == 0.0);
  REQUIRE(e.driving.has_value());
  CHECK(e.driving->values.size() == e.b.values.size());
  bool floor_ok = true;
  for (std::size_t i = 0; i + 1 < e.b.values.size(); ++i) floor_ok = floor_ok && e.b.values[i] >= kBesselFloor;
  CHECK(floor_ok);
  CHECK_THROWS_AS(sample_bessel3_bridge(-0.1, 16, s), Error);

  SUBCASE("modulus and SDE agree on E int b") {
    std::vector<double> im, is;
    RngStream a = make_stream(8, 0), b = make_stream(8, 1);
    for (int i = 0; i < 100000; ++i) {
      im.push_back(time_integral(sample_bessel3_bridge(1.0, 4096, a, BesselMethod::Modulus).b));
      is.push_back(time_integral(sample_bessel3_bridge(1.0, 4096, b, BesselMethod::Sde).b));
    }
    const auto sm = summarize(im), ss = summarize(is);
    CHECK(std::fabs(sm.mean - ss.mean) < 3 * std::hypot(sm.se(), ss.se()));
  }
  SUBCASE("pathwise identity along the SDE route") {
    // int (1-t)/b dt + alpha/2 - 2 int b dt + int W dt vanishes in the continuum.
    RngStream r = make_stream(9, 0);
    double sq = 0;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
      const auto br = sample_bessel3_bridge(1.0, 16384, r, BesselMethod::Sde);
      const double res = bessel_inverse_integral(br.b) + 1.0 - 2 * time_integral(br.b) + time_integral(*br.driving);
      sq += res * res;
    }
    CHECK(std::sqrt(sq / n) < 0.02);
  }
}

TEST_CASE("functional A along reflected bridges") {
  CHECK_THROWS_AS(functional_A(GridPath{0.25, {0, 0, 0, 0, 0}}, local_time_profile(GridPath{0.25, {0, 0, 0, 0, 0}}, 1.0 / 64)),
                  Error);
  RngStream s = make_stream(10, 0);
  const auto rb2 = sample_reflected_bridge(2.0, 64, s);
  CHECK_THROWS_AS(functional_A(rb2, local_time_profile(rb2, 0.1)), Error);

  std::vector<double> path_a, mix_a;
  RngStream m = make_stream(10, 1);
  for (int i = 0; i < 100000; ++i) {
    const auto rb = sample_reflected_bridge(1.0, 16384, s);
    path_a.push_back(functional_A(rb, local_time_profile(rb, 1.0 / 128)));
    mix_a.push_back(sample_A_mixture(m));
  }
  const auto st = summarize(path_a);
  CHECK(std::fabs(st.mean + std::sqrt(6 * std::numbers::pi) / 2) < 3 * st.se());
  std::vector<double> sq(path_a.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = path_a[i] * path_a[i];
  CHECK(std::fabs(summarize(sq).mean - 7.0) < 3 * summarize(sq).se());
  CHECK(ks_two_sample(path_a, mix_a) < 0.02);
}

TEST_CASE("exact-law mixture sampler for A") {
  RngStream s = make_stream(11, 0);
  std::vector<double> a(10000000), a3(a.size()), ea(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = sample_A_mixture(s);
    a3[i] = a[i] * a[i] * a[i];
    ea[i] = std::exp(a[i]);
  }
  const auto s1 = summarize(a), s3 = summarize(a3), se = summarize(ea);
  CHECK(std::fabs(s1.mean + std::sqrt(6 * std::numbers::pi) / 2) < 3 * s1.se());
  CHECK(std::fabs(s3.mean + 6 * std::sqrt(6 * std::numbers::pi)) < 3 * s3.se());
  CHECK(std::fabs(se.mean - mgf_A(1.0)) < 3 * se.se());
  // The MGF without the sqrt(pi) factor is rejected by the same sample.
  const double printed = std::exp(0.5) - std::sqrt(1.5) * std::exp(2.0) * std::erfc(std::sqrt(1.5));
  CHECK(std::fabs(se.mean - printed) > 20 * se.se());
}
