#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "frostdecay/decay.hpp"
#include "frostdecay/frostman.hpp"
#include "frostdecay/generators.hpp"
#include "frostdecay/rng.hpp"

using namespace frostdecay;

namespace {

AtomicMeasure random_measure(Rng& rng, std::size_t atoms, double spread, double r_min) {
  std::vector<double> pos, mass;
  for (std::size_t i = 0; i < atoms; ++i) {
    pos.push_back(rng.uniform(-spread, spread));
    pos.push_back(rng.uniform(-spread, spread));
    mass.push_back(rng.uniform(0.01, 1.0));
  }
  return {2, pos, mass, r_min};
}

}  // namespace

TEST_CASE("reweighting by annulus") {
  const AtomicMeasure inner(2, {0.1, 0.2, -0.5, 0.5}, {1.0, 2.0}, 0.1);
  CHECK(reweight(inner, 0.7) == inner);
  const AtomicMeasure far(2, {2.5, 0.0}, {1.0}, 0.1);
  CHECK(reweight(far, 1.0).mass(0) == 0.25);
  CHECK_THROWS(reweight(far, 0.0));
}

TEST_CASE("reweighting is exact per annulus and never increases mass") {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto nu = random_measure(rng, 200, 7.0, 0.1);
    const double alpha = rng.uniform(0.05, 1.5);
    const auto mu = reweight(nu, alpha);
    const auto before = annulus_masses(nu);
    const auto after = annulus_masses(mu);
    REQUIRE(before.size() == after.size());
    for (const auto& [k, m] : before) {
      const double expect = std::exp2(-static_cast<double>(k) * alpha) * m;
      CHECK(std::abs(after.at(k) - expect) <= 1e-12 * expect);
    }
    for (std::size_t i = 0; i < nu.size(); ++i) {
      CHECK(mu.mass(i) <= nu.mass(i));
      if (norm(nu.position(i)) < 1.0) CHECK(mu.mass(i) == nu.mass(i));
    }
  }
}

TEST_CASE("series constant") {
  CHECK(constant_C_alpha_s(1.0, 1.0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(constant_C_alpha_s(1.0, 1.0) >= 5.0);
  CHECK(constant_C_alpha_s(1.0, 1.0) - 5.0 <= 1e-12);
  CHECK(constant_C_alpha_s(1.0, 1e-9) == doctest::Approx(3.0).epsilon(1e-7));
  // Closed form for s = 2: sum (k+1)^2 x^k = (1 + x) / (1 - x)^3.
  const double x = std::exp2(-0.5);
  const double exact = 1.0 + (1.0 + x) / std::pow(1.0 - x, 3);
  CHECK(constant_C_alpha_s(0.5, 2.0) >= exact);
  CHECK(constant_C_alpha_s(0.5, 2.0) == doctest::Approx(exact).epsilon(1e-12));
  double prev = 0.0;
  for (double s = 0.1; s < 3.0; s += 0.1) {
    const double c = constant_C_alpha_s(0.3, s);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("cond2 constant") {
  CHECK(cond2_constant(1.0) == doctest::Approx(6.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(cond2_constant(1.0) == doctest::Approx(8.485281).epsilon(1e-7));
  for (double a : {0.1, 0.2, 0.5, 2.0, 7.0}) {
    CHECK(cond2_constant(a) ==
          doctest::Approx(std::exp2(1.5 * a) / (1.0 - std::exp2(-a)) * std::pow(1.5, a))
              .epsilon(1e-14));
  }
  CHECK(cond2_constant(40.0) / (std::exp2(20.0) * std::pow(3.0, 40.0)) ==
        doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("annulus window holds on random balls") {
  Rng rng(31);
  for (int t = 0; t < 2000; ++t) {
    const double rx = rng.uniform(0.01, 30.0);
    const double th = rng.uniform(0.0, 2.0 * M_PI);
    const std::vector<double> x{rx * std::cos(th), rx * std::sin(th)};
    const double r = rng.uniform(0.0, rx / 2.0);
    const double rho = r * std::sqrt(rng.uniform());
    const double ph = rng.uniform(0.0, 2.0 * M_PI);
    const std::vector<double> y{x[0] + rho * std::cos(ph), x[1] + rho * std::sin(ph)};
    const auto [lo, hi] = annulus_window(annulus_index(x));
    const auto k = annulus_index(y);
    CHECK(k >= lo);
    CHECK(k <= hi);
  }
  CHECK(annulus_window(0) == std::pair<std::int64_t, std::int64_t>{-1, 2});
  CHECK(annulus_window(3) == std::pair<std::int64_t, std::int64_t>{1, 6});
}

TEST_CASE("cond1 on simple measures") {
  const DecayParams p{0.5, 1.5, 2};
  const AtomicMeasure one(2, {3.0, 4.0}, {2.0}, 0.1);
  const auto c = certify_cond1(one, p);
  CHECK(c.sup == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
  CHECK(c.radius == 5.0);
  CHECK(c.pass);
  CHECK(certify_cond1(one.scaled(3.0), p).sup == doctest::Approx(3.0 * c.sup).epsilon(1e-15));

  const AtomicMeasure origin(2, {0.0, 0.0}, {1.0}, 0.1);
  const auto bad = certify_cond1(origin, p);
  CHECK_FALSE(bad.pass);
  CHECK(std::isinf(bad.sup));
  CHECK_FALSE(bad.diagnostic.empty());

  CHECK_THROWS(certify_cond1(one, DecayParams{1.5, 1.0, 2}));
  CHECK_THROWS(certify_cond1(one, DecayParams{0.5, 2.0, 2}));
}

TEST_CASE("cond2 on simple measures") {
  const DecayParams p{0.5, 1.5, 2};
  const AtomicMeasure one(2, {10.0, 0.0}, {1.0}, 0.1);
  PointSet cand(2, {0.0, 4.0, 0.0, 0.0, -3.0, 0.0});
  const auto c = certify_cond2(one, p, cand, 0.0);
  CHECK(c.sup == 0.0);
  CHECK(c.pass);
  CHECK(c.diagnostic.empty());

  // Only the origin-adjacent candidate: nothing admissible.
  const auto vac = certify_cond2(one, p, PointSet(2, {0.1, 0.0}), 0.0);
  CHECK(vac.pass);
  CHECK_FALSE(vac.diagnostic.empty());

  // Atom at distance 1 from x = (4, 0): sup over r in [1, 2] at r = 1.
  const AtomicMeasure near(2, {5.0, 0.0}, {1.0}, 0.1);
  const auto d = certify_cond2(near, p, PointSet(2, {4.0, 0.0}), 0.0);
  CHECK(d.sup == doctest::Approx(std::pow(4.0, 0.5)).epsilon(1e-15));
  CHECK(d.radius == 1.0);
}

TEST_CASE("larger alpha lowers far-field mass") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto nu = random_measure(rng, 100, 8.0, 0.05);
    const auto a = reweight(nu, 0.3);
    const auto b = reweight(nu, 0.6);
    for (int q = 0; q < 10; ++q) {
      const double th = rng.uniform(0.0, 2.0 * M_PI);
      const double rx = rng.uniform(2.0, 8.0);
      const BallQuery ball{{rx * std::cos(th), rx * std::sin(th)}, rng.uniform(0.0, rx / 2)};
      CHECK(ball_mass(b, ball) <= ball_mass(a, ball));
    }
  }
}

TEST_CASE("normalized Frostman measures satisfy both decay bounds") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const CubeSet s = gen_random_cubeset(2, 5, 0.6, 3, 100 + seed);
    const double delta = std::ldexp(1.0, -s.level());
    const auto cand = member_centers_with_origin(s);
    for (double e : {1.2, 1.5}) {
      const auto nu = ball_growth_normalize(greedy_frostman(s, e), e, cand, delta).measure;
      for (double alpha : {0.2, 0.5}) {
        const DecayParams p{alpha, e, 2};
        const auto mu = reweight(nu, alpha);
        CHECK(certify_cond1(mu, p).pass);
        CHECK(certify_cond2(mu, p, cand, delta).pass);
      }
    }
  }
}

TEST_CASE("certificate text block") {
  DecayCertificate c;
  c.kind = DecayKind::cond2;
  c.sup = 0.5;
  c.constant = 1.0;
  c.center = {1.0, 2.0};
  c.radius = 0.25;
  c.r_min = 0.125;
  c.pass = true;
  std::ostringstream out;
  write_certificate(out, c);
  CHECK(out.str() ==
        "kind=cond2\nsup=0.5\nconstant=1\ncenter=1 2\nradius=0.25\nr_min=0.125\npass=true\n");
}
