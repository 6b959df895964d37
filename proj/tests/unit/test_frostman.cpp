#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "frostdecay/frostman.hpp"
#include "frostdecay/generators.hpp"
#include "frostdecay/radial.hpp"
#include "frostdecay/rng.hpp"

using namespace frostdecay;

namespace {

// Mass of every dyadic cube of level 0..L that holds atoms.
std::map<DyadicCube, double> cube_masses(const CubeSet& set, const AtomicMeasure& mu) {
  std::map<DyadicCube, double> out;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto p = mu.position(i);
    CubeIndex idx(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      idx[k] = static_cast<std::int64_t>(std::floor(std::ldexp(p[k], set.level())));
    }
    const DyadicCube leaf{set.level(), idx};
    for (int j = 0; j <= set.level(); ++j) out[leaf.ancestor(j)] += mu.mass(i);
  }
  return out;
}

CubeSet random_subset(Rng& rng, std::size_t dim, int level) {
  const std::int64_t k = std::int64_t{1} << level;
  std::vector<CubeIndex> m;
  while (m.empty()) {
    std::vector<std::int64_t> idx(dim, 0);
    while (true) {
      if (rng.uniform() < 0.4) m.push_back(idx);
      std::size_t d = dim;
      while (d > 0 && idx[d - 1] == k - 1) idx[--d] = 0;
      if (d == 0) break;
      ++idx[d - 1];
    }
  }
  return {dim, level, m};
}

}  // namespace

TEST_CASE("single cube carries its own cap") {
  const CubeSet s(2, 4, {{3, 9}});
  const auto mu = greedy_frostman(s, 1.3);
  REQUIRE(mu.size() == 1);
  CHECK(mu.mass(0) == std::exp2(-4 * 1.3));
  CHECK(mu.r_min() == 1.0 / 16);
  CHECK(mu.position(0)[0] == 3.5 / 16);
}

TEST_CASE("full interval at s = 1 is Lebesgue") {
  const CubeSet s(1, 2, {{0}, {1}, {2}, {3}});
  const auto mu = greedy_frostman(s, 1.0 - 1e-15);
  for (std::size_t i = 0; i < 4; ++i) CHECK(mu.mass(i) == doctest::Approx(0.25).epsilon(1e-12));
  const auto content = dyadic_content_bruteforce(s, 1.0);
  CHECK(content.value == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(content.antichain.size() == 1);
  CHECK(content.antichain[0] == DyadicCube{0, {0}});
}

TEST_CASE("two halves at s = 1/2: the root cap binds") {
  const CubeSet s(1, 1, {{0}, {1}});
  const auto mu = greedy_frostman(s, 0.5);
  CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mu.mass(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dyadic_content_bruteforce(s, 0.5).value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("brute-force content on small instances") {
  const auto single = dyadic_content_bruteforce(CubeSet(1, 2, {{2}}), 1.0);
  CHECK(single.value == 0.25);
  CHECK(single.antichain == std::vector<DyadicCube>{{2, {2}}});

  const CubeSet two(1, 2, {{0}, {2}});
  const auto tie = dyadic_content_bruteforce(two, 0.5);
  CHECK(tie.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tie.antichain == std::vector<DyadicCube>{{0, {0}}});
  CHECK(count_antichain_covers(two) == 5);
  CHECK(count_antichain_covers(CubeSet(1, 2, {{0}, {1}, {2}, {3}})) == 5);
  CHECK(count_antichain_covers(CubeSet(1, 3, {{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}})) == 26);
}

TEST_CASE("brute force refuses oversized instances") {
  const CubeSet big = gen_random_cubeset(2, 6, 0.9, 1, 3);
  CHECK_THROWS_AS(dyadic_content_bruteforce(big, 1.5), std::length_error);
}

TEST_CASE("greedy mass equals the dyadic content") {
  Rng rng(2024);
  for (int level = 1; level <= 4; ++level) {
    for (int t = 0; t < 10; ++t) {
      const CubeSet s = random_subset(rng, 1, level);
      const double e = rng.uniform(0.05, 0.95);
      CHECK(greedy_frostman(s, e).total_mass() ==
            doctest::Approx(dyadic_content_bruteforce(s, e).value).epsilon(1e-12));
    }
  }
  for (int t = 0; t < 25; ++t) {
    const CubeSet s = random_subset(rng, 2, 3);
    const double e = rng.uniform(0.1, 1.9);
    CHECK(greedy_frostman(s, e).total_mass() ==
          doctest::Approx(dyadic_content_bruteforce(s, e).value).epsilon(1e-12));
  }
}

TEST_CASE("every dyadic cube respects its cap") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CubeSet s = gen_random_cubeset(2, 6, 0.7, 2, seed);
    const double e = 1.0 + 0.08 * static_cast<double>(seed);
    const auto mu = greedy_frostman(s, e);
    for (const auto& [q, m] : cube_masses(s, mu)) {
      CHECK(m <= std::pow(q.side(), e) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("adding a cube never lowers the greedy mass") {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const CubeSet s = gen_random_cubeset(2, 4, 0.5, 1, t);
    auto m = s.members();
    m.push_back({static_cast<std::int64_t>(rng.below(32)) - 16,
                 static_cast<std::int64_t>(rng.below(32)) - 16});
    const CubeSet bigger(2, 4, m);
    CHECK(greedy_frostman(bigger, 1.4).total_mass() >=
          greedy_frostman(s, 1.4).total_mass() * (1.0 - 1e-12));
  }
}

TEST_CASE("exponent range is enforced") {
  const CubeSet s(2, 2, {{0, 0}});
  CHECK_THROWS(greedy_frostman(s, 0.0));
  CHECK_THROWS(greedy_frostman(s, 2.0));
  CHECK_THROWS(greedy_frostman(CubeSet(2, 2, {}), 1.0));
}

TEST_CASE("normalizing a single atom") {
  const AtomicMeasure mu(1, {0.0}, {1.0}, 1.0);
  PointSet cand(1, {0.0});
  const auto n = ball_growth_normalize(mu, 1.0, cand, 0.0);
  CHECK(n.constant == 1.0);
  CHECK(n.radius == 1.0);
  CHECK(n.measure == mu);
}

TEST_CASE("normalization is homogeneous in the input masses") {
  const CubeSet s = gen_random_cubeset(2, 4, 0.6, 1, 12);
  const auto nu = greedy_frostman(s, 1.3);
  const auto cand = member_centers_with_origin(s);
  const auto a = ball_growth_normalize(nu, 1.3, cand, 1.0 / 16);
  const auto b = ball_growth_normalize(nu.scaled(8.0), 1.3, cand, 1.0 / 16);
  CHECK(b.constant == doctest::Approx(8.0 * a.constant).epsilon(1e-14));
  for (std::size_t i = 0; i < nu.size(); ++i) {
    CHECK(b.measure.mass(i) == doctest::Approx(a.measure.mass(i)).epsilon(1e-14));
  }
}

TEST_CASE("normalized measure re-verifies with constant one") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CubeSet s = gen_random_cubeset(2, 5, 0.6, 2, seed);
    const double delta = std::ldexp(1.0, -s.level());
    const auto cand = member_centers_with_origin(s);
    const auto n = ball_growth_normalize(greedy_frostman(s, 1.5), 1.5, cand, delta);
    const auto again = ball_growth_normalize(n.measure, 1.5, cand, delta);
    CHECK(again.constant == doctest::Approx(1.0).epsilon(1e-12));
    // Off-net centres are covered by the inflation.
    Rng rng(seed);
    for (int t = 0; t < 50; ++t) {
      const std::size_t c = rng.below(cand.size() - 1);
      std::vector<double> x(cand.point(c).begin(), cand.point(c).end());
      for (auto& v : x) v += rng.uniform(-0.5, 0.5) * delta;
      const auto r = sup_ball_ratio(n.measure, x, 1.5, 0.0, n.measure.r_min(), 1e300);
      CHECK(r.value <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("uniform grid measure on the unit square") {
  // Lebesgue-like: mass 4^-5 at each level-5 cell centre.
  const CubeSet s = gen_four_corner_cantor(0.25, 0, 5);
  REQUIRE(s.size() == 1024);
  const AtomicMeasure nu(2, s.centers(), std::vector<double>(1024, 1.0 / 1024), 1.0 / 32);
  const auto n = ball_growth_normalize(nu, 2.0, member_centers_with_origin(s), 1.0 / 32);
  CHECK(n.constant > 1.0);
  CHECK(n.constant < 16.0);
  CHECK(n.constant == doctest::Approx(13.744678440936946).epsilon(1e-12));
}
