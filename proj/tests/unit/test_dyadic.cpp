#include <doctest.h>

#include <set>
#include <stdexcept>

#include "frostdecay/dyadic.hpp"
#include "frostdecay/rng.hpp"

using namespace frostdecay;

TEST_CASE("side lengths are exact powers of two") {
  for (int level = 0; level <= kMaxDyadicLevel; ++level) {
    DyadicCube q{level, {0, 0}};
    CHECK(q.side() * std::ldexp(1.0, level) == 1.0);
  }
}

TEST_CASE("children tile the parent") {
  DyadicCube q{3, {-2, 5}};
  const auto kids = q.children();
  REQUIRE(kids.size() == 4);
  std::set<CubeIndex> seen;
  for (const auto& c : kids) {
    CHECK(c.level == 4);
    CHECK(c.parent() == q);
    CHECK(q.contains(c));
    seen.insert(c.index);
  }
  CHECK(seen == std::set<CubeIndex>{{-4, 10}, {-4, 11}, {-3, 10}, {-3, 11}});
}

TEST_CASE("ancestors of negative indices round toward minus infinity") {
  DyadicCube q{3, {-1, -8}};
  CHECK(q.ancestor(0).index == CubeIndex{-1, -1});
  CHECK(q.ancestor(1).index == CubeIndex{-1, -2});
  CHECK(q.center() == std::vector<double>{-0.0625, -0.9375});
}

TEST_CASE("contains is reflexive and rejects coarser cubes") {
  DyadicCube q{2, {1}};
  CHECK(q.contains(q));
  CHECK_FALSE(q.contains(q.parent()));
  CHECK_FALSE(q.contains(DyadicCube{3, {4}}));
  CHECK(q.contains(DyadicCube{3, {3}}));
}

TEST_CASE("CubeSet sorts and deduplicates") {
  CubeSet s(2, 2, {{1, 1}, {0, 3}, {1, 1}, {0, 0}});
  CHECK(s.size() == 3);
  CHECK(s.members() == std::vector<CubeIndex>{{0, 0}, {0, 3}, {1, 1}});
  CHECK(s.contains({0, 3}));
  CHECK_FALSE(s.contains({3, 0}));
}

TEST_CASE("CubeSet validation") {
  CHECK_THROWS_AS(CubeSet(2, 1, {{0}}), std::invalid_argument);
  CHECK_THROWS_AS(CubeSet(0, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(CubeSet(1, kMaxDyadicLevel + 1, {}), std::out_of_range);
  CHECK_THROWS_AS(CubeSet(1, -1, {}), std::out_of_range);
  CHECK_THROWS_AS(CubeSet(1, 60, {}), std::out_of_range);
  CHECK_THROWS_AS(CubeSet(1, 3, {{std::int64_t{1} << 53}}), std::out_of_range);
}

TEST_CASE("coarsening matches per-member ancestors") {
  Rng rng(7);
  std::vector<CubeIndex> m;
  for (int i = 0; i < 200; ++i) {
    m.push_back({static_cast<std::int64_t>(rng.below(64)) - 32,
                 static_cast<std::int64_t>(rng.below(64)) - 32});
  }
  CubeSet s(2, 5, m);
  for (int j = 0; j <= 5; ++j) {
    const CubeSet c = s.coarsen(j);
    std::set<CubeIndex> expect;
    for (std::size_t i = 0; i < s.size(); ++i) expect.insert(s.cube(i).ancestor(j).index);
    CHECK(std::vector<CubeIndex>(expect.begin(), expect.end()) == c.members());
  }
  CHECK(s.coarsen(5) == s);
}

TEST_CASE("centres are flattened member centres") {
  CubeSet s(2, 1, {{0, 1}, {1, 0}});
  CHECK(s.centers() == std::vector<double>{0.25, 0.75, 0.75, 0.25});
}
