#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mml/cubes.hpp"
#include "mml/space.hpp"

using namespace mml;

TEST_CASE("path(65) hierarchy satisfies all three properties") {
  MetricMeasureSpace s = make_path(65, 1.0);
  CubeHierarchy h = build_hierarchy(s, 0);
  HierarchyCheck c = verify_hierarchy(s, h);
  CHECK(c.sandwich);
  CHECK(c.partition);
  CHECK(c.nesting);
  // levels 1, 8, 64 cover the diameter
  CHECK(h.length(h.m) == doctest::Approx(1.0));
  CHECK(h.levels.back().size() == 1);
}

TEST_CASE("grid(2,33) nesting: each cube inside exactly one parent") {
  MetricMeasureSpace s = make_grid(2, 33, 1.0);
  CubeHierarchy h = build_hierarchy(s, 0);
  REQUIRE(verify_hierarchy(s, h).pass());
  for (size_t l = 0; l + 1 < h.levels.size(); ++l) {
    for (const auto& c : h.levels[l]) {
      int containing = 0;
      for (const auto& up : h.levels[l + 1]) {
        bool all_in = true;
        std::set<int> mem(up.members.begin(), up.members.end());
        for (int y : c.members)
          if (!mem.count(y)) { all_in = false; break; }
        if (all_in) ++containing;
      }
      CHECK(containing == 1);
    }
  }
}

TEST_CASE("single point space builds trivially") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(1, 1);
  Eigen::VectorXd mu(1);
  mu << 1.0;
  MetricMeasureSpace s = MetricMeasureSpace::from_matrix(d, mu);
  CubeHierarchy h = build_hierarchy(s, 0);
  for (const auto& lvl : h.levels) {
    CHECK(lvl.size() == 1);
    CHECK(lvl[0].members == std::vector<int>{0});
  }
}

TEST_CASE("mutated hierarchies are rejected with witnesses") {
  MetricMeasureSpace s = make_path(65, 1.0);
  CubeHierarchy h = build_hierarchy(s, 0);
  REQUIRE(h.levels.size() >= 2);
  REQUIRE(h.levels[1].size() >= 2);

  SUBCASE("point moved across cubes") {
    // move one member of cube 0 into the farthest cube at the middle level;
    // the moved point then sits outside that cube's outer sandwich ball
    auto bad = h;
    auto& c0 = bad.levels[1][0];
    size_t far_idx = 1;
    double far_d = -1;
    for (size_t j = 1; j < bad.levels[1].size(); ++j) {
      double d = s.dist(c0.center, bad.levels[1][j].center);
      if (d > far_d) { far_d = d; far_idx = j; }
    }
    auto& c1 = bad.levels[1][far_idx];
    int moved = c0.members.front();
    c0.members.erase(c0.members.begin());
    c1.members.push_back(moved);
    std::sort(c1.members.begin(), c1.members.end());
    HierarchyCheck c = verify_hierarchy(s, bad);
    CHECK_FALSE(c.pass());
    CHECK_FALSE(c.witness.empty());
    CHECK(c.partition);  // still a partition; sandwich or nesting broke
  }

  SUBCASE("center swapped") {
    auto bad = h;
    std::swap(bad.levels[1][0].center, bad.levels[1][1].center);
    HierarchyCheck c = verify_hierarchy(s, bad);
    CHECK_FALSE(c.sandwich);
    CHECK_FALSE(c.witness.empty());
  }
}

TEST_CASE("small rho fails cleanly") {
  MetricMeasureSpace s = make_path(65, 1.0);
  CHECK_THROWS_AS(build_hierarchy(s, 0, 2.0), std::exception);
}

TEST_CASE("seeded random clouds all build and verify") {
  std::mt19937_64 rng(314);
  std::uniform_int_distribution<int> sz(20, 120);
  for (int t = 0; t < 10; ++t) {
    MetricMeasureSpace s = make_random_cloud(sz(rng), 2, 1000 + t);
    CubeHierarchy h = build_hierarchy(s, -8);
    CHECK(verify_hierarchy(s, h).pass());
  }
}

TEST_CASE("dyadic maximal: constants and point masses") {
  MetricMeasureSpace s = make_path(65, 1.0);
  CubeHierarchy h = build_hierarchy(s, 0);

  Eigen::VectorXd c = Eigen::VectorXd::Constant(65, -3.25);
  Eigen::VectorXd mc = dyadic_maximal(s, h, c);
  for (int i = 0; i < 65; ++i) CHECK(mc[i] == doctest::Approx(3.25));

  // point mass: brute force over each point's cube chain
  Eigen::VectorXd f = Eigen::VectorXd::Zero(65);
  f[17] = 1.0;
  Eigen::VectorXd mf = dyadic_maximal(s, h, f);
  for (int x = 0; x < 65; ++x) {
    double best = 0;
    for (const auto& lvl : h.levels) {
      for (const auto& q : lvl) {
        bool has_x = false, has_y = false;
        double mass = 0;
        for (int m : q.members) {
          if (m == x) has_x = true;
          if (m == 17) has_y = true;
          mass += s.mu[m];
        }
        if (has_x && has_y) best = std::max(best, s.mu[17] / mass);
      }
    }
    CHECK(mf[x] == doctest::Approx(best));
  }
}

TEST_CASE("dyadic weak (1,1) constant is exactly 1") {
  for (auto mk : {+[] { return make_path(201, 1.0); },
                  +[] { return make_grid(2, 41, 1.0); }}) {
    MetricMeasureSpace s = mk();
    CubeHierarchy h = build_hierarchy(s, 0);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd f(s.n);
      for (int i = 0; i < s.n; ++i) f[i] = unif(rng) - 0.3;
      Eigen::VectorXd md = dyadic_maximal(s, h, f);
      double l1 = f.cwiseAbs().dot(s.mu);
      std::vector<double> lambdas(md.data(), md.data() + md.size());
      std::sort(lambdas.begin(), lambdas.end());
      lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
      for (double lam : lambdas) {
        if (lam <= 0) continue;
        double mass = 0;
        for (int i = 0; i < s.n; ++i)
          if (md[i] > lam) mass += s.mu[i];
        CHECK(mass <= l1 / lam);  // zero tolerance
      }
    }
  }
}

TEST_CASE("dyadic maximal is sublinear and monotone in lmax") {
  MetricMeasureSpace s = make_path(65, 1.0);
  CubeHierarchy h = build_hierarchy(s, 0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Eigen::VectorXd f(65), q(65);
  for (int i = 0; i < 65; ++i) { f[i] = g(rng); q[i] = g(rng); }
  Eigen::VectorXd mf = dyadic_maximal(s, h, f);
  Eigen::VectorXd mg = dyadic_maximal(s, h, q);
  Eigen::VectorXd ms = dyadic_maximal(s, h, f + q);
  for (int i = 0; i < 65; ++i) CHECK(ms[i] <= mf[i] + mg[i] + 1e-12);
  Eigen::VectorXd m8 = dyadic_maximal(s, h, f, 8.0);
  Eigen::VectorXd m64 = dyadic_maximal(s, h, f, 64.0);
  for (int i = 0; i < 65; ++i) CHECK(m8[i] <= m64[i] + 1e-15);
}
