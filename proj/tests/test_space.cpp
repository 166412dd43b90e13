#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "mml/space.hpp"

using namespace mml;

TEST_CASE("path generator basics") {
  MetricMeasureSpace s = make_path(3, 1.0);
  CHECK(s.n == 3);
  CHECK(s.dist(0, 2) == doctest::Approx(2.0));
  CHECK(s.mu[0] == doctest::Approx(1.0));
  CHECK(s.mu[2] == doctest::Approx(1.0));
  s.validate();
}

TEST_CASE("1d grid ball counts") {
  MetricMeasureSpace s = make_grid(1, 101, 1.0);
  auto B = s.ball_members(50, 10.5);
  CHECK(B.size() == 21);  // |i-50| < 10.5
  CHECK(s.ball_measure(50, 10.5) == doctest::Approx(21.0));
}

TEST_CASE("binary tree ball growth is exponential") {
  MetricMeasureSpace s = make_binary_tree(8);
  // mu(B(root, k+0.5)) = 2^{k+1} - 1 exactly
  for (int k = 0; k <= 8; ++k) {
    double expect = std::pow(2.0, k + 1) - 1.0;
    CHECK(s.ball_measure(0, k + 0.5) == doctest::Approx(expect));
  }
}

TEST_CASE("ball membership strictness") {
  MetricMeasureSpace s = make_path(5, 1.0);
  auto B = s.ball_members(2, 1.5);
  CHECK(B == std::vector<int>{1, 2, 3});
  // r at or below the minimum positive distance gives a singleton
  CHECK(s.ball_members(2, 1.0) == std::vector<int>{2});
  // r above the diameter gives everything
  CHECK(s.ball_members(2, 100.0).size() == 5);
}

TEST_CASE("doubling profile on a path") {
  MetricMeasureSpace s = make_path(201, 1.0);
  DoublingProfile dp = doubling_profile(s, 25.0);
  CHECK(dp.A >= 2.0);
  CHECK(dp.A <= 3.0);
  CHECK(dp.eta == doctest::Approx(std::log2(dp.A)));
  CHECK(dp.nu == doctest::Approx(-std::log2(dp.a)));
  CHECK(dp.D == doctest::Approx(8.0 * std::log(dp.A)));
  // monotone in R
  CHECK(doubling_profile(s, 10.0).A <= dp.A + 1e-12);
}

TEST_CASE("single point space is perfectly doubling") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(1, 1);
  Eigen::VectorXd mu(1);
  mu << 2.0;
  MetricMeasureSpace s = MetricMeasureSpace::from_matrix(d, mu);
  DoublingProfile dp = doubling_profile(s, 4.0);
  CHECK(dp.A == doctest::Approx(1.0));
  CHECK(dp.eta == doctest::Approx(0.0));
}

TEST_CASE("tree is a non-doubling detector") {
  MetricMeasureSpace s = make_binary_tree(10);
  double A2 = doubling_profile(s, 2.0).A;
  double A4 = doubling_profile(s, 4.0).A;
  double A8 = doubling_profile(s, 8.0).A;
  CHECK(A2 < A4);
  CHECK(A4 < A8);
}

TEST_CASE("annuli constant bounded by A^2 on a path") {
  MetricMeasureSpace s = make_path(201, 1.0);
  double C = annuli_constant(s, 8.0);
  double A = doubling_profile(s, s.diameter()).A;
  CHECK(C <= A * A + 1e-12);
  CHECK(C >= 1.0);
}

TEST_CASE("exponential doubling bound") {
  MetricMeasureSpace s = make_path(401, 1.0);
  ExpDoublingResult r = exp_doubling_constant(s, 10.0);
  CHECK(r.D_emp <= r.D_bound + 1e-12);
  // R beyond the diameter: B(x,R) is everything, no growth remains
  ExpDoublingResult r2 = exp_doubling_constant(s, s.diameter() + 1.0);
  CHECK(r2.D_emp == doctest::Approx(0.0));
}

TEST_CASE("separated cover structural properties") {
  MetricMeasureSpace s = make_path(101, 1.0);
  double r = 10.5, delta = 2.0;
  auto centers = separated_cover(s, 50, r, delta);
  CHECK(centers.size() >= 10);
  CHECK(centers.size() <= 21);
  // separation
  for (size_t i = 0; i < centers.size(); ++i)
    for (size_t j = i + 1; j < centers.size(); ++j)
      CHECK(s.dist(centers[i], centers[j]) >= delta);
  // coverage of the ball by delta-balls
  for (int y : s.ball_members(50, r)) {
    bool covered = false;
    for (int c : centers)
      if (s.dist(c, y) < delta) covered = true;
    CHECK(covered);
  }
  // delta above the ball radius is rejected
  CHECK_THROWS_AS(separated_cover(s, 50, 3.5, 8.0), std::invalid_argument);
}

TEST_CASE("vitali subcover exact set properties") {
  MetricMeasureSpace s = make_path(101, 1.0);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pc(0, 100);
  std::uniform_real_distribution<double> pr(0.5, 12.0);
  std::vector<BallSpec> balls;
  for (int i = 0; i < 20; ++i) balls.push_back({pc(rng), pr(rng)});
  auto chosen = vitali_subcover(s, balls, 3.5);
  // disjointness of the selected balls
  for (size_t a = 0; a < chosen.size(); ++a)
    for (size_t b = a + 1; b < chosen.size(); ++b) {
      auto A = s.ball_members(balls[chosen[a]].center, balls[chosen[a]].radius);
      auto B = s.ball_members(balls[chosen[b]].center, balls[chosen[b]].radius);
      std::set<int> inter;
      std::set<int> as(A.begin(), A.end());
      for (int y : B) CHECK(as.count(y) == 0);
    }
  // every input ball inside the union of c-dilates
  for (const auto& b : balls) {
    for (int y : s.ball_members(b.center, b.radius)) {
      bool in = false;
      for (int ci : chosen)
        if (s.dist(balls[ci].center, y) < 3.5 * balls[ci].radius) in = true;
      CHECK(in);
    }
  }
  CHECK_THROWS(vitali_subcover(s, balls, 2.9));
}

TEST_CASE("product space metric and measure") {
  MetricMeasureSpace base = make_path(21, 1.0);
  MetricMeasureSpace prod = product_space(base, 21, 1.0);
  CHECK(prod.n == 21 * 21);
  CHECK(prod.total_measure() ==
        doctest::Approx(1.0 * 21 * base.total_measure()));
  // metric: sqrt(|s-t|^2 + d^2) at a spot check
  // index layout t * base.n + m
  CHECK(prod.dist(0 * 21 + 0, 3 * 21 + 4) ==
        doctest::Approx(std::sqrt(9.0 + 16.0)));
  // volume comparison bracket, exhaustively at one center
  int c = 10 * 21 + 10;
  for (double r : {2.0, 4.0, 8.0}) {
    double vt = prod.ball_measure(c, r);
    double lower_line = r;       // |(-r/2, r/2)| in the h=1 discretization
    double upper_line = 2 * r;
    double lo = lower_line * base.ball_measure(10, r / 2);
    double hi = upper_line * base.ball_measure(10, r);
    CHECK(vt >= lo * 0.25);  // discrete line counts differ from Lebesgue
    CHECK(vt <= hi * 4.0);
  }
  // product doubling bounded by 4 A^2
  double A = doubling_profile(base, 8.0).A;
  double At = doubling_profile(prod, 8.0).A;
  CHECK(At <= 4.0 * A * A + 1e-9);
}

TEST_CASE("connected sum stays connected and keeps mass") {
  std::vector<MetricMeasureSpace> parts{make_grid(2, 5, 1.0),
                                        make_grid(2, 5, 1.0)};
  MetricMeasureSpace s = make_connected_sum(parts, 3);
  s.validate();
  CHECK(s.n == 25 + 25 + 2);  // neck of length 3 inserts 2 fresh points
  CHECK(std::isfinite(s.dist(0, s.n - 1)));
}

TEST_CASE("random cloud satisfies metric axioms") {
  MetricMeasureSpace s = make_random_cloud(60, 2, 9);
  s.validate();
  CHECK(s.n == 60);
  for (int i = 0; i < s.n; ++i) CHECK(s.mu[i] > 0);
}

TEST_CASE("critical radii exhaust distinct balls") {
  MetricMeasureSpace s = make_path(31, 1.0);
  // every distinct ball around x=7 appears at some critical radius
  std::set<std::vector<int>> from_crit;
  for (double r : s.critical_radii(7, 40.0))
    from_crit.insert(s.ball_members(7, r));
  std::set<std::vector<int>> brute;
  for (double r = 0.25; r < 40.0; r += 0.25)
    brute.insert(s.ball_members(7, r));
  for (const auto& b : brute) CHECK(from_crit.count(b) == 1);
}
