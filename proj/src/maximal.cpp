#include "mml/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mml {

Eigen::VectorXd fractional_maximal(const MetricMeasureSpace& s,
                                   const Eigen::VectorXd& f, double exp_s,
                                   double delta) {
  if (exp_s < 0) throw std::invalid_argument("s must be nonnegative");
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n);
  Eigen::VectorXd af = f.cwiseAbs();
  for (int x = 0; x < s.n; ++x) {
    SortedBallScan scan(s, x);
    std::vector<double> f_pre(s.n);
    double acc = 0;
    for (int i = 0; i < s.n; ++i) {
      acc += af[scan.order[i]] * s.mu[scan.order[i]];
      f_pre[i] = acc;
    }
    double best = 0;
    scan.for_each_ball(delta, [&](int j, double r_sup) {
      // radii r in (dist[j], r_sup) give this ball; sup of r^s at r -> r_sup
      double w = (exp_s == 0) ? 1.0 : std::pow(r_sup, exp_s);
      best = std::max(best, w * f_pre[j] / scan.mu_pre[j]);
    });
    out[x] = best;
  }
  return out;
}

Eigen::VectorXd uncentered_maximal(const MetricMeasureSpace& s,
                                   const Eigen::VectorXd& f, double R) {
  if (R <= 0) throw std::invalid_argument("R must be positive");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n);
  Eigen::VectorXd af = f.cwiseAbs();
  for (int c = 0; c < s.n; ++c) {
    SortedBallScan scan(s, c);
    double mass = 0, total = 0;
    int i = 0;
    const int m = s.n;
    while (i < m) {
      int j = i;
      while (j + 1 < m && scan.dist[j + 1] == scan.dist[i]) ++j;
      for (int q = i; q <= j; ++q) {
        mass += af[scan.order[q]] * s.mu[scan.order[q]];
        total += s.mu[scan.order[q]];
      }
      // ball {dist <= dist[j]} realized by radii in (dist[j], next); it is
      // admissible iff some admissible radius <= R exists, i.e. dist[j] < R
      if (scan.dist[j] < R) {
        double avg = mass / total;
        for (int q = 0; q <= j; ++q) {
          int y = scan.order[q];
          out[y] = std::max(out[y], avg);
        }
      }
      i = j + 1;
    }
  }
  return out;
}

double morrey_norm(const MetricMeasureSpace& s, const Eigen::VectorXd& V,
                   double p, double R) {
  if (p <= 0) throw std::invalid_argument("p must be positive");
  if ((V.array() < 0).any()) throw std::invalid_argument("potential negative");
  double best = 0;
  double cap = std::isfinite(R) ? R : s.diameter() + 1.0;
  for (int x = 0; x < s.n; ++x) {
    SortedBallScan scan(s, x);
    std::vector<double> vp_pre(s.n);
    double acc = 0;
    for (int i = 0; i < s.n; ++i) {
      acc += std::pow(V[scan.order[i]], p) * s.mu[scan.order[i]];
      vp_pre[i] = acc;
    }
    scan.for_each_ball(cap, [&](int j, double r_sup) {
      double avg = vp_pre[j] / scan.mu_pre[j];
      best = std::max(best, std::pow(std::pow(r_sup, 2 * p) * avg, 1.0 / p));
    });
  }
  return best;
}

Eigen::VectorXd phi_maximal(const MetricMeasureSpace& s,
                            const BallFunctional& phi, const Eigen::VectorXd& f,
                            double delta) {
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n);
  Eigen::VectorXd af = f.cwiseAbs();
  for (int c = 0; c < s.n; ++c) {
    SortedBallScan scan(s, c);
    double mass = 0;
    std::vector<int> members;
    int i = 0;
    while (i < s.n) {
      int j = i;
      while (j + 1 < s.n && scan.dist[j + 1] == scan.dist[i]) ++j;
      for (int q = i; q <= j; ++q) {
        members.push_back(scan.order[q]);
        mass += af[scan.order[q]] * s.mu[scan.order[q]];
      }
      double next = (j + 1 < s.n) ? scan.dist[j + 1] : scan.dist[j] + 1.0;
      if (scan.dist[j] < delta) {
        // representative radius for this ball, kept below delta
        double r = std::min(next, delta);
        if (r > scan.dist[j]) {
          double val = phi(c, r, members) * mass;
          for (int y : members) out[y] = std::max(out[y], val);
        }
      }
      i = j + 1;
    }
  }
  return out;
}

double empirical_lp_opnorm(
    const MetricMeasureSpace& s,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
    double p, int trials, std::uint64_t seed) {
  if (!(p > 1)) throw std::invalid_argument("p must exceed 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  auto lp = [&](const Eigen::VectorXd& v) {
    if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
    double acc = 0;
    for (int i = 0; i < s.n; ++i) acc += std::pow(std::abs(v[i]), p) * s.mu[i];
    return std::pow(acc, 1.0 / p);
  };
  double best = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + 1000003ull * t);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> pick(0, s.n - 1);
    Eigen::VectorXd f;
    switch (t % 4) {
      case 0:
        f = Eigen::VectorXd::Ones(s.n);
        break;
      case 1: {
        f = Eigen::VectorXd::Zero(s.n);
        f[pick(rng)] = 1.0;
        break;
      }
      case 2: {
        int c = pick(rng);
        std::uniform_real_distribution<double> rad(
            s.min_positive_distance(), s.diameter());
        double r = rad(rng);
        f = Eigen::VectorXd::Zero(s.n);
        for (int y : s.ball_members(c, r)) f[y] = 1.0;
        break;
      }
      default:
        f.resize(s.n);
        for (int i = 0; i < s.n; ++i) f[i] = gauss(rng);
    }
    double den = lp(f);
    if (den == 0) continue;
    best = std::max(best, lp(apply(f)) / den);
  }
  return best;
}

}  // namespace mml
