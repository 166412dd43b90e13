#include "mml/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "mml/maximal.hpp"

namespace mml {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

KernelMatrix riesz_form_kernel(const MetricMeasureSpace& s, double exp_s) {
  KernelMatrix K;
  K.tag = "riesz";
  K.param_s = exp_s;
  K.values = Eigen::MatrixXd::Zero(s.n, s.n);
  for (int x = 0; x < s.n; ++x) {
    SortedBallScan scan(s, x);
    for (int i = 1; i < s.n; ++i) {
      int y = scan.order[i];
      double d = scan.dist[i];
      // mu(B(x,d)) with the open-ball convention: strictly closer points
      int j = i;
      while (j > 0 && scan.dist[j - 1] == d) --j;
      double vol = scan.mu_pre[j - 1];
      K.values(x, y) = std::pow(d, exp_s) / vol;
    }
  }
  return K;
}

KernelMatrix bessel_form_kernel(const MetricMeasureSpace& s, double exp_s,
                                double lambda) {
  if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
  KernelMatrix K = riesz_form_kernel(s, exp_s);
  K.tag = "bessel";
  K.param_lambda = lambda;
  double far_scale = std::pow(lambda, -exp_s);
  for (int x = 0; x < s.n; ++x) {
    double vol_far = s.ball_measure(x, 1.0 / lambda);
    for (int y = 0; y < s.n; ++y) {
      if (y == x) continue;
      double d = s.dist(x, y);
      if (lambda * d > 1.0)
        K.values(x, y) = far_scale / vol_far * std::exp(1.0 - lambda * d);
    }
  }
  return K;
}

KernelMatrix power_kernel(const MetricMeasureSpace& s, double exponent) {
  KernelMatrix K;
  K.tag = "power";
  K.param_s = exponent;
  K.values = Eigen::MatrixXd::Zero(s.n, s.n);
  for (int x = 0; x < s.n; ++x)
    for (int y = 0; y < s.n; ++y)
      if (y != x) K.values(x, y) = std::pow(s.dist(x, y), exponent);
  return K;
}

std::pair<double, TripleWitness> kernel_condition_check(
    const MetricMeasureSpace& s, const KernelMatrix& K, double C2,
    double dmax) {
  if (C2 <= 1) throw std::invalid_argument("C2 must exceed 1");
  double C1 = 1.0;
  TripleWitness w;
  for (int x = 0; x < s.n; ++x) {
    for (int y = 0; y < s.n; ++y) {
      if (y == x) continue;
      double dxy = s.dist(x, y);
      if (dxy > dmax) continue;
      double kxy = K.values(x, y);
      if (kxy < 0)
        throw std::invalid_argument("negative kernel entry in comparison");
      if (kxy == 0) continue;
      for (int z = 0; z < s.n; ++z) {
        // first slot: x -> z
        if (z != y && s.dist(z, y) <= C2 * dxy) {
          double kzy = K.values(z, y);
          if (kzy <= 0) {
            w = {x, z, y, kInf};
            return {kInf, w};
          }
          double ratio = kxy / kzy;
          if (ratio > C1) {
            C1 = ratio;
            w = {x, z, y, ratio};
          }
        }
        // second slot: y -> z
        if (z != x && s.dist(x, z) <= C2 * dxy) {
          double kxz = K.values(x, z);
          if (kxz <= 0) {
            w = {x, z, y, kInf};
            return {kInf, w};
          }
          double ratio = kxy / kxz;
          if (ratio > C1) {
            C1 = ratio;
            w = {x, z, y, ratio};
          }
        }
      }
    }
  }
  return {C1, w};
}

PhiValue phi_functional(const MetricMeasureSpace& s, const KernelMatrix& K,
                        int /*center*/, double radius,
                        const std::vector<int>& members, double rho) {
  PhiValue out;
  double threshold = radius / (2 * rho);
  bool found = false;
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = 0; j < members.size(); ++j) {
      if (i == j) continue;
      int x = members[i], y = members[j];
      if (s.dist(x, y) >= threshold) {
        out.value = std::max(out.value, K.values(x, y));
        found = true;
      }
    }
  }
  out.empty_sup = !found;
  return out;
}

PhiGrowthResult phi_growth_constant(const MetricMeasureSpace& s,
                                    const KernelMatrix& K, double eps,
                                    double delta_cap, double rho) {
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  PhiGrowthResult res;

  struct BallRec {
    int center;
    double r;
    double phi_mu;  // phi(B) * mu(B)
  };
  // enumerate distinct critical balls per center up to delta_cap
  std::vector<std::vector<BallRec>> per_center(s.n);
  for (int c = 0; c < s.n; ++c) {
    SortedBallScan scan(s, c);
    std::vector<int> members;
    int i = 0;
    while (i < s.n) {
      int j = i;
      while (j + 1 < s.n && scan.dist[j + 1] == scan.dist[i]) ++j;
      for (int q = i; q <= j; ++q) members.push_back(scan.order[q]);
      double next = (j + 1 < s.n) ? scan.dist[j + 1] : scan.dist[j] + 1.0;
      double r = std::min(next, delta_cap);
      if (r > scan.dist[j] && scan.dist[j] < delta_cap) {
        PhiValue pv = phi_functional(s, K, c, r, members, rho);
        per_center[c].push_back({c, r, pv.value * scan.mu_pre[j]});
      }
      if (next >= delta_cap) break;
      i = j + 1;
    }
  }

  auto consider = [&](const BallRec& b1, const BallRec& b2) {
    // B1 inside B2, r1 <= r2
    if (b1.r > b2.r) return;
    if (b2.phi_mu <= 0) return;
    double bound = std::pow(b1.r / b2.r, eps) * b2.phi_mu;
    double L = b1.phi_mu / bound;
    if (L > res.L) {
      res.L = L;
      res.witness_center1 = b1.center;
      res.witness_center2 = b2.center;
      res.witness_r1 = b1.r;
      res.witness_r2 = b2.r;
    }
  };

  // concentric chains: exact inclusion
  for (int c = 0; c < s.n; ++c)
    for (size_t i = 0; i < per_center[c].size(); ++i)
      for (size_t j = i; j < per_center[c].size(); ++j)
        consider(per_center[c][i], per_center[c][j]);

  // cross-center pairs on a deterministic center sample, inclusion certified
  // by d(c1,c2) + r1 <= r2
  int stride = std::max(1, s.n / 64);
  for (int c1 = 0; c1 < s.n; c1 += stride) {
    for (int c2 = 0; c2 < s.n; c2 += stride) {
      if (c1 == c2) continue;
      double dc = s.dist(c1, c2);
      for (const auto& b1 : per_center[c1])
        for (const auto& b2 : per_center[c2])
          if (dc + b1.r <= b2.r) consider(b1, b2);
    }
  }
  res.pass = std::isfinite(res.L);
  return res;
}

Eigen::VectorXd truncated_apply(const MetricMeasureSpace& s,
                                const KernelMatrix& K, double delta,
                                const Eigen::VectorXd& f) {
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n);
  for (int x = 0; x < s.n; ++x) {
    Eigen::VectorXd row = s.dist_row(x);
    double acc = 0;
    for (int y = 0; y < s.n; ++y) {
      if (y == x || row[y] >= delta) continue;
      acc += K.values(x, y) * f[y] * s.mu[y];
    }
    out[x] = acc;
  }
  return out;
}

DominationReport domination_check(const MetricMeasureSpace& s,
                                  const KernelMatrix& K, double delta, double p,
                                  int trials, std::uint64_t seed, double rho) {
  if (!(p > 1)) throw std::invalid_argument("p must exceed 1");
  DominationReport rep;
  // scaled doubling recorded for context (hypotheses of the domination
  // theorem involve doubling up to 2(6 rho + 1) delta)
  double scale = 2 * (6 * rho + 1) * delta;
  rep.doubling_at_scale =
      doubling_profile(s, std::min(scale, s.diameter())).A;

  BallFunctional phi = [&](int c, double r, const std::vector<int>& members) {
    return phi_functional(s, K, c, r, members, rho).value;
  };

  auto lp = [&](const Eigen::VectorXd& v) {
    double acc = 0;
    for (int i = 0; i < s.n; ++i) acc += std::pow(std::abs(v[i]), p) * s.mu[i];
    return std::pow(acc, 1.0 / p);
  };

  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + 7919ull * t);
    std::uniform_int_distribution<int> pick(0, s.n - 1);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(s.n);
    switch (t % 4) {
      case 0:
        f[pick(rng)] = 1.0;
        break;
      case 1: {
        int c = pick(rng);
        std::uniform_real_distribution<double> rad(s.min_positive_distance(),
                                                   std::max(delta, 1.0));
        for (int y : s.ball_members(c, rad(rng))) f[y] = 1.0;
        break;
      }
      case 2:
        f = Eigen::VectorXd::Ones(s.n);
        break;
      default:
        for (int i = 0; i < s.n; ++i) f[i] = std::abs(gauss(rng));
    }
    if (f.cwiseAbs().maxCoeff() == 0) continue;
    Eigen::VectorXd Tf = truncated_apply(s, K, delta, f);
    Eigen::VectorXd Mf = phi_maximal(s, phi, f, delta);
    double num = lp(Tf), den = lp(Mf);
    if (den == 0) {
      if (num > 0) {
        rep.violation = true;
        rep.violation_trial = t;
      }
      continue;
    }
    double ratio = num / den;
    rep.trial_ratios.push_back(ratio);
    rep.C_emp = std::max(rep.C_emp, ratio);
  }
  return rep;
}

}  // namespace mml
