#include "mml/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "mml/maximal.hpp"

namespace mml {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> full_set(int n) {
  std::vector<int> d(n);
  for (int i = 0; i < n; ++i) d[i] = i;
  return d;
}

SpMat principal_submatrix(const SpMat& Q, const std::vector<int>& idx) {
  const int n = static_cast<int>(Q.rows());
  std::vector<int> local(n, -1);
  for (size_t i = 0; i < idx.size(); ++i) local[idx[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < Q.outerSize(); ++k) {
    for (SpMat::InnerIterator it(Q, k); it; ++it) {
      int r = local[it.row()], c = local[it.col()];
      if (r >= 0 && c >= 0) trips.push_back({r, c, it.value()});
    }
  }
  SpMat out(idx.size(), idx.size());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// smallest eigenvalue of a symmetric matrix given dense/sparse dispatch
double smallest_eig(const SpMat& S) {
  const int n = static_cast<int>(S.rows());
  if (n <= kDenseEig) {
    return sym_eigenvalues(Eigen::MatrixXd(S))[0];
  }
  ApplyFn apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y = S * x;
  };
  return lanczos_smallest(apply, n, 1e-11, 800);
}

}  // namespace

SpMat DirichletOperator::Qd() const {
  return full_domain() ? Q : principal_submatrix(Q, domain);
}

Eigen::VectorXd DirichletOperator::mud() const {
  if (full_domain()) return mu;
  Eigen::VectorXd m(domain.size());
  for (size_t i = 0; i < domain.size(); ++i) m[i] = mu[domain[i]];
  return m;
}

SpMat DirichletOperator::Sd() const {
  SpMat Qr = Qd();
  Eigen::VectorXd inv_sqrt = mud().cwiseSqrt().cwiseInverse();
  SpMat D(Qr.rows(), Qr.rows());
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < Qr.rows(); ++i) trips.push_back({i, i, inv_sqrt[i]});
  D.setFromTriplets(trips.begin(), trips.end());
  return D * Qr * D;
}

double DirichletOperator::quadratic_form(const Eigen::VectorXd& psi) const {
  return psi.dot(Q * psi);
}

DirichletOperator dirichlet_operator(const MetricMeasureSpace& s,
                                     std::vector<int> domain) {
  return dirichlet_operator(s, s.edges, std::move(domain));
}

DirichletOperator dirichlet_operator(const MetricMeasureSpace& s,
                                     const std::vector<Edge>& edges,
                                     std::vector<int> domain) {
  DirichletOperator op;
  op.n = s.n;
  op.mu = s.mu;
  op.domain = domain.empty() ? full_set(s.n) : std::move(domain);
  if (op.domain.empty()) throw std::invalid_argument("empty domain");
  std::sort(op.domain.begin(), op.domain.end());
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& e : edges) {
    if (e.conductance <= 0)
      throw std::invalid_argument("conductances must be positive");
    trips.push_back({e.u, e.u, e.conductance});
    trips.push_back({e.v, e.v, e.conductance});
    trips.push_back({e.u, e.v, -e.conductance});
    trips.push_back({e.v, e.u, -e.conductance});
  }
  op.Q.resize(s.n, s.n);
  op.Q.setFromTriplets(trips.begin(), trips.end());
  return op;
}

std::vector<int> interior_domain(const MetricMeasureSpace& s) {
  if (s.coords.empty())
    throw std::invalid_argument("interior requires coordinates");
  size_t dim = s.coords[0].size();
  std::vector<double> lo(dim, kInf), hi(dim, -kInf);
  for (const auto& c : s.coords)
    for (size_t k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], c[k]);
      hi[k] = std::max(hi[k], c[k]);
    }
  std::vector<int> out;
  for (int i = 0; i < s.n; ++i) {
    bool inner = true;
    for (size_t k = 0; k < dim; ++k)
      if (s.coords[i][k] == lo[k] || s.coords[i][k] == hi[k]) inner = false;
    if (inner) out.push_back(i);
  }
  if (out.empty()) throw std::invalid_argument("empty interior");
  return out;
}

double lambda1(const DirichletOperator& op, const std::vector<int>& U) {
  if (U.empty()) throw std::invalid_argument("empty subset");
  DirichletOperator sub = op;
  sub.domain = U;
  std::sort(sub.domain.begin(), sub.domain.end());
  return smallest_eig(sub.Sd());
}

double lambda1(const DirichletOperator& op) { return smallest_eig(op.Sd()); }

double schrodinger_lambda1(const DirichletOperator& op,
                           const Eigen::VectorXd& V) {
  SpMat S = op.Sd();
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < op.dim(); ++i)
    trips.push_back({i, i, -V[op.domain[i]]});
  SpMat D(op.dim(), op.dim());
  D.setFromTriplets(trips.begin(), trips.end());
  SpMat M = S + D;
  return smallest_eig(M);
}

SpectralData spectral_data(const DirichletOperator& op) {
  SpectralData sd;
  Eigen::MatrixXd S(op.Sd());
  Eigen::MatrixXd U;
  sym_eigendecompose(S, sd.evals, U);
  Eigen::VectorXd inv_sqrt = op.mud().cwiseSqrt().cwiseInverse();
  sd.phi = inv_sqrt.asDiagonal() * U;
  return sd;
}

HeatKernel heat_kernel(const DirichletOperator& op,
                       const std::vector<double>& times) {
  for (double t : times)
    if (t <= 0) throw std::invalid_argument("times must be positive");
  HeatKernel hk;
  hk.times = times;
  hk.spec = spectral_data(op);
  for (double t : times) {
    Eigen::VectorXd w = (-t * hk.spec.evals.array()).exp();
    hk.mats.push_back(hk.spec.phi * w.asDiagonal() * hk.spec.phi.transpose());
  }
  return hk;
}

std::vector<Eigen::VectorXd> heat_rows(const DirichletOperator& op, int x_local,
                                       const std::vector<double>& times,
                                       int krylov_dim) {
  SpMat S = op.Sd();
  const int m = static_cast<int>(S.rows());
  ApplyFn apply = [&](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
    y = S * v;
  };
  KrylovFn kf(apply, Eigen::VectorXd::Unit(m, x_local), krylov_dim);
  Eigen::VectorXd inv_sqrt = op.mud().cwiseSqrt().cwiseInverse();
  std::vector<Eigen::VectorXd> rows;
  for (double t : times) {
    Eigen::VectorXd v = kf.eval([&](double lam) { return std::exp(-t * lam); });
    rows.push_back(inv_sqrt[x_local] * inv_sqrt.cwiseProduct(v));
  }
  return rows;
}

GaussianFit gaussian_bound_fit(const MetricMeasureSpace& s,
                               const DirichletOperator& op,
                               const std::vector<double>& times, double R,
                               double c, double lambda, double gamma,
                               int max_rows) {
  if (c <= 4) throw std::invalid_argument("c must exceed 4");
  bool has_small = false, has_large = false;
  for (double t : times) (t <= R * R ? has_small : has_large) = true;
  if (!has_small || !has_large)
    throw std::invalid_argument("time grid must straddle R^2");

  const int m = op.dim();
  // distinct ball radii needed: sqrt(t) per small-regime t, R, and 1/lambda
  std::vector<double> radii;
  for (double t : times)
    if (t <= R * R) radii.push_back(std::sqrt(t));
  radii.push_back(R);
  if (lambda > 0) {
    radii.push_back(1.0 / lambda);
    for (double t : times)
      if (std::sqrt(t) <= 1.0 / lambda) radii.push_back(std::sqrt(t));
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  // ball measures for every domain point at every radius
  Eigen::MatrixXd vol(m, radii.size());
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd row = s.dist_row(op.domain[i]);
    for (size_t k = 0; k < radii.size(); ++k) {
      double acc = 0;
      for (int y = 0; y < s.n; ++y)
        if (row[y] < radii[k]) acc += s.mu[y];
      vol(i, k) = acc;
    }
  }
  auto rad_index = [&](double r) {
    return std::lower_bound(radii.begin(), radii.end(), r) - radii.begin();
  };

  GaussianFit fit;
  bool dense = m <= kDenseEig;
  SpectralData sd;
  if (dense) sd = spectral_data(op);
  // Gaussian-form bounds hold on graphs only in the diffusive regime
  // t >= h d(x,y); below it the kernel has Poisson tails and the sup
  // over pairs diverges, so those pairs are excluded from the fit.
  const double hmin = s.min_positive_distance();
  int stride = std::max(1, m / std::max(1, max_rows));
  for (int i = 0; i < m; i += stride) {
    std::vector<Eigen::VectorXd> rows;
    if (dense) {
      for (double t : times) {
        Eigen::VectorXd w = (-t * sd.evals.array()).exp();
        rows.push_back(sd.phi * w.cwiseProduct(sd.phi.row(i).transpose()));
      }
    } else {
      rows = heat_rows(op, i, times);
    }
    Eigen::VectorXd drow = s.dist_row(op.domain[i]);
    for (size_t ti = 0; ti < times.size(); ++ti) {
      double t = times[ti];
      bool small = t <= R * R;
      size_t k = rad_index(small ? std::sqrt(t) : R);
      for (int j = 0; j < m; ++j) {
        double p = std::max(rows[ti][j], 0.0);
        if (p == 0) continue;
        double d = drow[op.domain[j]];
        if (hmin * d > t) continue;
        double val =
            p * std::sqrt(vol(i, k) * vol(j, k)) * std::exp(d * d / (c * t));
        (small ? fit.C_small : fit.C_large) =
            std::max(small ? fit.C_small : fit.C_large, val);
        if (lambda > 0) {
          bool near = std::sqrt(t) <= 1.0 / lambda;
          size_t kl = rad_index(near ? std::sqrt(t) : 1.0 / lambda);
          double vl = p * vol(i, kl) * std::exp(d * d / (c * t));
          if (!near) vl *= std::exp(-(1.0 - gamma) * lambda * lambda * t);
          fit.C_lambda = std::max(fit.C_lambda, vl);
        }
      }
    }
  }
  return fit;
}

Eigen::MatrixXd riesz_kernel(const DirichletOperator& op, double exp_s) {
  SpectralData sd = spectral_data(op);
  double scale = std::max(std::abs(sd.evals[op.dim() - 1]), 1.0);
  if (sd.evals[0] <= 1e-12 * scale)
    throw std::invalid_argument(
        "riesz kernel requires a positive spectrum (Dirichlet domain)");
  Eigen::VectorXd w = sd.evals.array().pow(-exp_s / 2);
  return sd.phi * w.asDiagonal() * sd.phi.transpose();
}

Eigen::MatrixXd bessel_kernel(const DirichletOperator& op, double exp_s,
                              double lambda) {
  SpectralData sd = spectral_data(op);
  if (lambda <= 0 && sd.evals[0] <= 0)
    throw std::invalid_argument("bessel kernel needs lambda > 0 or positive spectrum");
  Eigen::VectorXd w =
      (sd.evals.array() + lambda * lambda).pow(-exp_s / 2);
  return sd.phi * w.asDiagonal() * sd.phi.transpose();
}

double riesz_bound_fit(const MetricMeasureSpace& s, const DirichletOperator& op,
                       double exp_s, int max_cols) {
  const int m = op.dim();
  int stride = std::max(1, m / max_cols);
  bool dense = m <= kDenseEig;
  SpectralData sd;
  SpMat S;
  if (dense) {
    sd = spectral_data(op);
    double scale = std::max(std::abs(sd.evals[m - 1]), 1.0);
    if (sd.evals[0] <= 1e-12 * scale)
      throw std::invalid_argument("riesz fit requires positive spectrum");
  } else {
    S = op.Sd();
  }
  Eigen::VectorXd inv_sqrt = op.mud().cwiseSqrt().cwiseInverse();
  double C = 0;
  for (int j = 0; j < m; j += stride) {
    Eigen::VectorXd col;
    if (dense) {
      Eigen::VectorXd w = sd.evals.array().pow(-exp_s / 2);
      col = sd.phi * w.cwiseProduct(sd.phi.row(j).transpose());
    } else {
      ApplyFn apply = [&](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
        y = S * v;
      };
      KrylovFn kf(apply, Eigen::VectorXd::Unit(m, j), 180);
      Eigen::VectorXd v =
          kf.eval([&](double lam) { return std::pow(std::max(lam, 1e-300), -exp_s / 2); });
      col = inv_sqrt[j] * inv_sqrt.cwiseProduct(v);
    }
    int yj = op.domain[j];
    Eigen::VectorXd drow = s.dist_row(yj);
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      int xi = op.domain[i];
      double d = drow[xi];
      double env = std::pow(d, exp_s) / s.ball_measure(xi, d);
      if (env <= 0) continue;
      C = std::max(C, std::max(col[i], 0.0) / env);
    }
  }
  return C;
}

BesselSeparation bessel_separation_check(const MetricMeasureSpace& s,
                                         const DirichletOperator& op,
                                         const Eigen::MatrixXd& g, double exp_s,
                                         double lambda,
                                         const std::vector<double>& gamma_grid) {
  BesselSeparation out;
  out.gammas = gamma_grid;
  const int m = op.dim();
  Eigen::MatrixXd env(m, m);
  for (int i = 0; i < m; ++i) {
    int xi = op.domain[i];
    Eigen::VectorXd drow = s.dist_row(xi);
    double far_env = std::pow(lambda, -exp_s) / s.ball_measure(xi, 1.0 / lambda);
    for (int j = 0; j < m; ++j) {
      if (j == i) { env(i, j) = kInf; continue; }
      double d = drow[op.domain[j]];
      env(i, j) = (lambda * d <= 1.0)
                      ? std::pow(d, exp_s) / s.ball_measure(xi, d)
                      : far_env;
    }
  }
  for (double gamma : gamma_grid) {
    double C = 0;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd drow = s.dist_row(op.domain[i]);
      for (int j = 0; j < m; ++j) {
        if (j == i || !std::isfinite(env(i, j))) continue;
        double d = drow[op.domain[j]];
        double denom = env(i, j) * std::exp(-gamma * lambda * d);
        C = std::max(C, std::max(g(i, j), 0.0) / denom);
      }
    }
    out.fitted_C.push_back(C);
  }
  return out;
}

FaberKrahnFit faber_krahn_fit(const MetricMeasureSpace& s,
                              const DirichletOperator& op, double R, double eta,
                              int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (eta <= 0) throw std::invalid_argument("eta must be positive");
  FaberKrahnFit fit;
  fit.b = kInf;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, s.n - 1);
  double dmin = s.min_positive_distance();
  std::uniform_real_distribution<double> rad(dmin, R);
  std::vector<char> in_domain(s.n, 0);
  for (int d : op.domain) in_domain[d] = 1;

  // neighbor lists for random connected subsets
  std::vector<std::vector<int>> nbr(s.n);
  for (const auto& e : s.edges) {
    nbr[e.u].push_back(e.v);
    nbr[e.v].push_back(e.u);
  }

  auto consider = [&](int x, double r, const std::vector<int>& U,
                      double muB) {
    if (U.empty() || static_cast<int>(U.size()) >= s.n) return;
    for (int u : U)
      if (!in_domain[u]) return;
    double lam = lambda1(op, U);
    double muU = 0;
    for (int u : U) muU += s.mu[u];
    double val = lam * r * r * std::pow(muU / muB, 2.0 / eta);
    if (val < fit.b) {
      fit.b = val;
      fit.witness_center = x;
      fit.witness_radius = r;
      fit.witness_subset_size = static_cast<int>(U.size());
    }
  };

  // deterministic candidate: the maximal-mass ball at the scale cap R, the
  // natural witness when volume growth outruns the doubling exponent
  {
    int xh = 0;
    double mh = -1;
    for (int x = 0; x < s.n; ++x) {
      double m = s.ball_measure(x, R);
      if (m > mh) { mh = m; xh = x; }
    }
    consider(xh, R, s.ball_members(xh, R), mh);
  }

  for (int t = 0; t < samples; ++t) {
    int x = pick(rng);
    double r = rad(rng);
    std::vector<int> B = s.ball_members(x, r);
    double muB = s.ball_measure(x, r);
    consider(x, r, B, muB);
    // sub-balls
    std::uniform_int_distribution<int> bp(0, static_cast<int>(B.size()) - 1);
    int xp = B[bp(rng)];
    std::vector<int> sub;
    std::vector<char> inB(s.n, 0);
    for (int y : B) inB[y] = 1;
    for (int y : s.ball_members(xp, r / 2))
      if (inB[y]) sub.push_back(y);
    consider(x, r, sub, muB);
    // random connected subset grown inside B along edges
    if (!s.edges.empty() && !B.empty()) {
      int seed_pt = B[bp(rng)];
      std::uniform_int_distribution<int> size_pick(
          1, std::max<int>(1, static_cast<int>(B.size()) - 1));
      int want = size_pick(rng);
      std::vector<int> grown{seed_pt};
      std::vector<char> taken(s.n, 0);
      taken[seed_pt] = 1;
      std::vector<int> frontier{seed_pt};
      while (static_cast<int>(grown.size()) < want && !frontier.empty()) {
        std::uniform_int_distribution<int> fp(
            0, static_cast<int>(frontier.size()) - 1);
        int u = frontier[fp(rng)];
        int added = -1;
        for (int v : nbr[u])
          if (inB[v] && !taken[v]) { added = v; break; }
        if (added < 0) {
          frontier.erase(std::find(frontier.begin(), frontier.end(), u));
          continue;
        }
        taken[added] = 1;
        grown.push_back(added);
        frontier.push_back(added);
      }
      consider(x, r, grown, muB);
    }
  }
  if (!std::isfinite(fit.b)) fit.b = 0;
  return fit;
}

namespace {

// theta_max of diag(V mu) psi = theta (Q + shift * M) psi on the domain.
double fp_theta(const DirichletOperator& op, const Eigen::VectorXd& V,
                double shift) {
  SpMat A = op.Qd();
  Eigen::VectorXd m = op.mud();
  if (shift > 0) {
    SpMat Mm(A.rows(), A.rows());
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < A.rows(); ++i) trips.push_back({i, i, shift * m[i]});
    Mm.setFromTriplets(trips.begin(), trips.end());
    A = A + Mm;
  }
  Eigen::VectorXd B(A.rows());
  for (int i = 0; i < A.rows(); ++i) B[i] = V[op.domain[i]] * m[i];
  if (static_cast<int>(A.rows()) <= kDenseEig)
    return pencil_largest_dense(Eigen::MatrixXd(A), B);
  return pencil_largest(A, B);
}

}  // namespace

double fefferman_phong_constant(const MetricMeasureSpace& s,
                                const DirichletOperator& op,
                                const Eigen::VectorXd& V, double p, double R) {
  double N = morrey_norm(s, V, p, R);
  if (N <= 0) throw std::invalid_argument("zero Morrey norm");
  double shift = std::isfinite(R) ? 1.0 / (R * R) : 0.0;
  if (shift == 0) {
    // needs a positive spectrum; probe the bottom
    if (lambda1(op) <= 1e-12)
      throw std::invalid_argument("R = infinity requires positive spectrum");
  }
  double theta = fp_theta(op, V, shift);
  if (op.dim() <= 500) {
    // adjoint route: largest eigenvalue of V^{1/2} (Q + shift M)^{-1} V^{1/2}
    Eigen::MatrixXd A(op.Qd());
    Eigen::VectorXd m = op.mud();
    for (int i = 0; i < op.dim(); ++i) A(i, i) += shift * m[i];
    Eigen::MatrixXd G = A.inverse();
    Eigen::VectorXd D(op.dim());
    for (int i = 0; i < op.dim(); ++i)
      D[i] = std::sqrt(std::max(V[op.domain[i]] * m[i], 0.0));
    Eigen::MatrixXd C = D.asDiagonal() * G * D.asDiagonal();
    double theta2 = sym_eigenvalues(C)[op.dim() - 1];
    if (std::abs(theta - theta2) > 1e-8 * std::max(1.0, theta))
      throw std::runtime_error("fefferman-phong cross-check mismatch");
  }
  return theta / N;
}

SpectrumBoundResult spectrum_bounds(const MetricMeasureSpace& s,
                                    const DirichletOperator& op,
                                    const Eigen::VectorXd& V, double p,
                                    double C1, double Cp) {
  if (C1 <= 0 || Cp <= 0) throw std::invalid_argument("constants must be positive");
  SpectrumBoundResult res;
  res.C1 = C1;
  res.Cp = Cp;
  res.lower = -kInf;
  res.upper = -kInf;
  double cap = s.diameter();
  for (int x = 0; x < s.n; ++x) {
    SortedBallScan scan(s, x);
    std::vector<double> v_pre(s.n), vp_pre(s.n);
    double a1 = 0, a2 = 0;
    for (int i = 0; i < s.n; ++i) {
      int y = scan.order[i];
      a1 += V[y] * s.mu[y];
      a2 += std::pow(V[y], p) * s.mu[y];
      v_pre[i] = a1;
      vp_pre[i] = a2;
    }
    scan.for_each_ball(cap, [&](int j, double delta) {
      double lo = C1 * v_pre[j] / scan.mu_pre[j] - 1.0 / (delta * delta);
      if (lo > res.lower) {
        res.lower = lo;
        res.lower_witness_x = x;
        res.lower_witness_delta = delta;
      }
      double up = Cp * std::pow(vp_pre[j] / scan.mu_pre[j], 1.0 / p) -
                  1.0 / (delta * delta);
      if (up > res.upper) {
        res.upper = up;
        res.upper_witness_x = x;
        res.upper_witness_delta = delta;
      }
    });
  }
  res.exact = schrodinger_lambda1(op, V);

  // tent-function variational report on a deterministic center sample
  res.tent_bound = kInf;
  int stride = std::max(1, s.n / 64);
  for (int o = 0; o < s.n; o += stride) {
    Eigen::VectorXd drow = s.dist_row(o);
    std::vector<double> rads = s.distance_values(o);
    size_t rstride = std::max<size_t>(1, rads.size() / 32);
    for (size_t k = 0; k < rads.size(); k += rstride) {
      double r = rads[k];
      Eigen::VectorXd psi(s.n);
      for (int y = 0; y < s.n; ++y)
        psi[y] = std::max(0.0, std::min(r, 2 * r - drow[y]));
      double den = 0, pot = 0;
      for (int y = 0; y < s.n; ++y) {
        den += psi[y] * psi[y] * s.mu[y];
        pot += V[y] * psi[y] * psi[y] * s.mu[y];
      }
      if (den <= 0) continue;
      double val = (op.quadratic_form(psi) - pot) / den;
      res.tent_bound = std::min(res.tent_bound, val);
    }
  }
  return res;
}

double calibrate_cp(const MetricMeasureSpace& s, const DirichletOperator& op,
                    double p, std::uint64_t seed) {
  std::vector<double> Rgrid;
  for (double R = 1.0; R < s.diameter(); R *= 2) Rgrid.push_back(R);
  Rgrid.push_back(s.diameter());

  std::vector<Eigen::VectorXd> family;
  for (int t = 0; t < 20; ++t) {
    std::mt19937_64 rng(seed + 104729ull * t);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> pick(0, s.n - 1);
    Eigen::VectorXd V(s.n);
    switch (t % 3) {
      case 0: {
        std::uniform_real_distribution<double> amp(0.1, 5.0);
        double a = amp(rng);
        for (int i = 0; i < s.n; ++i) {
          double u = unif(rng);
          V[i] = u * u * a;
        }
        break;
      }
      case 1:
        V.setZero();
        {
          std::uniform_real_distribution<double> amp(1.0, 20.0);
          V[pick(rng)] = amp(rng);
        }
        break;
      default:
        for (int i = 0; i < s.n; ++i) V[i] = std::exp(gauss(rng));
    }
    family.push_back(V);
  }

  double best = 0;
  for (double R : Rgrid) {
    double shift = 1.0 / (R * R);
    SpMat A = op.Qd();
    Eigen::VectorXd m = op.mud();
    // dense factorization reused across the family when affordable
    bool dense = op.dim() <= kDenseEig;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
    {
      SpMat Mm(A.rows(), A.rows());
      std::vector<Eigen::Triplet<double>> trips;
      for (int i = 0; i < A.rows(); ++i) trips.push_back({i, i, shift * m[i]});
      Mm.setFromTriplets(trips.begin(), trips.end());
      A = A + Mm;
    }
    if (dense) {
      llt.compute(Eigen::MatrixXd(A));
    } else {
      cg.setTolerance(1e-12);
      cg.compute(A);
    }
    for (const auto& V : family) {
      double N = morrey_norm(s, V, p, R);
      if (N <= 0) continue;
      Eigen::VectorXd D(op.dim());
      for (int i = 0; i < op.dim(); ++i)
        D[i] = std::sqrt(std::max(V[op.domain[i]] * m[i], 0.0));
      ApplyFn apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        Eigen::VectorXd t = D.cwiseProduct(x);
        Eigen::VectorXd z = dense ? llt.solve(t) : Eigen::VectorXd(cg.solve(t));
        y = D.cwiseProduct(z);
      };
      double theta = lanczos_largest(apply, op.dim(), 1e-8, 200);
      best = std::max(best, theta / N);
    }
  }
  return 2.0 * best;
}

PositivityReport positivity_checks(const MetricMeasureSpace& s,
                                   const DirichletOperator& op,
                                   const Eigen::VectorXd& V, double p, double R,
                                   double Cp, double lam1M, double lambda) {
  PositivityReport rep;
  if (lam1M > 0) {
    rep.ratio_lam = fp_theta(op, V, lam1M / 2);
    rep.bound_lam = Cp * morrey_norm(s, V, p, R) *
                    (1.0 + lam1M * R * R) / (lam1M * R * R);
    rep.pass_lam = rep.ratio_lam <= rep.bound_lam;
  }
  if (lambda > 0) {
    rep.ratio_lambda = fp_theta(op, V, lambda * lambda);
    rep.bound_lambda = Cp * morrey_norm(s, V, p, 1.0 / lambda);
    rep.pass_lambda = rep.ratio_lambda <= rep.bound_lambda;
  }
  return rep;
}

HardyReport hardy_check(const MetricMeasureSpace& s,
                        const DirichletOperator& op, int o, double p,
                        const HardyOptions& opts) {
  if (o < 0 || o >= s.n) throw std::invalid_argument("origin not in space");
  HardyReport rep;
  Eigen::VectorXd rho = s.dist_row(o);
  Eigen::VectorXd V(s.n);
  for (int i = 0; i < s.n; ++i) V[i] = (rho[i] > 0) ? 1.0 / (rho[i] * rho[i]) : 0.0;

  if (opts.compute_kp) rep.K_p = morrey_norm(s, V, p, opts.kp_radius);

  // C_H = max of <rho^{-2} psi, psi> / Q(psi) over the Dirichlet domain
  SpMat A = op.Qd();
  Eigen::VectorXd m = op.mud();
  Eigen::VectorXd B(op.dim());
  for (int i = 0; i < op.dim(); ++i) B[i] = V[op.domain[i]] * m[i];
  if (opts.dense_cross_check) {
    double dense_val = pencil_largest_dense(Eigen::MatrixXd(A), B);
    double sparse_val = pencil_largest(A, B);
    if (std::abs(dense_val - sparse_val) > 1e-6 * std::max(1.0, dense_val))
      throw std::runtime_error("hardy eigensolver cross-check mismatch");
    rep.C_H = sparse_val;
  } else if (op.dim() <= kDenseEig) {
    rep.C_H = pencil_largest_dense(Eigen::MatrixXd(A), B);
  } else {
    rep.C_H = pencil_largest(A, B);
  }
  rep.inv_C_H = 1.0 / rep.C_H;

  if (opts.witness_r > 0 && opts.witness_R > opts.witness_r) {
    double r = opts.witness_r, Rw = opts.witness_R, nu = opts.witness_nu;
    double e = (nu - 2) / 2;
    Eigen::VectorXd phi(s.n);
    for (int i = 0; i < s.n; ++i) {
      double t = rho[i];
      if (t <= r) phi[i] = std::pow(r, -e);
      else if (t <= Rw) phi[i] = std::pow(t, -e);
      else if (t <= 2 * Rw) phi[i] = 2 * std::pow(Rw, -e) - std::pow(Rw, -nu / 2) * t;
      else phi[i] = 0.0;
    }
    rep.witness_lhs = e * e * std::pow(r, -nu) * s.ball_measure(o, r);
    rep.witness_rhs = std::pow(Rw, -nu) *
                      (s.ball_measure(o, 2 * Rw) - s.ball_measure(o, Rw));
    double pot = 0;
    for (int i = 0; i < s.n; ++i) pot += V[i] * phi[i] * phi[i] * s.mu[i];
    rep.witness_rayleigh = (pot > 0) ? op.quadratic_form(phi) / pot : kInf;
  }
  return rep;
}

DirichletOperator product_operator(const MetricMeasureSpace& line_space,
                                   const DirichletOperator& line_op,
                                   const MetricMeasureSpace& s,
                                   const DirichletOperator& op) {
  const int nl = line_space.n, nm = s.n;
  DirichletOperator out;
  out.n = nl * nm;
  out.mu.resize(out.n);
  for (int t = 0; t < nl; ++t)
    for (int q = 0; q < nm; ++q) out.mu[t * nm + q] = line_space.mu[t] * s.mu[q];
  std::vector<char> in_dom(nm, 0);
  for (int d : op.domain) in_dom[d] = 1;
  std::vector<char> in_line(nl, 0);
  for (int d : line_op.domain) in_line[d] = 1;
  for (int t = 0; t < nl; ++t)
    for (int q = 0; q < nm; ++q)
      if (in_line[t] && in_dom[q]) out.domain.push_back(t * nm + q);
  // Q = Q_line (x) M_space + M_line (x) Q_space
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < line_op.Q.outerSize(); ++k)
    for (SpMat::InnerIterator it(line_op.Q, k); it; ++it)
      for (int q = 0; q < nm; ++q)
        trips.push_back({static_cast<int>(it.row()) * nm + q,
                         static_cast<int>(it.col()) * nm + q,
                         it.value() * s.mu[q]});
  for (int k = 0; k < op.Q.outerSize(); ++k)
    for (SpMat::InnerIterator it(op.Q, k); it; ++it)
      for (int t = 0; t < nl; ++t)
        trips.push_back({t * nm + static_cast<int>(it.row()),
                         t * nm + static_cast<int>(it.col()),
                         it.value() * line_space.mu[t]});
  out.Q.resize(out.n, out.n);
  out.Q.setFromTriplets(trips.begin(), trips.end());
  return out;
}

ProductIdentityReport product_identity_check(const MetricMeasureSpace& s,
                                             const DirichletOperator& op,
                                             const Eigen::VectorXd& V,
                                             int n_line, double h,
                                             const std::vector<double>& times) {
  ProductIdentityReport rep;
  MetricMeasureSpace line = make_path(n_line, h);
  DirichletOperator line_op = dirichlet_operator(line);
  DirichletOperator prod = product_operator(line, line_op, s, op);
  Eigen::VectorXd Vt(prod.n);
  for (int t = 0; t < n_line; ++t)
    for (int q = 0; q < s.n; ++q) Vt[t * s.n + q] = V[q];

  rep.lambda1_factor = schrodinger_lambda1(op, V);
  rep.lambda1_product = schrodinger_lambda1(prod, Vt);

  HeatKernel hk_line = heat_kernel(line_op, times);
  HeatKernel hk_m = heat_kernel(op, times);
  HeatKernel hk_p = heat_kernel(prod, times);
  double err = 0;
  const int nm = op.dim();
  for (size_t ti = 0; ti < times.size(); ++ti) {
    for (int t1 = 0; t1 < n_line; ++t1)
      for (int q1 = 0; q1 < nm; ++q1)
        for (int t2 = 0; t2 < n_line; ++t2)
          for (int q2 = 0; q2 < nm; ++q2) {
            double lhs = hk_p.mats[ti](t1 * nm + q1, t2 * nm + q2);
            double rhs = hk_line.mats[ti](t1, t2) * hk_m.mats[ti](q1, q2);
            err = std::max(err, std::abs(lhs - rhs));
          }
  }
  rep.heat_factorization_err = err;

  // Morrey comparability on the explicit product metric
  MetricMeasureSpace ps = product_space(s, n_line, h);
  Eigen::VectorXd Vps(ps.n);
  for (int t = 0; t < n_line; ++t)
    for (int q = 0; q < s.n; ++q) Vps[t * s.n + q] = V[q];
  double R = s.diameter() / 2;
  DoublingProfile dp = doubling_profile(s, R);
  double N = morrey_norm(s, V, 2.0, R);
  double Nt = morrey_norm(ps, Vps, 2.0, R);
  if (N > 0) {
    rep.morrey_ratio_lo = Nt / N;
    rep.morrey_ratio_hi = 4 * dp.A;
  }
  rep.product_doubling_A = doubling_profile(ps, R).A;

  rep.pass = std::abs(rep.lambda1_product - rep.lambda1_factor) < 1e-9 &&
             rep.heat_factorization_err < 1e-8 &&
             (N <= 0 || rep.morrey_ratio_lo <= rep.morrey_ratio_hi + 1e-12);
  return rep;
}

}  // namespace mml
