#include "mml/linalg.hpp"

#include <lapacke.h>

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mml {

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd work = A;
  Eigen::VectorXd w(n);
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n,
                            w.data());
  if (info != 0) throw std::runtime_error("dsyevd failed");
  return w;
}

void sym_eigendecompose(const Eigen::MatrixXd& A, Eigen::VectorXd& evals,
                        Eigen::MatrixXd& V) {
  const int n = static_cast<int>(A.rows());
  V = A;
  evals.resize(n);
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, V.data(), n,
                            evals.data());
  if (info != 0) throw std::runtime_error("dsyevd failed");
}

namespace {

// Symmetric Lanczos with full reorthogonalization; returns Ritz values of the
// final section. Stops when the wanted extreme value stabilizes.
double lanczos_extreme(const ApplyFn& apply, int n, bool largest, double tol,
                       int maxit, std::uint64_t seed) {
  if (n == 1) {
    Eigen::VectorXd e = Eigen::VectorXd::Ones(1), y(1);
    apply(e, y);
    return y[0];
  }
  maxit = std::min(maxit, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  v.normalize();

  Eigen::MatrixXd V(n, maxit);
  Eigen::VectorXd alpha(maxit), beta(maxit);
  Eigen::VectorXd w(n);
  double prev = largest ? -1e300 : 1e300;
  int m = 0;
  for (int j = 0; j < maxit; ++j) {
    V.col(j) = v;
    apply(v, w);
    double a = v.dot(w);
    alpha[j] = a;
    w -= a * v;
    if (j > 0) w -= beta[j - 1] * V.col(j - 1);
    // full reorthogonalization, twice for safety
    for (int pass = 0; pass < 2; ++pass)
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    double b = w.norm();
    beta[j] = b;
    m = j + 1;
    if ((j + 1) % 10 == 0 || b < 1e-14 || j + 1 == maxit) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::VectorXd ev = sym_eigenvalues(T);
      double cur = largest ? ev[m - 1] : ev[0];
      double scale = std::max(std::abs(cur), 1.0);
      if (std::abs(cur - prev) < tol * scale || b < 1e-14) return cur;
      prev = cur;
    }
    if (b < 1e-14) break;
    v = w / b;
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::VectorXd ev = sym_eigenvalues(T);
  return largest ? ev[m - 1] : ev[0];
}

}  // namespace

double lanczos_largest(const ApplyFn& apply, int n, double tol, int maxit,
                       std::uint64_t seed) {
  return lanczos_extreme(apply, n, true, tol, maxit, seed);
}

double lanczos_smallest(const ApplyFn& apply, int n, double tol, int maxit,
                        std::uint64_t seed) {
  return lanczos_extreme(apply, n, false, tol, maxit, seed);
}

double pencil_largest(const SpMat& A, const Eigen::VectorXd& Bdiag, double tol,
                      int maxit, std::uint64_t seed) {
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd D = Bdiag.cwiseMax(0.0).cwiseSqrt();
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-12);
  cg.compute(A);
  ApplyFn apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    Eigen::VectorXd t = D.cwiseProduct(x);
    Eigen::VectorXd z = cg.solve(t);
    y = D.cwiseProduct(z);
  };
  return lanczos_largest(apply, n, tol, maxit, seed);
}

double pencil_largest_dense(const Eigen::MatrixXd& A,
                            const Eigen::VectorXd& Bdiag, double tol, int maxit,
                            std::uint64_t seed) {
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd D = Bdiag.cwiseMax(0.0).cwiseSqrt();
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("dense Cholesky failed: matrix not SPD");
  ApplyFn apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    Eigen::VectorXd t = D.cwiseProduct(x);
    Eigen::VectorXd z = llt.solve(t);
    y = D.cwiseProduct(z);
  };
  return lanczos_largest(apply, n, tol, maxit, seed);
}

KrylovFn::KrylovFn(const ApplyFn& apply, const Eigen::VectorXd& b, int m) {
  const int n = static_cast<int>(b.size());
  m = std::min(m, n);
  bnorm_ = b.norm();
  if (bnorm_ == 0) m = 1;
  Eigen::VectorXd v = (bnorm_ > 0) ? Eigen::VectorXd(b / bnorm_)
                                   : Eigen::VectorXd::Unit(n, 0);
  V_.resize(n, m);
  Eigen::VectorXd alpha(m), beta(m);
  Eigen::VectorXd w(n);
  int used = 0;
  for (int j = 0; j < m; ++j) {
    V_.col(j) = v;
    apply(v, w);
    alpha[j] = v.dot(w);
    w -= alpha[j] * v;
    if (j > 0) w -= beta[j - 1] * V_.col(j - 1);
    for (int pass = 0; pass < 2; ++pass)
      w -= V_.leftCols(j + 1) * (V_.leftCols(j + 1).transpose() * w);
    beta[j] = w.norm();
    used = j + 1;
    if (beta[j] < 1e-14) break;
    v = w / beta[j];
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
  for (int i = 0; i < used; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < used) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  V_.conservativeResize(Eigen::NoChange, used);
  sym_eigendecompose(T, ritz_, ritzV_);
}

Eigen::VectorXd KrylovFn::eval(const std::function<double(double)>& f) const {
  Eigen::VectorXd fe(ritz_.size());
  for (int i = 0; i < ritz_.size(); ++i) fe[i] = f(ritz_[i]);
  // f(A) b ~ |b| V Z f(Theta) Z^T e1
  Eigen::VectorXd e1 = ritzV_.row(0).transpose();
  Eigen::VectorXd coef = fe.cwiseProduct(e1);
  return bnorm_ * (V_ * (ritzV_ * coef));
}

}  // namespace mml
