#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>

namespace mml {

using SpMat = Eigen::SparseMatrix<double>;
using ApplyFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// Eigenvalues (ascending) of a symmetric dense matrix; LAPACK dsyevd.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& A);

// Full symmetric eigendecomposition: eigenvalues ascending, columns of V are
// the eigenvectors.
void sym_eigendecompose(const Eigen::MatrixXd& A, Eigen::VectorXd& evals,
                        Eigen::MatrixXd& V);

// Largest eigenvalue of a symmetric operator given by apply(), via Lanczos
// with full reorthogonalization. Deterministic start vector from seed.
double lanczos_largest(const ApplyFn& apply, int n, double tol = 1e-10,
                       int maxit = 400, std::uint64_t seed = 1);

// Smallest eigenvalue of a symmetric operator (same Lanczos, other end).
double lanczos_smallest(const ApplyFn& apply, int n, double tol = 1e-10,
                        int maxit = 600, std::uint64_t seed = 1);

// Largest theta with B x = theta A x, where A is SPD (sparse) and B = D^2 is
// diagonal PSD. Works on the symmetric operator D A^{-1} D with CG solves.
double pencil_largest(const SpMat& A, const Eigen::VectorXd& Bdiag,
                      double tol = 1e-9, int maxit = 300,
                      std::uint64_t seed = 1);

// Same quantity computed via dense Cholesky of A plus Lanczos on the
// triangular-solve operator; cross-check path for the sparse route.
double pencil_largest_dense(const Eigen::MatrixXd& A,
                            const Eigen::VectorXd& Bdiag, double tol = 1e-9,
                            int maxit = 300, std::uint64_t seed = 1);

// Lanczos approximation of f(A) b for symmetric A, with full
// reorthogonalization. Build once, evaluate for many functions f.
class KrylovFn {
 public:
  KrylovFn(const ApplyFn& apply, const Eigen::VectorXd& b, int m);
  // x ~ f(A) b, f applied to the Ritz values of the Krylov section.
  Eigen::VectorXd eval(const std::function<double(double)>& f) const;

 private:
  Eigen::MatrixXd V_;       // n x m orthonormal basis
  Eigen::VectorXd ritz_;    // Ritz values
  Eigen::MatrixXd ritzV_;   // eigenvectors of the tridiagonal section
  double bnorm_ = 0.0;
};

}  // namespace mml
