#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mml/kernels.hpp"
#include "mml/linalg.hpp"
#include "mml/maximal.hpp"
#include "mml/space.hpp"

namespace mml {

// Symmetric Dirichlet form on a space: Q(psi) = 1/2 sum w_xy (psi_x-psi_y)^2,
// acting as (Lf)(x) = (1/mu_x) sum w_xy (f(x)-f(y)), restricted to functions
// vanishing outside `domain` when that is a proper subset.
struct DirichletOperator {
  int n = 0;                // ambient point count
  SpMat Q;                  // ambient form matrix (graph Laplacian with w)
  Eigen::VectorXd mu;       // ambient measure
  std::vector<int> domain;  // ascending ambient ids; full set when trivial

  bool full_domain() const { return static_cast<int>(domain.size()) == n; }
  int dim() const { return static_cast<int>(domain.size()); }
  SpMat Qd() const;             // principal submatrix on the domain
  Eigen::VectorXd mud() const;  // measure restricted to the domain
  // symmetric representative S = M^{-1/2} Q M^{-1/2} on the domain
  SpMat Sd() const;
  double quadratic_form(const Eigen::VectorXd& psi_ambient) const;
};

// Build from the space's stored edges/conductances (generators fill them).
DirichletOperator dirichlet_operator(const MetricMeasureSpace& s,
                                     std::vector<int> domain = {});
DirichletOperator dirichlet_operator(const MetricMeasureSpace& s,
                                     const std::vector<Edge>& edges,
                                     std::vector<int> domain);

// Interior of a generated grid/path: points whose coordinates avoid the
// bounding box faces.
std::vector<int> interior_domain(const MetricMeasureSpace& s);

// Smallest eigenvalue of L restricted to U (ambient ids). Dense below
// kDenseEig, Lanczos above.
inline constexpr int kDenseEig = 2000;
double lambda1(const DirichletOperator& op, const std::vector<int>& U);
double lambda1(const DirichletOperator& op);  // on op.domain

// Smallest eigenvalue of L - V on op.domain (V ambient, restricted).
double schrodinger_lambda1(const DirichletOperator& op,
                           const Eigen::VectorXd& V);

// Full spectral data on the domain: eigenvalues ascending, mu-orthonormal
// eigenvectors as columns (ambient-indexed rows are domain-only).
struct SpectralData {
  Eigen::VectorXd evals;
  Eigen::MatrixXd phi;  // dim x dim, mu-orthonormal columns
};
SpectralData spectral_data(const DirichletOperator& op);

struct HeatKernel {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> mats;  // p_t on domain x domain
  SpectralData spec;
};
HeatKernel heat_kernel(const DirichletOperator& op,
                       const std::vector<double>& times);

// Row x (domain-local index) of p_t for each t, via a Krylov approximation
// of exp(-tS); the large-n path used by the Gaussian-bound fits.
std::vector<Eigen::VectorXd> heat_rows(const DirichletOperator& op, int x_local,
                                       const std::vector<double>& times,
                                       int krylov_dim = 90);

struct GaussianFit {
  double C_small = 0.0;  // t <= R^2 regime, ball radius sqrt(t)
  double C_large = 0.0;  // t >  R^2 regime, ball radius R
  double C_lambda = 0.0; // refined variant for supplied (lambda, gamma)
};
// Fits the constants in p_t(x,y) <= C e^{-d^2/(c t)} / sqrt(V(x,rt) V(y,rt)).
// Omit lambda (<=0) to skip the refined variant.
// Rows x are scanned on a deterministic stride sample of size <= max_rows
// (all columns y kept), so fits are comparable across sizes.
GaussianFit gaussian_bound_fit(const MetricMeasureSpace& s,
                               const DirichletOperator& op,
                               const std::vector<double>& times, double R,
                               double c, double lambda = 0.0,
                               double gamma = 0.5, int max_rows = 128);

// Spectral-calculus kernels on the domain.
Eigen::MatrixXd riesz_kernel(const DirichletOperator& op, double exp_s);
Eigen::MatrixXd bessel_kernel(const DirichletOperator& op, double exp_s,
                              double lambda);

// Fitted C in i_s(x,y) <= C d^s / mu(B(x,d)) over domain pairs. For large n
// the kernel columns are computed by Krylov approximation on a deterministic
// column sample of size <= max_cols.
double riesz_bound_fit(const MetricMeasureSpace& s, const DirichletOperator& op,
                       double exp_s, int max_cols = 48);

struct BesselSeparation {
  std::vector<double> gammas;
  std::vector<double> fitted_C;  // per gamma
};
BesselSeparation bessel_separation_check(const MetricMeasureSpace& s,
                                         const DirichletOperator& op,
                                         const Eigen::MatrixXd& g, double exp_s,
                                         double lambda,
                                         const std::vector<double>& gamma_grid);

struct FaberKrahnFit {
  double b = 0.0;
  int witness_center = -1;
  double witness_radius = 0.0;
  int witness_subset_size = 0;
};
FaberKrahnFit faber_krahn_fit(const MetricMeasureSpace& s,
                              const DirichletOperator& op, double R, double eta,
                              int samples, std::uint64_t seed);

// theta_max of diag(V mu) psi = theta (Q + R^{-2} M) psi, divided by
// N_{p,R}(V). R = infinity uses Q alone (requires positive spectrum).
double fefferman_phong_constant(const MetricMeasureSpace& s,
                                const DirichletOperator& op,
                                const Eigen::VectorXd& V, double p,
                                double R = kInfRadius);

struct SpectrumBoundResult {
  double lower = 0.0;
  double upper = 0.0;
  double exact = 0.0;        // lambda1(L - V)
  double tent_bound = 0.0;   // best variational upper bound on lambda1
  double C1 = 0.0, Cp = 0.0;
  int lower_witness_x = -1, upper_witness_x = -1;
  double lower_witness_delta = 0.0, upper_witness_delta = 0.0;
};
SpectrumBoundResult spectrum_bounds(const MetricMeasureSpace& s,
                                    const DirichletOperator& op,
                                    const Eigen::VectorXd& V, double p,
                                    double C1, double Cp);

// Calibration used for the default Cp: twice the largest Fefferman-Phong
// ratio over a seeded 20-potential family and a dyadic grid of radii.
double calibrate_cp(const MetricMeasureSpace& s, const DirichletOperator& op,
                    double p, std::uint64_t seed);

struct PositivityReport {
  // positivity branch with lambda1(M) > 0
  double ratio_lam = 0.0;   // theta_max against grad + (lam1/2) mass form
  double bound_lam = 0.0;   // Cp N_{p,R}(V) (1 + lam1 R^2)/(lam1 R^2)
  bool pass_lam = false;
  // resolvent-scale branch: grad + lambda^2 mass vs N_{p,1/lambda}
  double ratio_lambda = 0.0;
  double bound_lambda = 0.0;
  bool pass_lambda = false;
};
PositivityReport positivity_checks(const MetricMeasureSpace& s,
                                   const DirichletOperator& op,
                                   const Eigen::VectorXd& V, double p, double R,
                                   double Cp, double lam1M, double lambda);

struct HardyReport {
  double K_p = 0.0;        // Morrey-style sup for the potential d(o,.)^{-2}
  double C_H = 0.0;        // best constant in the Hardy inequality
  double inv_C_H = 0.0;
  // necessity witness at (r, R, nu): both sides of the volume-ratio chain
  double witness_lhs = 0.0;   // ((nu-2)/2)^2 r^{-nu} mu(B(o,r))
  double witness_rhs = 0.0;   // R^{-nu} mu(B(o,2R) \ B(o,R))
  double witness_rayleigh = 0.0;  // Q(phi)/||phi/rho||^2 for the cutoff
};
struct HardyOptions {
  bool compute_kp = true;
  double kp_radius = kInfRadius;
  double witness_r = 0.0, witness_R = 0.0, witness_nu = 3.0;
  bool dense_cross_check = false;
};
HardyReport hardy_check(const MetricMeasureSpace& s,
                        const DirichletOperator& op, int o, double p,
                        const HardyOptions& opts = {});

// Kronecker-sum operator on product_space(s, n_line, h) index layout
// (t * s.n + m): separation of variables made literal.
DirichletOperator product_operator(const MetricMeasureSpace& line_space,
                                   const DirichletOperator& line_op,
                                   const MetricMeasureSpace& s,
                                   const DirichletOperator& op);

struct ProductIdentityReport {
  double lambda1_factor = 0.0;
  double lambda1_product = 0.0;
  double heat_factorization_err = 0.0;  // max abs over t grid
  double morrey_ratio_lo = 0.0;  // Ntilde / N achieved bounds
  double morrey_ratio_hi = 0.0;
  double product_doubling_A = 0.0;
  bool pass = false;
};
ProductIdentityReport product_identity_check(const MetricMeasureSpace& s,
                                             const DirichletOperator& op,
                                             const Eigen::VectorXd& V,
                                             int n_line, double h,
                                             const std::vector<double>& times);

}  // namespace mml
