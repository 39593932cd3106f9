#pragma once

// Estimators for the model-validation pipeline: a GARCH(1,1) marginal filter
// (Gaussian quasi-maximum-likelihood), Gaussian and Student copulas by
// Kendall-tau inversion (plus pseudo-likelihood for the Student degrees of
// freedom), and a Gaussian mixture by multi-start EM.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tailent/copula.hpp"
#include "tailent/pseudo_obs.hpp"

namespace tailent {

// --- marginal filter ------------------------------------------------------

// r_t = 100 * (log p_t - log p_{t-1}); prices must be positive.
Eigen::VectorXd log_returns(const Eigen::VectorXd& prices);

struct GarchFit {
  double mu = 0.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double beta1 = 0.0;
  Eigen::VectorXd sigma2;  // conditional variances, one per observation
  Eigen::VectorXd shocks;  // standardized residuals (r_t - mu)/sigma_t
  bool converged = false;
  double loglik = 0.0;
  int iterations = 0;
};

// Gaussian QMLE of r_t = mu + a_t, sigma_t^2 = alpha0 + alpha1 a_{t-1}^2
// + beta1 sigma_{t-1}^2, with sigma_1^2 set to the sample variance of a_t.
// Stationarity (alpha1 + beta1 < 1, alpha0 > 0) is enforced by the
// optimizer's parametrization.  Failure to converge yields a flagged result
// (converged = false), not an exception; series must have length >= 50,
// finite values and nonzero variance.
GarchFit fit_garch11(const Eigen::VectorXd& returns,
                     bool mean_included = true);

// --- copula estimators ----------------------------------------------------

// Kendall's tau-b, exact, O(n log n) (merge-sort inversion counting with
// tie corrections).
double kendall_tau(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Projects a symmetric matrix to a nearby correlation matrix: eigenvalues
// clipped at eigen_floor, then the diagonal renormalized to 1.
Eigen::MatrixXd nearest_correlation(const Eigen::MatrixXd& m,
                                    double eigen_floor = 1e-8);

struct FittedCopula {
  CopulaSpec spec;
  std::string method;  // "tau-inversion", "pseudo-likelihood" or "EM"
  int iterations = 0;
  double objective = 0.0;   // final optimizer objective; NaN when not used
  bool boundary_hit = false;  // Student nu ended on a search bound
};

// Pairwise Kendall tau inverted through rho = sin(pi tau / 2), projected to
// the nearest correlation matrix if the result is not positive definite.
FittedCopula fit_gaussian_copula(const PseudoSample& sample);

struct StudentFitOptions {
  double nu_min = 2.01;
  double nu_max = 100.0;
  double log_nu_tol = 1e-4;  // golden-section tolerance in log nu
};

// Correlation by tau-inversion, then degrees of freedom by maximizing the
// Student-copula pseudo-log-likelihood over log nu with golden-section
// search.  An optimum at either bound sets boundary_hit.
FittedCopula fit_student_copula(const PseudoSample& sample,
                                const StudentFitOptions& options = {});

// --- Gaussian mixture -----------------------------------------------------

// Per-start EM log-likelihood histories, for diagnostics and monotonicity
// checks; entry s holds one value per EM iteration of start s (empty if the
// start collapsed).
struct MixtureTrace {
  std::vector<std::vector<double>> loglik_history;
  int chosen_start = -1;
};

// Multi-start EM on the raw scale.  Each start initializes from a seeded
// k-means pass; covariance eigenvalues are floored at 1e-6 times the mean
// column variance; the best final log-likelihood wins and components are
// ordered by descending weight.  Requires n > 10 * k_components * J.
FittedCopula fit_gaussian_mixture(const RawSample& raw, int k_components,
                                  int n_starts, std::uint64_t seed,
                                  MixtureTrace* trace = nullptr);

}  // namespace tailent
