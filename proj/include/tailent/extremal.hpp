#pragma once

// Extremal coefficients: the number of effectively independent components
// that a dependence structure keeps in its upper tail.  Closed forms for the
// Gumbel and trivariate Student families, an empirical diagonal estimator,
// and closed-form sandwich bounds for the Tsallis index of extreme-value
// copulas.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "tailent/common.hpp"
#include "tailent/copula.hpp"

namespace tailent {

enum class ThetaSource {
  kClosedFormGumbel,
  kClosedFormStudent,
  kEmpiricalDiagonal,
};

struct ExtremalCoefficient {
  double theta = 0.0;
  int dim = 0;
  ThetaSource source = ThetaSource::kEmpiricalDiagonal;
};

// theta = J^(1/xi).  xi = 1 gives J (independence), xi -> infinity gives 1.
ExtremalCoefficient theta_gumbel(double xi, int j_dim);

// Two readings of the pairwise argument in the trivariate Student closed
// form.  kStandard, sqrt((nu+1)(1-rho)/(1+rho)), is the validated default:
// at the reference parameters (nu=2.76733 and the correlation matrix with
// off-diagonals .767/.759/.624) it reproduces theta = 2 and agrees with the
// Monte Carlo diagonal estimate, while the simplified literal form
// sqrt((nu+1)(1-rho)) gives 2.214.
enum class StudentArgConvention { kStandard, kPrintedSimplified };

// theta = sum over j of the bivariate t cdf with nu+1 degrees of freedom and
// dispersion rho with row/column j removed, evaluated at the pairwise
// arguments for the convention.  rho must be a valid 3x3 correlation matrix;
// nu > 0.
ExtremalCoefficient theta_student(
    double nu, const Eigen::MatrixXd& rho,
    StudentArgConvention convention = StudentArgConvention::kStandard);

// Diagonal estimator theta(b) = log C(b,...,b) / log b.  The first overload
// evaluates the exact diagonal of a closed-form family (constant in b for
// extreme-value copulas); the second counts the empirical diagonal of a
// copula-scale sample and fails if no row lies entirely at or below b.
ExtremalCoefficient theta_empirical(const CopulaSpec& spec, double b);
ExtremalCoefficient theta_empirical(const Eigen::MatrixXd& copula_scale,
                                    double b);

// Closed-form extremal coefficient of a family, when one exists
// (independence, comonotone, Gumbel, trivariate Student).
std::optional<ExtremalCoefficient> known_theta(const CopulaSpec& spec);

// Per-threshold Tsallis index of an extreme-value family with its
// closed-form lower/upper bounds
//   g1 = (1 - (b^(theta a) + (2^J - 1)(1-b)^a)) / ((1-b^a) - (1-b)^a)
//   g2 = (1 - b^(theta a)) / ((1-b^a) - (1-b)^a),
// both converging to theta as b -> 1.  crossover_b0 is the numerically
// determined threshold above which the shared denominator is positive; for
// alpha > 1 it is positive on all of (0,1), so b0 = 0.
struct BoundsCurve {
  ThresholdGrid grid;
  double alpha = 0.0;
  double theta = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> index;
  double crossover_b0 = 0.0;
};

BoundsCurve sandwich_bounds(const CopulaSpec& spec, const ThresholdGrid& grid,
                            double alpha);

// One row per (alpha, threshold): the index (Shannon for alpha = 1, Tsallis
// otherwise), sandwich bounds where defined (extreme-value families with
// known theta, alpha > 1; NaN otherwise) and the extremal coefficient
// (closed form when available, empirical diagonal otherwise).  n = 0 uses
// exact cells (closed-form families only); n > 0 draws one seeded sample
// and reuses it for every row.
struct ConvergenceRow {
  double b = 0.0;
  double alpha = 0.0;
  double index = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double theta = 0.0;
};

std::vector<ConvergenceRow> convergence_report(const CopulaSpec& spec,
                                               const std::vector<double>& alphas,
                                               const ThresholdGrid& grid,
                                               long n, std::uint64_t seed);

}  // namespace tailent
