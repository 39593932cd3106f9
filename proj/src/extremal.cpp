#include "tailent/extremal.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tailent/entropy_index.hpp"
#include "tailent/pseudo_obs.hpp"
#include "tailent/special.hpp"

namespace tailent {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double tsallis_normalizer(double b, double alpha) {
  return (1.0 - std::pow(b, alpha)) - std::pow(1.0 - b, alpha);
}

// Smallest b above which (1-b^a)-(1-b)^a stays positive.  For alpha > 1 the
// expression is positive on all of (0,1); the scan is kept so the value is
// computed rather than assumed.
double crossover_b0(double alpha) {
  constexpr int kPoints = 20000;
  double last_nonpositive = 0.0;
  for (int i = 1; i < kPoints; ++i) {
    const double b = static_cast<double>(i) / kPoints;
    if (tsallis_normalizer(b, alpha) <= 0.0) last_nonpositive = b;
  }
  if (last_nonpositive == 0.0) return 0.0;
  // Refine the sign change by bisection.
  double lo = last_nonpositive;
  double hi = last_nonpositive + 1.0 / kPoints;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tsallis_normalizer(mid, alpha) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

ExtremalCoefficient theta_gumbel(double xi, int j_dim) {
  if (!(xi >= 1.0)) throw ValidationError("theta_gumbel: xi must be >= 1");
  if (j_dim < 2) throw ValidationError("theta_gumbel: J must be >= 2");
  return {std::pow(static_cast<double>(j_dim), 1.0 / xi), j_dim,
          ThetaSource::kClosedFormGumbel};
}

ExtremalCoefficient theta_student(double nu, const Eigen::MatrixXd& rho,
                                  StudentArgConvention convention) {
  if (!(nu > 0.0)) throw ValidationError("theta_student: nu must be positive");
  if (rho.rows() != 3 || rho.cols() != 3) {
    throw ValidationError(
        "theta_student: the closed form is stated for J = 3 only");
  }
  // Borrow the full correlation validation (symmetry, unit diagonal, PD);
  // positive definiteness of rho implies it for every 2x2 submatrix.
  validate(CopulaSpec(GaussianCopula{rho}));

  const auto pair_arg = [&](double r) {
    return convention == StudentArgConvention::kStandard
               ? std::sqrt((nu + 1.0) * (1.0 - r) / (1.0 + r))
               : std::sqrt((nu + 1.0) * (1.0 - r));
  };
  double theta = 0.0;
  for (int j = 0; j < 3; ++j) {
    const int i = (j == 0) ? 1 : 0;
    const int k = (j == 2) ? 1 : 2;
    // Dispersion is rho with row/column j removed; its off-diagonal is the
    // raw correlation of the remaining pair.
    const double r = rho(i, k);
    theta += special::t2_cdf(pair_arg(rho(i, j)), pair_arg(rho(k, j)),
                             nu + 1.0, r);
  }
  return {theta, 3, ThetaSource::kClosedFormStudent};
}

ExtremalCoefficient theta_empirical(const CopulaSpec& spec, double b) {
  validate_threshold(b);
  if (!has_closed_form_cdf(spec)) {
    throw ValidationError(
        "exact diagonal needs a closed-form cdf; pass a sample instead");
  }
  const int j_dim = dimension(spec);
  const std::vector<double> diag(static_cast<std::size_t>(j_dim), b);
  const double c = cdf(spec, diag);
  return {std::log(c) / std::log(b), j_dim, ThetaSource::kEmpiricalDiagonal};
}

ExtremalCoefficient theta_empirical(const Eigen::MatrixXd& copula_scale,
                                    double b) {
  validate_threshold(b);
  if (copula_scale.rows() < 1 || copula_scale.cols() < 1) {
    throw ValidationError("theta_empirical: empty sample");
  }
  long below = 0;
  for (Eigen::Index i = 0; i < copula_scale.rows(); ++i) {
    bool all = true;
    for (Eigen::Index j = 0; j < copula_scale.cols(); ++j) {
      if (copula_scale(i, j) > b) {
        all = false;
        break;
      }
    }
    if (all) below += 1;
  }
  if (below == 0) {
    throw NumericalError(
        "empirical diagonal has zero mass at this threshold; lower b or "
        "increase the sample size");
  }
  const double c =
      static_cast<double>(below) / static_cast<double>(copula_scale.rows());
  return {std::log(c) / std::log(b), static_cast<int>(copula_scale.cols()),
          ThetaSource::kEmpiricalDiagonal};
}

std::optional<ExtremalCoefficient> known_theta(const CopulaSpec& spec) {
  if (const auto* g = std::get_if<GumbelCopula>(&spec)) {
    return theta_gumbel(g->xi, g->dim);
  }
  if (std::holds_alternative<Independence>(spec)) {
    const int j_dim = dimension(spec);
    return ExtremalCoefficient{static_cast<double>(j_dim), j_dim,
                               ThetaSource::kClosedFormGumbel};
  }
  if (std::holds_alternative<Comonotone>(spec)) {
    return ExtremalCoefficient{1.0, dimension(spec),
                               ThetaSource::kClosedFormGumbel};
  }
  if (const auto* s = std::get_if<StudentCopula>(&spec)) {
    if (s->rho.rows() == 3) return theta_student(s->nu, s->rho);
  }
  return std::nullopt;
}

BoundsCurve sandwich_bounds(const CopulaSpec& spec, const ThresholdGrid& grid,
                            double alpha) {
  if (!(alpha > 1.0)) {
    throw ValidationError("sandwich_bounds: alpha must be > 1");
  }
  if (!has_closed_form_cdf(spec)) {
    throw ValidationError(
        "sandwich_bounds: needs an extreme-value family with exact cells "
        "(independence, comonotone or gumbel)");
  }
  const auto theta = known_theta(spec);
  const int j_dim = dimension(spec);
  BoundsCurve curve;
  curve.grid = grid;
  curve.alpha = alpha;
  curve.theta = theta->theta;
  curve.crossover_b0 = crossover_b0(alpha);
  const double cells_minus_one = std::pow(2.0, j_dim) - 1.0;
  for (double b : grid.values) {
    const double denom = tsallis_normalizer(b, alpha);
    const double top = 1.0 - std::pow(b, theta->theta * alpha);
    curve.upper.push_back(top / denom);
    curve.lower.push_back(
        (top - cells_minus_one * std::pow(1.0 - b, alpha)) / denom);
    curve.index.push_back(
        index_tsallis(cell_distribution_exact(spec, b, j_dim), b, alpha));
  }
  return curve;
}

std::vector<ConvergenceRow> convergence_report(const CopulaSpec& spec,
                                               const std::vector<double>& alphas,
                                               const ThresholdGrid& grid,
                                               long n, std::uint64_t seed) {
  if (alphas.empty()) {
    throw ValidationError("convergence_report: alpha list is empty");
  }
  for (double a : alphas) {
    if (!(a >= 1.0)) {
      throw ValidationError(
          "convergence_report: alphas must be >= 1 (1 selects the Shannon "
          "index)");
    }
  }
  validate(spec);
  const int j_dim = dimension(spec);
  const auto theta = known_theta(spec);
  const bool exact = (n == 0);
  if (exact && !has_closed_form_cdf(spec)) {
    throw ValidationError(
        "convergence_report: exact mode (n = 0) needs a closed-form family; "
        "pass n > 0 to simulate");
  }

  // Empirical mode draws one sample and reuses it for every row.
  PseudoSample sample;
  if (!exact) {
    const SimBatch batch = tailent::sample(spec, n, seed);
    if (batch.space == SampleSpace::kRawScale) {
      sample = to_pseudo_observations(RawSample::from_matrix(batch.values));
    } else {
      sample.values = batch.values;
    }
  }

  std::vector<ConvergenceRow> rows;
  rows.reserve(alphas.size() * grid.size());
  const double cells_minus_one = std::pow(2.0, j_dim) - 1.0;
  const bool ev_bounds = theta.has_value() && has_closed_form_cdf(spec);
  for (double a : alphas) {
    for (double b : grid.values) {
      ConvergenceRow row;
      row.b = b;
      row.alpha = a;
      const CellDistribution cells =
          exact ? cell_distribution_exact(spec, b, j_dim)
                : cell_distribution_empirical(sample, b);
      row.index = (a == 1.0) ? index_shannon(cells, b)
                             : index_tsallis(cells, b, a);
      if (ev_bounds && a > 1.0) {
        const double denom = tsallis_normalizer(b, a);
        const double top = 1.0 - std::pow(b, theta->theta * a);
        row.upper = top / denom;
        row.lower = (top - cells_minus_one * std::pow(1.0 - b, a)) / denom;
      } else {
        row.lower = kNaN;
        row.upper = kNaN;
      }
      if (theta.has_value()) {
        row.theta = theta->theta;
      } else if (exact) {
        row.theta = theta_empirical(spec, b).theta;
      } else {
        row.theta = theta_empirical(sample.values, b).theta;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace tailent
