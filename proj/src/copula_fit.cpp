#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "tailent/common.hpp"
#include "tailent/model_fit.hpp"
#include "tailent/special.hpp"

namespace tailent {

namespace {

// Counts inversions of v (pairs i < j with v[i] > v[j]) by merge sort,
// leaving v sorted.  Equal elements are not counted as inversions.
std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& tmp,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count =
      merge_count(v, tmp, lo, mid) + merge_count(v, tmp, mid, hi);
  std::size_t a = lo;
  std::size_t b = mid;
  std::size_t out = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      count += mid - a;
      tmp[out++] = v[b++];
    } else {
      tmp[out++] = v[a++];
    }
  }
  while (a < mid) tmp[out++] = v[a++];
  while (b < hi) tmp[out++] = v[b++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
            tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

std::uint64_t tie_pairs(const std::vector<double>& sorted,
                        std::size_t* distinct_runs = nullptr) {
  std::uint64_t pairs = 0;
  std::size_t runs = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t k = i + 1;
    while (k < sorted.size() && sorted[k] == sorted[i]) ++k;
    const std::uint64_t t = k - i;
    pairs += t * (t - 1) / 2;
    runs += 1;
    i = k;
  }
  if (distinct_runs != nullptr) *distinct_runs = runs;
  return pairs;
}

}  // namespace

double kendall_tau(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  if (y.size() != n) throw ValidationError("kendall_tau: length mismatch");
  if (n < 2) throw ValidationError("kendall_tau: need at least 2 points");

  // Knight's algorithm: sort by (x, y), count exchanges needed to then sort
  // by y, and correct for ties.
  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto ax = x(static_cast<Eigen::Index>(a));
    const auto bx = x(static_cast<Eigen::Index>(b));
    if (ax != bx) return ax < bx;
    return y(static_cast<Eigen::Index>(a)) < y(static_cast<Eigen::Index>(b));
  });

  std::uint64_t ties_x = 0;   // pairs tied in x
  std::uint64_t ties_xy = 0;  // pairs tied in both
  {
    std::size_t i = 0;
    while (i < idx.size()) {
      std::size_t k = i + 1;
      while (k < idx.size() &&
             x(static_cast<Eigen::Index>(idx[k])) ==
                 x(static_cast<Eigen::Index>(idx[i]))) {
        ++k;
      }
      const std::uint64_t t = k - i;
      ties_x += t * (t - 1) / 2;
      std::size_t a = i;
      while (a < k) {
        std::size_t b = a + 1;
        while (b < k && y(static_cast<Eigen::Index>(idx[b])) ==
                            y(static_cast<Eigen::Index>(idx[a]))) {
          ++b;
        }
        const std::uint64_t u = b - a;
        ties_xy += u * (u - 1) / 2;
        a = b;
      }
      i = k;
    }
  }

  std::vector<double> ys(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    ys[i] = y(static_cast<Eigen::Index>(idx[i]));
  }
  std::vector<double> tmp(ys.size());
  const std::uint64_t swaps = merge_count(ys, tmp, 0, ys.size());
  const std::uint64_t ties_y = tie_pairs(ys);

  const std::uint64_t n0 =
      static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
  const double num = static_cast<double>(n0) - static_cast<double>(ties_x) -
                     static_cast<double>(ties_y) +
                     static_cast<double>(ties_xy) -
                     2.0 * static_cast<double>(swaps);
  const double den =
      std::sqrt((static_cast<double>(n0) - static_cast<double>(ties_x)) *
                (static_cast<double>(n0) - static_cast<double>(ties_y)));
  if (!(den > 0.0)) {
    throw ValidationError("kendall_tau: a column is constant");
  }
  return num / den;
}

Eigen::MatrixXd nearest_correlation(const Eigen::MatrixXd& m,
                                    double eigen_floor) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd vals = es.eigenvalues().cwiseMax(eigen_floor);
  Eigen::MatrixXd fixed =
      es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::VectorXd d = fixed.diagonal().cwiseSqrt();
  for (Eigen::Index i = 0; i < fixed.rows(); ++i) {
    for (Eigen::Index j = 0; j < fixed.cols(); ++j) {
      fixed(i, j) /= d(i) * d(j);
    }
  }
  fixed = 0.5 * (fixed + fixed.transpose());
  fixed.diagonal().setOnes();
  return fixed;
}

namespace {

Eigen::MatrixXd tau_inversion_correlation(const PseudoSample& sample) {
  const Eigen::Index k = sample.cols();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double tau = kendall_tau(sample.values.col(i), sample.values.col(j));
      rho(i, j) = rho(j, i) = std::sin(0.5 * M_PI * tau);
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(rho);
  if (llt.info() != Eigen::Success) {
    rho = nearest_correlation(rho);
  }
  return rho;
}

}  // namespace

FittedCopula fit_gaussian_copula(const PseudoSample& sample) {
  if (sample.cols() < 2) {
    throw ValidationError("fit_gaussian_copula: need at least 2 columns");
  }
  FittedCopula fit;
  fit.spec = GaussianCopula{tau_inversion_correlation(sample)};
  fit.method = "tau-inversion";
  fit.iterations = 0;
  fit.objective = std::numeric_limits<double>::quiet_NaN();
  return fit;
}

namespace {

// Student-copula pseudo-log-likelihood at fixed correlation, as a function
// of nu.  Quantiles are evaluated once per distinct pseudo-observation value
// (ranks are shared across columns), not once per matrix entry.
class StudentPseudoLoglik {
 public:
  StudentPseudoLoglik(const PseudoSample& sample, Eigen::MatrixXd rho)
      : u_(sample.values), rho_(std::move(rho)), llt_(rho_) {
    const Eigen::VectorXd diag_l = llt_.matrixL().toDenseMatrix().diagonal();
    log_det_ = 2.0 * diag_l.array().log().sum();
    distinct_.assign(u_.data(), u_.data() + u_.size());
    std::sort(distinct_.begin(), distinct_.end());
    distinct_.erase(std::unique(distinct_.begin(), distinct_.end()),
                    distinct_.end());
  }

  double operator()(double nu) const {
    const Eigen::Index n = u_.rows();
    const Eigen::Index j_dim = u_.cols();
    std::vector<double> quantiles(distinct_.size());
    for (std::size_t i = 0; i < distinct_.size(); ++i) {
      quantiles[i] = special::t_quantile(distinct_[i], nu);
    }
    const double jd = static_cast<double>(j_dim);
    const double constant =
        std::lgamma(0.5 * (nu + jd)) + (jd - 1.0) * std::lgamma(0.5 * nu) -
        jd * std::lgamma(0.5 * (nu + 1.0));
    double ll = static_cast<double>(n) * (constant - 0.5 * log_det_);
    Eigen::VectorXd xrow(j_dim);
    for (Eigen::Index t = 0; t < n; ++t) {
      double marginal = 0.0;
      for (Eigen::Index j = 0; j < j_dim; ++j) {
        const auto it = std::lower_bound(distinct_.begin(), distinct_.end(),
                                         u_(t, j));
        const double x = quantiles[static_cast<std::size_t>(
            it - distinct_.begin())];
        xrow(j) = x;
        marginal += std::log1p(x * x / nu);
      }
      const double quad = llt_.matrixL().solve(xrow).squaredNorm();
      ll += -0.5 * (nu + jd) * std::log1p(quad / nu) +
            0.5 * (nu + 1.0) * marginal;
    }
    return ll;
  }

 private:
  Eigen::MatrixXd u_;
  Eigen::MatrixXd rho_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
  std::vector<double> distinct_;
};

}  // namespace

FittedCopula fit_student_copula(const PseudoSample& sample,
                                const StudentFitOptions& options) {
  if (sample.cols() < 2) {
    throw ValidationError("fit_student_copula: need at least 2 columns");
  }
  if (!(options.nu_min > 2.0) || !(options.nu_max > options.nu_min)) {
    throw ValidationError(
        "fit_student_copula: need 2 < nu_min < nu_max");
  }
  const Eigen::MatrixXd rho = tau_inversion_correlation(sample);
  const StudentPseudoLoglik loglik(sample, rho);

  // Golden-section search for the maximum over log nu.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(options.nu_min);
  double b = std::log(options.nu_max);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = loglik(std::exp(c));
  double fd = loglik(std::exp(d));
  int evals = 2;
  while (b - a > options.log_nu_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = loglik(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = loglik(std::exp(d));
    }
    ++evals;
  }
  const double log_nu = fc > fd ? c : d;
  const double nu = std::exp(log_nu);

  FittedCopula fit;
  fit.spec = StudentCopula{nu, rho};
  fit.method = "pseudo-likelihood";
  fit.iterations = evals;
  fit.objective = std::max(fc, fd);
  fit.boundary_hit =
      log_nu - std::log(options.nu_min) < 2.0 * options.log_nu_tol ||
      std::log(options.nu_max) - log_nu < 2.0 * options.log_nu_tol;
  return fit;
}

}  // namespace tailent
