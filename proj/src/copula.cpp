#include "tailent/copula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tailent/common.hpp"
#include "tailent/rng.hpp"
#include "tailent/special.hpp"

namespace tailent {

namespace {

void validate_correlation(const Eigen::MatrixXd& rho, const char* what) {
  if (rho.rows() != rho.cols()) {
    throw ValidationError(std::string(what) + ": matrix must be square");
  }
  if (rho.rows() < 2) {
    throw ValidationError(std::string(what) + ": dimension must be >= 2");
  }
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    if (std::fabs(rho(i, i) - 1.0) > 1e-12) {
      throw ValidationError(std::string(what) +
                            ": correlation diagonal must be 1");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::fabs(rho(i, j) - rho(j, i)) > 1e-12) {
        throw ValidationError(std::string(what) +
                              ": correlation matrix must be symmetric");
      }
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(rho);
  if (llt.info() != Eigen::Success) {
    throw ValidationError(std::string(what) +
                          ": correlation matrix is not positive definite "
                          "(Cholesky failed)");
  }
}

Eigen::MatrixXd cholesky_or_throw(const Eigen::MatrixXd& m, const char* what) {
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw ValidationError(std::string(what) +
                          ": matrix is not positive definite");
  }
  return llt.matrixL();
}

// Uniform-scale entries must stay strictly inside (0,1); extreme tail draws
// can otherwise round to exactly 0 or 1 after the cdf transform.
double clamp_open_unit(double u) {
  constexpr double kBelowOne = 0x1.fffffffffffffp-1;
  return std::clamp(u, 1e-300, kBelowOne);
}

void check_u(const std::vector<double>& u, int dim) {
  if (static_cast<int>(u.size()) != dim) {
    throw ValidationError("cdf: point dimension does not match copula");
  }
  for (double v : u) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("cdf: coordinates must lie in [0,1]");
    }
  }
}

}  // namespace

int dimension(const CopulaSpec& spec) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Independence> ||
                      std::is_same_v<T, Comonotone>) {
          return s.dim;
        } else if constexpr (std::is_same_v<T, GaussianCopula>) {
          return static_cast<int>(s.rho.rows());
        } else if constexpr (std::is_same_v<T, StudentCopula>) {
          return static_cast<int>(s.rho.rows());
        } else if constexpr (std::is_same_v<T, GumbelCopula>) {
          return s.dim;
        } else {
          return s.means.empty() ? 0 : static_cast<int>(s.means[0].size());
        }
      },
      spec);
}

std::string family_name(const CopulaSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Independence>) return "independence";
        if constexpr (std::is_same_v<T, Comonotone>) return "comonotone";
        if constexpr (std::is_same_v<T, GaussianCopula>) return "gaussian";
        if constexpr (std::is_same_v<T, StudentCopula>) return "student";
        if constexpr (std::is_same_v<T, GumbelCopula>) return "gumbel";
        return "gaussian-mixture";
      },
      spec);
}

void validate(const CopulaSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Independence>) {
          if (s.dim < 2) throw ValidationError("independence: dim must be >= 2");
        } else if constexpr (std::is_same_v<T, Comonotone>) {
          if (s.dim < 2) throw ValidationError("comonotone: dim must be >= 2");
        } else if constexpr (std::is_same_v<T, GaussianCopula>) {
          validate_correlation(s.rho, "gaussian copula");
        } else if constexpr (std::is_same_v<T, StudentCopula>) {
          if (!(s.nu > 2.0)) {
            throw ValidationError("student copula: nu must be > 2");
          }
          validate_correlation(s.rho, "student copula");
        } else if constexpr (std::is_same_v<T, GumbelCopula>) {
          if (!(s.xi >= 1.0)) {
            throw ValidationError("gumbel copula: xi must be >= 1");
          }
          if (s.dim < 2) throw ValidationError("gumbel copula: dim must be >= 2");
        } else {
          if (s.weights.empty() || s.weights.size() != s.means.size() ||
              s.weights.size() != s.covariances.size()) {
            throw ValidationError(
                "mixture: weights, means and covariances must have equal, "
                "nonzero length");
          }
          double wsum = 0.0;
          for (double w : s.weights) {
            if (!(w >= 0.0)) {
              throw ValidationError("mixture: weights must be nonnegative");
            }
            wsum += w;
          }
          if (std::fabs(wsum - 1.0) > 1e-12) {
            throw ValidationError("mixture: weights must sum to 1");
          }
          const auto d = s.means[0].size();
          if (d < 2) throw ValidationError("mixture: dimension must be >= 2");
          for (std::size_t k = 0; k < s.weights.size(); ++k) {
            if (s.means[k].size() != d || s.covariances[k].rows() != d ||
                s.covariances[k].cols() != d) {
              throw ValidationError("mixture: inconsistent dimensions");
            }
            cholesky_or_throw(s.covariances[k], "mixture covariance");
          }
        }
      },
      spec);
}

bool has_closed_form_cdf(const CopulaSpec& spec) {
  return std::holds_alternative<Independence>(spec) ||
         std::holds_alternative<Comonotone>(spec) ||
         std::holds_alternative<GumbelCopula>(spec);
}

double cdf(const CopulaSpec& spec, const std::vector<double>& u) {
  if (!has_closed_form_cdf(spec)) {
    throw ValidationError("cdf: closed form exists only for independence, "
                          "comonotone and gumbel families");
  }
  check_u(u, dimension(spec));
  if (std::holds_alternative<Independence>(spec)) {
    double p = 1.0;
    for (double v : u) p *= v;
    return p;
  }
  if (std::holds_alternative<Comonotone>(spec)) {
    return *std::min_element(u.begin(), u.end());
  }
  const auto& g = std::get<GumbelCopula>(spec);
  // exp(-[sum_j (-log u_j)^xi]^(1/xi)); any zero coordinate forces 0.
  double acc = 0.0;
  for (double v : u) {
    if (v == 0.0) return 0.0;
    if (v < 1.0) acc += std::pow(-std::log(v), g.xi);
  }
  if (acc == 0.0) return 1.0;
  return std::exp(-std::pow(acc, 1.0 / g.xi));
}

SimBatch sample(const CopulaSpec& spec, long n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample: n must be >= 1");
  validate(spec);
  const int j_dim = dimension(spec);
  SimBatch batch;
  batch.seed = seed;
  batch.spec = spec;
  batch.space = std::holds_alternative<GaussianMixture>(spec)
                    ? SampleSpace::kRawScale
                    : SampleSpace::kCopulaScale;
  batch.values.resize(n, j_dim);
  rng::Stream stream(seed);

  if (const auto* ind = std::get_if<Independence>(&spec); ind != nullptr) {
    for (long i = 0; i < n; ++i) {
      for (int j = 0; j < j_dim; ++j) batch.values(i, j) = stream.uniform();
    }
  } else if (std::holds_alternative<Comonotone>(spec)) {
    for (long i = 0; i < n; ++i) {
      const double u = stream.uniform();
      for (int j = 0; j < j_dim; ++j) batch.values(i, j) = u;
    }
  } else if (const auto* gc = std::get_if<GaussianCopula>(&spec)) {
    const Eigen::MatrixXd chol = cholesky_or_throw(gc->rho, "gaussian copula");
    Eigen::VectorXd eta(j_dim);
    for (long i = 0; i < n; ++i) {
      for (int j = 0; j < j_dim; ++j) eta(j) = stream.normal();
      const Eigen::VectorXd z = chol * eta;
      for (int j = 0; j < j_dim; ++j) {
        batch.values(i, j) = clamp_open_unit(special::norm_cdf(z(j)));
      }
    }
  } else if (const auto* sc = std::get_if<StudentCopula>(&spec)) {
    const Eigen::MatrixXd chol = cholesky_or_throw(sc->rho, "student copula");
    Eigen::VectorXd eta(j_dim);
    for (long i = 0; i < n; ++i) {
      for (int j = 0; j < j_dim; ++j) eta(j) = stream.normal();
      const double w = stream.chi_squared(sc->nu);
      const double scale = std::sqrt(sc->nu / w);
      const Eigen::VectorXd z = chol * eta;
      for (int j = 0; j < j_dim; ++j) {
        batch.values(i, j) = clamp_open_unit(special::t_cdf(scale * z(j), sc->nu));
      }
    }
  } else if (const auto* gu = std::get_if<GumbelCopula>(&spec)) {
    // Frailty construction: V positive stable with index alpha = 1/xi,
    // U_j = exp(-(E_j/V)^alpha).  Validated against the closed-form cdf by
    // the diagonal check C(b,...,b) = b^(J^(1/xi)).
    const double alpha = 1.0 / gu->xi;
    for (long i = 0; i < n; ++i) {
      const double v = stream.positive_stable(alpha);
      for (int j = 0; j < j_dim; ++j) {
        const double e = stream.exponential();
        batch.values(i, j) = clamp_open_unit(std::exp(-std::pow(e / v, alpha)));
      }
    }
  } else {
    const auto& mix = std::get<GaussianMixture>(spec);
    std::vector<Eigen::MatrixXd> chols;
    chols.reserve(mix.weights.size());
    for (const auto& cov : mix.covariances) {
      chols.push_back(cholesky_or_throw(cov, "mixture covariance"));
    }
    std::vector<double> cum(mix.weights.size());
    std::partial_sum(mix.weights.begin(), mix.weights.end(), cum.begin());
    cum.back() = 1.0;
    Eigen::VectorXd eta(j_dim);
    for (long i = 0; i < n; ++i) {
      const double pick = stream.uniform();
      const std::size_t k = static_cast<std::size_t>(
          std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin());
      for (int j = 0; j < j_dim; ++j) eta(j) = stream.normal();
      batch.values.row(i) =
          (mix.means[k] + chols[k] * eta).transpose();
    }
  }
  return batch;
}

}  // namespace tailent
