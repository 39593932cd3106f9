#include <cmath>
#include <limits>

#include "nelder_mead.hpp"
#include "tailent/common.hpp"
#include "tailent/model_fit.hpp"

namespace tailent {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct GarchParams {
  double mu, alpha0, alpha1, beta1;
};

// Free parametrization keeping the constraints exact: alpha0 = exp(x),
// persistence alpha1 + beta1 = sigmoid(y) in (0,1), split by sigmoid(z).
GarchParams unpack(const Eigen::VectorXd& x, bool mean_included) {
  const int k = mean_included ? 1 : 0;
  const double persistence = sigmoid(x(k + 1));
  const double split = sigmoid(x(k + 2));
  return {mean_included ? x(0) : 0.0, std::exp(x(k)), persistence * split,
          persistence * (1.0 - split)};
}

// Negative Gaussian quasi-log-likelihood of the variance recursion, with
// sigma_1^2 set to the sample variance of a_t = r_t - mu.
double negative_loglik(const Eigen::VectorXd& r, const GarchParams& p) {
  const Eigen::Index n = r.size();
  const Eigen::ArrayXd a = r.array() - p.mu;
  const double abar = a.mean();
  const double var_a = (a - abar).square().mean();
  double sigma2 = var_a;
  double nll = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (t > 0) {
      sigma2 = p.alpha0 + p.alpha1 * a(t - 1) * a(t - 1) + p.beta1 * sigma2;
    }
    nll += 0.5 * (kLogTwoPi + std::log(sigma2) + a(t) * a(t) / sigma2);
  }
  return std::isfinite(nll) ? nll : 1e300;
}

}  // namespace

Eigen::VectorXd log_returns(const Eigen::VectorXd& prices) {
  if (prices.size() < 2) {
    throw ValidationError("log_returns: need at least 2 prices");
  }
  for (Eigen::Index i = 0; i < prices.size(); ++i) {
    if (!(prices(i) > 0.0) || !std::isfinite(prices(i))) {
      throw ValidationError("log_returns: prices must be positive and finite");
    }
  }
  Eigen::VectorXd r(prices.size() - 1);
  for (Eigen::Index i = 1; i < prices.size(); ++i) {
    r(i - 1) = 100.0 * (std::log(prices(i)) - std::log(prices(i - 1)));
  }
  return r;
}

GarchFit fit_garch11(const Eigen::VectorXd& returns, bool mean_included) {
  const Eigen::Index n = returns.size();
  if (n < 50) {
    throw ValidationError("fit_garch11: need at least 50 observations");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(returns(i))) {
      throw ValidationError("fit_garch11: series contains non-finite values");
    }
  }
  const double mean = returns.mean();
  const double var = (returns.array() - mean).square().mean();
  if (!(var > 0.0)) {
    throw ValidationError("fit_garch11: series has zero variance");
  }

  const auto objective = [&](const Eigen::VectorXd& x) {
    return negative_loglik(returns, unpack(x, mean_included));
  };

  // Start at a moderate-persistence configuration: alpha1 = .09, beta1 = .81.
  const int k = mean_included ? 1 : 0;
  Eigen::VectorXd x0(k + 3);
  Eigen::VectorXd steps(k + 3);
  if (mean_included) {
    x0(0) = mean;
    steps(0) = 0.1 * std::sqrt(var);
  }
  x0(k) = std::log(0.1 * var);
  x0(k + 1) = logit(0.9);
  x0(k + 2) = logit(0.1);
  steps(k) = 0.5;
  steps(k + 1) = 0.5;
  steps(k + 2) = 0.5;

  auto run = detail::nelder_mead(objective, x0, steps, 1e-11, 1e-8, 2000);
  // One restart from the solution with a fresh simplex guards against a
  // prematurely collapsed simplex.
  auto rerun =
      detail::nelder_mead(objective, run.x, steps * 0.1, 1e-11, 1e-8, 2000);
  const bool converged = run.converged && rerun.converged;
  if (rerun.f < run.f) run = rerun;

  const GarchParams p = unpack(run.x, mean_included);
  GarchFit fit;
  fit.mu = p.mu;
  fit.alpha0 = p.alpha0;
  fit.alpha1 = p.alpha1;
  fit.beta1 = p.beta1;
  fit.converged = converged;
  fit.loglik = -run.f;
  fit.iterations = run.iterations + rerun.iterations;
  fit.sigma2.resize(n);
  fit.shocks.resize(n);
  const Eigen::ArrayXd a = returns.array() - p.mu;
  const double abar = a.mean();
  double sigma2 = (a - abar).square().mean();
  for (Eigen::Index t = 0; t < n; ++t) {
    if (t > 0) {
      sigma2 = p.alpha0 + p.alpha1 * a(t - 1) * a(t - 1) + p.beta1 * sigma2;
    }
    fit.sigma2(t) = sigma2;
    fit.shocks(t) = a(t) / std::sqrt(sigma2);
  }
  return fit;
}

}  // namespace tailent
