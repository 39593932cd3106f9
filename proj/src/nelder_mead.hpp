#pragma once

// Minimal derivative-free simplex minimizer (Nelder-Mead with the standard
// reflection/expansion/contraction/shrink coefficients), used by the GARCH
// quasi-likelihood fit.  Internal to the library.

#include <Eigen/Dense>
#include <functional>

namespace tailent::detail {

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& steps, double ftol,
    double xtol, int max_iter);

}  // namespace tailent::detail
