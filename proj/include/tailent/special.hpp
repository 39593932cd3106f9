#pragma once

// Scalar special functions used throughout the library: the standard normal
// distribution, Student's t distribution (pdf / cdf / quantile for real
// degrees of freedom), and the bivariate Student t cdf.  Everything here is
// deterministic, thread-safe and allocation-free.

#include <functional>

namespace tailent::special {

// --- standard normal ------------------------------------------------------

double norm_pdf(double x);
double norm_cdf(double x);

// Inverse of norm_cdf for p in (0,1).  Rational initial approximation
// refined by one Halley step; absolute error well below 1e-14.
double norm_quantile(double p);

// --- incomplete beta / gamma helpers --------------------------------------

// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1],
// evaluated by continued fraction (modified Lentz).
double inc_beta(double a, double b, double x);

// --- Student t ------------------------------------------------------------

// Density, distribution and quantile of the (central) t distribution with
// real nu > 0 degrees of freedom.
double t_pdf(double x, double nu);
double t_cdf(double x, double nu);
double t_quantile(double p, double nu);

// --- quadrature -----------------------------------------------------------

// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol);

// --- bivariate Student t --------------------------------------------------

// P(X <= x, Y <= y) where (X, Y) is bivariate t with nu > 0 degrees of
// freedom and correlation rho in (-1, 1).  Computed by integrating the
// conditional distribution T_{nu+1} over the first margin with adaptive
// Simpson; absolute error around 1e-9.
double t2_cdf(double x, double y, double nu, double rho);

}  // namespace tailent::special
