#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tailent::detail {

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& steps, double ftol,
    double xtol, int max_iter) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1](i) += steps(i);
  for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<int> order(n + 1);
  NelderMeadResult result;
  int it = 0;
  for (; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order[0];
    const int worst = order[n];
    const int second_worst = order[n - 1];

    double spread = 0.0;
    double xspread = 0.0;
    for (int i = 0; i <= n; ++i) {
      spread = std::max(spread, std::fabs(vals[i] - vals[best]));
      xspread = std::max(xspread, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    }
    if (spread <= ftol * (1.0 + std::fabs(vals[best])) && xspread <= xtol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double fr = f(reflected);
    if (fr < vals[best]) {
      const Eigen::VectorXd expanded =
          centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr < vals[second_worst]) {
      pts[worst] = reflected;
      vals[worst] = fr;
    } else {
      const Eigen::VectorXd contracted =
          fr < vals[worst] ? centroid + 0.5 * (reflected - centroid)
                           : centroid + 0.5 * (pts[worst] - centroid);
      const double fc = f(contracted);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = contracted;
        vals[worst] = fc;
      } else {
        // Shrink toward the best vertex.
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  result.iterations = it;
  const auto best_it = std::min_element(vals.begin(), vals.end());
  result.f = *best_it;
  result.x = pts[static_cast<std::size_t>(best_it - vals.begin())];
  return result;
}

}  // namespace tailent::detail
