#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "tailent/common.hpp"
#include "tailent/model_fit.hpp"
#include "tailent/rng.hpp"

namespace tailent {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

struct Component {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Symmetrizes and floors the eigenvalues of a covariance candidate so every
// component stays usable.
Eigen::MatrixXd floor_covariance(const Eigen::MatrixXd& cov, double floor) {
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.eigenvalues().minCoeff() >= floor) return sym;
  const Eigen::VectorXd vals = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

struct EmOutcome {
  std::vector<Component> components;
  double loglik = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> history;
  bool ok = false;
};

// Seeded k-means pass used to initialize one EM start.
std::vector<Component> kmeans_init(const Eigen::MatrixXd& data, int k,
                                   rng::Stream& stream, double floor) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  std::vector<Eigen::Index> centers;
  while (static_cast<int>(centers.size()) < k) {
    const auto pick = static_cast<Eigen::Index>(
        stream.next_u64() % static_cast<std::uint64_t>(n));
    if (std::find(centers.begin(), centers.end(), pick) == centers.end()) {
      centers.push_back(pick);
    }
  }
  Eigen::MatrixXd means(k, d);
  for (int c = 0; c < k; ++c) means.row(c) = data.row(centers[c]);

  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  for (int pass = 0; pass < 10; ++pass) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dist = (data.row(i) - means.row(c)).squaredNorm();
        if (dist < best) {
          best = dist;
          assign[static_cast<std::size_t>(i)] = c;
        }
      }
    }
    for (int c = 0; c < k; ++c) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
      long count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (assign[static_cast<std::size_t>(i)] == c) {
          sum += data.row(i);
          ++count;
        }
      }
      if (count == 0) {
        // Re-seed an empty cluster at a random observation.
        means.row(c) = data.row(static_cast<Eigen::Index>(
            stream.next_u64() % static_cast<std::uint64_t>(n)));
      } else {
        means.row(c) = sum / static_cast<double>(count);
      }
    }
  }

  // Cluster moments become the initial mixture parameters.
  Eigen::RowVectorXd grand_mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - grand_mean;
  const Eigen::MatrixXd global_cov =
      centered.transpose() * centered / static_cast<double>(n);
  std::vector<Component> comps(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    long count = 0;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (assign[static_cast<std::size_t>(i)] == c) {
        sum += data.row(i).transpose();
        ++count;
      }
    }
    auto& comp = comps[static_cast<std::size_t>(c)];
    if (count < 2) {
      comp.weight = 1.0 / static_cast<double>(k);
      comp.mean = means.row(c).transpose();
      comp.cov = floor_covariance(global_cov, floor);
      continue;
    }
    comp.weight = static_cast<double>(count) / static_cast<double>(n);
    comp.mean = sum / static_cast<double>(count);
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (assign[static_cast<std::size_t>(i)] == c) {
        const Eigen::VectorXd dev = data.row(i).transpose() - comp.mean;
        scatter += dev * dev.transpose();
      }
    }
    comp.cov = floor_covariance(scatter / static_cast<double>(count), floor);
  }
  double wsum = 0.0;
  for (const auto& comp : comps) wsum += comp.weight;
  for (auto& comp : comps) comp.weight /= wsum;
  return comps;
}

EmOutcome run_em(const Eigen::MatrixXd& data, std::vector<Component> comps,
                 double floor, int max_iter) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  const int k = static_cast<int>(comps.size());
  EmOutcome out;
  Eigen::MatrixXd log_resp(n, k);
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iter; ++iter) {
    // E step: weighted log densities, normalized by log-sum-exp.
    for (int c = 0; c < k; ++c) {
      const auto& comp = comps[static_cast<std::size_t>(c)];
      const Eigen::LLT<Eigen::MatrixXd> llt(comp.cov);
      if (llt.info() != Eigen::Success || !(comp.weight > 0.0)) return out;
      const double log_det =
          2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      const double base = std::log(comp.weight) -
                          0.5 * (static_cast<double>(d) * kLogTwoPi + log_det);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd dev = data.row(i).transpose() - comp.mean;
        const double quad = llt.matrixL().solve(dev).squaredNorm();
        log_resp(i, c) = base - 0.5 * quad;
      }
    }
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mx = log_resp.row(i).maxCoeff();
      const double lse =
          mx + std::log((log_resp.row(i).array() - mx).exp().sum());
      log_resp.row(i).array() -= lse;
      ll += lse;
    }
    if (!std::isfinite(ll)) return out;
    out.history.push_back(ll);
    out.iterations = iter + 1;
    if (std::fabs(ll - prev_ll) <= 1e-8 * (1.0 + std::fabs(ll))) {
      prev_ll = ll;
      break;
    }
    prev_ll = ll;

    // M step: weighted moments with the eigenvalue floor.
    for (int c = 0; c < k; ++c) {
      auto& comp = comps[static_cast<std::size_t>(c)];
      const Eigen::ArrayXd resp = log_resp.col(c).array().exp();
      const double nk = resp.sum();
      if (!(nk > 1e-10)) return out;  // collapsed component
      comp.weight = nk / static_cast<double>(n);
      comp.mean = data.transpose() * resp.matrix() / nk;
      Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd dev = data.row(i).transpose() - comp.mean;
        scatter += resp(i) * dev * dev.transpose();
      }
      comp.cov = floor_covariance(scatter / nk, floor);
    }
    double wsum = 0.0;
    for (const auto& comp : comps) wsum += comp.weight;
    for (auto& comp : comps) comp.weight /= wsum;
  }
  out.components = std::move(comps);
  out.loglik = prev_ll;
  out.ok = std::isfinite(prev_ll);
  return out;
}

}  // namespace

FittedCopula fit_gaussian_mixture(const RawSample& raw, int k_components,
                                  int n_starts, std::uint64_t seed,
                                  MixtureTrace* trace) {
  raw.validate();
  if (k_components < 1) {
    throw ValidationError("fit_gaussian_mixture: need at least 1 component");
  }
  if (n_starts < 1) {
    throw ValidationError("fit_gaussian_mixture: need at least 1 start");
  }
  const Eigen::Index n = raw.rows();
  const Eigen::Index d = raw.cols();
  if (n <= 10L * k_components * d) {
    throw ValidationError(
        "fit_gaussian_mixture: need more than 10 * components * dimension "
        "observations");
  }

  // Eigenvalue floor tied to the data scale: 1e-6 times the mean column
  // variance.
  double mean_var = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double m = raw.values.col(j).mean();
    mean_var += (raw.values.col(j).array() - m).square().mean();
  }
  mean_var /= static_cast<double>(d);
  const double floor = 1e-6 * mean_var;

  EmOutcome best;
  int best_start = -1;
  if (trace != nullptr) {
    trace->loglik_history.assign(static_cast<std::size_t>(n_starts), {});
  }
  for (int s = 0; s < n_starts; ++s) {
    rng::Stream stream(rng::derive_seed(seed, static_cast<std::uint64_t>(s)));
    auto comps = kmeans_init(raw.values, k_components, stream, floor);
    EmOutcome outcome = run_em(raw.values, std::move(comps), floor, 500);
    if (trace != nullptr) {
      trace->loglik_history[static_cast<std::size_t>(s)] = outcome.history;
    }
    if (outcome.ok && outcome.loglik > best.loglik) {
      best = std::move(outcome);
      best_start = s;
    }
  }
  if (best_start < 0) {
    throw NumericalError(
        "fit_gaussian_mixture: every start collapsed; consider a larger "
        "covariance floor");
  }
  if (trace != nullptr) trace->chosen_start = best_start;

  // Canonical order: descending weight.
  std::stable_sort(best.components.begin(), best.components.end(),
                   [](const Component& a, const Component& b) {
                     return a.weight > b.weight;
                   });
  GaussianMixture mix;
  double wsum = 0.0;
  for (const auto& comp : best.components) wsum += comp.weight;
  for (const auto& comp : best.components) {
    mix.weights.push_back(comp.weight / wsum);
    mix.means.push_back(comp.mean);
    mix.covariances.push_back(comp.cov);
  }

  FittedCopula fit;
  fit.spec = std::move(mix);
  fit.method = "EM";
  fit.iterations = best.iterations;
  fit.objective = best.loglik;
  return fit;
}

}  // namespace tailent
