#include "tailent/pseudo_obs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tailent/common.hpp"
#include "tailent/rng.hpp"

namespace tailent {

TieRule tie_rule_from_string(const std::string& name) {
  if (name == "average") return TieRule::kAverage;
  if (name == "min") return TieRule::kMin;
  if (name == "max") return TieRule::kMax;
  if (name == "random") return TieRule::kRandom;
  throw ValidationError("unknown tie rule '" + name +
                        "' (expected average, min, max or random)");
}

std::string to_string(TieRule rule) {
  switch (rule) {
    case TieRule::kAverage: return "average";
    case TieRule::kMin: return "min";
    case TieRule::kMax: return "max";
    case TieRule::kRandom: return "random";
  }
  return "?";
}

RawSample RawSample::from_matrix(Eigen::MatrixXd m) {
  RawSample s;
  s.values = std::move(m);
  return s;
}

void RawSample::validate() const {
  if (rows() < 2) {
    throw ValidationError("sample needs at least 2 rows to be ranked");
  }
  if (cols() < 1) throw ValidationError("sample has no columns");
  if (!column_names.empty() &&
      column_names.size() != static_cast<std::size_t>(cols())) {
    throw ValidationError("column_names length does not match column count");
  }
  for (Eigen::Index j = 0; j < cols(); ++j) {
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (!std::isfinite(values(i, j))) {
        std::ostringstream msg;
        msg << "non-finite value at row " << i + 1 << ", column " << j + 1;
        throw ValidationError(msg.str());
      }
    }
    const double lo = values.col(j).minCoeff();
    const double hi = values.col(j).maxCoeff();
    if (lo == hi) {
      std::ostringstream msg;
      msg << "column " << j + 1 << " is constant and cannot be ranked";
      throw ValidationError(msg.str());
    }
  }
}

PseudoSample to_pseudo_observations(const RawSample& raw, TieRule rule,
                                    std::uint64_t tie_seed) {
  raw.validate();
  const Eigen::Index n = raw.rows();
  const Eigen::Index j_cols = raw.cols();
  PseudoSample out;
  out.values.resize(n, j_cols);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::vector<double> ranks(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < j_cols; ++j) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return raw.values(a, j) < raw.values(b, j);
    });
    rng::Stream tie_stream(rng::derive_seed(tie_seed, static_cast<std::uint64_t>(j)));

    // Walk runs of equal values; sorted positions i..k-1 hold ranks i+1..k.
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t k = i + 1;
      while (k < order.size() &&
             raw.values(order[k], j) == raw.values(order[i], j)) {
        ++k;
      }
      switch (rule) {
        case TieRule::kAverage: {
          const double r = 0.5 * static_cast<double>(i + 1 + k);
          for (std::size_t t = i; t < k; ++t) ranks[t] = r;
          break;
        }
        case TieRule::kMin:
          for (std::size_t t = i; t < k; ++t) {
            ranks[t] = static_cast<double>(i + 1);
          }
          break;
        case TieRule::kMax:
          for (std::size_t t = i; t < k; ++t) {
            ranks[t] = static_cast<double>(k);
          }
          break;
        case TieRule::kRandom: {
          // Fisher-Yates over the occupied ranks i+1..k.
          std::vector<double> pool;
          for (std::size_t t = i; t < k; ++t) {
            pool.push_back(static_cast<double>(t + 1));
          }
          for (std::size_t t = pool.size(); t > 1; --t) {
            const auto pick = static_cast<std::size_t>(
                tie_stream.next_u64() % static_cast<std::uint64_t>(t));
            std::swap(pool[t - 1], pool[pick]);
          }
          for (std::size_t t = i; t < k; ++t) ranks[t] = pool[t - i];
          break;
        }
      }
      i = k;
    }
    const double denom = static_cast<double>(n + 1);
    for (std::size_t t = 0; t < order.size(); ++t) {
      out.values(order[t], j) = ranks[t] / denom;
    }
  }
  return out;
}

PseudoSample select_components(const PseudoSample& sample,
                               const std::vector<int>& components) {
  if (components.empty()) {
    throw ValidationError("component selection is empty");
  }
  std::vector<int> seen;
  for (int c : components) {
    if (c < 1 || c > sample.cols()) {
      std::ostringstream msg;
      msg << "component index " << c << " outside 1.." << sample.cols();
      throw ValidationError(msg.str());
    }
    if (std::find(seen.begin(), seen.end(), c) != seen.end()) {
      std::ostringstream msg;
      msg << "component index " << c << " listed twice";
      throw ValidationError(msg.str());
    }
    seen.push_back(c);
  }
  PseudoSample out;
  out.values.resize(sample.rows(), static_cast<Eigen::Index>(components.size()));
  for (std::size_t j = 0; j < components.size(); ++j) {
    out.values.col(static_cast<Eigen::Index>(j)) =
        sample.values.col(components[j] - 1);
  }
  return out;
}

}  // namespace tailent
