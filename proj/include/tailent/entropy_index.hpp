#pragma once

// The heart of the library: joint exceedance cells and the normalized
// entropy indices built on them.  For K components and a threshold b, each
// observation is reduced to a K-bit pattern (bit k set iff component k
// exceeds b on the copula scale); the Shannon or Tsallis entropy of that
// pattern distribution, normalized by its value under comonotone dependence,
// yields an index that equals 1 under total dependence and K under
// independence.

#include <cstdint>
#include <vector>

#include "tailent/common.hpp"
#include "tailent/copula.hpp"
#include "tailent/pseudo_obs.hpp"

namespace tailent {

// Distribution of the 2^K joint exceedance patterns at one threshold.
// probs is indexed by the pattern's bit mask: bit k (least significant =
// first component) is 1 iff component k exceeds the threshold.
struct CellDistribution {
  int k = 0;
  std::vector<double> probs;
  long sample_size = 0;  // rows counted in empirical mode, 0 for exact cells

  bool empirical() const { return sample_size > 0; }
};

// Counts exceedance patterns of a pseudo-observation sample (strict
// inequality u > b).  Requires 2 <= K <= 20 columns.
CellDistribution cell_distribution_empirical(const PseudoSample& sample,
                                             double b);

// Exact cell probabilities for a closed-form family (independence,
// comonotone, Gumbel) in dimension K, by inclusion-exclusion over copula
// cdf evaluations with arguments b or 1.
CellDistribution cell_distribution_exact(const CopulaSpec& spec, double b,
                                         int k);

// Shannon entropy, natural log, with 0 log 0 = 0.
double shannon_entropy(const CellDistribution& cells);

// Tsallis entropy (1 - sum p^alpha)/(alpha - 1) for alpha > 0, alpha != 1.
double tsallis_entropy(const CellDistribution& cells, double alpha);

// Shannon index: entropy normalized by its comonotone value
// -(b log b + (1-b) log(1-b)).  Equals 1 under total dependence and K under
// independence.
double index_shannon(const CellDistribution& cells, double b);

// Tsallis index: (1 - sum p^alpha) / ((1-b^alpha) - (1-b)^alpha), defined
// for alpha > 1 (the normalizer is positive on all of (0,1) then).  Tends to
// the Shannon index as alpha tends to 1 from above.
double index_tsallis(const CellDistribution& cells, double b, double alpha);

struct IndexKind {
  enum class Family { kShannon, kTsallis };
  Family family = Family::kShannon;
  double alpha = 0.0;  // meaningful for Tsallis only

  static IndexKind shannon() { return {Family::kShannon, 0.0}; }
  static IndexKind tsallis(double alpha) {
    return {Family::kTsallis, alpha};
  }
};

// One index value per grid threshold.  Exact-mode Shannon curves satisfy
// 1 <= value <= K to within 1e-9; empirical curves additionally carry a
// rank-discretization error of order 1/n around those bounds.
struct IndexCurve {
  ThresholdGrid grid;
  std::vector<double> values;
  IndexKind kind;
  std::vector<int> components;  // 1-based columns the curve was computed on
};

// Empirical curve on the selected columns (1-based) of a pseudo-sample.
IndexCurve index_curve(const PseudoSample& sample,
                       const std::vector<int>& components,
                       const ThresholdGrid& grid, const IndexKind& kind);

// Exact curve for a closed-form family in its own dimension.
IndexCurve index_curve(const CopulaSpec& spec, const ThresholdGrid& grid,
                       const IndexKind& kind);

}  // namespace tailent
