#pragma once

// Monte Carlo confidence envelopes: simulate R replicate datasets from a
// fitted model, compute the Shannon index curve of each, and take pointwise
// quantiles across replicates.  An observed curve is then classified
// against the band threshold by threshold.

#include <cstdint>
#include <vector>

#include "tailent/common.hpp"
#include "tailent/entropy_index.hpp"
#include "tailent/model_fit.hpp"

namespace tailent {

struct EnvelopeBand {
  ThresholdGrid grid;
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.0;
  int replicates = 0;
  long sample_size = 0;
  std::uint64_t base_seed = 0;
  FittedCopula model;
};

struct EnvelopeOptions {
  // Copula-scale replicates are already uniform and are used directly by
  // default; set to true to push them through the rank transform anyway,
  // mirroring the treatment of observed data exactly.
  bool rerank_copula_samples = false;
  // 0 = use hardware concurrency.  The band is bit-identical regardless.
  int threads = 0;
};

// Pointwise band at quantiles (1-level)/2 and 1-(1-level)/2 of R replicate
// Shannon curves of size-n samples from the model.  Replicate r draws its
// seed as a fixed hash of (base_seed, r), so envelopes are reproducible
// across thread counts and adding replicates never changes earlier ones.
// Mixture models are rank-transformed per replicate.
EnvelopeBand envelope(const FittedCopula& model,
                      const std::vector<int>& components,
                      const ThresholdGrid& grid, long n, int replicates,
                      double level, std::uint64_t base_seed,
                      const EnvelopeOptions& options = {});

// Linear interpolation of order statistics (the common "type 7" rule):
// quantile p of sorted values v_1..v_R sits at position (R-1)p + 1.
double interpolated_quantile(const std::vector<double>& sorted_values,
                             double p);

enum class BandPosition { kBelow, kInside, kAbove };

struct ExceedanceReport {
  std::vector<BandPosition> positions;
  int below = 0;
  int inside = 0;
  int above = 0;
};

// Classifies an observed curve against a band on the same grid.  The band is
// closed: values equal to a bound count as inside.  A curve below the band
// signals stronger-than-model tail association (lower index = stronger
// dependence).
ExceedanceReport band_exceedance_report(const IndexCurve& data_curve,
                                        const EnvelopeBand& band);

}  // namespace tailent
