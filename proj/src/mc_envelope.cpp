#include "tailent/mc_envelope.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "tailent/rng.hpp"

namespace tailent {

double interpolated_quantile(const std::vector<double>& sorted_values,
                             double p) {
  if (sorted_values.empty()) {
    throw ValidationError("interpolated_quantile: empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("interpolated_quantile: p must lie in [0,1]");
  }
  const std::size_t r = sorted_values.size();
  const double h = static_cast<double>(r - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= r) return sorted_values[r - 1];
  const double frac = h - std::floor(h);
  return sorted_values[lo] +
         frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

EnvelopeBand envelope(const FittedCopula& model,
                      const std::vector<int>& components,
                      const ThresholdGrid& grid, long n, int replicates,
                      double level, std::uint64_t base_seed,
                      const EnvelopeOptions& options) {
  if (replicates < 2) throw ValidationError("envelope: need R >= 2 replicates");
  if (n < 2) throw ValidationError("envelope: need n >= 2");
  if (!(level > 0.0 && level < 1.0)) {
    throw ValidationError("envelope: level must lie in (0,1)");
  }
  validate(model.spec);
  const std::size_t g = grid.size();

  // One Shannon curve per replicate; row r is fully determined by
  // (model, n, base_seed, r), so scheduling cannot change the result.
  std::vector<std::vector<double>> curves(
      static_cast<std::size_t>(replicates));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= replicates) return;
      try {
        const std::uint64_t seed = rng::derive_seed(
            base_seed, static_cast<std::uint64_t>(r) + 1);
        const SimBatch batch = sample(model.spec, n, seed);
        PseudoSample ps;
        if (batch.space == SampleSpace::kRawScale ||
            options.rerank_copula_samples) {
          ps = to_pseudo_observations(RawSample::from_matrix(batch.values));
        } else {
          ps.values = batch.values;
        }
        const IndexCurve curve =
            index_curve(ps, components, grid, IndexKind::shannon());
        curves[static_cast<std::size_t>(r)] = curve.values;
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int thread_count = options.threads;
  if (thread_count <= 0) {
    thread_count = static_cast<int>(std::thread::hardware_concurrency());
    if (thread_count < 1) thread_count = 1;
  }
  thread_count = std::min(thread_count, replicates);
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  EnvelopeBand band;
  band.grid = grid;
  band.level = level;
  band.replicates = replicates;
  band.sample_size = n;
  band.base_seed = base_seed;
  band.model = model;
  band.lower.resize(g);
  band.upper.resize(g);
  const double tail = 0.5 * (1.0 - level);
  std::vector<double> column(static_cast<std::size_t>(replicates));
  for (std::size_t i = 0; i < g; ++i) {
    for (int r = 0; r < replicates; ++r) {
      column[static_cast<std::size_t>(r)] =
          curves[static_cast<std::size_t>(r)][i];
    }
    std::sort(column.begin(), column.end());
    band.lower[i] = interpolated_quantile(column, tail);
    band.upper[i] = interpolated_quantile(column, 1.0 - tail);
  }
  return band;
}

ExceedanceReport band_exceedance_report(const IndexCurve& data_curve,
                                        const EnvelopeBand& band) {
  if (data_curve.grid.size() != band.grid.size()) {
    throw ValidationError("band_exceedance_report: grid size mismatch");
  }
  for (std::size_t i = 0; i < band.grid.size(); ++i) {
    if (std::fabs(data_curve.grid[i] - band.grid[i]) > 1e-12) {
      throw ValidationError("band_exceedance_report: grids differ");
    }
  }
  ExceedanceReport report;
  report.positions.reserve(band.grid.size());
  for (std::size_t i = 0; i < band.grid.size(); ++i) {
    const double v = data_curve.values[i];
    BandPosition pos = BandPosition::kInside;
    if (v < band.lower[i]) {
      pos = BandPosition::kBelow;
      report.below += 1;
    } else if (v > band.upper[i]) {
      pos = BandPosition::kAbove;
      report.above += 1;
    } else {
      report.inside += 1;
    }
    report.positions.push_back(pos);
  }
  return report;
}

}  // namespace tailent
