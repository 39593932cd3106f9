#include "tailent/entropy_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tailent {

namespace {

constexpr int kMaxComponents = 20;  // dense 2^K cell array stays tractable

void check_component_count(Eigen::Index k) {
  if (k < 2) {
    throw ValidationError("cell distribution needs at least 2 components");
  }
  if (k > kMaxComponents) {
    std::ostringstream msg;
    msg << "cell distribution limited to " << kMaxComponents
        << " components (2^K cells); got K = " << k;
    throw ValidationError(msg.str());
  }
}

// C(u) with u_j = b on a coordinate set of size s and 1 elsewhere, for the
// exchangeable closed-form families.
double diagonal_section(const CopulaSpec& spec, double b, int s) {
  if (s == 0) return 1.0;
  if (std::holds_alternative<Independence>(spec)) {
    return std::pow(b, s);
  }
  if (std::holds_alternative<Comonotone>(spec)) {
    return b;
  }
  const auto& g = std::get<GumbelCopula>(spec);
  return std::pow(b, std::pow(static_cast<double>(s), 1.0 / g.xi));
}

}  // namespace

CellDistribution cell_distribution_empirical(const PseudoSample& sample,
                                             double b) {
  validate_threshold(b);
  check_component_count(sample.cols());
  if (sample.rows() < 1) throw ValidationError("sample has no rows");
  const int k = static_cast<int>(sample.cols());
  const long n = sample.rows();

  CellDistribution cells;
  cells.k = k;
  cells.sample_size = n;
  cells.probs.assign(std::size_t{1} << k, 0.0);
  std::vector<long> counts(std::size_t{1} << k, 0);
  for (long i = 0; i < n; ++i) {
    std::uint32_t pattern = 0;
    for (int j = 0; j < k; ++j) {
      if (sample.values(i, j) > b) pattern |= 1u << j;
    }
    counts[pattern] += 1;
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    cells.probs[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
  }
  return cells;
}

CellDistribution cell_distribution_exact(const CopulaSpec& spec, double b,
                                         int k) {
  validate_threshold(b);
  check_component_count(k);
  if (!has_closed_form_cdf(spec)) {
    throw ValidationError(
        "exact cells need a closed-form cdf (independence, comonotone or "
        "gumbel); use the empirical mode for other families");
  }
  validate(spec);
  if (k > dimension(spec)) {
    throw ValidationError("requested more components than the copula has");
  }

  // Signed superset sum: with q[m] = C(b on m, 1 elsewhere), the probability
  // that exactly the components in A stay at or below b is
  //   p(A) = sum_{B >= A} (-1)^{|B \ A|} q[B],
  // evaluated for all A at once by a superset zeta transform of
  // (-1)^{|m|} q[m].
  const std::size_t size = std::size_t{1} << k;
  std::vector<double> t(size);
  for (std::size_t m = 0; m < size; ++m) {
    const int pc = std::popcount(m);
    const double q = diagonal_section(spec, b, pc);
    t[m] = (pc % 2 == 0) ? q : -q;
  }
  for (int bit = 0; bit < k; ++bit) {
    const std::size_t step = std::size_t{1} << bit;
    for (std::size_t m = 0; m < size; ++m) {
      if ((m & step) == 0) t[m] += t[m | step];
    }
  }

  CellDistribution cells;
  cells.k = k;
  cells.sample_size = 0;
  cells.probs.assign(size, 0.0);
  const std::size_t full = size - 1;
  double sum = 0.0;
  for (std::size_t pattern = 0; pattern < size; ++pattern) {
    const std::size_t a = full & ~pattern;  // zero-set of this pattern
    double p = (std::popcount(a) % 2 == 0) ? t[a] : -t[a];
    if (p < 0.0) {
      if (p < -1e-9) {
        std::ostringstream msg;
        msg << "inclusion-exclusion produced cell probability " << p;
        throw NumericalError(msg.str());
      }
      p = 0.0;  // cancellation noise
    }
    cells.probs[pattern] = p;
    sum += p;
  }
  // Rescale away the clamping so the cells sum to 1 exactly.
  for (double& p : cells.probs) p /= sum;
  return cells;
}

double shannon_entropy(const CellDistribution& cells) {
  double h = 0.0;
  for (double p : cells.probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double tsallis_entropy(const CellDistribution& cells, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw ValidationError("tsallis_entropy: alpha must be > 0 and != 1");
  }
  double s = 0.0;
  for (double p : cells.probs) {
    if (p > 0.0) s += std::pow(p, alpha);
  }
  return (1.0 - s) / (alpha - 1.0);
}

double index_shannon(const CellDistribution& cells, double b) {
  validate_threshold(b);
  const double denom = -(b * std::log(b) + (1.0 - b) * std::log1p(-b));
  return shannon_entropy(cells) / denom;
}

double index_tsallis(const CellDistribution& cells, double b, double alpha) {
  validate_threshold(b);
  if (!(alpha > 1.0)) {
    throw ValidationError(
        "index_tsallis: alpha must be > 1 (the Shannon index is the alpha->1 "
        "limit)");
  }
  double s = 0.0;
  for (double p : cells.probs) {
    if (p > 0.0) s += std::pow(p, alpha);
  }
  const double denom =
      (1.0 - std::pow(b, alpha)) - std::pow(1.0 - b, alpha);
  return (1.0 - s) / denom;
}

namespace {

double index_value(const CellDistribution& cells, double b,
                   const IndexKind& kind) {
  return kind.family == IndexKind::Family::kShannon
             ? index_shannon(cells, b)
             : index_tsallis(cells, b, kind.alpha);
}

}  // namespace

IndexCurve index_curve(const PseudoSample& sample,
                       const std::vector<int>& components,
                       const ThresholdGrid& grid, const IndexKind& kind) {
  // The index does not depend on which component gets which cell bit, so
  // the selection is canonicalized; this makes curves for permuted
  // component lists bit-identical instead of merely equal to round-off.
  std::vector<int> ordered = components;
  std::sort(ordered.begin(), ordered.end());
  const PseudoSample sub = select_components(sample, ordered);
  IndexCurve curve;
  curve.grid = grid;
  curve.kind = kind;
  curve.components = components;
  curve.values.reserve(grid.size());
  for (double b : grid.values) {
    curve.values.push_back(
        index_value(cell_distribution_empirical(sub, b), b, kind));
  }
  return curve;
}

IndexCurve index_curve(const CopulaSpec& spec, const ThresholdGrid& grid,
                       const IndexKind& kind) {
  const int k = dimension(spec);
  IndexCurve curve;
  curve.grid = grid;
  curve.kind = kind;
  curve.components.resize(k);
  std::iota(curve.components.begin(), curve.components.end(), 1);
  curve.values.reserve(grid.size());
  for (double b : grid.values) {
    curve.values.push_back(
        index_value(cell_distribution_exact(spec, b, k), b, kind));
  }
  return curve;
}

}  // namespace tailent
