#pragma once

// Rank-based transformation of raw data to pseudo-observations on (0,1):
// each column is replaced by rank/(n+1), so margins are pushed out of the
// way and everything downstream sees only the dependence structure.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace tailent {

enum class TieRule {
  kAverage,  // tied values share the mean of the ranks they occupy (default)
  kMin,      // all take the smallest occupied rank
  kMax,      // all take the largest occupied rank
  kRandom,   // seeded random permutation of the occupied ranks
};

TieRule tie_rule_from_string(const std::string& name);
std::string to_string(TieRule rule);

// A raw data matrix: rows are observations, columns are components.
struct RawSample {
  Eigen::MatrixXd values;
  std::vector<std::string> column_names;  // optional; sized 0 or cols()

  static RawSample from_matrix(Eigen::MatrixXd m);

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  // Rejects non-finite entries (reporting 1-based row/column) and constant
  // columns, and requires at least two rows.
  void validate() const;
};

// Column-wise pseudo-observations; every entry lies strictly in (0,1) and
// the largest entry of a column is n/(n+1).
struct PseudoSample {
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// Ranks each column of `raw` and maps rank r to r/(n+1).  `tie_seed` is only
// consulted under TieRule::kRandom, where ties within a column are broken by
// an independent stream derived from (tie_seed, column).
PseudoSample to_pseudo_observations(const RawSample& raw,
                                    TieRule rule = TieRule::kAverage,
                                    std::uint64_t tie_seed = 0);

// Keeps the listed columns (1-based, distinct, each within 1..cols) in the
// given order.
PseudoSample select_components(const PseudoSample& sample,
                               const std::vector<int>& components);

}  // namespace tailent
