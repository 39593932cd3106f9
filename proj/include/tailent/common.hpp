#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tailent {

// Thrown when caller-supplied data or parameters violate a documented
// precondition (bad dimensions, thresholds outside (0,1), non-finite input,
// malformed configuration).  Maps to exit code 2 in the CLI.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an algorithm fails for numerical reasons on input that passed
// validation (non-convergence where no flagged fallback exists, collapsed
// mixture components, loss of positive definiteness).  Maps to exit code 3
// in the CLI.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks that b is a usable exceedance threshold, i.e. strictly inside (0,1).
void validate_threshold(double b);

// An increasing set of thresholds in (0,1).  Curves (index curves, Monte
// Carlo bands, convergence tables) are always evaluated on such a grid.
struct ThresholdGrid {
  std::vector<double> values;

  ThresholdGrid() = default;
  explicit ThresholdGrid(std::vector<double> vals);

  // Builds {start, start+step, ...} up to and including stop (within a small
  // tolerance, so 0.850:0.995:0.005 ends exactly at 0.995).
  static ThresholdGrid linspace(double start, double stop, double step);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

}  // namespace tailent
