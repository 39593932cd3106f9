#include "tailent/common.hpp"

#include <cmath>
#include <sstream>

namespace tailent {

void validate_threshold(double b) {
  if (!(b > 0.0 && b < 1.0)) {
    std::ostringstream msg;
    msg << "threshold b = " << b << " must lie strictly in (0,1)";
    throw ValidationError(msg.str());
  }
}

ThresholdGrid::ThresholdGrid(std::vector<double> vals) : values(std::move(vals)) {
  if (values.empty()) throw ValidationError("threshold grid is empty");
  double prev = 0.0;
  for (double b : values) {
    validate_threshold(b);
    if (b <= prev) {
      throw ValidationError("threshold grid must be strictly increasing");
    }
    prev = b;
  }
}

ThresholdGrid ThresholdGrid::linspace(double start, double stop, double step) {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  if (stop < start) throw ValidationError("grid stop must be >= start");
  std::vector<double> vals;
  // Generate on an integer lattice so the endpoint is hit even when step has
  // no finite binary representation (e.g. 0.005).
  const auto count =
      static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= count; ++i) {
    double b = start + static_cast<double>(i) * step;
    if (b > stop) b = stop;  // only reachable by sub-ulp rounding noise
    vals.push_back(b);
  }
  return ThresholdGrid(std::move(vals));
}

}  // namespace tailent
