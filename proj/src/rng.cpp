#include "tailent/rng.hpp"

#include <cmath>

#include "tailent/common.hpp"
#include "tailent/special.hpp"

namespace tailent::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream) {
  return mix64(base_seed + kGolden * mix64(stream + kGolden));
}

std::uint64_t Stream::next_u64() {
  counter_ += 1;
  return mix64(key_ + counter_ * kGolden);
}

double Stream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() { return special::norm_quantile(uniform()); }

double Stream::exponential() { return -std::log(uniform()); }

double Stream::gamma(double shape) {
  if (!(shape > 0.0)) throw ValidationError("gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost the shape above 1 and correct with a power of a uniform.
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Stream::chi_squared(double nu) {
  if (!(nu > 0.0)) throw ValidationError("chi_squared: nu must be positive");
  return 2.0 * gamma(0.5 * nu);
}

double Stream::positive_stable(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("positive_stable: alpha must lie in (0,1]");
  }
  if (alpha == 1.0) return 1.0;
  // Kanter's representation: with Theta ~ U(0,pi) and W ~ Exp(1),
  //   A(theta) = [sin(a t)^a sin((1-a) t)^(1-a) / sin(t)]^(1/(1-a))
  //   V = (A(Theta) / W)^((1-a)/a)
  // has Laplace transform exp(-t^a).  Work in logs for stability.
  const double theta = M_PI * uniform();
  const double w = exponential();
  const double log_a =
      (alpha * std::log(std::sin(alpha * theta)) +
       (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * theta)) -
       std::log(std::sin(theta))) /
      (1.0 - alpha);
  return std::exp((1.0 - alpha) / alpha * (log_a - std::log(w)));
}

}  // namespace tailent::rng
