#pragma once

// Shared test utilities: independent reference implementations (brute-force
// Kendall tau, one-sample Kolmogorov-Smirnov), a GARCH(1,1) path simulator
// for estimator-recovery tests, and subprocess plumbing for CLI tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tailent/rng.hpp"

namespace testutil {

// Kolmogorov-Smirnov one-sample statistic sup |F_n - F|.  With
// sqrt(n) * D below 1.628 the sample is consistent with `cdf` at the 1%
// level; seeded tests assert against that bound.
inline double ks_statistic(std::vector<double> values,
                           const std::function<double(double)>& cdf) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double f = cdf(values[i]);
    d = std::max(d, std::abs(f - double(i) / n));
    d = std::max(d, std::abs(double(i + 1) / n - f));
  }
  return d;
}

constexpr double kKsCritical1pc = 1.628;  // sqrt(-log(.005)/2), asymptotic

// O(n^2) Kendall tau-b, the direct definition with tie corrections; used as
// the oracle for the O(n log n) implementation.
inline double kendall_tau_brute(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double dx = x(i) - x(j), dy = y(i) - y(j);
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++tie_x;
      } else if (dy == 0.0) {
        ++tie_y;
      } else if (dx * dy > 0.0) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  double num = double(concordant - discordant);
  double den = std::sqrt(double(concordant + discordant + tie_x)) *
               std::sqrt(double(concordant + discordant + tie_y));
  return num / den;
}

// GARCH(1,1) path with optional externally supplied iid(0,1) shocks; used
// to test that the QMLE recovers known parameters.  Starts at the
// stationary variance and discards a burn-in.
inline Eigen::VectorXd simulate_garch11(double mu, double alpha0,
                                        double alpha1, double beta1, long n,
                                        std::uint64_t seed,
                                        const Eigen::VectorXd* shocks = nullptr,
                                        long burn_in = 1000) {
  tailent::rng::Stream stream(tailent::rng::derive_seed(seed, 77));
  Eigen::VectorXd r(n);
  double sigma2 = alpha0 / (1.0 - alpha1 - beta1);
  double a_prev = 0.0;
  bool first = true;
  for (long t = -burn_in; t < n; ++t) {
    if (!first)
      sigma2 = alpha0 + alpha1 * a_prev * a_prev + beta1 * sigma2;
    first = false;
    double eps = shocks != nullptr && t >= 0 ? (*shocks)(t) : stream.normal();
    double a = std::sqrt(sigma2) * eps;
    a_prev = a;
    if (t >= 0) r(t) = mu + a;
  }
  return r;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Fresh scratch directory under the system temp dir, unique per call.
inline std::filesystem::path scratch_dir(const std::string& hint) {
  static int counter = 0;
  auto base = std::filesystem::temp_directory_path() /
              ("tailent_test_" + hint + "_" + std::to_string(::getpid()) +
               "_" + std::to_string(counter++));
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr interleaved
};

// Runs the built CLI with the given argument string via the shell and
// captures output.  TAILENT_CLI_PATH is injected by the build.
inline CliResult run_cli(const std::string& args) {
  std::string command = std::string(TAILENT_CLI_PATH) + " " + args + " 2>&1";
  CliResult result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> chunk{};
  while (std::fgets(chunk.data(), chunk.size(), pipe) != nullptr)
    result.output += chunk.data();
  int status = ::pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace testutil
