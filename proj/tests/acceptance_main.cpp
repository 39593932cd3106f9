// Acceptance suite: one check per release criterion, one line of output
// each, nonzero exit if any fails.  Tolerances and the statistical designs
// (seed counts, standard-error bands) are stated inline; Monte Carlo checks
// run on pinned seeds that were verified once and frozen, so the suite is
// deterministic.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tailent/common.hpp"
#include "tailent/copula.hpp"
#include "tailent/csv.hpp"
#include "tailent/entropy_index.hpp"
#include "tailent/extremal.hpp"
#include "tailent/mc_envelope.hpp"
#include "tailent/model_fit.hpp"
#include "tailent/pseudo_obs.hpp"
#include "tailent/rng.hpp"
#include "tailent/special.hpp"

using namespace tailent;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// small utilities

struct Outcome {
  bool pass = true;
  std::string detail;
};

Eigen::MatrixXd reference_rho() {
  Eigen::MatrixXd rho(3, 3);
  rho << 1.0, 0.767, 0.759,  //
      0.767, 1.0, 0.624,     //
      0.759, 0.624, 1.0;
  return rho;
}

const double kReferenceXi = std::log(3.0) / std::log(2.0);
const double kReferenceNu = 2.76733;

std::string fmt(double v) { return format_double(v); }

// GARCH(1,1) path on externally supplied or internally drawn shocks.
Eigen::VectorXd garch_path(double mu, double a0, double a1, double b1, long n,
                           std::uint64_t seed,
                           const Eigen::VectorXd* shocks = nullptr) {
  rng::Stream stream(rng::derive_seed(seed, 77));
  Eigen::VectorXd r(n);
  double sigma2 = a0 / (1.0 - a1 - b1);
  double a_prev = 0.0;
  bool first = true;
  const long burn = 1000;
  for (long t = -burn; t < n; ++t) {
    if (!first) sigma2 = a0 + a1 * a_prev * a_prev + b1 * sigma2;
    first = false;
    double eps = (shocks != nullptr && t >= 0) ? (*shocks)(t)
                                               : stream.normal();
    double a = std::sqrt(sigma2) * eps;
    a_prev = a;
    if (t >= 0) r(t) = mu + a;
  }
  return r;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir(const std::string& hint) {
  auto base = fs::temp_directory_path() /
              ("tailent_acceptance_" + hint + "_" +
               std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);
  return base;
}

int run_cli(const std::string& args) {
  std::string command =
      std::string(TAILENT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(command.c_str());
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

// Reads an exceedance CSV and counts positions by name.
void count_positions(const fs::path& path, int* below, int* inside,
                     int* above) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  *below = *inside = *above = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto pos = line.rfind(',');
    std::string tag = line.substr(pos + 1);
    if (tag == "below") ++*below;
    else if (tag == "inside") ++*inside;
    else if (tag == "above") ++*above;
  }
}

// ---------------------------------------------------------------------------
// criterion 1: exact-cell index endpoints

Outcome criterion1() {
  Outcome out;
  double worst = 0.0;
  for (int j_dim : {2, 3, 4})
    for (double b : {0.5, 0.85, 0.9, 0.95, 0.99}) {
      auto ind = cell_distribution_exact(Independence{j_dim}, b, j_dim);
      auto com = cell_distribution_exact(Comonotone{j_dim}, b, j_dim);
      worst = std::max(worst,
                       std::abs(index_shannon(ind, b) - double(j_dim)));
      worst = std::max(worst, std::abs(index_shannon(com, b) - 1.0));
    }
  out.pass = worst <= 1e-12;
  out.detail = "max |S - target| = " + fmt(worst) + " (tol 1e-12)";
  return out;
}

// ---------------------------------------------------------------------------
// criterion 2: extremal coefficient targets

Outcome criterion2() {
  Outcome out;
  std::ostringstream detail;

  double theta_g = theta_gumbel(kReferenceXi, 3).theta;
  bool gumbel_ok = std::abs(theta_g - 2.0) < 1e-14;
  detail << "gumbel theta = " << fmt(theta_g);

  double theta_s =
      theta_student(kReferenceNu, reference_rho()).theta;
  bool student_ok = std::abs(theta_s - 2.0) <= 0.01;
  detail << ", student theta = " << fmt(theta_s) << " (target 2 +- .01)";

  // Monte Carlo diagonal oracle: n = 1e7 copula draws, b = .9999, pinned
  // seed; the closed form must sit within 3 binomial standard errors.
  const long n = 10000000;
  const double b = 0.9999;
  const std::uint64_t seed = 20015;
  SimBatch batch = sample(StudentCopula{kReferenceNu, reference_rho()}, n,
                          seed);
  long count = 0;
  for (long i = 0; i < n; ++i)
    if (batch.values(i, 0) <= b && batch.values(i, 1) <= b &&
        batch.values(i, 2) <= b)
      ++count;
  double p_hat = double(count) / double(n);
  double theta_hat = std::log(p_hat) / std::log(b);
  double se_p = std::sqrt(p_hat * (1.0 - p_hat) / double(n));
  double se_theta = std::abs(se_p / (p_hat * std::log(b)));
  bool mc_ok = std::abs(theta_hat - theta_s) <= 3.0 * se_theta;
  detail << ", mc diagonal = " << fmt(theta_hat) << " +- "
         << fmt(se_theta) << " (3 se window)";

  out.pass = gumbel_ok && student_ok && mc_ok;
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// criterion 3: sandwich bounds and the limit

Outcome criterion3() {
  Outcome out;
  std::ostringstream detail;
  double worst_violation = 0.0;
  double worst_limit_gap = 0.0;
  for (double theta : {1.2, 2.0, 2.8}) {
    CopulaSpec spec = GumbelCopula{std::log(3.0) / std::log(theta), 3};
    for (double alpha : {1.5, 2.0, 4.0}) {
      std::vector<double> points;
      for (int i = 0; i < 50; ++i)
        points.push_back(0.05 + (0.9975 - 0.05) * i / 49.0);
      BoundsCurve curve = sandwich_bounds(spec, ThresholdGrid(points), alpha);
      for (std::size_t i = 0; i < points.size(); ++i) {
        worst_violation = std::max(worst_violation,
                                   curve.lower[i] - curve.index[i]);
        worst_violation = std::max(worst_violation,
                                   curve.index[i] - curve.upper[i]);
      }
      BoundsCurve tail = sandwich_bounds(
          spec, ThresholdGrid(std::vector<double>{0.9999}), alpha);
      worst_limit_gap = std::max(worst_limit_gap,
                                 std::abs(tail.index[0] - theta));
    }
  }
  bool sandwich_ok = worst_violation <= 1e-10;
  bool limit_ok = worst_limit_gap < 0.02;
  out.pass = sandwich_ok && limit_ok;
  detail << "max bound violation = " << fmt(worst_violation)
         << ", max |T(.9999) - theta| = " << fmt(worst_limit_gap)
         << " (tol .02)";
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// criterion 4: tsallis -> shannon

Outcome criterion4() {
  Outcome out;
  double worst = 0.0;
  for (double b : {0.9, 0.99}) {
    auto cells = cell_distribution_exact(GumbelCopula{kReferenceXi, 3}, b, 3);
    double s = index_shannon(cells, b);
    double t = index_tsallis(cells, b, 1.0 + 1e-6);
    worst = std::max(worst, std::abs(t - s));
  }
  out.pass = worst < 1e-4;
  out.detail = "max |T - S| = " + fmt(worst) + " (tol 1e-4)";
  return out;
}

// ---------------------------------------------------------------------------
// criterion 5: two-family comparison figure

Outcome criterion5() {
  Outcome out;
  std::ostringstream detail;
  const long n = 1000000;
  ThresholdGrid grid(std::vector<double>{0.8, 0.9, 0.95, 0.99, 0.995});

  SimBatch gumbel = sample(GumbelCopula{kReferenceXi, 3}, n, 501);
  SimBatch student =
      sample(StudentCopula{kReferenceNu, reference_rho()}, n, 502);
  PseudoSample gp, sp;
  gp.values = std::move(gumbel.values);
  sp.values = std::move(student.values);
  IndexCurve gc = index_curve(gp, {1, 2, 3}, grid, IndexKind::shannon());
  IndexCurve sc = index_curve(sp, {1, 2, 3}, grid, IndexKind::shannon());

  bool ordering = true;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (sc.values[i] > gc.values[i]) ordering = false;

  double g_final = gc.values.back();
  double s_final = sc.values.back();
  bool window = g_final >= 1.85 && g_final <= 2.3 && s_final >= 1.85 &&
                s_final <= 2.3;

  detail << "student <= gumbel at all thresholds: "
         << (ordering ? "yes" : "NO") << "; finals " << fmt(s_final)
         << " (student), " << fmt(g_final)
         << " (gumbel) against window [1.85, 2.3]";
  if (!window) {
    // diagnostic context: the exact-cell values this sample estimates
    auto cells =
        cell_distribution_exact(GumbelCopula{kReferenceXi, 3}, 0.995, 3);
    detail << "; exact gumbel S(.995) = "
           << fmt(index_shannon(cells, 0.995))
           << ", exact T_2(.995) = "
           << fmt(index_tsallis(cells, 0.995, 2.0));
  }
  out.pass = ordering && window;
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// criterion 6: end-to-end pipeline workflow over the CLI

// Writes a 4-column price panel whose shocks follow the given copula.
fs::path write_price_panel(const fs::path& dir, const CopulaSpec& copula,
                           std::uint64_t seed) {
  const long n = 3686;
  SimBatch u = sample(copula, n, seed);
  const int j_dim = 4;
  Eigen::MatrixXd prices(n + 1, j_dim);
  const bool student = std::holds_alternative<StudentCopula>(copula);
  const double nu = student ? std::get<StudentCopula>(copula).nu : 0.0;
  const double scale = student ? std::sqrt((nu - 2.0) / nu) : 1.0;
  for (int j = 0; j < j_dim; ++j) {
    Eigen::VectorXd shocks(n);
    for (long i = 0; i < n; ++i) {
      double q = student ? scale * special::t_quantile(u.values(i, j), nu)
                         : special::norm_quantile(u.values(i, j));
      shocks(i) = q;
    }
    Eigen::VectorXd r = garch_path(0.05, 0.1, 0.1, 0.8, n,
                                   rng::derive_seed(seed, 500 + j), &shocks);
    prices(0, j) = 100.0;
    for (long i = 0; i < n; ++i)
      prices(i + 1, j) = prices(i, j) * std::exp(r(i) / 100.0);
  }
  std::vector<std::string> header = {"p1", "p2", "p3", "p4"};
  std::vector<std::vector<double>> cols;
  for (int j = 0; j < j_dim; ++j)
    cols.emplace_back(prices.col(j).data(), prices.col(j).data() + n + 1);
  fs::path path = dir / "prices.csv";
  write_csv(path.string(), header, cols);
  return path;
}

Outcome criterion6() {
  Outcome out;
  std::ostringstream detail;

  Eigen::MatrixXd rho = Eigen::MatrixXd::Constant(4, 4, 0.65);
  rho.diagonal().setOnes();

  // part 1: gaussian generator, gaussian band covers >= 90% of the 30
  // thresholds on the 2-, 3- and 4-component subsets
  auto dir1 = scratch_dir("c6_gauss");
  fs::path panel = write_price_panel(dir1, GaussianCopula{rho}, 60001);
  int code = run_cli("pipeline --input " + panel.string() +
                     " --models gaussian --replicates 500 --seed 424242 "
                     "--output-dir " + dir1.string());
  bool part1 = code == 0;
  if (part1) {
    for (const std::string tag : {"1-2", "1-2-3", "1-2-3-4"}) {
      int below = 0, inside = 0, above = 0;
      count_positions(dir1 / ("exceedance_gaussian_" + tag + ".csv"),
                      &below, &inside, &above);
      bool covered = inside >= 27;  // 90% of 30
      part1 = part1 && covered;
      detail << "[" << tag << ": " << inside << "/30 inside] ";
    }
  } else {
    detail << "pipeline exit " << code << " ";
  }

  // part 2: student(nu=4) generator, the gaussian band must be exited
  // below at >= 3 of 30 thresholds in the 4-component subset, for a
  // majority of 20 seeds
  int escapes = 0;
  for (int s = 0; s < 20; ++s) {
    auto dir2 = scratch_dir("c6_student_" + std::to_string(s));
    fs::path p = write_price_panel(dir2, StudentCopula{4.0, rho},
                                   70001 + std::uint64_t(s));
    int rc = run_cli("pipeline --input " + p.string() +
                     " --models gaussian --replicates 500 --subsets 1,2,3,4 "
                     "--seed " + std::to_string(555000 + s) +
                     " --output-dir " + dir2.string());
    if (rc != 0) continue;
    int below = 0, inside = 0, above = 0;
    count_positions(dir2 / "exceedance_gaussian_1-2-3-4.csv", &below,
                    &inside, &above);
    if (below >= 3) ++escapes;
    fs::remove_all(dir2);
  }
  bool part2 = escapes > 10;
  detail << "| student generator escapes below in " << escapes
         << "/20 seeds (need > 10)";
  fs::remove_all(dir1);

  out.pass = part1 && part2;
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// criterion 7: estimator recovery

Outcome criterion7() {
  Outcome out;
  std::ostringstream detail;

  // GARCH QMLE: within +-.05 of (.1, .1, .8) in >= 95 of 100 seeded runs
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Eigen::VectorXd r = garch_path(0.0, 0.1, 0.1, 0.8, 5000, seed);
    GarchFit fit = fit_garch11(r);
    if (fit.converged && std::abs(fit.alpha0 - 0.1) <= 0.05 &&
        std::abs(fit.alpha1 - 0.1) <= 0.05 &&
        std::abs(fit.beta1 - 0.8) <= 0.05)
      ++good;
  }
  bool garch_ok = good >= 95;
  detail << "garch within .05 in " << good << "/100 runs";

  // tau inversion at n = 1e5: rho within +-.02
  Eigen::MatrixXd rho2(2, 2);
  rho2 << 1.0, 0.6, 0.6, 1.0;
  SimBatch batch = sample(GaussianCopula{rho2}, 100000, 31415);
  auto raw = RawSample::from_matrix(std::move(batch.values));
  PseudoSample pseudo = to_pseudo_observations(raw);
  double rho_hat =
      std::get<GaussianCopula>(fit_gaussian_copula(pseudo).spec).rho(0, 1);
  bool tau_ok = std::abs(rho_hat - 0.6) <= 0.02;
  detail << ", tau-inversion rho = " << fmt(rho_hat) << " (.6 +- .02)";

  // EM: log-likelihood nondecreasing with 1e-10 slack on every start
  GaussianMixture truth;
  truth.weights = {0.6, 0.4};
  Eigen::VectorXd m1(2), m2(2);
  m1 << 0.0, 0.0;
  m2 << 3.0, -2.0;
  Eigen::MatrixXd c1(2, 2), c2(2, 2);
  c1 << 1.0, 0.5, 0.5, 1.0;
  c2 << 1.5, -0.3, -0.3, 0.8;
  truth.means = {m1, m2};
  truth.covariances = {c1, c2};
  SimBatch mix_batch = sample(truth, 10000, 999);
  auto mix_raw = RawSample::from_matrix(std::move(mix_batch.values));
  MixtureTrace trace;
  fit_gaussian_mixture(mix_raw, 2, 5, 4321, &trace);
  double worst_drop = 0.0;
  for (const auto& history : trace.loglik_history)
    for (std::size_t i = 1; i < history.size(); ++i)
      worst_drop = std::max(worst_drop, history[i - 1] - history[i]);
  bool em_ok = worst_drop <= 1e-10;
  detail << ", EM worst loglik drop = " << fmt(worst_drop);

  out.pass = garch_ok && tau_ok && em_ok;
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// criterion 8: property suite

Outcome criterion8() {
  Outcome out;
  std::ostringstream detail;
  bool all = true;

  // index bounds on exact curves
  ThresholdGrid grid = ThresholdGrid::linspace(0.5, 0.99, 0.01);
  for (double xi : {1.0, 1.3, kReferenceXi}) {
    IndexCurve curve =
        index_curve(GumbelCopula{xi, 3}, grid, IndexKind::shannon());
    for (double v : curve.values)
      if (v < 1.0 - 1e-9 || v > 3.0 + 1e-9) all = false;
  }
  detail << (all ? "bounds ok" : "bounds VIOLATED");

  // rank invariance: strictly increasing maps leave the curve bit-identical
  rng::Stream s(2718);
  const int n = 600;
  Eigen::MatrixXd m(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = s.normal();
  Eigen::MatrixXd t = m;
  for (int i = 0; i < n; ++i) {
    t(i, 0) = std::exp(m(i, 0));
    t(i, 1) = m(i, 1) * 1000.0 - 5.0;
    t(i, 2) = std::atan(m(i, 2));
  }
  auto raw_a = RawSample::from_matrix(m);
  auto raw_b = RawSample::from_matrix(t);
  ThresholdGrid small(std::vector<double>{0.8, 0.9, 0.95});
  IndexCurve ca = index_curve(to_pseudo_observations(raw_a), {1, 2, 3},
                              small, IndexKind::shannon());
  IndexCurve cb = index_curve(to_pseudo_observations(raw_b), {1, 2, 3},
                              small, IndexKind::shannon());
  bool rank_inv = ca.values == cb.values;
  all = all && rank_inv;
  detail << ", rank invariance " << (rank_inv ? "ok" : "BROKEN");

  // row and column permutation invariance
  Eigen::MatrixXd shuffled = m;
  for (int i = n - 1; i > 0; --i) {
    int j = (i * 48271) % (i + 1);
    shuffled.row(i).swap(shuffled.row(j));
  }
  auto raw_c = RawSample::from_matrix(shuffled);
  IndexCurve cc = index_curve(to_pseudo_observations(raw_c), {1, 2, 3},
                              small, IndexKind::shannon());
  IndexCurve cd = index_curve(to_pseudo_observations(raw_a), {3, 1, 2},
                              small, IndexKind::shannon());
  bool perm_inv = (cc.values == ca.values) && (cd.values == ca.values);
  all = all && perm_inv;
  detail << ", permutation invariance " << (perm_inv ? "ok" : "BROKEN");

  // seeded bit-reproducibility across thread counts + level nesting
  FittedCopula model;
  Eigen::MatrixXd rho2(2, 2);
  rho2 << 1.0, 0.5, 0.5, 1.0;
  model.spec = GaussianCopula{rho2};
  model.method = "fixed";
  EnvelopeOptions one, four;
  one.threads = 1;
  four.threads = 4;
  EnvelopeBand band1 = envelope(model, {1, 2}, small, 400, 80, 0.95, 5, one);
  EnvelopeBand band4 = envelope(model, {1, 2}, small, 400, 80, 0.95, 5,
                                four);
  bool repro = band1.lower == band4.lower && band1.upper == band4.upper;
  all = all && repro;
  detail << ", thread reproducibility " << (repro ? "ok" : "BROKEN");

  EnvelopeBand b95 = envelope(model, {1, 2}, small, 400, 80, 0.95, 5);
  EnvelopeBand b99 = envelope(model, {1, 2}, small, 400, 80, 0.99, 5);
  bool nested = true;
  for (std::size_t i = 0; i < small.size(); ++i)
    if (b99.lower[i] > b95.lower[i] || b95.upper[i] > b99.upper[i])
      nested = false;
  all = all && nested;
  detail << ", level nesting " << (nested ? "ok" : "BROKEN");

  out.pass = all;
  out.detail = detail.str();
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria = {
      {1, "analytic endpoints (independence J, comonotone 1)", criterion1},
      {2, "extremal coefficient targets and MC diagonal oracle", criterion2},
      {3, "sandwich bounds trap the index; limit within .02", criterion3},
      {4, "tsallis index collapses to shannon as alpha -> 1", criterion4},
      {5, "two-family comparison: ordering and final-value window",
       criterion5},
      {6, "pipeline workflow: self-coverage and student escape", criterion6},
      {7, "estimator recovery (garch, tau inversion, EM)", criterion7},
      {8, "property suite (bounds, invariances, reproducibility)",
       criterion8},
  };

  int failed = 0;
  for (const auto& entry : criteria) {
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++failed;
    std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion "
              << entry.id << ": " << entry.name << " — " << outcome.detail
              << "\n";
  }
  if (failed > 0)
    std::cout << failed << " of " << criteria.size()
              << " criteria failing\n";
  else
    std::cout << "all " << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
