// Command-line front end: CSV in, curves/bands/fits out.
//
//   tailent index     --input data.csv ...         entropy-index curves
//   tailent pipeline  --input prices.csv --seed S  full filtering + fit + envelope run
//   tailent extremal  --preset appendix-b --seed S extremal coefficients + convergence tables
//   tailent simulate  --family gumbel ... --seed S copula samples for fixtures
//   tailent fit       --input data.csv --model m   standalone estimators
//
// Exit codes: 0 success, 2 validation failure (bad flags or bad data),
// 3 numerical failure.  Identical configuration and seed produce
// byte-identical output files; nothing written depends on clock or
// environment except TAILENT_OUTPUT_DIR, which supplies --output-dir when
// the flag is absent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tailent/common.hpp"
#include "tailent/copula.hpp"
#include "tailent/csv.hpp"
#include "tailent/entropy_index.hpp"
#include "tailent/extremal.hpp"
#include "tailent/mc_envelope.hpp"
#include "tailent/model_fit.hpp"
#include "tailent/pseudo_obs.hpp"
#include "tailent/rng.hpp"

namespace {

using nlohmann::ordered_json;
using namespace tailent;

// Fixed sub-stream labels hashed with the base seed so that the mixture
// fit and the per-model envelopes never share raw draws.
enum SeedStream : std::uint64_t {
  kStreamMixtureFit = 1,
  kStreamEnvelopeBase = 16,  // + model slot
};

[[noreturn]] void fail_validation(const std::string& message) {
  throw ValidationError(message);
}

std::filesystem::path ensure_output_dir(const std::string& dir) {
  std::filesystem::path path(dir.empty() ? "." : dir);
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) fail_validation("output directory '" + dir + "': " + ec.message());
  return path;
}

char parse_delimiter(const std::string& d) {
  if (d.size() != 1) fail_validation("delimiter must be a single character");
  return d[0];
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& field) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail_validation(field + ": '" + s + "' is not a number");
  }
}

int parse_int(const std::string& s, const std::string& field) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail_validation(field + ": '" + s + "' is not an integer");
  }
}

// Grid flags: --grid start:stop:step or --thresholds v1,v2,...
ThresholdGrid parse_grid(const std::string& grid_spec,
                         const std::string& threshold_list) {
  if (!threshold_list.empty()) {
    std::vector<double> values;
    for (const auto& tok : split(threshold_list, ','))
      values.push_back(parse_double(tok, "--thresholds"));
    return ThresholdGrid(values);
  }
  auto parts = split(grid_spec, ':');
  if (parts.size() != 3)
    fail_validation("--grid: expected start:stop:step, got '" + grid_spec +
                    "'");
  return ThresholdGrid::linspace(parse_double(parts[0], "--grid start"),
                                 parse_double(parts[1], "--grid stop"),
                                 parse_double(parts[2], "--grid step"));
}

std::vector<double> parse_alphas(const std::string& alpha_list) {
  std::vector<double> alphas;
  if (alpha_list.empty()) return alphas;
  for (const auto& tok : split(alpha_list, ','))
    alphas.push_back(parse_double(tok, "--alpha"));
  return alphas;
}

// --subsets "1,2;1,2,3": semicolon-separated groups of 1-based columns.
std::vector<std::vector<int>> parse_subsets(const std::string& spec) {
  std::vector<std::vector<int>> subsets;
  for (const auto& group : split(spec, ';')) {
    if (group.empty()) continue;
    std::vector<int> subset;
    for (const auto& tok : split(group, ','))
      subset.push_back(parse_int(tok, "--subsets"));
    subsets.push_back(std::move(subset));
  }
  if (subsets.empty()) fail_validation("--subsets: no subsets given");
  return subsets;
}

// Default component selection: growing prefixes (1,2), (1,2,3), ..., (1..J).
std::vector<std::vector<int>> prefix_subsets(int j_dim) {
  if (j_dim < 2) fail_validation("need at least 2 numeric columns");
  std::vector<std::vector<int>> subsets;
  for (int k = 2; k <= j_dim; ++k) {
    std::vector<int> subset(k);
    for (int i = 0; i < k; ++i) subset[i] = i + 1;
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

std::string subset_tag(const std::vector<int>& subset) {
  std::string tag;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) tag += '-';
    tag += std::to_string(subset[i]);
  }
  return tag;
}

// Correlation matrix from the strict upper triangle, row-major:
// r12,r13,...,r1J,r23,...  The dimension is recovered from the length.
Eigen::MatrixXd rho_from_upper(const std::string& list,
                               const std::string& field) {
  auto tokens = split(list, ',');
  const std::size_t m = tokens.size();
  int j_dim = static_cast<int>((1.0 + std::sqrt(1.0 + 8.0 * double(m))) / 2.0);
  if (m == 0 || std::size_t(j_dim) * (j_dim - 1) / 2 != m)
    fail_validation(field + ": " + std::to_string(m) +
                    " entries do not fill a strict upper triangle");
  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(j_dim, j_dim);
  std::size_t t = 0;
  for (int i = 0; i < j_dim; ++i)
    for (int k = i + 1; k < j_dim; ++k) {
      rho(i, k) = rho(k, i) = parse_double(tokens[t], field);
      ++t;
    }
  return rho;
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

ordered_json spec_to_json(const CopulaSpec& spec) {
  ordered_json out;
  out["family"] = family_name(spec);
  out["dim"] = dimension(spec);
  if (const auto* g = std::get_if<GaussianCopula>(&spec)) {
    out["rho"] = matrix_to_json(g->rho);
  } else if (const auto* s = std::get_if<StudentCopula>(&spec)) {
    out["nu"] = s->nu;
    out["rho"] = matrix_to_json(s->rho);
  } else if (const auto* gu = std::get_if<GumbelCopula>(&spec)) {
    out["xi"] = gu->xi;
  } else if (const auto* mix = std::get_if<GaussianMixture>(&spec)) {
    out["weights"] = mix->weights;
    ordered_json means = ordered_json::array();
    ordered_json covs = ordered_json::array();
    for (const auto& mu : mix->means) means.push_back(vector_to_json(mu));
    for (const auto& c : mix->covariances) covs.push_back(matrix_to_json(c));
    out["means"] = std::move(means);
    out["covariances"] = std::move(covs);
  }
  return out;
}

ordered_json fitted_to_json(const FittedCopula& fit) {
  ordered_json out;
  out["estimator"] = fit.method;
  out["model"] = spec_to_json(fit.spec);
  out["iterations"] = fit.iterations;
  out["objective"] = fit.objective;  // null when the estimator has none
  out["boundary_hit"] = fit.boundary_hit;
  return out;
}

void write_json_file(const std::filesystem::path& path,
                     const ordered_json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_validation("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& columns) {
  write_csv(path.string(), header, columns);
}

RawSample load_raw(const std::string& path, char delimiter) {
  CsvTable table = read_csv(path, delimiter);
  RawSample raw = RawSample::from_matrix(std::move(table.values));
  raw.column_names = std::move(table.column_names);
  return raw;
}

TieRule tie_rule_flag(const std::string& name) {
  return tie_rule_from_string(name);  // throws ValidationError on bad name
}

// Shared index-curve emission for `index` (and the pipeline's data curves):
// one CSV per subset with columns b, S_b and one Tsallis column per alpha.
void emit_curves(const std::filesystem::path& dir, const std::string& stem,
                 const PseudoSample& pseudo,
                 const std::vector<std::vector<int>>& subsets,
                 const ThresholdGrid& grid, const std::vector<double>& alphas) {
  for (const auto& subset : subsets) {
    IndexCurve shannon =
        index_curve(pseudo, subset, grid, IndexKind::shannon());
    std::vector<std::string> header = {"b", "S_b"};
    std::vector<std::vector<double>> columns = {grid.values, shannon.values};
    for (double alpha : alphas) {
      IndexCurve tsallis =
          index_curve(pseudo, subset, grid, IndexKind::tsallis(alpha));
      header.push_back("T_b_" + format_double(alpha));
      columns.push_back(tsallis.values);
    }
    std::string name = subsets.size() == 1
                           ? stem + ".csv"
                           : stem + "_" + subset_tag(subset) + ".csv";
    write_curve_csv(dir / name, header, columns);
  }
}

// ---------------------------------------------------------------------------
// index

struct IndexArgs {
  std::string input;
  std::string output_dir = ".";
  std::string delimiter = ",";
  std::string subsets;
  std::string grid = ".850:.995:.005";
  std::string thresholds;
  std::string alphas;
  std::string tie_rule = "average";
  std::uint64_t tie_seed = 0;
};

void cmd_index(const IndexArgs& args) {
  auto dir = ensure_output_dir(args.output_dir);
  RawSample raw = load_raw(args.input, parse_delimiter(args.delimiter));
  PseudoSample pseudo =
      to_pseudo_observations(raw, tie_rule_flag(args.tie_rule), args.tie_seed);
  ThresholdGrid grid = parse_grid(args.grid, args.thresholds);
  auto subsets = args.subsets.empty()
                     ? prefix_subsets(static_cast<int>(pseudo.cols()))
                     : parse_subsets(args.subsets);
  emit_curves(dir, "index_curve", pseudo, subsets, grid,
              parse_alphas(args.alphas));
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string family;
  int j_dim = 0;
  std::string rho;
  double nu = 0.0;
  double xi = 0.0;
  std::string mixture_file;
  long n = 0;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  std::string output = "sample.csv";
};

GaussianMixture mixture_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_validation("cannot read mixture file '" + path + "'");
  ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    fail_validation("mixture file '" + path + "': " + e.what());
  }
  GaussianMixture mix;
  try {
    for (const auto& w : doc.at("weights")) mix.weights.push_back(w);
    for (const auto& m : doc.at("means")) {
      Eigen::VectorXd mu(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) mu(i) = m[i];
      mix.means.push_back(std::move(mu));
    }
    for (const auto& c : doc.at("covariances")) {
      Eigen::MatrixXd cov(c.size(), c.size());
      for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c[i].size(); ++j) cov(i, j) = c[i][j];
      mix.covariances.push_back(std::move(cov));
    }
  } catch (const ordered_json::exception& e) {
    fail_validation("mixture file '" + path + "': " + e.what());
  }
  return mix;
}

CopulaSpec build_spec(const SimulateArgs& args) {
  const std::string& f = args.family;
  if (f == "independence" || f == "comonotone") {
    if (args.j_dim < 2) fail_validation("--j: dimension >= 2 required");
    if (f == "independence") return Independence{args.j_dim};
    return Comonotone{args.j_dim};
  }
  if (f == "gaussian" || f == "student") {
    if (args.rho.empty()) fail_validation("--rho required for " + f);
    Eigen::MatrixXd rho = rho_from_upper(args.rho, "--rho");
    if (f == "gaussian") return GaussianCopula{std::move(rho)};
    if (args.nu <= 0) fail_validation("--nu required for student");
    return StudentCopula{args.nu, std::move(rho)};
  }
  if (f == "gumbel") {
    if (args.j_dim < 2) fail_validation("--j: dimension >= 2 required");
    return GumbelCopula{args.xi, args.j_dim};
  }
  if (f == "mixture") {
    if (args.mixture_file.empty())
      fail_validation("--mixture-file required for mixture");
    return mixture_from_file(args.mixture_file);
  }
  fail_validation("--family: unknown family '" + f + "'");
}

void cmd_simulate(const SimulateArgs& args) {
  auto dir = ensure_output_dir(args.output_dir);
  if (args.n <= 0) fail_validation("--n: sample size must be positive");
  CopulaSpec spec = build_spec(args);
  SimBatch batch = sample(spec, args.n, args.seed);
  const char* prefix = batch.space == SampleSpace::kCopulaScale ? "u" : "x";
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  for (int j = 0; j < dimension(spec); ++j) {
    header.push_back(prefix + std::to_string(j + 1));
    std::vector<double> col(batch.values.rows());
    for (Eigen::Index i = 0; i < batch.values.rows(); ++i)
      col[i] = batch.values(i, j);
    columns.push_back(std::move(col));
  }
  write_curve_csv(dir / args.output, header, columns);
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string input;
  std::string model;
  std::string output_dir = ".";
  std::string delimiter = ",";
  bool prices = false;
  std::string tie_rule = "average";
  std::uint64_t tie_seed = 0;
  int mixture_components = 5;
  int n_starts = 5;
  std::optional<std::uint64_t> seed;
  double nu_min = 2.01;
  double nu_max = 100.0;
};

ordered_json garch_column_json(const std::string& name, const GarchFit& fit) {
  ordered_json out;
  out["column"] = name;
  out["mu"] = fit.mu;
  out["alpha0"] = fit.alpha0;
  out["alpha1"] = fit.alpha1;
  out["beta1"] = fit.beta1;
  out["converged"] = fit.converged;
  out["loglik"] = fit.loglik;
  out["iterations"] = fit.iterations;
  return out;
}

std::vector<std::string> numeric_names(const RawSample& raw) {
  if (!raw.column_names.empty()) return raw.column_names;
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < raw.cols(); ++j)
    names.push_back("c" + std::to_string(j + 1));
  return names;
}

void cmd_fit(const FitArgs& args) {
  auto dir = ensure_output_dir(args.output_dir);
  RawSample raw = load_raw(args.input, parse_delimiter(args.delimiter));
  auto names = numeric_names(raw);

  if (args.model == "garch") {
    Eigen::MatrixXd series = raw.values;
    if (args.prices) {
      Eigen::MatrixXd returns(series.rows() - 1, series.cols());
      for (Eigen::Index j = 0; j < series.cols(); ++j)
        returns.col(j) = log_returns(series.col(j));
      series = std::move(returns);
    }
    ordered_json doc;
    doc["estimator"] = "gaussian-qmle";
    doc["mean_included"] = true;
    ordered_json cols = ordered_json::array();
    for (Eigen::Index j = 0; j < series.cols(); ++j)
      cols.push_back(garch_column_json(names[j], fit_garch11(series.col(j))));
    doc["columns"] = std::move(cols);
    write_json_file(dir / "fit_garch.json", doc);
    return;
  }

  if (args.model == "gaussian" || args.model == "student") {
    PseudoSample pseudo = to_pseudo_observations(
        raw, tie_rule_flag(args.tie_rule), args.tie_seed);
    FittedCopula fit;
    ordered_json options;
    if (args.model == "gaussian") {
      fit = fit_gaussian_copula(pseudo);
    } else {
      StudentFitOptions opts;
      opts.nu_min = args.nu_min;
      opts.nu_max = args.nu_max;
      fit = fit_student_copula(pseudo, opts);
      options["nu_min"] = opts.nu_min;
      options["nu_max"] = opts.nu_max;
      options["log_nu_tol"] = opts.log_nu_tol;
    }
    ordered_json doc = fitted_to_json(fit);
    doc["options"] = std::move(options);
    doc["tie_rule"] = args.tie_rule;
    write_json_file(dir / ("fit_" + args.model + ".json"), doc);
    return;
  }

  if (args.model == "mixture") {
    if (!args.seed)
      fail_validation("--seed is required for --model mixture");
    MixtureTrace trace;
    FittedCopula fit = fit_gaussian_mixture(raw, args.mixture_components,
                                            args.n_starts, *args.seed, &trace);
    ordered_json doc = fitted_to_json(fit);
    ordered_json options;
    options["k_components"] = args.mixture_components;
    options["n_starts"] = args.n_starts;
    options["seed"] = *args.seed;
    doc["options"] = std::move(options);
    doc["chosen_start"] = trace.chosen_start;
    write_json_file(dir / "fit_mixture.json", doc);
    return;
  }

  fail_validation("--model: unknown model '" + args.model + "'");
}

// ---------------------------------------------------------------------------
// pipeline

struct PipelineArgs {
  std::string input;
  std::string output_dir = ".";
  std::string delimiter = ",";
  bool returns_given = false;  // input already holds returns
  bool no_garch = false;
  std::string models = "gaussian,student,mixture";
  std::string subsets;
  std::string grid = ".850:.995:.005";
  std::string thresholds;
  int replicates = 500;
  double level = 0.95;
  std::uint64_t seed = 0;
  std::string tie_rule = "average";
  std::uint64_t tie_seed = 0;
  int mixture_components = 5;
  int n_starts = 5;
  bool rerank = false;
  int threads = 0;
};

void cmd_pipeline(const PipelineArgs& args) {
  auto dir = ensure_output_dir(args.output_dir);
  RawSample prices = load_raw(args.input, parse_delimiter(args.delimiter));
  auto names = numeric_names(prices);
  ThresholdGrid grid = parse_grid(args.grid, args.thresholds);
  std::vector<std::string> warnings;

  // Requested model list, order preserved.
  std::vector<std::string> models;
  for (const auto& m : split(args.models, ',')) {
    if (m != "gaussian" && m != "student" && m != "mixture")
      fail_validation("--models: unknown model '" + m + "'");
    models.push_back(m);
  }
  if (models.empty()) fail_validation("--models: empty model list");

  // Prices -> log-returns (unless the input already holds returns).
  Eigen::MatrixXd returns;
  if (args.returns_given) {
    returns = prices.values;
  } else {
    if (prices.rows() < 2)
      fail_validation("price panel needs at least 2 rows");
    returns.resize(prices.rows() - 1, prices.cols());
    for (Eigen::Index j = 0; j < prices.cols(); ++j)
      returns.col(j) = log_returns(prices.values.col(j));
  }
  {
    std::vector<std::vector<double>> cols;
    for (Eigen::Index j = 0; j < returns.cols(); ++j)
      cols.emplace_back(returns.col(j).data(),
                        returns.col(j).data() + returns.rows());
    write_curve_csv(dir / "returns.csv", names, cols);
  }

  // Per-column GARCH filter -> standardized shocks.
  Eigen::MatrixXd shocks(returns.rows(), returns.cols());
  if (args.no_garch) {
    shocks = returns;
  } else {
    ordered_json doc;
    doc["estimator"] = "gaussian-qmle";
    doc["mean_included"] = true;
    ordered_json cols = ordered_json::array();
    for (Eigen::Index j = 0; j < returns.cols(); ++j) {
      GarchFit fit = fit_garch11(returns.col(j));
      if (!fit.converged)
        warnings.push_back("column " + names[j] +
                           ": GARCH estimation did not converge; "
                           "using best point found");
      shocks.col(j) = fit.shocks;
      cols.push_back(garch_column_json(names[j], fit));
    }
    doc["columns"] = std::move(cols);
    write_json_file(dir / "garch.json", doc);
  }
  {
    std::vector<std::vector<double>> cols;
    for (Eigen::Index j = 0; j < shocks.cols(); ++j)
      cols.emplace_back(shocks.col(j).data(),
                        shocks.col(j).data() + shocks.rows());
    write_curve_csv(dir / "shocks.csv", names, cols);
  }

  RawSample shock_sample = RawSample::from_matrix(shocks);
  shock_sample.column_names = names;
  TieRule tie_rule = tie_rule_flag(args.tie_rule);
  PseudoSample pseudo =
      to_pseudo_observations(shock_sample, tie_rule, args.tie_seed);

  auto subsets = args.subsets.empty()
                     ? prefix_subsets(static_cast<int>(pseudo.cols()))
                     : parse_subsets(args.subsets);

  // Data curves.
  std::vector<IndexCurve> data_curves;
  for (const auto& subset : subsets) {
    IndexCurve curve = index_curve(pseudo, subset, grid, IndexKind::shannon());
    write_curve_csv(dir / ("data_curve_" + subset_tag(subset) + ".csv"),
                    {"b", "S_b"}, {grid.values, curve.values});
    data_curves.push_back(std::move(curve));
  }

  // Fits and envelopes, one model at a time.
  const long n = shocks.rows();
  EnvelopeOptions env_options;
  env_options.rerank_copula_samples = args.rerank;
  env_options.threads = args.threads;

  for (std::size_t m = 0; m < models.size(); ++m) {
    const std::string& model = models[m];
    FittedCopula fit;
    ordered_json fit_doc;
    if (model == "gaussian") {
      fit = fit_gaussian_copula(pseudo);
      fit_doc = fitted_to_json(fit);
    } else if (model == "student") {
      fit = fit_student_copula(pseudo);
      fit_doc = fitted_to_json(fit);
      StudentFitOptions defaults;
      ordered_json options;
      options["nu_min"] = defaults.nu_min;
      options["nu_max"] = defaults.nu_max;
      options["log_nu_tol"] = defaults.log_nu_tol;
      fit_doc["options"] = std::move(options);
      if (fit.boundary_hit)
        warnings.push_back(
            "student fit: degrees of freedom ended on a search bound");
    } else {
      std::uint64_t fit_seed = rng::derive_seed(args.seed, kStreamMixtureFit);
      fit = fit_gaussian_mixture(shock_sample, args.mixture_components,
                                 args.n_starts, fit_seed);
      fit_doc = fitted_to_json(fit);
      ordered_json options;
      options["k_components"] = args.mixture_components;
      options["n_starts"] = args.n_starts;
      options["seed"] = fit_seed;
      fit_doc["options"] = std::move(options);
    }
    fit_doc["tie_rule"] = args.tie_rule;
    write_json_file(dir / ("fit_" + model + ".json"), fit_doc);

    std::uint64_t env_seed = rng::derive_seed(args.seed, kStreamEnvelopeBase + m);
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      EnvelopeBand band =
          envelope(fit, subsets[s], grid, n, args.replicates, args.level,
                   env_seed, env_options);
      std::string tag = subset_tag(subsets[s]);
      write_curve_csv(dir / ("band_" + model + "_" + tag + ".csv"),
                      {"b", "lower", "upper"},
                      {grid.values, band.lower, band.upper});

      ExceedanceReport report = band_exceedance_report(data_curves[s], band);
      std::ofstream out(dir / ("exceedance_" + model + "_" + tag + ".csv"),
                        std::ios::binary);
      out << "b,S_b,lower,upper,position\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const char* pos = report.positions[i] == BandPosition::kBelow
                              ? "below"
                              : report.positions[i] == BandPosition::kAbove
                                    ? "above"
                                    : "inside";
        out << format_double(grid.values[i]) << ','
            << format_double(data_curves[s].values[i]) << ','
            << format_double(band.lower[i]) << ','
            << format_double(band.upper[i]) << ',' << pos << '\n';
      }
    }
  }

  // Run manifest: configuration echo and warnings, no timestamps.
  ordered_json run;
  run["command"] = "pipeline";
  run["input"] = args.input;
  run["columns"] = names;
  run["rows"] = n;
  run["input_kind"] = args.returns_given ? "returns" : "prices";
  run["garch_filter"] = !args.no_garch;
  run["models"] = models;
  ordered_json subset_list = ordered_json::array();
  for (const auto& subset : subsets) subset_list.push_back(subset);
  run["subsets"] = std::move(subset_list);
  run["grid"] = grid.values;
  run["replicates"] = args.replicates;
  run["level"] = args.level;
  run["seed"] = args.seed;
  run["tie_rule"] = args.tie_rule;
  run["rerank_copula_samples"] = args.rerank;
  run["warnings"] = warnings;
  write_json_file(dir / "run.json", run);
}

// ---------------------------------------------------------------------------
// extremal

struct ExtremalArgs {
  std::string preset;
  double gumbel_xi = 0.0;
  int j_dim = 3;
  double student_nu = 0.0;
  std::string student_rho;
  long n = 1000000;
  std::string grid = "";
  std::string thresholds = ".8,.9,.95,.99,.995";
  std::string alphas = "1";
  std::uint64_t seed = 0;
  std::string output_dir = ".";
};

// Reference parameters: both families tuned to extremal coefficient 2.
GumbelCopula reference_gumbel() {
  return GumbelCopula{std::log(3.0) / std::log(2.0), 3};
}

StudentCopula reference_student() {
  Eigen::MatrixXd rho(3, 3);
  rho << 1.0, 0.767, 0.759,  //
      0.767, 1.0, 0.624,     //
      0.759, 0.624, 1.0;
  return StudentCopula{2.76733, rho};
}

void emit_convergence(const std::filesystem::path& dir,
                      const std::string& family, const CopulaSpec& spec,
                      const std::vector<double>& alphas,
                      const ThresholdGrid& grid, long n, std::uint64_t seed) {
  auto rows = convergence_report(spec, alphas, grid, n, seed);
  std::vector<std::vector<double>> columns(6);
  for (const auto& row : rows) {
    columns[0].push_back(row.b);
    columns[1].push_back(row.alpha);
    columns[2].push_back(row.index);
    columns[3].push_back(row.lower);
    columns[4].push_back(row.upper);
    columns[5].push_back(row.theta);
  }
  write_curve_csv(dir / ("convergence_" + family + ".csv"),
                  {"b", "alpha", "index", "lower", "upper", "theta"}, columns);
}

void cmd_extremal(const ExtremalArgs& args) {
  auto dir = ensure_output_dir(args.output_dir);
  ThresholdGrid grid = parse_grid(args.grid, args.thresholds);
  std::vector<double> alphas = parse_alphas(args.alphas);
  if (alphas.empty()) fail_validation("--alpha: at least one value required");

  std::optional<GumbelCopula> gumbel;
  std::optional<StudentCopula> student;
  if (!args.preset.empty()) {
    if (args.preset != "appendix-b")
      fail_validation("--preset: unknown preset '" + args.preset + "'");
    gumbel = reference_gumbel();
    student = reference_student();
  }
  if (args.gumbel_xi != 0.0) gumbel = GumbelCopula{args.gumbel_xi, args.j_dim};
  if (args.student_nu != 0.0 || !args.student_rho.empty()) {
    if (args.student_nu == 0.0 || args.student_rho.empty())
      fail_validation("student family needs both --student-nu and "
                      "--student-rho");
    Eigen::MatrixXd rho = rho_from_upper(args.student_rho, "--student-rho");
    student = StudentCopula{args.student_nu, std::move(rho)};
  }
  if (!gumbel && !student)
    fail_validation("nothing to do: give --preset appendix-b, --gumbel-xi "
                    "or --student-nu/--student-rho");

  ordered_json theta_doc;
  if (gumbel) {
    validate(CopulaSpec{*gumbel});
    ExtremalCoefficient theta = theta_gumbel(gumbel->xi, gumbel->dim);
    ordered_json g;
    g["xi"] = gumbel->xi;
    g["dim"] = gumbel->dim;
    g["theta"] = theta.theta;
    theta_doc["gumbel"] = std::move(g);
    emit_convergence(dir, "gumbel", CopulaSpec{*gumbel}, alphas, grid, args.n,
                     rng::derive_seed(args.seed, 1));
  }
  if (student) {
    validate(CopulaSpec{*student});
    if (student->rho.rows() != 3)
      fail_validation("student extremal coefficient requires a 3x3 "
                      "correlation matrix");
    if (args.n <= 0)
      fail_validation("--n: student convergence needs a simulated sample "
                      "(n > 0)");
    ordered_json s;
    s["nu"] = student->nu;
    s["rho"] = matrix_to_json(student->rho);
    ordered_json conventions;
    conventions["standard"] =
        theta_student(student->nu, student->rho,
                      StudentArgConvention::kStandard)
            .theta;
    conventions["printed_simplified"] =
        theta_student(student->nu, student->rho,
                      StudentArgConvention::kPrintedSimplified)
            .theta;
    s["theta"] = std::move(conventions);
    s["validated_convention"] = "standard";
    theta_doc["student"] = std::move(s);
    emit_convergence(dir, "student", CopulaSpec{*student}, alphas, grid,
                     args.n, rng::derive_seed(args.seed, 2));
  }
  write_json_file(dir / "theta.json", theta_doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy index of upper-quantile interdependence"};
  app.require_subcommand(1);

  IndexArgs index_args;
  auto* index_cmd = app.add_subcommand(
      "index", "Entropy-index curves from a CSV sample");
  index_cmd->add_option("--input", index_args.input, "Input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  index_cmd->add_option("--output-dir", index_args.output_dir,
                        "Output directory")
      ->envname("TAILENT_OUTPUT_DIR");
  index_cmd->add_option("--delimiter", index_args.delimiter, "CSV delimiter");
  index_cmd->add_option("--subsets", index_args.subsets,
                        "Component subsets, e.g. '1,2;1,2,3' "
                        "(default: growing prefixes)");
  auto* index_grid =
      index_cmd->add_option("--grid", index_args.grid,
                            "Threshold grid start:stop:step");
  index_cmd->add_option("--thresholds", index_args.thresholds,
                        "Explicit thresholds v1,v2,...")
      ->excludes(index_grid);
  index_cmd->add_option("--alpha", index_args.alphas,
                        "Tsallis alphas for extra columns, e.g. '1.5,2'");
  index_cmd->add_option("--tie-rule", index_args.tie_rule,
                        "average|min|max|random");
  index_cmd->add_option("--tie-seed", index_args.tie_seed,
                        "Seed for random tie breaking");
  index_cmd->callback([&] { cmd_index(index_args); });

  PipelineArgs pipeline_args;
  auto* pipeline_cmd = app.add_subcommand(
      "pipeline", "GARCH filter, copula/mixture fits, Monte Carlo envelopes");
  pipeline_cmd->add_option("--input", pipeline_args.input, "Input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  pipeline_cmd->add_option("--output-dir", pipeline_args.output_dir,
                           "Output directory")
      ->envname("TAILENT_OUTPUT_DIR");
  pipeline_cmd->add_option("--delimiter", pipeline_args.delimiter,
                           "CSV delimiter");
  pipeline_cmd->add_flag("--returns", pipeline_args.returns_given,
                         "Input holds returns, skip the price conversion");
  pipeline_cmd->add_flag("--no-garch", pipeline_args.no_garch,
                         "Skip GARCH filtering, use series as shocks");
  pipeline_cmd->add_option("--models", pipeline_args.models,
                           "Comma list from gaussian,student,mixture");
  pipeline_cmd->add_option("--subsets", pipeline_args.subsets,
                           "Component subsets (default: growing prefixes)");
  auto* pipeline_grid = pipeline_cmd->add_option(
      "--grid", pipeline_args.grid, "Threshold grid start:stop:step");
  pipeline_cmd->add_option("--thresholds", pipeline_args.thresholds,
                           "Explicit thresholds")
      ->excludes(pipeline_grid);
  pipeline_cmd->add_option("--replicates,-R", pipeline_args.replicates,
                           "Envelope replicates")
      ->check(CLI::PositiveNumber);
  pipeline_cmd->add_option("--level", pipeline_args.level,
                           "Envelope level in (0,1)");
  pipeline_cmd->add_option("--seed", pipeline_args.seed, "Base seed")
      ->required();
  pipeline_cmd->add_option("--tie-rule", pipeline_args.tie_rule,
                           "average|min|max|random");
  pipeline_cmd->add_option("--tie-seed", pipeline_args.tie_seed,
                           "Seed for random tie breaking");
  pipeline_cmd->add_option("--mixture-components",
                           pipeline_args.mixture_components,
                           "Mixture component count")
      ->check(CLI::PositiveNumber);
  pipeline_cmd->add_option("--n-starts", pipeline_args.n_starts,
                           "EM restarts")
      ->check(CLI::PositiveNumber);
  pipeline_cmd->add_flag("--rerank", pipeline_args.rerank,
                         "Rank-transform copula-scale replicates too");
  pipeline_cmd->add_option("--threads", pipeline_args.threads,
                           "Envelope worker threads (0 = hardware)");
  pipeline_cmd->callback([&] { cmd_pipeline(pipeline_args); });

  ExtremalArgs extremal_args;
  auto* extremal_cmd = app.add_subcommand(
      "extremal", "Extremal coefficients and convergence tables");
  extremal_cmd->add_option("--preset", extremal_args.preset,
                           "'appendix-b': reference Gumbel + Student pair");
  extremal_cmd->add_option("--gumbel-xi", extremal_args.gumbel_xi,
                           "Gumbel dependence parameter (>= 1)");
  extremal_cmd->add_option("--j", extremal_args.j_dim, "Gumbel dimension");
  extremal_cmd->add_option("--student-nu", extremal_args.student_nu,
                           "Student degrees of freedom");
  extremal_cmd->add_option("--student-rho", extremal_args.student_rho,
                           "Student correlations r12,r13,r23");
  extremal_cmd->add_option("--n", extremal_args.n,
                           "Sample size per family (0 = exact cells)");
  extremal_cmd->add_option("--grid", extremal_args.grid,
                           "Threshold grid start:stop:step");
  extremal_cmd->add_option("--thresholds", extremal_args.thresholds,
                           "Explicit thresholds (default .8,...,.995)");
  extremal_cmd->add_option("--alpha", extremal_args.alphas,
                           "Index alphas; 1 = Shannon (default '1')");
  extremal_cmd->add_option("--seed", extremal_args.seed, "Base seed")
      ->required();
  extremal_cmd->add_option("--output-dir", extremal_args.output_dir,
                           "Output directory")
      ->envname("TAILENT_OUTPUT_DIR");
  extremal_cmd->callback([&] { cmd_extremal(extremal_args); });

  SimulateArgs simulate_args;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Draw copula samples for fixtures");
  simulate_cmd->add_option("--family", simulate_args.family,
                           "independence|comonotone|gaussian|student|"
                           "gumbel|mixture")
      ->required();
  simulate_cmd->add_option("--j", simulate_args.j_dim, "Dimension");
  simulate_cmd->add_option("--rho", simulate_args.rho,
                           "Correlations, strict upper triangle row-major");
  simulate_cmd->add_option("--nu", simulate_args.nu,
                           "Student degrees of freedom");
  simulate_cmd->add_option("--xi", simulate_args.xi,
                           "Gumbel dependence parameter");
  simulate_cmd->add_option("--mixture-file", simulate_args.mixture_file,
                           "JSON with weights/means/covariances");
  simulate_cmd->add_option("--n", simulate_args.n, "Rows to draw")
      ->required();
  simulate_cmd->add_option("--seed", simulate_args.seed, "Seed")->required();
  simulate_cmd->add_option("--output-dir", simulate_args.output_dir,
                           "Output directory")
      ->envname("TAILENT_OUTPUT_DIR");
  simulate_cmd->add_option("--output", simulate_args.output,
                           "Output file name");
  simulate_cmd->callback([&] { cmd_simulate(simulate_args); });

  FitArgs fit_args;
  auto* fit_cmd =
      app.add_subcommand("fit", "Standalone estimators on a CSV sample");
  fit_cmd->add_option("--input", fit_args.input, "Input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--model", fit_args.model,
                      "garch|gaussian|student|mixture")
      ->required();
  fit_cmd->add_option("--output-dir", fit_args.output_dir, "Output directory")
      ->envname("TAILENT_OUTPUT_DIR");
  fit_cmd->add_option("--delimiter", fit_args.delimiter, "CSV delimiter");
  fit_cmd->add_flag("--prices", fit_args.prices,
                    "Convert prices to log-returns first (garch only)");
  fit_cmd->add_option("--tie-rule", fit_args.tie_rule,
                      "average|min|max|random");
  fit_cmd->add_option("--tie-seed", fit_args.tie_seed,
                      "Seed for random tie breaking");
  fit_cmd->add_option("--mixture-components", fit_args.mixture_components,
                      "Mixture component count");
  fit_cmd->add_option("--n-starts", fit_args.n_starts, "EM restarts");
  fit_cmd->add_option("--seed", fit_args.seed,
                      "Seed (required for --model mixture)");
  fit_cmd->add_option("--nu-min", fit_args.nu_min, "Student search lower bound");
  fit_cmd->add_option("--nu-max", fit_args.nu_max, "Student search upper bound");
  fit_cmd->callback([&] { cmd_fit(fit_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const tailent::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tailent::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
