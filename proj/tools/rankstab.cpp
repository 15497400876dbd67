#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rankstab/csv.hpp"
#include "rankstab/dense_region.hpp"
#include "rankstab/engine.hpp"
#include "rankstab/errors.hpp"
#include "rankstab/oracle.hpp"
#include "rankstab/ranking.hpp"
#include "rankstab/report_json.hpp"
#include "rankstab/rng.hpp"
#include "rankstab/synthetic.hpp"

namespace {

using namespace rankstab;

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::lookup, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::lookup, "cannot open '" + path + "' for writing");
  out << text;
}

// Shared ingestion flags. The id column defaults to the first header field
// and the attributes default to every other column that parses numeric.
struct DataArgs {
  std::string data_path;
  std::string id_column;
  std::vector<std::string> attrs;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", data_path, "dataset CSV file")->required();
    cmd->add_option("--id-column", id_column, "id column name (default: first column)");
    cmd->add_option("--attrs", attrs, "attribute columns (default: all numeric columns)")
        ->delimiter(',');
  }

  Dataset load() const {
    std::istringstream in(slurp_file(data_path));
    CsvTable table = parse_csv(in);
    std::string id = id_column.empty() ? table.header.at(0) : id_column;
    std::vector<std::string> cols = attrs.empty() ? detect_numeric_columns(table, id) : attrs;
    return dataset_from_table(table, id, cols);
  }
};

// --func takes a JSON file path, or inline JSON when the value starts with '{'.
RankingFunctionSpec load_func(const std::string& arg) {
  std::string text = arg;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos ||
      text[text.find_first_not_of(" \t\r\n")] != '{') {
    text = slurp_file(arg);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(errc::parse, std::string("ranking function spec: ") + e.what());
  }
  return RankingFunctionSpec::from_json(j);
}

// RCSPEC grammar: "pct=P" scales every attribute by P% of its observed
// max-min range; otherwise comma-separated name=width pairs, with omitted
// attributes pinned at zero width.
ReasonableChanges parse_rcspec(const std::string& spec, const Dataset& d) {
  const auto& names = d.schema().names;
  Vector eps = Vector::Zero(static_cast<Eigen::Index>(names.size()));

  auto parse_value = [&](const std::string& text) {
    try {
      std::size_t used = 0;
      double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      fail(errc::config, "rc: cannot parse '" + text + "' as a number");
    }
  };

  if (spec.rfind("pct=", 0) == 0) {
    double pct = parse_value(spec.substr(4));
    if (pct < 0.0) fail(errc::config, "rc: negative percentage");
    for (std::size_t a = 0; a < names.size(); ++a) {
      double lo = d.at(0).values[static_cast<Eigen::Index>(a)];
      double hi = lo;
      for (const auto& t : d.tuples()) {
        lo = std::min(lo, t.values[static_cast<Eigen::Index>(a)]);
        hi = std::max(hi, t.values[static_cast<Eigen::Index>(a)]);
      }
      eps[static_cast<Eigen::Index>(a)] = pct / 100.0 * (hi - lo);
    }
    return ReasonableChanges{eps};
  }

  std::stringstream parts(spec);
  std::string pair;
  bool any = false;
  while (std::getline(parts, pair, ',')) {
    if (pair.empty()) continue;
    auto eq = pair.find('=');
    if (eq == std::string::npos) fail(errc::config, "rc: expected name=width, got '" + pair + "'");
    std::string name = pair.substr(0, eq);
    double width = parse_value(pair.substr(eq + 1));
    if (width < 0.0) fail(errc::config, "rc: negative width for '" + name + "'");
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) fail(errc::config, "rc: unknown attribute '" + name + "'");
    eps[static_cast<Eigen::Index>(it - names.begin())] = width;
    any = true;
  }
  if (!any) fail(errc::config, "rc: empty specification");
  return ReasonableChanges{eps};
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Engine knobs shared by stability and sweep-k.
struct EngineArgs {
  EngineConfig config;
  std::string rcspec;
  std::string budget = "per-iteration";
  bool no_reduce = false;
  bool no_fast = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--rc", rcspec, "reasonable changes: name=width,... or pct=P")->required();
    cmd->add_option("--eta", config.eta, "verification slack")->capture_default_str();
    cmd->add_option("--delta", config.delta, "verification failure probability")->capture_default_str();
    cmd->add_option("--alpha", config.alpha_target, "target verified unstable rate")->capture_default_str();
    cmd->add_option("--tau-v", config.tau_v, "volume early-stop threshold")->capture_default_str();
    cmd->add_option("--iters", config.max_iterations, "construction iteration cap")->capture_default_str();
    cmd->add_option("--per-iter", config.per_iteration_samples, "construction samples per iteration")->capture_default_str();
    cmd->add_option("--volume-samples", config.volume_samples, "final volume estimate draws")->capture_default_str();
    cmd->add_option("--rejection-tries", config.rejection_max_tries,
                    "proposals per accepted zone sample")->capture_default_str();
    cmd->add_option("--total-samples", config.total_samples,
                    "overall sample budget (apportioned mode)")->capture_default_str();
    cmd->add_option("--budget", budget, "per-iteration or apportioned")->capture_default_str()
        ->check(CLI::IsMember({"per-iteration", "apportioned"}));
    cmd->add_option("--seed", config.seed, "RNG seed")->capture_default_str()->envname("RANKSTAB_SEED");
    cmd->add_flag("--no-reduce-rc", no_reduce, "skip the single-attribute RC reduction");
    cmd->add_flag("--no-fast-rerank", no_fast, "classify with full re-ranks");
  }

  EngineConfig resolve(const Dataset& d) const {
    EngineConfig c = config;
    c.rc = parse_rcspec(rcspec, d);
    c.rc_reduction = !no_reduce;
    c.fast_rerank = !no_fast;
    c.budget_mode = budget == "apportioned" ? BudgetMode::apportioned : BudgetMode::per_iteration;
    return c;
  }
};

int run_rank(const DataArgs& data_args, const std::string& func_arg, const std::string& out) {
  Dataset d = data_args.load();
  RankingFunctionSpec spec = load_func(func_arg);
  spec.validate(d.attr_count());
  Ranking r = rank_dataset(spec, d);

  std::ostringstream csv;
  bool scored = spec.kind != RankingKind::external;
  csv << (scored ? "position,id,score\n" : "position,id\n");
  for (std::size_t pos = 0; pos < r.order.size(); ++pos) {
    const DataTuple& t = d.require(r.order[pos]);
    csv << pos << ',' << csv_escape(t.id);
    if (scored) csv << ',' << format_real(score_tuple(spec, t));
    csv << '\n';
  }
  write_text(out, csv.str());
  return 0;
}

int run_stability(const DataArgs& data_args, const std::string& func_arg, const std::string& tuple,
                  const EngineArgs& engine_args, const std::string& out) {
  Dataset d = data_args.load();
  RankingFunctionSpec spec = load_func(func_arg);
  EngineConfig config = engine_args.resolve(d);
  StabilityReport report = local_stability(spec, d, tuple, config);
  write_text(out, dump_report(to_json(report)));
  return 0;
}

int run_sweep_k(const DataArgs& data_args, const std::string& func_arg, const std::string& tuple,
                const EngineArgs& engine_args, int k_max, const std::string& out,
                const std::string& reports_out) {
  if (k_max < 0) fail(errc::config, "sweep-k: k-max must be >= 0");
  Dataset d = data_args.load();
  RankingFunctionSpec spec = load_func(func_arg);
  EngineConfig config = engine_args.resolve(d);

  std::ostringstream csv;
  csv << "k,estimate,alpha,converged,iterations\n";
  nlohmann::json reports = nlohmann::json::array();
  for (int k = 0; k <= k_max; ++k) {
    config.k = k;
    StabilityReport report = local_stability(spec, d, tuple, config);
    csv << k << ',' << format_real(report.estimate) << ',' << format_real(report.alpha) << ','
        << (report.converged ? "true" : "false") << ',' << report.iterations_used << '\n';
    if (!reports_out.empty()) reports.push_back(to_json(report));
  }
  write_text(out, csv.str());
  if (!reports_out.empty()) write_text(reports_out, dump_report(reports));
  return 0;
}

int run_dense_region(const DataArgs& data_args, const std::string& func_arg,
                     const std::string& tuple, const std::string& rcspec, long samples,
                     std::uint64_t seed, const std::string& out) {
  Dataset d = data_args.load();
  RankingFunctionSpec spec = load_func(func_arg);
  ReasonableChanges rc = parse_rcspec(rcspec, d);
  DenseRegionReport report = detect_dense_region(spec, d, tuple, rc, samples, seed);
  write_text(out, dump_report(to_json(report)));
  return 0;
}

int run_synth(const SyntheticParams& params, const std::string& out, std::string truth_out) {
  SyntheticResult result = generate_dense_dataset(params);
  write_text(out, dataset_to_csv(result.data));

  if (truth_out.empty() && !out.empty() && out != "-") {
    std::string stem = out;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") stem.resize(stem.size() - 4);
    truth_out = stem + ".truth.json";
  }
  if (!truth_out.empty()) {
    nlohmann::json j;
    j["default_rc"] = json_vector(result.default_rc.eps_max);
    j["params"] = {{"dims", params.dims},
                   {"margin", json_real(params.margin)},
                   {"n_tuples", params.n_tuples},
                   {"region_max", params.region_max},
                   {"region_min", params.region_min},
                   {"seed", params.seed},
                   {"sigma", json_real(params.sigma())}};
    j["truth"] = truth_to_json(result.truth);
    write_text(truth_out, dump_report(j));
  }
  return 0;
}

int run_global_stability(const DataArgs& data_args, long samples, std::uint64_t seed,
                         const std::string& out) {
  Dataset d = data_args.load();
  if (samples <= 0) fail(errc::config, "global-stability: samples must be positive");
  auto rng = substream(seed, streams::global2d);
  double estimate = global_stability_2d(d, samples, rng);
  nlohmann::json j;
  j["estimate"] = json_real(estimate);
  j["samples"] = samples;
  j["seed"] = seed;
  write_text(out, dump_report(j));
  return 0;
}

int run_oracle(const DataArgs& data_args, const std::string& func_arg, const std::string& tuple,
               const std::string& rcspec, int k, int grid, bool fast, const std::string& out) {
  Dataset d = data_args.load();
  RankingFunctionSpec spec = load_func(func_arg);
  ReasonableChanges rc = parse_rcspec(rcspec, d);
  double estimate = grid_stability(spec, d, tuple, k, rc, grid, fast);
  nlohmann::json j;
  j["estimate"] = json_real(estimate);
  j["grid"] = grid;
  j["k"] = k;
  j["rc"] = json_vector(rc.eps_max);
  j["tuple"] = tuple;
  write_text(out, dump_report(j));
  return 0;
}

int exit_code_for(const error& e) {
  switch (e.kind()) {
    case errc::config:
      return 1;
    case errc::ranking:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ranking stability estimation"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  DataArgs data_args;
  EngineArgs engine_args;
  std::string func_arg;
  std::string tuple;
  std::string out;
  std::string reports_out;
  std::string rcspec;
  long samples = 100000;
  std::uint64_t seed = 0;
  int k = 0;
  int k_max = 10;
  int grid = 201;
  bool fast = false;
  SyntheticParams synth_params;
  std::string truth_out;

  int rc_code = 0;
  auto run = [&](auto fn) { return [&, fn] { rc_code = fn(); }; };

  auto* rank_cmd = app.add_subcommand("rank", "rank a dataset and print the order");
  data_args.attach(rank_cmd);
  rank_cmd->add_option("--func", func_arg, "ranking function JSON (path or inline)")->required();
  rank_cmd->add_option("--output", out, "output path (default: stdout)");
  rank_cmd->callback(run([&] { return run_rank(data_args, func_arg, out); }));

  auto* stab_cmd = app.add_subcommand("stability", "estimate local stability of one tuple");
  data_args.attach(stab_cmd);
  stab_cmd->add_option("--func", func_arg, "ranking function JSON (path or inline)")->required();
  stab_cmd->add_option("--tuple", tuple, "tuple id")->required();
  stab_cmd->add_option("--k,-k", engine_args.config.k, "allowed position change")->capture_default_str();
  engine_args.attach(stab_cmd);
  stab_cmd->add_option("--output", out, "output path (default: stdout)");
  stab_cmd->callback(run([&] { return run_stability(data_args, func_arg, tuple, engine_args, out); }));

  auto* sweep_cmd = app.add_subcommand("sweep-k", "stability across k = 0..k-max as CSV");
  data_args.attach(sweep_cmd);
  sweep_cmd->add_option("--func", func_arg, "ranking function JSON (path or inline)")->required();
  sweep_cmd->add_option("--tuple", tuple, "tuple id")->required();
  sweep_cmd->add_option("--k-max", k_max, "largest k")->capture_default_str();
  engine_args.attach(sweep_cmd);
  sweep_cmd->add_option("--output", out, "CSV output path (default: stdout)");
  sweep_cmd->add_option("--reports", reports_out, "also write full JSON reports here");
  sweep_cmd->callback(run(
      [&] { return run_sweep_k(data_args, func_arg, tuple, engine_args, k_max, out, reports_out); }));

  auto* dense_cmd = app.add_subcommand("dense-region", "recommend k from the stability curve");
  data_args.attach(dense_cmd);
  dense_cmd->add_option("--func", func_arg, "ranking function JSON (path or inline)")->required();
  dense_cmd->add_option("--tuple", tuple, "tuple id")->required();
  dense_cmd->add_option("--rc", rcspec, "reasonable changes: name=width,... or pct=P")->required();
  dense_cmd->add_option("--samples", samples, "refinement draws")->capture_default_str();
  dense_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str()->envname("RANKSTAB_SEED");
  dense_cmd->add_option("--output", out, "output path (default: stdout)");
  dense_cmd->callback(
      run([&] { return run_dense_region(data_args, func_arg, tuple, rcspec, samples, seed, out); }));

  auto* synth_cmd = app.add_subcommand("synth", "generate a dense-region benchmark dataset");
  synth_cmd->add_option("--n", synth_params.n_tuples, "tuple count")->capture_default_str();
  synth_cmd->add_option("--dims", synth_params.dims, "attribute count")->capture_default_str();
  synth_cmd->add_option("--margin", synth_params.margin, "score gap between regions")->capture_default_str();
  synth_cmd->add_option("--region-min", synth_params.region_min, "smallest region")->capture_default_str();
  synth_cmd->add_option("--region-max", synth_params.region_max, "largest region")->capture_default_str();
  synth_cmd->add_option("--sigma", synth_params.noise_sigma, "attribute noise (default margin/20)");
  synth_cmd->add_option("--seed", synth_params.seed, "RNG seed")->capture_default_str()->envname("RANKSTAB_SEED");
  synth_cmd->add_option("--out", out, "dataset CSV path")->required();
  synth_cmd->add_option("--truth", truth_out, "ground-truth JSON path (default: <out>.truth.json)");
  synth_cmd->callback(run([&] { return run_synth(synth_params, out, truth_out); }));

  auto* global_cmd = app.add_subcommand("global-stability",
                                        "fraction of 2-D weightings preserving the ranking");
  data_args.attach(global_cmd);
  global_cmd->add_option("--samples", samples, "weighting draws")->capture_default_str();
  global_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str()->envname("RANKSTAB_SEED");
  global_cmd->add_option("--output", out, "output path (default: stdout)");
  global_cmd->callback(run([&] { return run_global_stability(data_args, samples, seed, out); }));

  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive grid reference estimate");
  data_args.attach(oracle_cmd);
  oracle_cmd->add_option("--func", func_arg, "ranking function JSON (path or inline)")->required();
  oracle_cmd->add_option("--tuple", tuple, "tuple id")->required();
  oracle_cmd->add_option("--rc", rcspec, "reasonable changes: name=width,... or pct=P")->required();
  oracle_cmd->add_option("--k,-k", k, "allowed position change")->capture_default_str();
  oracle_cmd->add_option("--grid", grid, "grid points per attribute")->capture_default_str();
  oracle_cmd->add_flag("--fast-rerank", fast, "classify with the reduced re-rank path");
  oracle_cmd->add_option("--output", out, "output path (default: stdout)");
  oracle_cmd->callback(
      run([&] { return run_oracle(data_args, func_arg, tuple, rcspec, k, grid, fast, out); }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return rc_code;
}
