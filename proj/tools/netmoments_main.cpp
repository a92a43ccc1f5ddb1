// netmoments: measure weighted complete networks by their eigen-moment
// hierarchy, synthesize networks with prescribed metric values, simulate
// spread/survival dynamics on them, and analyze the results.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netmoments/abm.hpp"
#include "netmoments/classic_metrics.hpp"
#include "netmoments/eigenmetrics.hpp"
#include "netmoments/experiments.hpp"
#include "netmoments/graph.hpp"
#include "netmoments/kernels.hpp"
#include "netmoments/parallel.hpp"
#include "netmoments/stats.hpp"
#include "netmoments/synthesis.hpp"

namespace fs = std::filesystem;
using namespace netmoments;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  int workers = 0;  // 0 = resolve from env, default 1
  std::string kernels = "auto";
  std::vector<std::string> argv;
};

std::uint64_t resolve_seed(const GlobalOpts& g) {
  if (g.seed) return *g.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << content;
}

/// Every command that produces files drops a manifest next to them; the
/// manifest alone is enough to reproduce the outputs byte for byte.
void write_manifest(const fs::path& path, const std::string& command,
                    const GlobalOpts& g, std::uint64_t seed, int workers,
                    const nlohmann::json& inputs,
                    const nlohmann::json& outputs) {
  nlohmann::json m;
  m["tool"] = "netmoments";
  m["version"] = kVersion;
  m["command"] = command;
  m["argv"] = g.argv;
  m["seed"] = seed;
  m["workers"] = workers;
  m["kernel_backend"] = simd::backend_name(simd::active_backend());
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  write_file(path, m.dump(2) + "\n");
}

fs::path manifest_path_for(const fs::path& out) {
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

const char* error_type_name(const std::exception& e) {
  if (dynamic_cast<const Infeasible*>(&e)) return "Infeasible";
  if (dynamic_cast<const DecodeError*>(&e)) return "DecodeError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const InvalidLevel*>(&e)) return "InvalidLevel";
  if (dynamic_cast<const ConvergenceFailure*>(&e)) return "ConvergenceFailure";
  if (dynamic_cast<const RankDeficient*>(&e)) return "RankDeficient";
  if (dynamic_cast<const DegenerateInput*>(&e)) return "DegenerateInput";
  if (dynamic_cast<const ZeroDenominator*>(&e)) return "ZeroDenominator";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "Exception";
}

// --- metrics ---------------------------------------------------------------

int cmd_metrics(const std::string& net_path, const std::string& out,
                const GlobalOpts& g) {
  const WeightedNetwork net = WeightedNetwork::load(net_path);
  const EigenSummary es = eigen_summary(net);
  const ClassicMetrics cm = classic_metrics(net);

  nlohmann::json j;
  j["n"] = net.size();
  j["lambda"] = es.lambda;
  j["ec"] = es.ec;
  j["ec_mean"] = es.ec_mean;
  j["ec_var"] = es.ec_var;
  if (es.ec_skew)
    j["ec_skew"] = *es.ec_skew;
  else
    j["ec_skew"] = nullptr;
  j["frobenius_radius"] = frobenius_radius(net, es.ec);
  j["mean_strength"] = cm.mean_strength;
  j["mean_clustering"] = cm.mean_clustering;
  j["mean_shortest_path"] = cm.mean_shortest_path;
  j["global_eff"] = cm.global_efficiency;
  j["local_eff"] = cm.local_efficiency;

  std::cout << j.dump(2) << "\n";
  if (!out.empty()) {
    write_file(out, j.dump(2) + "\n");
    write_manifest(manifest_path_for(out), "metrics", g, 0, 1,
                   {{"network", net_path}}, {out});
  }
  return 0;
}

// --- synth -----------------------------------------------------------------

int cmd_synth(std::size_t n, double lambda, double var,
              std::optional<double> skew, double wmin, double wmax,
              const std::string& out, const GlobalOpts& g) {
  MetricTarget t;
  t.n = n;
  t.lambda_t = lambda;
  t.var_t = var;
  t.skew_t = skew;
  t.bounds = {wmin, wmax};
  const std::uint64_t seed = resolve_seed(g);

  const WeightedNetwork net = synthesize(t, seed);
  net.save(out);

  const EigenSummary es = eigen_summary(net);
  std::cout << "synthesized " << target_label(t) << " -> " << out
            << "\n  lambda " << format_double(es.lambda) << "  ec_var "
            << format_double(es.ec_var) << "  ec_skew "
            << (es.ec_skew ? format_double(*es.ec_skew) : "undefined")
            << "\n";

  write_manifest(manifest_path_for(out), "synth", g, seed, 1,
                 {{"target", target_label(t)}}, {out});
  return 0;
}

// --- simulate ----------------------------------------------------------------

int cmd_simulate(const std::string& net_path, const std::string& scenario_s,
                 std::size_t reps, std::uint64_t max_steps,
                 const std::string& params_path, const std::string& out,
                 const std::string& trace, bool per_agent,
                 const GlobalOpts& g) {
  const WeightedNetwork net = WeightedNetwork::load(net_path);
  const Scenario scenario = parse_scenario(scenario_s);
  SimParams params;
  if (!params_path.empty())
    params = sim_params_from_json(read_file(params_path));
  params.validate(net.size());
  const std::uint64_t seed = resolve_seed(g);
  const StepMode mode =
      per_agent ? StepMode::PerAgent : StepMode::Aggregated;
  const std::string net_id = fs::path(net_path).stem().string();

  std::vector<SimOutcome> outcomes(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const std::uint64_t rep_seed = derive_seed(seed, {0, 0x51u, r});
    std::function<void(const SimState&)> on_step;
    std::ofstream trace_out;
    if (!trace.empty()) {
      fs::path tp(trace);
      if (reps > 1) {
        fs::path base = tp;
        tp = base.parent_path() /
             (base.stem().string() + "_rep" + std::to_string(r) +
              base.extension().string());
      }
      if (tp.has_parent_path()) fs::create_directories(tp.parent_path());
      trace_out.open(tp);
      trace_out << "t,node,count\n";
      on_step = [&trace_out](const SimState& s) {
        for (std::size_t i = 0; i < s.counts.size(); ++i)
          trace_out << s.t << ',' << i << ',' << s.counts[i] << '\n';
      };
    }
    outcomes[r] =
        run_scenario(scenario, net, params, rep_seed, max_steps, mode,
                     on_step);
  }

  write_file(out, outcomes_to_csv(outcomes, net_id));
  write_manifest(
      manifest_path_for(out), "simulate", g, seed, 1,
      {{"network", net_path},
       {"scenario", scenario_s},
       {"reps", reps},
       {"max_steps", max_steps},
       {"params", params_path.empty() ? "(defaults)" : params_path},
       {"mode", per_agent ? "per_agent" : "aggregated"}},
      {out});
  return 0;
}

// --- sweep ---------------------------------------------------------------------

int cmd_sweep(const std::string& grid_path, std::size_t n, std::size_t reps,
              std::uint64_t max_steps, const std::string& params_path,
              const std::string& out_dir, const GlobalOpts& g) {
  const std::uint64_t seed = resolve_seed(g);
  const int workers = resolve_workers(g.workers);

  GridSpec grid;
  if (!grid_path.empty()) {
    grid = GridSpec::from_json(read_file(grid_path));
  } else {
    std::cerr << "building default grid (empirical variance/skew ranges)...\n";
    grid = default_grid(n, Bounds{}, derive_seed(seed, {0x681d}));
  }
  SimParams params;
  if (!params_path.empty())
    params = sim_params_from_json(read_file(params_path));

  const auto targets = grid_targets(grid);
  std::cerr << "sweep: " << targets.size() << " targets, " << reps
            << " replicates per scenario, " << workers << " worker(s)\n";

  SweepOptions opt;
  opt.reps = reps;
  opt.max_steps = max_steps;
  opt.workers = workers;
  const SweepResult result = run_sweep(targets, params, seed, opt);

  fs::create_directories(fs::path(out_dir) / "networks");
  write_file(fs::path(out_dir) / "grid_used.json", grid.to_json() + "\n");
  write_file(fs::path(out_dir) / "records.csv",
             records_to_csv(result.records));
  for (std::size_t i = 0; i < result.networks.size(); ++i) {
    result.networks[i].save(fs::path(out_dir) / "networks" /
                            (result.records[i].net_id + ".json"));
  }
  if (!result.failures.empty()) {
    std::string f = "target_index,label,reason\n";
    for (const auto& fail : result.failures) {
      std::string reason = fail.reason;
      for (char& c : reason)
        if (c == ',' || c == '\n') c = ';';
      f += std::to_string(fail.target_index) + "," + fail.label + "," +
           reason + "\n";
    }
    write_file(fs::path(out_dir) / "failures.csv", f);
  }
  std::cerr << "sweep: " << result.records.size() << " records, "
            << result.failures.size() << " infeasible target(s)\n";

  write_manifest(fs::path(out_dir) / "manifest.json", "sweep", g, seed,
                 workers,
                 {{"grid", grid_path.empty() ? "(default)" : grid_path},
                  {"params", params_path.empty() ? "(defaults)" : params_path},
                  {"n", n},
                  {"reps", reps},
                  {"max_steps", max_steps}},
                 {"records.csv", "grid_used.json", "networks/"});
  return 0;
}

// --- analyze ---------------------------------------------------------------------

int cmd_analyze(const std::string& records_path, const std::string& out_dir,
                double lowess_frac, const GlobalOpts& g) {
  const auto records = records_from_csv(read_file(records_path));
  if (records.size() < 3)
    throw DegenerateInput("analyze: need at least 3 records");
  fs::create_directories(out_dir);

  const CorrelationTable corr = correlation_table(records);
  write_file(fs::path(out_dir) / "correlations.csv",
             correlations_to_csv(corr));

  std::string fits_csv = "scenario,terms,r2,aic,delta_aic,rank\n";
  for (const Response resp :
       {Response::Spread, Response::SpreadLog, Response::Survival}) {
    const ModelSelection sel = model_selection(records, resp);
    std::string one = fits_to_csv(sel);
    fits_csv += one.substr(one.find('\n') + 1);
  }
  write_file(fs::path(out_dir) / "fits.csv", fits_csv);

  // LOWESS trend data for each metric/scenario panel
  struct Panel {
    const char* metric;
    bool needs_skew;
    double (*get)(const ExperimentRecord&);
  };
  const Panel panels[] = {
      {"lambda", false, [](const ExperimentRecord& r) { return r.lambda; }},
      {"ec_var", false, [](const ExperimentRecord& r) { return r.ec_var; }},
      {"ec_skew", true,
       [](const ExperimentRecord& r) { return r.ec_skew.value_or(0.0); }},
  };
  std::vector<std::string> outputs = {"correlations.csv", "fits.csv"};
  for (const auto& panel : panels) {
    for (const Response resp : {Response::Spread, Response::Survival}) {
      std::vector<double> xs, ys;
      for (const auto& r : records) {
        if (panel.needs_skew && !r.ec_skew) continue;
        if (!(resp == Response::Survival ? 2 * r.survival_censored <=
                                               r.replicates
                                         : 2 * r.spread_censored <=
                                               r.replicates))
          continue;
        xs.push_back(panel.get(r));
        ys.push_back(resp == Response::Survival ? r.median_survival
                                                : r.median_spread);
      }
      const std::string name = std::string("lowess_") + panel.metric + "_" +
                               response_name(resp) + ".csv";
      std::string csv = "x,y\n";
      try {
        for (const auto& pt : lowess(xs, ys, lowess_frac))
          csv += format_double(pt.x) + "," + format_double(pt.y) + "\n";
      } catch (const DegenerateInput&) {
        // not enough usable records for this panel; emit the header only
      }
      write_file(fs::path(out_dir) / name, csv);
      outputs.push_back(name);
    }
  }

  write_manifest(fs::path(out_dir) / "manifest.json", "analyze", g, 0, 1,
                 {{"records", records_path}, {"lowess_frac", lowess_frac}},
                 outputs);
  std::cout << "analyze: wrote " << outputs.size() << " files to " << out_dir
            << "\n";
  return 0;
}

// --- sensitivity --------------------------------------------------------------------

int cmd_sensitivity(const std::string& params_path,
                    const std::string& grid_path, std::size_t n,
                    std::size_t reps, std::uint64_t max_steps,
                    const std::string& out, const GlobalOpts& g) {
  const std::uint64_t seed = resolve_seed(g);
  const int workers = resolve_workers(g.workers);
  SimParams base;
  if (!params_path.empty()) base = sim_params_from_json(read_file(params_path));

  GridSpec grid;
  if (!grid_path.empty())
    grid = GridSpec::from_json(read_file(grid_path));
  else
    grid = default_grid(n, Bounds{}, derive_seed(seed, {0x681d}));

  SweepOptions opt;
  opt.reps = reps;
  opt.max_steps = max_steps;
  opt.workers = workers;

  const auto targets = grid_targets(grid);
  std::cerr << "sensitivity: base sweep over " << targets.size()
            << " targets\n";
  const SweepResult base_sweep = run_sweep(targets, base, seed, opt);
  std::cerr << "sensitivity: perturbing "
            << sensitivity_plan(base).size() << " parameters\n";
  const auto cells = sensitivity_sweep(base_sweep.networks,
                                       base_sweep.records, base, seed, opt);

  write_file(out, sensitivity_to_csv(cells));
  write_manifest(
      manifest_path_for(out), "sensitivity", g, seed, workers,
      {{"params", params_path.empty() ? "(defaults)" : params_path},
       {"grid", grid_path.empty() ? "(default)" : grid_path},
       {"reps", reps},
       {"max_steps", max_steps}},
      {out});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eigen-moment network metrics, synthesis and simulation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GlobalOpts g;
  for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
  std::uint64_t seed_value = 0;
  auto* seed_opt =
      app.add_option("--seed", seed_value,
                     "master seed; omitted = drawn from system entropy and "
                     "recorded in the manifest");
  app.add_option("--workers", g.workers,
                 "worker threads (default: NETMOMENTS_WORKERS or 1)");
  app.add_option("--kernels", g.kernels,
                 "kernel backend: auto|scalar|avx2 (default auto)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "print all metrics of a network");
  std::string metrics_net, metrics_out;
  metrics->add_option("network", metrics_net, "network .json or .csv file")
      ->required();
  metrics->add_option("--out", metrics_out, "also write the metrics JSON here");

  // synth
  auto* synth = app.add_subcommand(
      "synth", "synthesize a network with prescribed metric values");
  double synth_lambda = 0.0, synth_var = 0.0, synth_skew = 0.0;
  double synth_wmin = 1.0, synth_wmax = 20.0;
  std::size_t synth_n = 6;
  std::string synth_out;
  synth->add_option("--lambda", synth_lambda, "target spectral radius (km)")
      ->required();
  synth->add_option("--var", synth_var, "target EC variance")->required();
  auto* skew_opt =
      synth->add_option("--skew", synth_skew, "target EC skewness (optional)");
  synth->add_option("--n", synth_n, "node count (default 6)");
  synth->add_option("--w-min", synth_wmin, "lower weight bound (km)");
  synth->add_option("--w-max", synth_wmax, "upper weight bound (km)");
  synth->add_option("--out", synth_out, "output network JSON path")->required();

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "run spread/survival replicates on a network");
  std::string sim_net, sim_scenario, sim_params, sim_out, sim_trace;
  std::size_t sim_reps = 1;
  std::uint64_t sim_max_steps = 100000;
  bool sim_per_agent = false;
  simulate->add_option("--net", sim_net, "network file")->required();
  simulate->add_option("--scenario", sim_scenario, "spread|survival")
      ->required();
  simulate->add_option("--reps", sim_reps, "replicates (default 1)");
  simulate->add_option("--max-steps", sim_max_steps,
                       "censoring cap (default 100000)");
  simulate->add_option("--params", sim_params, "SimParams JSON file");
  simulate->add_option("--out", sim_out, "outcome CSV path")->required();
  simulate->add_option("--trace", sim_trace,
                       "write per-step t,node,count CSV (per replicate)");
  simulate->add_flag("--per-agent", sim_per_agent,
                     "use the per-agent step instead of the binomial path");

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "synthesize a grid of networks and simulate both scenarios");
  std::string sweep_grid, sweep_params, sweep_out_dir;
  std::size_t sweep_reps = 400, sweep_n = 6;
  std::uint64_t sweep_max_steps = 100000;
  sweep->add_option("--grid", sweep_grid, "GridSpec JSON (default: built-in)");
  sweep->add_option("--n", sweep_n, "node count for the default grid");
  sweep->add_option("--reps", sweep_reps,
                    "replicates per scenario (default 400)");
  sweep->add_option("--max-steps", sweep_max_steps, "censoring cap");
  sweep->add_option("--params", sweep_params, "SimParams JSON file");
  sweep->add_option("--out-dir", sweep_out_dir, "output directory")
      ->required();

  // analyze
  auto* analyze = app.add_subcommand(
      "analyze", "correlations, model selection and trend curves from records");
  std::string analyze_records, analyze_out_dir;
  double analyze_frac = 0.67;
  analyze->add_option("--records", analyze_records, "records CSV from sweep")
      ->required();
  analyze->add_option("--out-dir", analyze_out_dir, "output directory")
      ->required();
  analyze->add_option("--lowess-frac", analyze_frac,
                      "LOWESS neighborhood fraction (default 0.67)");

  // sensitivity
  auto* sensitivity = app.add_subcommand(
      "sensitivity", "perturb each parameter +-10% and report R^2 changes");
  std::string sens_params, sens_grid, sens_out;
  std::size_t sens_reps = 400, sens_n = 6;
  std::uint64_t sens_max_steps = 100000;
  sensitivity->add_option("--base-params", sens_params,
                          "SimParams JSON file (default: built-in)");
  sensitivity->add_option("--grid", sens_grid, "GridSpec JSON");
  sensitivity->add_option("--n", sens_n, "node count for the default grid");
  sensitivity->add_option("--reps", sens_reps, "replicates per scenario");
  sensitivity->add_option("--max-steps", sens_max_steps, "censoring cap");
  sensitivity->add_option("--out", sens_out, "sensitivity CSV path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  if (*seed_opt) g.seed = seed_value;

  try {
    simd::set_backend(simd::parse_backend(g.kernels));
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (*metrics) return cmd_metrics(metrics_net, metrics_out, g);
    if (*synth) {
      std::optional<double> skew;
      if (*skew_opt) skew = synth_skew;
      return cmd_synth(synth_n, synth_lambda, synth_var, skew, synth_wmin,
                       synth_wmax, synth_out, g);
    }
    if (*simulate)
      return cmd_simulate(sim_net, sim_scenario, sim_reps, sim_max_steps,
                          sim_params, sim_out, sim_trace, sim_per_agent, g);
    if (*sweep)
      return cmd_sweep(sweep_grid, sweep_n, sweep_reps, sweep_max_steps,
                       sweep_params, sweep_out_dir, g);
    if (*analyze)
      return cmd_analyze(analyze_records, analyze_out_dir, analyze_frac, g);
    if (*sensitivity)
      return cmd_sensitivity(sens_params, sens_grid, sens_n, sens_reps,
                             sens_max_steps, sens_out, g);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["type"] = error_type_name(e);
    err["message"] = e.what();
    std::cerr << "error: " << err.dump() << "\n";
    return 1;
  }
  return 2;
}
