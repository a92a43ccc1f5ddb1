#include "netmoments/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "netmoments/eigenmetrics.hpp"
#include "netmoments/parallel.hpp"
#include "netmoments/rng.hpp"

namespace netmoments {

namespace {

constexpr std::uint64_t kSynthSalt = 0xA11CE;
constexpr std::uint64_t kScenarioSalt[2] = {0x5eed0001, 0x5eed0002};

double median_steps(std::vector<std::uint64_t>& steps) {
  std::sort(steps.begin(), steps.end());
  const std::size_t m = steps.size();
  if (m % 2 == 1) return static_cast<double>(steps[m / 2]);
  return 0.5 * (static_cast<double>(steps[m / 2 - 1]) +
                static_cast<double>(steps[m / 2]));
}

struct ScenarioStats {
  double median = 0.0;
  std::size_t censored = 0;
};

ScenarioStats run_replicates(Scenario scenario, const WeightedNetwork& net,
                             const SimParams& params, std::uint64_t master,
                             std::size_t target_index, std::size_t reps,
                             std::uint64_t max_steps, StepMode mode) {
  const std::uint64_t salt =
      kScenarioSalt[scenario == Scenario::Spread ? 0 : 1];
  std::vector<std::uint64_t> steps(reps);
  ScenarioStats out;
  for (std::size_t r = 0; r < reps; ++r) {
    const std::uint64_t seed = derive_seed(master, {target_index, salt, r});
    const SimOutcome o =
        run_scenario(scenario, net, params, seed, max_steps, mode);
    steps[r] = o.steps;
    if (o.censored) ++out.censored;
  }
  out.median = median_steps(steps);
  return out;
}

ExperimentRecord measure_and_simulate(const WeightedNetwork& net,
                                      const std::string& net_id,
                                      const SimParams& params,
                                      std::uint64_t master,
                                      std::size_t target_index,
                                      const SweepOptions& opt) {
  ExperimentRecord rec;
  rec.net_id = net_id;
  const EigenSummary es = eigen_summary(net);
  rec.lambda = es.lambda;
  rec.ec_mean = es.ec_mean;
  rec.ec_var = es.ec_var;
  rec.ec_skew = es.ec_skew;
  const ClassicMetrics cm = classic_metrics(net);
  rec.mean_strength = cm.mean_strength;
  rec.mean_clustering = cm.mean_clustering;
  rec.mean_shortest_path = cm.mean_shortest_path;
  rec.global_eff = cm.global_efficiency;
  rec.local_eff = cm.local_efficiency;

  const ScenarioStats spread =
      run_replicates(Scenario::Spread, net, params, master, target_index,
                     opt.reps, opt.max_steps, opt.mode);
  const ScenarioStats survival =
      run_replicates(Scenario::Survival, net, params, master, target_index,
                     opt.reps, opt.max_steps, opt.mode);
  rec.median_spread = spread.median;
  rec.spread_censored = spread.censored;
  rec.median_survival = survival.median;
  rec.survival_censored = survival.censored;
  rec.replicates = opt.reps;
  return rec;
}

}  // namespace

SweepResult run_sweep(const std::vector<MetricTarget>& targets,
                      const SimParams& params, std::uint64_t master_seed,
                      const SweepOptions& options) {
  struct Slot {
    bool ok = false;
    ExperimentRecord record;
    std::optional<WeightedNetwork> network;
    std::string failure;
    std::string label;
  };
  std::vector<Slot> slots(targets.size());

  parallel_for(targets.size(), options.workers, [&](std::size_t i) {
    Slot& slot = slots[i];
    const MetricTarget& t = targets[i];
    slot.label = target_label(t);
    const std::uint64_t synth_seed = derive_seed(master_seed, {i, kSynthSalt});
    try {
      WeightedNetwork net = synthesize(t, synth_seed, options.synth);
      const std::string net_id =
          "net_" + slot.label + "_seed" + std::to_string(synth_seed);
      slot.record = measure_and_simulate(net, net_id, params, master_seed, i,
                                         options);
      slot.network = std::move(net);
      slot.ok = true;
    } catch (const Infeasible& e) {
      slot.failure = e.what();
    }
  });

  SweepResult out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    Slot& slot = slots[i];
    if (slot.ok) {
      out.records.push_back(std::move(slot.record));
      out.networks.push_back(std::move(*slot.network));
    } else {
      out.failures.push_back({i, slot.label, slot.failure});
    }
  }
  return out;
}

std::vector<ExperimentRecord> resimulate(
    const std::vector<WeightedNetwork>& networks,
    const std::vector<ExperimentRecord>& base, const SimParams& params,
    std::uint64_t master_seed, const SweepOptions& options) {
  std::vector<ExperimentRecord> out(base.size());
  parallel_for(networks.size(), options.workers, [&](std::size_t i) {
    ExperimentRecord rec = base[i];
    const ScenarioStats spread =
        run_replicates(Scenario::Spread, networks[i], params, master_seed, i,
                       options.reps, options.max_steps, options.mode);
    const ScenarioStats survival =
        run_replicates(Scenario::Survival, networks[i], params, master_seed,
                       i, options.reps, options.max_steps, options.mode);
    rec.median_spread = spread.median;
    rec.spread_censored = spread.censored;
    rec.median_survival = survival.median;
    rec.survival_censored = survival.censored;
    rec.replicates = options.reps;
    out[i] = std::move(rec);
  });
  return out;
}

// --- model selection ---------------------------------------------------------

std::string term_name(Term t) {
  switch (t) {
    case Term::L: return "lambda";
    case Term::V: return "var";
    case Term::S: return "skew";
    case Term::L2: return "lambda^2";
    case Term::V2: return "var^2";
    case Term::S2: return "skew^2";
    case Term::LV: return "lambda*var";
    case Term::LS: return "lambda*skew";
    case Term::VS: return "var*skew";
  }
  return "?";
}

std::string response_name(Response r) {
  switch (r) {
    case Response::Spread: return "spread";
    case Response::SpreadLog: return "spread_log";
    case Response::Survival: return "survival";
  }
  return "?";
}

std::string FitSummary::terms_label() const {
  std::string s;
  for (const Term& t : terms) {
    if (!s.empty()) s += '+';
    s += term_name(t);
  }
  return s;
}

namespace {

bool uses_skew(Term t) {
  return t == Term::S || t == Term::S2 || t == Term::LS || t == Term::VS;
}

bool model_uses_skew(const std::vector<Term>& terms) {
  return std::any_of(terms.begin(), terms.end(), uses_skew);
}

double term_value(Term t, const ExperimentRecord& r) {
  const double L = r.lambda;
  const double V = r.ec_var;
  const double S = r.ec_skew.value_or(0.0);
  switch (t) {
    case Term::L: return L;
    case Term::V: return V;
    case Term::S: return S;
    case Term::L2: return L * L;
    case Term::V2: return V * V;
    case Term::S2: return S * S;
    case Term::LV: return L * V;
    case Term::LS: return L * S;
    case Term::VS: return V * S;
  }
  return 0.0;
}

bool cell_usable(const ExperimentRecord& r, Response resp) {
  const std::size_t censored =
      resp == Response::Survival ? r.survival_censored : r.spread_censored;
  return 2 * censored <= r.replicates;
}

double response_value(const ExperimentRecord& r, Response resp) {
  switch (resp) {
    case Response::Spread: return r.median_spread;
    case Response::SpreadLog: return std::log(std::max(1.0, r.median_spread));
    case Response::Survival: return r.median_survival;
  }
  return 0.0;
}

FitSummary fit_model(const std::vector<ExperimentRecord>& records,
                     Response resp, std::vector<Term> terms, bool extended) {
  FitSummary fs;
  fs.scenario = response_name(resp);
  fs.terms = std::move(terms);
  fs.extended = extended;

  std::vector<const ExperimentRecord*> usable;
  const bool needs_skew = model_uses_skew(fs.terms);
  for (const auto& r : records) {
    if (!cell_usable(r, resp)) continue;
    if (needs_skew && !r.ec_skew) continue;
    usable.push_back(&r);
  }
  try {
    std::vector<std::vector<double>> cols(fs.terms.size());
    std::vector<double> y;
    y.reserve(usable.size());
    for (const auto* r : usable) y.push_back(response_value(*r, resp));
    for (std::size_t j = 0; j < fs.terms.size(); ++j) {
      cols[j].reserve(usable.size());
      for (const auto* r : usable) cols[j].push_back(term_value(fs.terms[j], *r));
    }
    const OlsFit fit = ols_fit(cols, y);
    fs.coefficients = fit.coefficients;
    fs.r2 = fit.r2;
    fs.aic = fit.aic;
  } catch (const Error& e) {
    fs.error = e.what();
    fs.r2 = 0.0;
    fs.aic = std::numeric_limits<double>::infinity();
  }
  return fs;
}

const std::vector<std::vector<Term>>& base_models() {
  static const std::vector<std::vector<Term>> kModels = {
      {Term::L},          {Term::V},          {Term::S},
      {Term::L, Term::V}, {Term::L, Term::S}, {Term::V, Term::S},
      {Term::L, Term::V, Term::S}};
  return kModels;
}

const std::vector<std::vector<Term>>& extended_models() {
  static const std::vector<std::vector<Term>> kModels = {
      // spread extension: radius/variance/skew plus curvature in the radius
      {Term::L, Term::V, Term::S, Term::L2, Term::LV, Term::LS},
      // survival extension: squares of all three plus two interactions
      {Term::L, Term::S, Term::L2, Term::V2, Term::S2, Term::LV, Term::VS}};
  return kModels;
}

}  // namespace

ModelSelection model_selection(const std::vector<ExperimentRecord>& records,
                               Response response) {
  ModelSelection sel;
  for (const auto& terms : base_models())
    sel.base.push_back(fit_model(records, response, terms, false));
  for (const auto& terms : extended_models())
    sel.extended.push_back(fit_model(records, response, terms, true));

  std::vector<std::size_t> order(sel.base.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sel.base[a].aic < sel.base[b].aic;
  });
  const double best_aic = sel.base[order.front()].aic;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    FitSummary& fs = sel.base[order[pos]];
    fs.rank = static_cast<int>(pos) + 1;
    fs.delta_aic = fs.aic - best_aic;
  }
  int ext_rank = static_cast<int>(sel.base.size());
  for (FitSummary& fs : sel.extended) {
    fs.delta_aic = fs.aic - best_aic;
    fs.rank = ++ext_rank;
  }
  return sel;
}

std::optional<FitSummary> three_metric_fit(
    const std::vector<ExperimentRecord>& records, Response response) {
  FitSummary fs = fit_model(records, response,
                            {Term::L, Term::V, Term::S}, false);
  if (!fs.error.empty()) return std::nullopt;
  return fs;
}

// --- correlation table --------------------------------------------------------

CorrelationTable correlation_table(
    const std::vector<ExperimentRecord>& records) {
  struct Column {
    std::string name;
    bool needs_skew;
    bool negate;  // EC mean row: derived from the variance ranks
    double (*get)(const ExperimentRecord&);
  };
  static const Column cols[] = {
      {"lambda", false, false, [](const ExperimentRecord& r) { return r.lambda; }},
      {"ec_mean", false, true, [](const ExperimentRecord& r) { return r.ec_var; }},
      {"ec_var", false, false, [](const ExperimentRecord& r) { return r.ec_var; }},
      {"ec_skew", true, false,
       [](const ExperimentRecord& r) { return r.ec_skew.value_or(0.0); }},
      {"mean_strength", false, false,
       [](const ExperimentRecord& r) { return r.mean_strength; }},
      {"global_eff", false, false,
       [](const ExperimentRecord& r) { return r.global_eff; }},
      {"mean_shortest_path", false, false,
       [](const ExperimentRecord& r) { return r.mean_shortest_path; }},
      {"local_eff", false, false,
       [](const ExperimentRecord& r) { return r.local_eff; }},
      {"mean_clustering", false, false,
       [](const ExperimentRecord& r) { return r.mean_clustering; }},
  };
  constexpr std::size_t k = std::size(cols);

  CorrelationTable t;
  t.names.reserve(k);
  for (const auto& c : cols) t.names.push_back(c.name);
  t.rho.assign(k, std::vector<double>(k, 0.0));
  t.p.assign(k, std::vector<double>(k, 0.0));

  for (std::size_t a = 0; a < k; ++a) {
    t.rho[a][a] = 1.0;
    for (std::size_t b = 0; b < a; ++b) {
      const bool skew_pair = cols[a].needs_skew || cols[b].needs_skew;
      std::vector<double> xs, ys;
      for (const auto& r : records) {
        if (skew_pair && !r.ec_skew) continue;
        xs.push_back(cols[a].get(r));
        ys.push_back(cols[b].get(r));
      }
      double rho = 0.0, p = 1.0;
      try {
        const SpearmanResult sr = spearman(xs, ys);
        rho = sr.rho;
        p = sr.p_value;
      } catch (const DegenerateInput&) {
        rho = std::numeric_limits<double>::quiet_NaN();
        p = std::numeric_limits<double>::quiet_NaN();
      }
      // sign flip implements the exact decreasing bijection mean <-> var
      if (cols[a].negate != cols[b].negate) rho = -rho;
      t.rho[a][b] = t.rho[b][a] = rho;
      t.p[a][b] = t.p[b][a] = p;
    }
  }
  return t;
}

// --- sensitivity ----------------------------------------------------------------

std::vector<Perturbation> sensitivity_plan(const SimParams& base) {
  // Low/high follow the documented calibration table: demographic rates use
  // their published perturbed values, counts use rounded +-10%.
  std::vector<Perturbation> plan;
  plan.push_back({"initial_agents",
                  std::round(0.9 * static_cast<double>(base.initial_agents)),
                  std::round(1.1 * static_cast<double>(base.initial_agents))});
  plan.push_back({"growth_rate", 0.67, 0.82});
  plan.push_back({"litter_size", 2, 4});
  plan.push_back({"mortality", 0.504, 0.616});
  plan.push_back({"dispersal_threshold", 0.81, 0.99});
  plan.push_back({"mean_dispersal_km", 1.8, 2.2});
  const double cap = static_cast<double>(base.capacity.front());
  plan.push_back({"capacity", std::round(0.9 * cap), std::round(1.1 * cap)});
  return plan;
}

namespace {

SimParams apply_perturbation(const SimParams& base, const std::string& name,
                             double value) {
  SimParams p = base;
  if (name == "initial_agents")
    p.initial_agents = static_cast<std::uint64_t>(value);
  else if (name == "growth_rate")
    p.growth_rate = value;
  else if (name == "litter_size")
    p.litter_size = static_cast<std::uint64_t>(value);
  else if (name == "mortality")
    p.mortality = value;
  else if (name == "dispersal_threshold")
    p.dispersal_threshold = value;
  else if (name == "mean_dispersal_km")
    p.mean_dispersal_km = value;
  else if (name == "capacity")
    p.capacity = {static_cast<std::uint64_t>(value)};
  else
    throw Error("unknown sensitivity parameter: " + name);
  return p;
}

}  // namespace

std::vector<SensitivityCell> sensitivity_sweep(
    const std::vector<WeightedNetwork>& networks,
    const std::vector<ExperimentRecord>& base_records,
    const SimParams& base_params, std::uint64_t master_seed,
    const SweepOptions& options) {
  return sensitivity_sweep(networks, base_records, base_params, master_seed,
                           options, sensitivity_plan(base_params));
}

std::vector<SensitivityCell> sensitivity_sweep(
    const std::vector<WeightedNetwork>& networks,
    const std::vector<ExperimentRecord>& base_records,
    const SimParams& base_params, std::uint64_t master_seed,
    const SweepOptions& options, const std::vector<Perturbation>& plan) {
  const auto base_spread = three_metric_fit(base_records, Response::Spread);
  const auto base_survival =
      three_metric_fit(base_records, Response::Survival);

  std::vector<SensitivityCell> cells;
  for (std::size_t pi = 0; pi < plan.size(); ++pi) {
    const auto& pert = plan[pi];
    for (int side = 0; side < 2; ++side) {
      const double value = side == 0 ? pert.low : pert.high;
      const SimParams params =
          apply_perturbation(base_params, pert.parameter, value);
      const std::uint64_t seed = derive_seed(master_seed, {pi, 7u + side});
      const auto records =
          resimulate(networks, base_records, params, seed, options);

      for (Response resp : {Response::Spread, Response::Survival}) {
        SensitivityCell cell;
        cell.parameter = pert.parameter;
        cell.direction = side == 0 ? "-10%" : "+10%";
        cell.value = value;
        cell.scenario = response_name(resp);

        std::size_t censored = 0, total = 0;
        for (const auto& r : records) {
          censored += resp == Response::Survival ? r.survival_censored
                                                 : r.spread_censored;
          total += r.replicates;
        }
        const auto fit = three_metric_fit(records, resp);
        const auto& base_fit =
            resp == Response::Survival ? base_survival : base_spread;
        if (2 * censored > total || !fit || !base_fit) {
          cell.na = true;
        } else {
          cell.delta_r2 = fit->r2 - base_fit->r2;
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

// --- CSV -------------------------------------------------------------------------

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double_field(const std::string& s, std::size_t line_no,
                          const char* what) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DecodeError("records CSV line " + std::to_string(line_no) +
                      ": bad " + std::string(what) + " '" + s + "'");
  return v;
}

}  // namespace

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = kRecordsCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += r.net_id;
    out += ',';
    out += format_double(r.lambda);
    out += ',';
    out += format_double(r.ec_var);
    out += ',';
    if (r.ec_skew) out += format_double(*r.ec_skew);
    out += ',';
    out += format_double(r.mean_strength);
    out += ',';
    out += format_double(r.mean_clustering);
    out += ',';
    out += format_double(r.mean_shortest_path);
    out += ',';
    out += format_double(r.global_eff);
    out += ',';
    out += format_double(r.local_eff);
    out += ',';
    out += format_double(r.median_spread);
    out += ',';
    out += std::to_string(r.spread_censored);
    out += ',';
    out += format_double(r.median_survival);
    out += ',';
    out += std::to_string(r.survival_censored);
    out += ',';
    out += std::to_string(r.replicates);
    out += '\n';
  }
  return out;
}

std::vector<ExperimentRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DecodeError("records CSV: empty input");
  {
    std::string header = line;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != kRecordsCsvHeader)
      throw DecodeError("records CSV: unexpected header '" + header + "'");
  }
  std::vector<ExperimentRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 14)
      throw DecodeError("records CSV line " + std::to_string(line_no) +
                        ": expected 14 fields, got " +
                        std::to_string(f.size()));
    ExperimentRecord r;
    r.net_id = f[0];
    r.lambda = parse_double_field(f[1], line_no, "lambda");
    r.ec_var = parse_double_field(f[2], line_no, "ec_var");
    if (!f[3].empty()) r.ec_skew = parse_double_field(f[3], line_no, "ec_skew");
    r.mean_strength = parse_double_field(f[4], line_no, "mean_strength");
    r.mean_clustering = parse_double_field(f[5], line_no, "mean_clustering");
    r.mean_shortest_path =
        parse_double_field(f[6], line_no, "mean_shortest_path");
    r.global_eff = parse_double_field(f[7], line_no, "global_eff");
    r.local_eff = parse_double_field(f[8], line_no, "local_eff");
    r.median_spread = parse_double_field(f[9], line_no, "median_spread");
    r.spread_censored = static_cast<std::size_t>(
        parse_double_field(f[10], line_no, "spread_censored"));
    r.median_survival = parse_double_field(f[11], line_no, "median_survival");
    r.survival_censored = static_cast<std::size_t>(
        parse_double_field(f[12], line_no, "survival_censored"));
    r.replicates =
        static_cast<std::size_t>(parse_double_field(f[13], line_no, "reps"));
    out.push_back(std::move(r));
  }
  return out;
}

std::string fits_to_csv(const ModelSelection& sel) {
  std::string out = "scenario,terms,r2,aic,delta_aic,rank\n";
  auto emit = [&](const FitSummary& fs) {
    out += fs.scenario;
    out += ',';
    out += fs.terms_label();
    out += ',';
    if (fs.error.empty()) {
      out += format_double(fs.r2);
      out += ',';
      out += format_double(fs.aic);
      out += ',';
      out += format_double(fs.delta_aic);
    } else {
      out += ",,";
    }
    out += ',';
    out += std::to_string(fs.rank);
    out += '\n';
  };
  std::vector<const FitSummary*> ordered;
  for (const auto& fs : sel.base) ordered.push_back(&fs);
  std::sort(ordered.begin(), ordered.end(),
            [](const FitSummary* a, const FitSummary* b) {
              return a->rank < b->rank;
            });
  for (const auto* fs : ordered) emit(*fs);
  for (const auto& fs : sel.extended) emit(fs);
  return out;
}

std::string correlations_to_csv(const CorrelationTable& t) {
  std::string out = "metric";
  for (const auto& n : t.names) out += "," + n;
  out += '\n';
  for (std::size_t i = 0; i < t.names.size(); ++i) {
    out += t.names[i];
    for (std::size_t j = 0; j < t.names.size(); ++j) {
      out += ',';
      out += format_double(t.rho[i][j]);
    }
    out += '\n';
  }
  return out;
}

std::string sensitivity_to_csv(const std::vector<SensitivityCell>& cells) {
  std::string out = "parameter,direction,value,scenario,delta_r2,na_flag\n";
  for (const auto& c : cells) {
    out += c.parameter;
    out += ',';
    out += c.direction;
    out += ',';
    out += format_double(c.value);
    out += ',';
    out += c.scenario;
    out += ',';
    if (!c.na) out += format_double(c.delta_r2);
    out += ',';
    out += c.na ? "1" : "0";
    out += '\n';
  }
  return out;
}

std::string outcomes_to_csv(const std::vector<SimOutcome>& outcomes,
                            const std::string& net_id) {
  std::string out = "scenario,net_id,seed,steps,censored\n";
  for (const auto& o : outcomes) {
    out += scenario_name(o.scenario);
    out += ',';
    out += net_id;
    out += ',';
    out += std::to_string(o.seed);
    out += ',';
    out += std::to_string(o.steps);
    out += ',';
    out += o.censored ? "1" : "0";
    out += '\n';
  }
  return out;
}

}  // namespace netmoments
