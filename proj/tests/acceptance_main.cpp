// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Criteria 8-13 run a scaled sweep (50 replicates per scenario on
// the built-in grid) and check rank/sign/threshold statements, not exact
// values.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "netmoments/abm.hpp"
#include "netmoments/classic_metrics.hpp"
#include "netmoments/eigenmetrics.hpp"
#include "netmoments/experiments.hpp"
#include "netmoments/graph.hpp"
#include "netmoments/rng.hpp"
#include "netmoments/stats.hpp"
#include "netmoments/synthesis.hpp"

using namespace netmoments;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] C%-2d %-34s %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) { return format_double(v); }

std::size_t env_size(const char* name, std::size_t fallback) {
  if (const char* s = std::getenv(name)) {
    const long v = std::atol(s);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return fallback;
}

WeightedNetwork random_network(Rng& rng, std::size_t n, Bounds b = {}) {
  std::vector<double> upper(WeightedNetwork::upper_size(n));
  for (auto& w : upper) w = uniform_real(rng, b.w_min, b.w_max);
  return WeightedNetwork::from_upper_triangle(n, upper, b);
}

// --- criteria 1-3: property corpus -------------------------------------------

void criteria_1_to_3() {
  const std::size_t count = env_size("NETMOMENTS_ACC_CORPUS", 1000);
  Rng rng = make_rng(0xC0FFEE);
  std::size_t c1_bad = 0, c2_bad = 0, c3_bad = 0;
  double c1_worst = 0, c2_worst = 0;

  for (std::size_t rep = 0; rep < count; ++rep) {
    const std::size_t n = 3 + uniform_index(rng, 10);
    const double nd = static_cast<double>(n);
    const auto net = random_network(rng, n);

    const EigenSummary es = eigen_summary(net);
    const double gap =
        std::abs(es.ec_var - (1.0 / nd - es.ec_mean * es.ec_mean));
    c1_worst = std::max(c1_worst, gap);
    if (gap > 1e-10) ++c1_bad;

    const double frob = frobenius_radius(net, es.ec);
    const double rel = std::abs(frob - es.lambda) / es.lambda;
    c2_worst = std::max(c2_worst, rel);
    if (std::abs(frob - es.lambda) > 1e-8 * es.lambda) ++c2_bad;

    const auto paths = shortest_paths(net);
    const double w_bar = mean_strength(net);
    const double e_glob = global_efficiency(paths);
    const double e_loc = local_efficiency(net);
    const double c_bar = mean_clustering(net);
    // the variance bound uses the adjacency-path convention: in the fully
    // connected class the path between adjacent nodes is their edge, so
    // (n-1) * l(G) equals the mean strength
    const double var_bound = 1.0 / nd - std::pow(w_bar / es.lambda, 2);
    if (c_bar > nd * w_bar / ((nd - 1.0) * (nd - 2.0) * net.max_weight()) +
                    1e-9 ||
        es.ec_var < var_bound - 1e-9 ||
        e_loc > nd / (nd - 2.0) * e_glob + 1e-9)
      ++c3_bad;
  }
  report(1, "mean-variance bijection", c1_bad == 0,
         "violations " + std::to_string(c1_bad) + "/" + std::to_string(count) +
             ", worst gap " + fmt(c1_worst));
  report(2, "eigenvector radius identity", c2_bad == 0,
         "violations " + std::to_string(c2_bad) + ", worst rel " +
             fmt(c2_worst));
  report(3, "clustering/path/efficiency bounds", c3_bad == 0,
         "violations " + std::to_string(c3_bad) + "/" + std::to_string(count));
}

// --- criterion 4: uniform closed forms -----------------------------------------

void criterion_4() {
  bool ok = true;
  std::string detail = "all n in 3..12, w in {1,16,20}";
  for (std::size_t n = 3; n <= 12 && ok; ++n) {
    for (double w : {1.0, 16.0, 20.0}) {
      const auto net = WeightedNetwork::uniform(n, w);
      const double nd = static_cast<double>(n);
      const EigenSummary es = eigen_summary(net);
      const auto paths = shortest_paths(net);
      const double tol = 1e-10;
      const bool good =
          std::abs(es.lambda - w * (nd - 1.0)) <= tol * std::max(1.0, w * nd) &&
          es.ec_var <= tol && !es.ec_skew &&
          std::abs(mean_clustering(net) - 1.0) <= tol &&
          std::abs(mean_shortest_path(paths) - w) <= tol &&
          std::abs(global_efficiency(paths) - 1.0 / w) <= tol &&
          std::abs(local_efficiency(net) - 1.0 / w) <= tol;
      bool ec_good = true;
      for (double v : es.ec)
        if (std::abs(v - 1.0 / std::sqrt(nd)) > tol) ec_good = false;
      if (!(good && ec_good)) {
        ok = false;
        detail = "failed at n=" + std::to_string(n) + " w=" + fmt(w);
        break;
      }
    }
  }
  // the calibration anchors: 1km -> 5km radius, 20km -> 100km radius at n=6
  const bool anchors =
      std::abs(spectral_radius(WeightedNetwork::uniform(6, 1)) - 5.0) <=
          1e-10 &&
      std::abs(spectral_radius(WeightedNetwork::uniform(6, 20)) - 100.0) <=
          1e-9;
  report(4, "uniform closed forms", ok && anchors, detail);
}

// --- criterion 5: exhaustive 3-node oracle --------------------------------------

double cubic_radius_oracle(double a, double b, double c) {
  const double p = a * a + b * b + c * c;
  const double q = 2.0 * a * b * c;
  auto f = [&](double x) { return x * x * x - p * x - q; };
  double lo = 0.0, hi = a + b + c + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void criterion_5() {
  const Bounds b{1, 5};
  std::size_t bad_radius = 0, bad_paths = 0;
  double worst = 0.0;
  for (int a = 1; a <= 5; ++a)
    for (int c = 1; c <= 5; ++c)
      for (int d = 1; d <= 5; ++d) {
        const double upper[3] = {static_cast<double>(a),
                                 static_cast<double>(c),
                                 static_cast<double>(d)};
        const auto net = WeightedNetwork::from_upper_triangle(3, upper, b);
        const double lambda = spectral_radius(net);
        const double oracle = cubic_radius_oracle(a, c, d);
        worst = std::max(worst, std::abs(lambda - oracle));
        if (std::abs(lambda - oracle) > 1e-8) ++bad_radius;

        // exhaustive shortest paths on 3 nodes: direct vs the single detour
        const auto p = shortest_paths(net);
        const double d01 = std::min<double>(a, c + d);
        const double d02 = std::min<double>(c, a + d);
        const double d12 = std::min<double>(d, a + c);
        if (p.at(0, 1) != d01 || p.at(0, 2) != d02 || p.at(1, 2) != d12)
          ++bad_paths;
      }
  report(5, "3-node exhaustive oracle",
         bad_radius == 0 && bad_paths == 0,
         "125 nets, worst radius gap " + fmt(worst) + ", path mismatches " +
             std::to_string(bad_paths));
}

// --- criterion 6: synthesis targets ----------------------------------------------

// Attempts one (radius, variance, skew) target; returns "<label> in <t>s" or
// "<label> INFEASIBLE (residuals...)".
bool try_target(double lambda, double var, std::optional<double> skew,
                std::uint64_t seed, std::string& detail) {
  MetricTarget t;
  t.n = 6;
  t.lambda_t = lambda;
  t.var_t = var;
  t.skew_t = skew;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto net = synthesize(t, seed);
    const double secs = elapsed_s(t0);
    const EigenSummary es = eigen_summary(net);
    const bool hit =
        std::abs(es.lambda - t.lambda_t) <= 0.05 &&
        std::abs(es.ec_var - t.var_t) <= 1e-4 &&
        (!t.skew_t ||
         (es.ec_skew && std::abs(*es.ec_skew - *t.skew_t) <= 0.02));
    detail += target_label(t) + (hit ? " ok in " : " OFF-TARGET in ") +
              fmt(secs) + "s; ";
    return hit && secs <= 60.0;
  } catch (const Infeasible& e) {
    detail += target_label(t) + " INFEASIBLE (best var resid " +
              fmt(e.resid_var) + ", skew resid " + fmt(e.resid_skew) +
              ") in " + fmt(elapsed_s(t0)) + "s; ";
    return false;
  }
}

void criterion_6() {
  // The published figure targets, verbatim. Two of them are provably outside
  // the reachable metric set under the divide-by-n variance this library (and
  // the SI algebra, via the mean-variance bijection) uses: at radius 80 the
  // maximum reachable EC variance in [1,20]-bounded matrices is ~0.02440,
  // and at (65, 0.0086) the maximum reachable skewness is ~0.93. Both become
  // reachable if the published variances are read as sample (divide-by-n-1)
  // values, which suggests how the original figures were computed. The
  // criterion is evaluated verbatim and reports honestly; the reinterpreted
  // targets are exercised alongside as evidence.
  std::string detail;
  bool ok = true;
  ok &= try_target(80, 0.026, std::nullopt, 1000, detail);
  ok &= try_target(65, 0.0086, -1.79, 1001, detail);
  ok &= try_target(65, 0.0086, 1.086, 1002, detail);

  // the provably impossible combination must be rejected
  MetricTarget impossible;
  impossible.n = 6;
  impossible.lambda_t = 5;
  impossible.var_t = 0.05;
  bool rejected = false;
  SynthesisOptions opt;
  opt.max_outer = 120;
  opt.inner_evals = 1500;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    synthesize(impossible, 5, opt);
  } catch (const Infeasible&) {
    rejected = true;
  }
  detail += "floor target rejected in " + fmt(elapsed_s(t0)) + "s";
  report(6, "paper synthesis targets", ok && rejected, detail);

  std::string alt;
  bool alt_ok = true;
  alt_ok &= try_target(80, 0.026 * 5.0 / 6.0, std::nullopt, 1000, alt);
  alt_ok &= try_target(65, 0.0086 * 5.0 / 6.0, -1.79, 1001, alt);
  alt_ok &= try_target(65, 0.0086 * 5.0 / 6.0, 1.086, 1002, alt);
  std::printf("       C6 note: sample-variance reading %s: %s\n",
              alt_ok ? "succeeds" : "also fails", alt.c_str());
}

// --- criterion 7: determinism + distributional equivalence ------------------------

void criterion_7() {
  const auto net2 = WeightedNetwork::uniform(2, 6);
  SimParams p;
  p.initial_agents = 30;
  p.capacity = {30};
  p.mean_dispersal_km = 4.0;

  bool deterministic = true;
  for (auto mode : {StepMode::Aggregated, StepMode::PerAgent}) {
    for (auto scen : {Scenario::Spread, Scenario::Survival}) {
      const SimOutcome a = run_scenario(scen, net2, p, 424242, 5000, mode);
      const SimOutcome b = run_scenario(scen, net2, p, 424242, 5000, mode);
      if (a.steps != b.steps || a.censored != b.censored)
        deterministic = false;
    }
  }

  const std::size_t reps = env_size("NETMOMENTS_ACC_KS_REPS", 10000);
  std::vector<double> agg, per;
  agg.reserve(reps);
  per.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    agg.push_back(static_cast<double>(
        run_scenario(Scenario::Survival, net2, p, derive_seed(11, {r}), 4000,
                     StepMode::Aggregated)
            .steps));
    per.push_back(static_cast<double>(
        run_scenario(Scenario::Survival, net2, p, derive_seed(13, {r}), 4000,
                     StepMode::PerAgent)
            .steps));
  }
  const double pval = ks_two_sample_p(agg, per);
  report(7, "determinism + KS equivalence", deterministic && pval >= 0.01,
         "ks p=" + fmt(pval) + " on " + std::to_string(reps) +
             " replicates/path" + (deterministic ? "" : "; NONDETERMINISTIC"));
}

// --- criteria 8-12: scaled sweep -----------------------------------------------

const FitSummary* find_model(const std::vector<FitSummary>& fits,
                             const std::string& label) {
  for (const auto& f : fits)
    if (f.terms_label() == label) return &f;
  return nullptr;
}

struct PaperSign {
  const char* a;
  const char* b;
  int sign;
};

void criteria_8_to_12(const std::vector<ExperimentRecord>& records) {
  // C8: the three-metric model ranks first by AIC in both scenarios
  const ModelSelection spread_sel = model_selection(records, Response::Spread);
  const ModelSelection surv_sel = model_selection(records, Response::Survival);
  const FitSummary* spread3 = find_model(spread_sel.base, "lambda+var+skew");
  const FitSummary* surv3 = find_model(surv_sel.base, "lambda+var+skew");
  const bool c8 = spread3 && surv3 && spread3->rank == 1 && surv3->rank == 1;
  report(8, "3-metric model ranks first", c8,
         "spread rank " + std::to_string(spread3 ? spread3->rank : -1) +
             ", survival rank " + std::to_string(surv3 ? surv3->rank : -1) +
             ", records " + std::to_string(records.size()));

  // C9: survival explains more than spread, with floors
  const bool c9 = spread3 && surv3 && surv3->r2 > spread3->r2 &&
                  surv3->r2 >= 0.6 && spread3->r2 >= 0.1;
  report(9, "R^2 ordering and floors", c9,
         "survival R2 " + fmt(surv3 ? surv3->r2 : -1) + ", spread R2 " +
             fmt(spread3 ? spread3->r2 : -1));

  // C10: the extended term sets strictly improve AIC in their scenario
  const FitSummary* spread_ext = find_model(
      spread_sel.extended, "lambda+var+skew+lambda^2+lambda*var+lambda*skew");
  const FitSummary* surv_ext = find_model(
      surv_sel.extended,
      "lambda+skew+lambda^2+var^2+skew^2+lambda*var+var*skew");
  const bool c10 = spread_ext && surv_ext && spread_ext->error.empty() &&
                   surv_ext->error.empty() && spread_ext->delta_aic < 0.0 &&
                   surv_ext->delta_aic < 0.0;
  report(10, "extended models improve AIC", c10,
         "spread dAIC " + fmt(spread_ext ? spread_ext->delta_aic : 0) +
             ", survival dAIC " + fmt(surv_ext ? surv_ext->delta_aic : 0));

  // C11: Spearman sign agreement with the published correlation pattern
  const CorrelationTable corr = correlation_table(records);
  auto idx = [&](const std::string& name) {
    for (std::size_t i = 0; i < corr.names.size(); ++i)
      if (corr.names[i] == name) return i;
    return corr.names.size();
  };
  static const PaperSign signs[] = {
      {"ec_mean", "lambda", +1},          {"ec_var", "lambda", -1},
      {"ec_var", "ec_mean", -1},          {"ec_skew", "lambda", -1},
      {"ec_skew", "ec_mean", -1},         {"ec_skew", "ec_var", +1},
      {"mean_strength", "lambda", +1},    {"mean_strength", "ec_mean", +1},
      {"mean_strength", "ec_var", -1},    {"mean_strength", "ec_skew", -1},
      {"global_eff", "lambda", -1},       {"global_eff", "ec_mean", -1},
      {"global_eff", "ec_var", +1},       {"global_eff", "ec_skew", +1},
      {"global_eff", "mean_strength", -1},
      {"mean_shortest_path", "lambda", +1},
      {"mean_shortest_path", "ec_mean", +1},
      {"mean_shortest_path", "ec_var", -1},
      {"mean_shortest_path", "ec_skew", -1},
      {"mean_shortest_path", "mean_strength", +1},
      {"mean_shortest_path", "global_eff", -1},
      {"local_eff", "lambda", -1},        {"local_eff", "ec_mean", -1},
      {"local_eff", "ec_var", +1},        {"local_eff", "ec_skew", +1},
      {"local_eff", "mean_strength", -1}, {"local_eff", "global_eff", +1},
      {"local_eff", "mean_shortest_path", -1},
      {"mean_clustering", "lambda", +1},  {"mean_clustering", "ec_mean", +1},
      {"mean_clustering", "ec_var", -1},  {"mean_clustering", "ec_skew", -1},
      {"mean_clustering", "mean_strength", +1},
      {"mean_clustering", "global_eff", -1},
      {"mean_clustering", "mean_shortest_path", +1},
      {"mean_clustering", "local_eff", -1},
  };
  std::size_t sign_bad = 0;
  std::string mismatches;
  for (const auto& s : signs) {
    const double rho = corr.rho[idx(s.a)][idx(s.b)];
    if (!(rho * s.sign > 0.0)) {
      ++sign_bad;
      mismatches += std::string(" ") + s.a + "/" + s.b + "=" + fmt(rho);
    }
  }
  const double rho_lw = corr.rho[idx("lambda")][idx("mean_strength")];
  const double rho_mv = corr.rho[idx("ec_mean")][idx("ec_var")];
  const bool c11 = sign_bad == 0 && rho_lw > 0.9 && rho_mv <= -0.95;
  report(11, "correlation sign agreement", c11,
         "mismatches " + std::to_string(sign_bad) + ", corr(lambda,strength) " +
             fmt(rho_lw) + ", corr(mean,var) " + fmt(rho_mv) +
             (mismatches.empty() ? "" : ";" + mismatches));

  // C12: trend directions of the metric-vs-median-time panels
  std::vector<double> lam, var, spr, sur;
  for (const auto& r : records) {
    if (2 * r.spread_censored > r.replicates ||
        2 * r.survival_censored > r.replicates)
      continue;
    lam.push_back(r.lambda);
    var.push_back(r.ec_var);
    spr.push_back(r.median_spread);
    sur.push_back(r.median_survival);
  }
  const double r_ls = spearman(lam, spr).rho;
  const double r_vs = spearman(var, spr).rho;
  const double r_lu = spearman(lam, sur).rho;
  const double r_vu = spearman(var, sur).rho;
  const bool c12 =
      r_ls >= 0.2 && r_vs <= -0.2 && r_lu <= -0.2 && r_vu >= 0.2;
  report(12, "trend directions", c12,
         "spread~lambda " + fmt(r_ls) + ", spread~var " + fmt(r_vs) +
             ", survival~lambda " + fmt(r_lu) + ", survival~var " +
             fmt(r_vu));
}

// --- criterion 13: sensitivity censoring protocol ----------------------------------

void criterion_13(const SweepResult& sweep, const SimParams& base,
                  const SweepOptions& base_opt) {
  // a slice of the grid is enough to demonstrate the censoring rule
  std::vector<WeightedNetwork> nets;
  std::vector<ExperimentRecord> recs;
  for (std::size_t i = 0; i < sweep.records.size() && nets.size() < 12; ++i) {
    if (!sweep.records[i].ec_skew) continue;  // keep the 3-metric fit fittable
    nets.push_back(sweep.networks[i]);
    recs.push_back(sweep.records[i]);
  }
  SweepOptions opt = base_opt;
  opt.reps = 20;
  opt.max_steps = 3000;

  // high litter size: populations boom and extinction stops happening
  SimParams boom = base;
  boom.litter_size = 4;
  const auto boomed = resimulate(nets, recs, boom, 777, opt);
  std::size_t censored = 0, total = 0;
  for (const auto& r : boomed) {
    censored += r.survival_censored;
    total += r.replicates;
  }
  const bool majority_censored = 2 * censored > total;

  const std::vector<Perturbation> plan = {{"litter_size", 2, 4}};
  const auto cells = sensitivity_sweep(nets, recs, base, 777, opt, plan);
  bool na_flagged = false;
  for (const auto& c : cells)
    if (c.parameter == "litter_size" && c.direction == "+10%" &&
        c.scenario == "survival")
      na_flagged = c.na;

  // informational: the published low-mortality value
  SimParams lowq = base;
  lowq.mortality = 0.504;
  const auto lowq_records = resimulate(nets, recs, lowq, 778, opt);
  std::size_t lowq_censored = 0, lowq_total = 0;
  for (const auto& r : lowq_records) {
    lowq_censored += r.survival_censored;
    lowq_total += r.replicates;
  }

  report(13, "sensitivity censoring -> NA", majority_censored && na_flagged,
         "litter=4: " + std::to_string(censored) + "/" +
             std::to_string(total) + " censored, cell NA=" +
             (na_flagged ? "yes" : "no") + "; mortality=0.504 censored " +
             std::to_string(lowq_censored) + "/" +
             std::to_string(lowq_total));
}

}  // namespace

int main() {
  const auto t_start = std::chrono::steady_clock::now();

  criteria_1_to_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();

  // shared scaled sweep for criteria 8-13
  const std::size_t reps = env_size("NETMOMENTS_ACC_REPS", 50);
  std::fprintf(stderr, "building default grid...\n");
  const GridSpec grid = default_grid(6, Bounds{}, 20240501);
  const auto targets = grid_targets(grid);
  std::fprintf(stderr, "sweep: %zu targets, %zu reps/scenario\n",
               targets.size(), reps);
  SweepOptions opt;
  opt.reps = reps;
  opt.max_steps = 100000;
  opt.workers = static_cast<int>(
      std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
  const SimParams params;  // the documented calibration defaults
  const auto t_sweep = std::chrono::steady_clock::now();
  const SweepResult sweep = run_sweep(targets, params, 20240501, opt);
  std::fprintf(stderr, "sweep done in %.1fs: %zu records, %zu infeasible\n",
               elapsed_s(t_sweep), sweep.records.size(),
               sweep.failures.size());

  criteria_8_to_12(sweep.records);
  criterion_13(sweep, params, opt);

  std::printf("%d/13 criteria passed (%.1fs total)\n", 13 - g_failures,
              elapsed_s(t_start));
  return g_failures;
}
