#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netmoments/abm.hpp"
#include "netmoments/classic_metrics.hpp"
#include "netmoments/stats.hpp"
#include "netmoments/synthesis.hpp"

namespace netmoments {

/// One network configuration's metrics plus the median process outcomes over
/// `replicates` runs of each scenario. Censored replicates enter the median
/// at the step cap; their count is reported alongside.
struct ExperimentRecord {
  std::string net_id;
  double lambda = 0.0;
  double ec_mean = 0.0;  // in-memory only; derivable from ec_var
  double ec_var = 0.0;
  std::optional<double> ec_skew;
  double mean_strength = 0.0;
  double mean_clustering = 0.0;
  double mean_shortest_path = 0.0;
  double global_eff = 0.0;
  double local_eff = 0.0;
  double median_spread = 0.0;
  std::size_t spread_censored = 0;
  double median_survival = 0.0;
  std::size_t survival_censored = 0;
  std::size_t replicates = 0;
};

struct SweepFailure {
  std::size_t target_index = 0;
  std::string label;
  std::string reason;
};

struct SweepResult {
  std::vector<ExperimentRecord> records;
  std::vector<WeightedNetwork> networks;  // aligned with records
  std::vector<SweepFailure> failures;
};

struct SweepOptions {
  std::size_t reps = 400;
  std::uint64_t max_steps = 100000;
  int workers = 1;
  StepMode mode = StepMode::Aggregated;
  SynthesisOptions synth;
};

/// Synthesizes one network per target, measures every metric, and runs
/// `reps` replicates of each scenario. All randomness is derived from
/// (master_seed, target index, scenario, replicate index), so the result is
/// identical for any worker count. Infeasible targets are logged as failures
/// and the sweep continues.
SweepResult run_sweep(const std::vector<MetricTarget>& targets,
                      const SimParams& params, std::uint64_t master_seed,
                      const SweepOptions& options);

/// Re-simulates prebuilt networks under different parameters (the synthesis
/// and metric columns of `base` are reused). Used by the sensitivity
/// protocol.
std::vector<ExperimentRecord> resimulate(
    const std::vector<WeightedNetwork>& networks,
    const std::vector<ExperimentRecord>& base, const SimParams& params,
    std::uint64_t master_seed, const SweepOptions& options);

// --- regression model selection -------------------------------------------

enum class Term { L, V, S, L2, V2, S2, LV, LS, VS };
std::string term_name(Term t);

enum class Response { Spread, SpreadLog, Survival };
std::string response_name(Response r);

struct FitSummary {
  std::string scenario;
  std::vector<Term> terms;
  std::vector<double> coefficients;  // intercept first
  double r2 = 0.0;
  double aic = 0.0;
  double delta_aic = 0.0;
  int rank = 0;
  bool extended = false;
  std::string error;  // nonempty when the fit failed

  std::string terms_label() const;
};

struct ModelSelection {
  /// The seven single/combined eigenmetric models, ranked 1..7 by AIC with
  /// delta_aic >= 0 relative to the group best.
  std::vector<FitSummary> base;
  /// Squared/interaction-term models; delta_aic is relative to the best base
  /// model (negative when the extension improves on it).
  std::vector<FitSummary> extended;
};

/// Fits all nonempty subsets of {radius, variance, skewness} plus the two
/// extended term sets against the median time of the given response.
/// Records whose response cell censored more than half of its replicates are
/// excluded; models containing skew terms additionally exclude records with
/// undefined skewness. A model that cannot be fitted is ranked last and
/// carries a diagnostic.
ModelSelection model_selection(const std::vector<ExperimentRecord>& records,
                               Response response);

/// Convenience: the all-three-metrics fit for a response (used by the
/// sensitivity protocol). Returns nothing if it cannot be fitted.
std::optional<FitSummary> three_metric_fit(
    const std::vector<ExperimentRecord>& records, Response response);

// --- correlation table ------------------------------------------------------

struct CorrelationTable {
  std::vector<std::string> names;
  // full symmetric matrices; diagonal is 1/0
  std::vector<std::vector<double>> rho;
  std::vector<std::vector<double>> p;
};

/// Spearman correlations between every pair of the nine summary metrics.
/// The EC-mean row is derived from the EC-variance row by the exact
/// monotone bijection between the two (rank correlations only flip sign).
/// Pairs involving skewness use only records with defined skewness.
CorrelationTable correlation_table(
    const std::vector<ExperimentRecord>& records);

// --- sensitivity -------------------------------------------------------------

struct SensitivityCell {
  std::string parameter;
  std::string direction;  // "-10%" or "+10%"
  double value = 0.0;
  std::string scenario;  // "spread" or "survival"
  double delta_r2 = 0.0;
  bool na = false;
};

/// The perturbed (low, high) values used per parameter.
struct Perturbation {
  std::string parameter;
  double low = 0.0;
  double high = 0.0;
};
std::vector<Perturbation> sensitivity_plan(const SimParams& base);

/// Reruns the sweep with each parameter of `plan` perturbed to its low/high
/// value, refits the three-metric model, and reports the change in R^2
/// against the base fit. A scenario cell is NA when more than half of its
/// replicates censored or too few usable records remain.
std::vector<SensitivityCell> sensitivity_sweep(
    const std::vector<WeightedNetwork>& networks,
    const std::vector<ExperimentRecord>& base_records,
    const SimParams& base_params, std::uint64_t master_seed,
    const SweepOptions& options, const std::vector<Perturbation>& plan);

/// Same, over the full built-in plan.
std::vector<SensitivityCell> sensitivity_sweep(
    const std::vector<WeightedNetwork>& networks,
    const std::vector<ExperimentRecord>& base_records,
    const SimParams& base_params, std::uint64_t master_seed,
    const SweepOptions& options);

// --- CSV ---------------------------------------------------------------------

inline constexpr const char* kRecordsCsvHeader =
    "net_id,lambda,ec_var,ec_skew,mean_strength,mean_clustering,"
    "mean_shortest_path,global_eff,local_eff,median_spread,spread_censored,"
    "median_survival,survival_censored,reps";

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> records_from_csv(const std::string& text);

std::string fits_to_csv(const ModelSelection& sel);
std::string correlations_to_csv(const CorrelationTable& table);
std::string sensitivity_to_csv(const std::vector<SensitivityCell>& cells);
std::string outcomes_to_csv(const std::vector<SimOutcome>& outcomes,
                            const std::string& net_id);

}  // namespace netmoments
