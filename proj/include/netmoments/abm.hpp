#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "netmoments/graph.hpp"
#include "netmoments/rng.hpp"

namespace netmoments {

enum class Scenario { Spread, Survival };

std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& s);

/// Demographic and dispersal parameters of the metapopulation model.
/// Defaults are the prairie-dog calibration this model ships with.
struct SimParams {
  std::uint64_t initial_agents = 150;  // agents per seeded patch
  double growth_rate = 0.74;           // per-step intrinsic growth
  std::uint64_t litter_size = 3;       // offspring per successful birth
  double mortality = 0.4;              // per-step death probability
  double dispersal_threshold = 0.9;    // density above which leaving is certain
  double mean_dispersal_km = 2.0;      // mean of the dispersal-ability draw
  /// Per-node carrying capacity; a single entry broadcasts to every node.
  std::vector<std::uint64_t> capacity = {150};

  void validate(std::size_t n) const;
  std::vector<std::uint64_t> capacities(std::size_t n) const;
};

/// Per-node population state. Densities are frozen at the top of each step,
/// so all density-dependent decisions within a step see the same snapshot.
struct SimState {
  std::vector<std::uint64_t> counts;
  std::vector<double> frozen_density;
  std::vector<char> ever_occupied;
  std::uint64_t t = 0;

  std::uint64_t total() const;
  bool all_occupied() const;
};

struct SimOutcome {
  Scenario scenario = Scenario::Spread;
  std::uint64_t steps = 0;
  bool censored = false;
  std::uint64_t seed = 0;
};

/// Both step implementations share one event schedule; Aggregated draws
/// per-phase binomial counts, PerAgent draws per-agent Bernoulli events.
/// They consume randomness differently but are distributionally identical
/// (enforced by a two-sample KS test in the suite).
enum class StepMode { Aggregated, PerAgent };

// --- model formulas (exposed for tests and documentation) ----------------

/// P(an agent reproduces) = max(0, 1 - exp(-r (1 - density))).
double birth_probability(double growth_rate, double density);

/// P(an agent attempts dispersal): density/threshold below the threshold,
/// certain at or above it.
double dispersal_probability(double density, double threshold);

/// P(a disperser crosses a corridor of the given length): the exponential
/// ability draw with the given mean must exceed the corridor distance, so
/// success = exp(-distance/mean). Longer corridors kill more dispersers.
double dispersal_success_probability(double distance_km,
                                     double mean_dispersal_km);

// --- simulation ----------------------------------------------------------

/// Spread: `initial_agents` on one uniformly chosen node; Survival: that many
/// on every node. Marks seeded nodes as occupied and sets t = 0.
SimState initialize(Scenario scenario, const WeightedNetwork& net,
                    const SimParams& params, Rng& rng);

/// One synchronous step: freeze densities, mortality, reproduction (using
/// frozen densities), then dispersal of the step-start survivors (newborns
/// wait a step). Dispersers leave their node before any arrival is
/// processed; arrivals are admitted while the target is below capacity and
/// die otherwise. Failed corridor crossings are deaths.
void step(SimState& state, const WeightedNetwork& net, const SimParams& params,
          Rng& rng, StepMode mode = StepMode::Aggregated);

/// Runs until the scenario's stop condition, with an explicit censor at
/// max_steps. Spread stops when the last never-inhabited node is reached;
/// Survival stops at global extinction. Deterministic per seed.
SimOutcome run_scenario(Scenario scenario, const WeightedNetwork& net,
                        const SimParams& params, std::uint64_t seed,
                        std::uint64_t max_steps,
                        StepMode mode = StepMode::Aggregated,
                        const std::function<void(const SimState&)>& on_step =
                            nullptr);

/// JSON codec for parameter files; missing fields keep their defaults.
std::string sim_params_to_json(const SimParams& params);
SimParams sim_params_from_json(const std::string& text);

}  // namespace netmoments
