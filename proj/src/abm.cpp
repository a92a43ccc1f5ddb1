#include "netmoments/abm.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "netmoments/errors.hpp"

namespace netmoments {

std::string scenario_name(Scenario s) {
  return s == Scenario::Spread ? "spread" : "survival";
}

Scenario parse_scenario(const std::string& s) {
  if (s == "spread") return Scenario::Spread;
  if (s == "survival") return Scenario::Survival;
  throw Error("unknown scenario '" + s + "' (expected spread|survival)");
}

void SimParams::validate(std::size_t n) const {
  if (!(mortality >= 0.0 && mortality <= 1.0))
    throw Error("mortality must be in [0,1]");
  if (!(dispersal_threshold > 0.0 && dispersal_threshold <= 1.0))
    throw Error("dispersal threshold must be in (0,1]");
  if (!(growth_rate >= 0.0)) throw Error("growth rate must be >= 0");
  if (!(mean_dispersal_km > 0.0)) throw Error("mean dispersal must be > 0");
  if (capacity.empty()) throw Error("capacity list must not be empty");
  if (capacity.size() != 1 && capacity.size() != n)
    throw Error("capacity list must have 1 or n entries");
  for (auto k : capacity)
    if (k < 1) throw Error("carrying capacity must be >= 1");
}

std::vector<std::uint64_t> SimParams::capacities(std::size_t n) const {
  if (capacity.size() == n) return capacity;
  return std::vector<std::uint64_t>(n, capacity.front());
}

std::uint64_t SimState::total() const {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

bool SimState::all_occupied() const {
  for (char o : ever_occupied)
    if (!o) return false;
  return true;
}

double birth_probability(double growth_rate, double density) {
  return std::max(0.0, 1.0 - std::exp(-growth_rate * (1.0 - density)));
}

double dispersal_probability(double density, double threshold) {
  if (density >= threshold) return 1.0;
  return std::max(0.0, density / threshold);
}

double dispersal_success_probability(double distance_km,
                                     double mean_dispersal_km) {
  return std::exp(-distance_km / mean_dispersal_km);
}

SimState initialize(Scenario scenario, const WeightedNetwork& net,
                    const SimParams& params, Rng& rng) {
  const std::size_t n = net.size();
  params.validate(n);
  SimState s;
  s.counts.assign(n, 0);
  s.frozen_density.assign(n, 0.0);
  s.ever_occupied.assign(n, 0);
  s.t = 0;
  if (scenario == Scenario::Spread) {
    const std::size_t seed_node = uniform_index(rng, n);
    s.counts[seed_node] = params.initial_agents;
    s.ever_occupied[seed_node] = 1;
  } else {
    s.counts.assign(n, params.initial_agents);
    s.ever_occupied.assign(n, 1);
  }
  return s;
}

namespace {

// Maps a draw in [0, n-2] to a target node, skipping the source.
inline std::size_t skip_self(std::size_t draw, std::size_t self) {
  return draw < self ? draw : draw + 1;
}

struct StepScratch {
  std::vector<std::uint64_t> survivors;
  std::vector<std::uint64_t> attempts;
};

void step_aggregated(SimState& s, const WeightedNetwork& net,
                     const SimParams& p,
                     const std::vector<std::uint64_t>& cap, Rng& rng) {
  const std::size_t n = net.size();
  static thread_local StepScratch scratch;
  auto& survivors = scratch.survivors;
  auto& attempts = scratch.attempts;
  survivors.assign(n, 0);
  attempts.assign(n, 0);

  for (std::size_t i = 0; i < n; ++i)
    s.frozen_density[i] =
        static_cast<double>(s.counts[i]) / static_cast<double>(cap[i]);

  // mortality, then births by the survivors, then dispersal decisions;
  // every probability uses the frozen densities
  for (std::size_t i = 0; i < n; ++i)
    survivors[i] = binomial_draw(rng, s.counts[i], 1.0 - p.mortality);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t breeders = binomial_draw(
        rng, survivors[i], birth_probability(p.growth_rate,
                                             s.frozen_density[i]));
    s.counts[i] = survivors[i] + breeders * p.litter_size;
  }
  for (std::size_t i = 0; i < n; ++i) {
    attempts[i] = binomial_draw(
        rng, survivors[i],
        dispersal_probability(s.frozen_density[i], p.dispersal_threshold));
    s.counts[i] -= attempts[i];  // dispersers leave before arrivals are seen
  }

  // route dispersers: uniform target choice via sequential conditional
  // binomials, corridor crossing as a per-edge binomial, capacity-gated
  // admission in (source, target) order
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t remaining = attempts[i];
    std::size_t targets_left = n - 1;
    for (std::size_t j = 0; j < n && remaining > 0; ++j) {
      if (j == i) continue;
      const std::uint64_t to_j = binomial_draw(
          rng, remaining, 1.0 / static_cast<double>(targets_left));
      remaining -= to_j;
      --targets_left;
      if (to_j == 0) continue;
      const std::uint64_t crossed = binomial_draw(
          rng, to_j,
          dispersal_success_probability(net.weight(i, j),
                                        p.mean_dispersal_km));
      const std::uint64_t room =
          cap[j] > s.counts[j] ? cap[j] - s.counts[j] : 0;
      s.counts[j] += std::min(crossed, room);
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    if (s.counts[i] > 0) s.ever_occupied[i] = 1;
  ++s.t;
}

void step_per_agent(SimState& s, const WeightedNetwork& net,
                    const SimParams& p,
                    const std::vector<std::uint64_t>& cap, Rng& rng) {
  const std::size_t n = net.size();
  std::vector<std::uint64_t> survivors(n, 0), attempts(n, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t i = 0; i < n; ++i)
    s.frozen_density[i] =
        static_cast<double>(s.counts[i]) / static_cast<double>(cap[i]);

  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t alive = 0;
    for (std::uint64_t a = 0; a < s.counts[i]; ++a)
      if (unit(rng) >= p.mortality) ++alive;
    survivors[i] = alive;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double pb = birth_probability(p.growth_rate, s.frozen_density[i]);
    std::uint64_t newborns = 0;
    for (std::uint64_t a = 0; a < survivors[i]; ++a)
      if (unit(rng) < pb) newborns += p.litter_size;
    s.counts[i] = survivors[i] + newborns;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double pd =
        dispersal_probability(s.frozen_density[i], p.dispersal_threshold);
    std::uint64_t leaving = 0;
    for (std::uint64_t a = 0; a < survivors[i]; ++a)
      if (unit(rng) < pd) ++leaving;
    attempts[i] = leaving;
    s.counts[i] -= leaving;
  }

  std::exponential_distribution<double> ability(1.0 / p.mean_dispersal_km);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint64_t a = 0; a < attempts[i]; ++a) {
      const std::size_t j = skip_self(uniform_index(rng, n - 1), i);
      if (ability(rng) <= net.weight(i, j)) continue;  // died in the corridor
      if (s.counts[j] >= cap[j]) continue;             // competition death
      ++s.counts[j];
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    if (s.counts[i] > 0) s.ever_occupied[i] = 1;
  ++s.t;
}

}  // namespace

void step(SimState& s, const WeightedNetwork& net, const SimParams& p,
          Rng& rng, StepMode mode) {
  const auto cap = p.capacities(net.size());
  if (mode == StepMode::Aggregated)
    step_aggregated(s, net, p, cap, rng);
  else
    step_per_agent(s, net, p, cap, rng);
}

SimOutcome run_scenario(Scenario scenario, const WeightedNetwork& net,
                        const SimParams& params, std::uint64_t seed,
                        std::uint64_t max_steps, StepMode mode,
                        const std::function<void(const SimState&)>& on_step) {
  const auto cap = params.capacities(net.size());
  Rng rng = make_rng(seed);
  SimState state = initialize(scenario, net, params, rng);
  if (on_step) on_step(state);

  for (std::uint64_t t = 0; t < max_steps; ++t) {
    if (mode == StepMode::Aggregated)
      step_aggregated(state, net, params, cap, rng);
    else
      step_per_agent(state, net, params, cap, rng);
    if (on_step) on_step(state);

    if (scenario == Scenario::Spread) {
      if (state.all_occupied())
        return {scenario, state.t, false, seed};
      if (state.total() == 0) break;  // no agents left; occupation is frozen
    } else {
      if (state.total() == 0) return {scenario, state.t, false, seed};
    }
  }
  // An extinct spread run changes nothing in the remaining steps and draws
  // no randomness, so censoring early is exactly equivalent to running out
  // the clock.
  return {scenario, max_steps, true, seed};
}

std::string sim_params_to_json(const SimParams& p) {
  nlohmann::json j;
  j["initial_agents"] = p.initial_agents;
  j["growth_rate"] = p.growth_rate;
  j["litter_size"] = p.litter_size;
  j["mortality"] = p.mortality;
  j["dispersal_threshold"] = p.dispersal_threshold;
  j["mean_dispersal_km"] = p.mean_dispersal_km;
  j["capacity"] = p.capacity;
  return j.dump(2);
}

SimParams sim_params_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DecodeError(std::string("params JSON parse failed: ") + e.what());
  }
  SimParams p;
  try {
    p.initial_agents = j.value("initial_agents", p.initial_agents);
    p.growth_rate = j.value("growth_rate", p.growth_rate);
    p.litter_size = j.value("litter_size", p.litter_size);
    p.mortality = j.value("mortality", p.mortality);
    p.dispersal_threshold = j.value("dispersal_threshold",
                                    p.dispersal_threshold);
    p.mean_dispersal_km = j.value("mean_dispersal_km", p.mean_dispersal_km);
    if (j.contains("capacity")) {
      if (j["capacity"].is_array())
        p.capacity = j["capacity"].get<std::vector<std::uint64_t>>();
      else
        p.capacity = {j["capacity"].get<std::uint64_t>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("params JSON mistyped field: ") + e.what());
  }
  return p;
}

}  // namespace netmoments
