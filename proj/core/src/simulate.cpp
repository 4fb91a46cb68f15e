#include "nctmc/ssa/simulate.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace nctmc {

namespace {

double total_rate(std::span<const double> rates) {
  double total = 0.0;
  for (double a : rates) {
    if (a < 0.0) {
      std::ostringstream os;
      os << "negative propensity " << a;
      throw NegativePropensity(os.str());
    }
    total += a;
  }
  return total;
}

// tau and index sampling given positive total rate; consumes two draws.
std::pair<double, std::size_t> sample_event(std::span<const double> rates, double total,
                                            rng::Xoshiro256StarStar& rng) {
  const double v1 = rng.uniform_open01();
  const double tau = std::log(1.0 / v1) / total;
  const double v2 = rng.uniform01();
  const double target = v2 * total;
  double cum = 0.0;
  std::size_t chosen = rates.size();
  for (std::size_t i = 0; i < rates.size(); ++i) {
    cum += rates[i];
    if (target < cum) {
      chosen = i;
      break;
    }
  }
  if (chosen == rates.size()) {
    // Rounding pushed the target past the last cumulative sum; fall back
    // to the last reaction with positive rate.
    for (std::size_t i = rates.size(); i-- > 0;)
      if (rates[i] > 0.0) {
        chosen = i;
        break;
      }
  }
  return {tau, chosen};
}

}  // namespace

std::pair<double, std::size_t> next_event(const State& state, const Covariates& covariates,
                                          const PropensityModel& model,
                                          rng::Xoshiro256StarStar& rng) {
  std::vector<double> rates(model.output_count());
  if (!model.try_rates(state, covariates, rates))
    throw Error("propensity model undefined at current state");
  const double total = total_rate(rates);
  if (total <= 0.0) throw AbsorbedState("total propensity is zero");
  return sample_event(rates, total, rng);
}

Trajectory simulate(const ReactionNetwork& network, const EquivalenceClasses& classes,
                    const PropensityModel& model, const SimulationConfig& config) {
  if (config.initial_state.size() != network.species_count())
    throw ConfigError("initial state dimension does not match network");
  for (auto c : config.initial_state)
    if (c < 0) throw ConfigError("initial state has a negative count");
  if (!config.t_max && !config.max_transitions)
    throw ConfigError("simulation needs t_max or max_transitions");
  if (config.t_max && !(*config.t_max > config.t_start))
    throw ConfigError("t_max must exceed the start time");
  if (config.max_transitions && *config.max_transitions < 1)
    throw ConfigError("max_transitions must be at least 1");

  const std::size_t outputs = model.output_count();
  const bool reaction_level = model.level() == PropensityModel::Level::Reaction;
  if (reaction_level ? outputs != network.reaction_count() : outputs != classes.class_count())
    throw ConfigError("model output count does not match network");

  // State change and recorded reaction index per model output.
  std::vector<const State*> delta_of(outputs);
  std::vector<std::size_t> recorded_of(outputs);
  for (std::size_t i = 0; i < outputs; ++i) {
    delta_of[i] = reaction_level ? &network.state_change(i) : &classes.state_change(i);
    recorded_of[i] = reaction_level ? i : classes.representative(i);
  }

  const double t_max = config.t_max.value_or(std::numeric_limits<double>::infinity());
  const std::uint64_t max_transitions =
      config.max_transitions.value_or(std::numeric_limits<std::uint64_t>::max());

  rng::Xoshiro256StarStar gen(config.rng_seed);
  double t = config.t_start;
  State state = config.initial_state;

  Trajectory out;
  out.observations.push_back(Observation{t, state, config.schedule.at(t), std::nullopt});

  std::vector<double> rates(outputs);
  std::uint64_t transitions = 0;
  while (transitions < max_transitions) {
    const Covariates cov = config.schedule.at(t);
    if (!model.try_rates(state, cov, rates))
      throw Error("propensity model undefined at current state");
    const double total = total_rate(rates);

    const double breakpoint = config.schedule.next_breakpoint(t);
    if (total <= 0.0) {
      // No event can fire under the current covariate; the rates may still
      // change at the next breakpoint.
      if (breakpoint < t_max) {
        t = breakpoint;
        continue;
      }
      out.absorbed = true;
      break;
    }

    const auto [tau, index] = sample_event(rates, total, gen);
    const double t_next = t + tau;
    if (t_next > t_max && t_max <= breakpoint) break;
    if (t_next > breakpoint) {
      // Memorylessness makes advancing to the boundary and resampling
      // exact for piecewise-constant rates.
      t = breakpoint;
      continue;
    }

    for (std::size_t j = 0; j < state.size(); ++j) {
      state[j] += (*delta_of[index])[j];
      if (state[j] < 0)
        throw Error("reaction '" + network.reaction(recorded_of[index]).label +
                    "' drove a species count negative; its propensity must vanish first");
    }
    t = t_next;
    ++transitions;
    out.observations.back().reaction = recorded_of[index];
    out.observations.push_back(Observation{t, state, config.schedule.at(t), std::nullopt});
  }

  return out;
}

std::vector<SimulationResult> simulate_batch(const ReactionNetwork& network,
                                             const EquivalenceClasses& classes,
                                             const PropensityModel& model,
                                             const std::vector<SimulationConfig>& configs,
                                             std::size_t workers) {
  std::vector<SimulationResult> out(configs.size());
  if (configs.empty()) return out;

  if (workers == 0) workers = std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, configs.size()));

  std::atomic<std::size_t> cursor{0};
  auto run = [&] {
    for (std::size_t i; (i = cursor.fetch_add(1)) < configs.size();) {
      try {
        out[i].trajectory = simulate(network, classes, model, configs[i]);
        out[i].ok = true;
      } catch (const std::exception& e) {
        out[i].ok = false;
        out[i].error = e.what();
      }
    }
  };

  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace nctmc
