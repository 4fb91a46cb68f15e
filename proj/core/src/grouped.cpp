#include "nctmc/likelihood/grouped.hpp"

#include <map>

#include "nctmc/errors.hpp"

namespace nctmc {

namespace {

struct PackedTransition {
  std::vector<double> row;
  double sojourn = 0.0;
  std::size_t class_index = 0;
};

// Flattens trajectories into (row, sojourn, class) triples, validating that
// every non-final record carries a reaction.
template <typename Fn>
void for_each_transition(std::span<const Trajectory> trajectories,
                         const EquivalenceClasses& classes, Fn&& fn) {
  std::vector<double> row;
  for (const Trajectory& trajectory : trajectories) {
    const auto& obs = trajectory.observations;
    for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
      if (!obs[i].reaction)
        throw Error("transition without a recorded reaction");
      const double sojourn = obs[i + 1].time - obs[i].time;
      if (!(sojourn > 0.0)) throw Error("non-positive holding time");
      row.resize(obs[i].state.size() + obs[i].covariates.size());
      pack_observation(obs[i], row);
      fn(row, sojourn, classes.class_of(*obs[i].reaction));
    }
  }
}

}  // namespace

void pack_observation(const Observation& obs, std::span<double> out) {
  if (out.size() != obs.state.size() + obs.covariates.size())
    throw ShapeMismatch("packed row width mismatch");
  std::size_t j = 0;
  for (auto c : obs.state) out[j++] = static_cast<double>(c);
  for (double v : obs.covariates) out[j++] = v;
}

std::size_t GroupedDataset::transition_count() const {
  std::size_t total = 0;
  for (const ClassBlock& b : blocks) total += b.sojourns.size();
  return total;
}

GroupedDataset group_transitions(std::span<const Trajectory> trajectories,
                                 const EquivalenceClasses& classes) {
  GroupedDataset out;
  out.blocks.resize(classes.class_count());
  bool have_widths = false;

  // First pass counts rows per class so the design matrices can be sized up
  // front; the second pass fills them.
  std::vector<std::size_t> rows_per_class(classes.class_count(), 0);
  for_each_transition(trajectories, classes,
                      [&](const std::vector<double>& row, double, std::size_t k) {
                        ++rows_per_class[k];
                        (void)row;
                      });
  for (const Trajectory& trajectory : trajectories) {
    if (trajectory.observations.empty()) continue;
    out.state_width = trajectory.observations.front().state.size();
    out.covariate_width = trajectory.observations.front().covariates.size();
    have_widths = true;
    break;
  }
  if (!have_widths) return out;

  for (std::size_t k = 0; k < classes.class_count(); ++k) {
    out.blocks[k].design = nn::Tensor(rows_per_class[k], out.input_width());
    out.blocks[k].sojourns.reserve(rows_per_class[k]);
  }
  std::vector<std::size_t> cursor(classes.class_count(), 0);
  for_each_transition(trajectories, classes,
                      [&](const std::vector<double>& row, double sojourn, std::size_t k) {
                        if (row.size() != out.input_width())
                          throw ShapeMismatch("inconsistent row width across trajectories");
                        ClassBlock& block = out.blocks[k];
                        const std::size_t r = cursor[k]++;
                        for (std::size_t j = 0; j < row.size(); ++j) block.design(r, j) = row[j];
                        block.sojourns.push_back(sojourn);
                      });
  return out;
}

SufficientStats compress(std::span<const Trajectory> trajectories,
                         const EquivalenceClasses& classes) {
  SufficientStats out;
  bool have_widths = false;
  for (const Trajectory& trajectory : trajectories) {
    if (trajectory.observations.empty()) continue;
    out.state_width = trajectory.observations.front().state.size();
    out.covariate_width = trajectory.observations.front().covariates.size();
    have_widths = true;
    break;
  }
  if (!have_widths) {
    out.counts = nn::Tensor(0, classes.class_count());
    return out;
  }

  // Unique rows keyed by exact value; bitwise-equal rows regroup exactly.
  std::map<std::vector<double>, std::size_t> index;
  std::vector<std::vector<double>> unique_rows;
  std::vector<double> waits;
  std::vector<std::vector<double>> counts;

  for_each_transition(trajectories, classes,
                      [&](const std::vector<double>& row, double sojourn, std::size_t k) {
                        if (row.size() != out.input_width())
                          throw ShapeMismatch("inconsistent row width across trajectories");
                        auto [it, inserted] = index.try_emplace(row, unique_rows.size());
                        if (inserted) {
                          unique_rows.push_back(row);
                          waits.push_back(0.0);
                          counts.emplace_back(classes.class_count(), 0.0);
                        }
                        waits[it->second] += sojourn;
                        counts[it->second][k] += 1.0;
                        out.total_wait += sojourn;
                        ++out.transition_count;
                      });

  out.rows = nn::Tensor(unique_rows.size(), out.input_width());
  out.counts = nn::Tensor(unique_rows.size(), classes.class_count());
  out.waits = std::move(waits);
  for (std::size_t r = 0; r < unique_rows.size(); ++r) {
    for (std::size_t j = 0; j < out.input_width(); ++j) out.rows(r, j) = unique_rows[r][j];
    for (std::size_t k = 0; k < classes.class_count(); ++k) out.counts(r, k) = counts[r][k];
  }
  return out;
}

}  // namespace nctmc
