#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nctmc/core/network.hpp"
#include "nctmc/core/trajectory.hpp"
#include "nctmc/nn/tensor.hpp"

namespace nctmc {

// Every observed holding interval becomes one packed row
// [state counts..., covariates...] with its sojourn time. The final record
// of a trajectory has no following transition and is dropped.

// Rows that exited through one equivalence class, in encounter order.
struct ClassBlock {
  nn::Tensor design;             // L_k x (state_width + covariate_width)
  std::vector<double> sojourns;  // L_k holding times
};

struct GroupedDataset {
  std::size_t state_width = 0;
  std::size_t covariate_width = 0;
  std::vector<ClassBlock> blocks;  // one per equivalence class

  std::size_t input_width() const { return state_width + covariate_width; }
  std::size_t transition_count() const;
};

// Partitions all transitions by exit class. Transitions must carry a
// recorded reaction; reaction indices are collapsed through `classes`.
GroupedDataset group_transitions(std::span<const Trajectory> trajectories,
                                 const EquivalenceClasses& classes);

// Deduplicated training view: the log-likelihood depends on the data only
// through, per distinct packed row x, the total waiting time W_x and the
// per-class exit counts N_{x,k}. Regrouping is algebraically exact, so
// training on these statistics minimizes the same loss at a fraction of the
// cost when rows repeat.
struct SufficientStats {
  std::size_t state_width = 0;
  std::size_t covariate_width = 0;
  nn::Tensor rows;              // U x (state_width + covariate_width), unique
  std::vector<double> waits;    // W_x per row
  nn::Tensor counts;            // U x class_count exit counts
  std::size_t transition_count = 0;
  double total_wait = 0.0;

  std::size_t input_width() const { return state_width + covariate_width; }
  std::size_t row_count() const { return rows.rows; }
};

SufficientStats compress(std::span<const Trajectory> trajectories,
                         const EquivalenceClasses& classes);

// Packs one observation into `out` (state counts first, then covariates).
void pack_observation(const Observation& obs, std::span<double> out);

}  // namespace nctmc
