#pragma once

#include <span>

#include "nctmc/core/network.hpp"
#include "nctmc/core/propensity.hpp"
#include "nctmc/core/trajectory.hpp"
#include "nctmc/likelihood/grouped.hpp"

namespace nctmc {

// Exact negative log-likelihood of fully observed CTMC paths:
//
//   NLL = sum_i T_i * sum_k alpha_k(x_i)  -  sum_i log alpha_{k_i}(x_i)
//
// where i runs over holding intervals, k over equivalence classes, T_i is
// the sojourn and k_i the observed exit class. Reaction-level models are
// pooled to class level through `classes`. Sums are compensated, so the
// grouped and sequential evaluations agree to near machine precision.

// Evaluates class by class over pre-grouped design matrices.
double nll(const PropensityModel& model, const GroupedDataset& data,
           const EquivalenceClasses& classes);

// Groups, then evaluates.
double nll(const PropensityModel& model, std::span<const Trajectory> trajectories,
           const EquivalenceClasses& classes);

// Reference evaluation sweeping one trajectory record by record.
double nll_sequential(const PropensityModel& model, const Trajectory& trajectory,
                      const EquivalenceClasses& classes);

// Same loss evaluated from deduplicated sufficient statistics:
//   sum_x W_x * sum_k alpha_k(x) - sum_{x,k} N_{x,k} * log alpha_k(x).
double nll_compressed(const PropensityModel& model, const SufficientStats& stats,
                      const EquivalenceClasses& classes);

}  // namespace nctmc
