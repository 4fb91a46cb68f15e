#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nctmc/core/network.hpp"
#include "nctmc/core/propensity.hpp"
#include "nctmc/core/trajectory.hpp"

namespace nctmc {

// Every distinct (state, covariates) pair a transition departs from, with
// its visit count. Total visits equal the number of transitions.
struct InventoryRow {
  State state;
  Covariates covariates;
  std::uint64_t visits = 0;
};

struct StateInventory {
  std::vector<InventoryRow> rows;  // ordered by (state, covariates)
  std::uint64_t total_visits = 0;
};

StateInventory build_inventory(std::span<const Trajectory> trajectories);

// Pools visits over states: one row per distinct covariate vector, carrying
// `representative_state`. Useful when rates depend on the covariate alone,
// so per-bin estimators average over covariate values rather than states.
StateInventory pool_by_covariates(const StateInventory& inventory, State representative_state);

// Rate-recovery errors of a candidate model against a reference over the
// inventory. Row errors average over the r equivalence classes:
//   e_x  = (1/r) * sum_k |candidate_k(x) - reference_k(x)|
//   e2_x = (1/r) * sum_k (candidate_k(x) - reference_k(x))^2
// MAE/MSE average e_x/e2_x over rows where the candidate is defined; the
// W- forms weight each row by visits/total_visits, keeping the total-visit
// denominator even when rows are undefined so low coverage is penalized
// rather than hidden.
struct ErrorReport {
  std::size_t class_count = 0;
  std::size_t rows_total = 0;
  std::size_t rows_defined = 0;
  std::uint64_t visits_total = 0;
  std::uint64_t visits_defined = 0;
  double mae = 0.0;
  double wmae = 0.0;
  double mse = 0.0;
  double wmse = 0.0;
  std::vector<double> class_mae;   // per class, over defined rows
  std::vector<double> class_wmae;  // per class, visit-weighted
  std::vector<double> class_mse;
  std::vector<double> class_wmse;

  double coverage() const {
    return rows_total ? static_cast<double>(rows_defined) / static_cast<double>(rows_total) : 0.0;
  }
  double visit_coverage() const {
    return visits_total ? static_cast<double>(visits_defined) / static_cast<double>(visits_total)
                        : 0.0;
  }
};

// The reference must be defined on every inventory row; undefined candidate
// rows only reduce coverage. Reaction-level models are pooled to class level
// through `classes`.
ErrorReport compare_models(const PropensityModel& reference, const PropensityModel& candidate,
                           const StateInventory& inventory, const EquivalenceClasses& classes);

void write_error_report_json(std::ostream& out, const ErrorReport& report);

// Columns: class,true_rate,pred_rate,weight — one row per defined inventory
// row and class, weight = visits / total_visits.
void export_scatter(std::ostream& out, const PropensityModel& reference,
                    const PropensityModel& candidate, const StateInventory& inventory,
                    const EquivalenceClasses& classes);

}  // namespace nctmc
