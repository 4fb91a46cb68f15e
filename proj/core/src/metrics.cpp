#include "nctmc/metrics/metrics.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <utility>

#include "json.hpp"
#include "nctmc/errors.hpp"

namespace nctmc {

StateInventory build_inventory(std::span<const Trajectory> trajectories) {
  std::map<std::pair<State, Covariates>, std::uint64_t> visits;
  for (const Trajectory& trajectory : trajectories) {
    const auto& obs = trajectory.observations;
    for (std::size_t i = 0; i + 1 < obs.size(); ++i)
      ++visits[{obs[i].state, obs[i].covariates}];
  }

  StateInventory inventory;
  inventory.rows.reserve(visits.size());
  for (const auto& [key, count] : visits) {
    inventory.rows.push_back(InventoryRow{key.first, key.second, count});
    inventory.total_visits += count;
  }
  return inventory;
}

StateInventory pool_by_covariates(const StateInventory& inventory, State representative_state) {
  std::map<Covariates, std::uint64_t> visits;
  for (const InventoryRow& row : inventory.rows) visits[row.covariates] += row.visits;

  StateInventory pooled;
  pooled.rows.reserve(visits.size());
  for (const auto& [covariates, count] : visits) {
    pooled.rows.push_back(InventoryRow{representative_state, covariates, count});
    pooled.total_visits += count;
  }
  return pooled;
}

ErrorReport compare_models(const PropensityModel& reference, const PropensityModel& candidate,
                           const StateInventory& inventory, const EquivalenceClasses& classes) {
  const std::size_t r = classes.class_count();
  ErrorReport report;
  report.class_count = r;
  report.rows_total = inventory.rows.size();
  report.visits_total = inventory.total_visits;
  report.class_mae.assign(r, 0.0);
  report.class_wmae.assign(r, 0.0);
  report.class_mse.assign(r, 0.0);
  report.class_wmse.assign(r, 0.0);

  std::vector<double> ref(r), cand(r);
  for (const InventoryRow& row : inventory.rows) {
    if (!try_class_rates(reference, classes, row.state, row.covariates, ref))
      throw Error("reference model undefined on an inventory row");
    if (!try_class_rates(candidate, classes, row.state, row.covariates, cand)) continue;
    ++report.rows_defined;
    report.visits_defined += row.visits;
    const double weight = inventory.total_visits
                              ? static_cast<double>(row.visits) /
                                    static_cast<double>(inventory.total_visits)
                              : 0.0;
    double abs_err = 0.0;
    double sq_err = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const double gap = std::abs(cand[k] - ref[k]);
      abs_err += gap;
      sq_err += gap * gap;
      report.class_mae[k] += gap;
      report.class_wmae[k] += weight * gap;
      report.class_mse[k] += gap * gap;
      report.class_wmse[k] += weight * gap * gap;
    }
    abs_err /= static_cast<double>(r);
    sq_err /= static_cast<double>(r);
    report.mae += abs_err;
    report.wmae += weight * abs_err;
    report.mse += sq_err;
    report.wmse += weight * sq_err;
  }
  if (report.rows_defined > 0) {
    const auto defined = static_cast<double>(report.rows_defined);
    report.mae /= defined;
    report.mse /= defined;
    for (double& v : report.class_mae) v /= defined;
    for (double& v : report.class_mse) v /= defined;
  }
  return report;
}

void write_error_report_json(std::ostream& out, const ErrorReport& report) {
  nlohmann::json j;
  j["classes"] = report.class_count;
  j["rows"] = {{"total", report.rows_total}, {"defined", report.rows_defined}};
  j["visits"] = {{"total", report.visits_total}, {"defined", report.visits_defined}};
  j["coverage"] = report.coverage();
  j["visit_coverage"] = report.visit_coverage();
  j["mae"] = report.mae;
  j["wmae"] = report.wmae;
  j["mse"] = report.mse;
  j["wmse"] = report.wmse;
  j["per_class"] = nlohmann::json::array();
  for (std::size_t k = 0; k < report.class_count; ++k)
    j["per_class"].push_back({{"mae", report.class_mae[k]},
                              {"wmae", report.class_wmae[k]},
                              {"mse", report.class_mse[k]},
                              {"wmse", report.class_wmse[k]}});
  out << j.dump(2) << "\n";
}

void export_scatter(std::ostream& out, const PropensityModel& reference,
                    const PropensityModel& candidate, const StateInventory& inventory,
                    const EquivalenceClasses& classes) {
  const std::size_t r = classes.class_count();
  std::vector<double> ref(r), cand(r);
  out << "class,true_rate,pred_rate,weight\n";
  out.precision(17);
  for (const InventoryRow& row : inventory.rows) {
    if (!try_class_rates(reference, classes, row.state, row.covariates, ref))
      throw Error("reference model undefined on an inventory row");
    if (!try_class_rates(candidate, classes, row.state, row.covariates, cand)) continue;
    const double weight = inventory.total_visits
                              ? static_cast<double>(row.visits) /
                                    static_cast<double>(inventory.total_visits)
                              : 0.0;
    for (std::size_t k = 0; k < r; ++k)
      out << k << ',' << ref[k] << ',' << cand[k] << ',' << weight << '\n';
  }
}

}  // namespace nctmc
