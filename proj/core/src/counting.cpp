#include "nctmc/estimators/counting.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "nctmc/errors.hpp"

namespace nctmc {

CovariateBinning CovariateBinning::discrete(std::vector<double> values) {
  if (values.empty()) throw ConfigError("discrete binning needs at least one value");
  CovariateBinning b;
  b.kind = Kind::Discrete;
  b.values = std::move(values);
  return b;
}

CovariateBinning CovariateBinning::equal_width(double lo, double hi, std::size_t bins) {
  if (!(hi > lo) || bins == 0) throw ConfigError("equal-width binning needs hi > lo and bins > 0");
  CovariateBinning b;
  b.kind = Kind::EqualWidth;
  b.lo = lo;
  b.hi = hi;
  b.bins = bins;
  return b;
}

std::optional<std::size_t> CovariateBinning::bin_of(double v) const {
  if (kind == Kind::Discrete) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (std::abs(v - values[i]) <= 1e-9) return i;
    return std::nullopt;
  }
  if (v < lo || v >= hi) return std::nullopt;
  const double width = (hi - lo) / static_cast<double>(bins);
  auto idx = static_cast<std::size_t>((v - lo) / width);
  return std::min(idx, bins - 1);
}

std::size_t CovariateBinning::bin_count() const {
  return kind == Kind::Discrete ? values.size() : bins;
}

double CovariateBinning::representative(std::size_t bin) const {
  if (kind == Kind::Discrete) return values.at(bin);
  const double width = (hi - lo) / static_cast<double>(bins);
  return lo + (static_cast<double>(bin) + 0.5) * width;
}

CountingMle::CountingMle(CountingConfig config, std::size_t state_width, std::size_t class_count)
    : config_(std::move(config)), state_width_(state_width), class_count_(class_count) {
  if (class_count_ == 0) throw ConfigError("counting estimator needs at least one class");
}

void CountingMle::accumulate(const State& state, const Covariates& covariates, double sojourn,
                             std::size_t class_index) {
  if (state.size() != state_width_) throw ShapeMismatch("state width mismatch");
  if (covariates.size() != config_.binning.size())
    throw ShapeMismatch("covariate width does not match the binning");
  if (class_index >= class_count_) throw ShapeMismatch("class index out of range");
  if (!(sojourn > 0.0)) throw Error("non-positive holding time");

  Key key;
  key.first.reserve(config_.binning.size());
  for (std::size_t d = 0; d < config_.binning.size(); ++d) {
    const auto bin = config_.binning[d].bin_of(covariates[d]);
    if (!bin) {
      std::ostringstream os;
      os << "covariate " << d << " value " << covariates[d] << " falls outside every bin";
      throw UnbinnableCovariate(os.str());
    }
    key.first.push_back(*bin);
  }
  if (config_.state_key == StateKey::FullState) key.second = state;

  auto [it, inserted] = index_.try_emplace(key, cells_.size());
  if (inserted) {
    Cell cell;
    cell.bins = key.first;
    cell.state = key.second;
    cell.counts.assign(class_count_, 0.0);
    cells_.push_back(std::move(cell));
  }
  Cell& cell = cells_[it->second];
  cell.wait += sojourn;
  cell.counts[class_index] += 1.0;
}

bool CountingMle::try_rates(const State& state, const Covariates& covariates,
                            std::span<double> out) const {
  if (state.size() != state_width_) throw ShapeMismatch("state width mismatch");
  if (covariates.size() != config_.binning.size())
    throw ShapeMismatch("covariate width does not match the binning");
  if (out.size() != class_count_) throw ShapeMismatch("output span size mismatch");

  Key key;
  key.first.reserve(config_.binning.size());
  for (std::size_t d = 0; d < config_.binning.size(); ++d) {
    const auto bin = config_.binning[d].bin_of(covariates[d]);
    if (!bin) return false;
    key.first.push_back(*bin);
  }
  if (config_.state_key == StateKey::FullState) key.second = state;

  const auto it = index_.find(key);
  if (it == index_.end()) return false;
  const Cell& cell = cells_[it->second];
  for (std::size_t k = 0; k < class_count_; ++k) out[k] = cell.counts[k] / cell.wait;
  return true;
}

void CountingMle::write_csv(std::ostream& out) const {
  out << "bin,state,class,N,W,rate\n";
  out.precision(17);
  for (const auto& [key, idx] : index_) {
    const Cell& cell = cells_[idx];
    std::ostringstream bin_label;
    for (std::size_t d = 0; d < cell.bins.size(); ++d) {
      if (d) bin_label << ';';
      bin_label << config_.binning[d].representative(cell.bins[d]);
    }
    std::ostringstream state_label;
    for (std::size_t j = 0; j < cell.state.size(); ++j) {
      if (j) state_label << ';';
      state_label << cell.state[j];
    }
    for (std::size_t k = 0; k < class_count_; ++k) {
      out << bin_label.str() << ',' << state_label.str() << ',' << k << ','
          << cell.counts[k] << ',' << cell.wait << ',' << cell.counts[k] / cell.wait << '\n';
    }
  }
}

CountingMle fit_counting_mle(std::span<const Trajectory> trajectories,
                             const EquivalenceClasses& classes, CountingConfig config) {
  std::size_t state_width = 0;
  for (const Trajectory& trajectory : trajectories)
    if (!trajectory.observations.empty()) {
      state_width = trajectory.observations.front().state.size();
      break;
    }
  CountingMle mle(std::move(config), state_width, classes.class_count());
  for (const Trajectory& trajectory : trajectories) {
    const auto& obs = trajectory.observations;
    for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
      if (!obs[i].reaction) throw Error("transition without a recorded reaction");
      mle.accumulate(obs[i].state, obs[i].covariates, obs[i + 1].time - obs[i].time,
                     classes.class_of(*obs[i].reaction));
    }
  }
  return mle;
}

}  // namespace nctmc
