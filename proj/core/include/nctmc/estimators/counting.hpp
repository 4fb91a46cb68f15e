#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "nctmc/core/network.hpp"
#include "nctmc/core/propensity.hpp"
#include "nctmc/core/trajectory.hpp"

namespace nctmc {

// How one covariate dimension is discretized for the counting estimator.
struct CovariateBinning {
  enum class Kind { Discrete, EqualWidth };

  static CovariateBinning discrete(std::vector<double> values);
  static CovariateBinning equal_width(double lo, double hi, std::size_t bins);

  // Bin index for a value; nullopt when it matches no bin. Discrete values
  // match within 1e-9.
  std::optional<std::size_t> bin_of(double v) const;
  std::size_t bin_count() const;
  double representative(std::size_t bin) const;

  Kind kind = Kind::Discrete;
  std::vector<double> values;  // Discrete
  double lo = 0.0;             // EqualWidth, over [lo, hi)
  double hi = 0.0;
  std::size_t bins = 0;
};

// Whether cells are keyed by the full state vector or pooled across states
// (appropriate when rates depend on the covariate only).
enum class StateKey { FullState, IgnoreState };

struct CountingConfig {
  std::vector<CovariateBinning> binning;  // one per covariate dimension
  StateKey state_key = StateKey::FullState;
};

// Classical occupation-time estimator: within each visited cell a, the rate
// of class k is N_{a,k} / W_a — exits through k per unit of time spent in a.
// Cells never visited have no estimate; try_rates reports them as undefined.
class CountingMle final : public PropensityModel {
 public:
  struct Cell {
    std::vector<std::size_t> bins;  // per covariate dimension
    State state;                    // empty under StateKey::IgnoreState
    double wait = 0.0;
    std::vector<double> counts;     // per class
  };

  CountingMle(CountingConfig config, std::size_t state_width, std::size_t class_count);

  Level level() const override { return Level::Class; }
  std::size_t output_count() const override { return class_count_; }
  bool try_rates(const State& state, const Covariates& covariates,
                 std::span<double> out) const override;

  // Accumulates one holding interval; throws UnbinnableCovariate when a
  // covariate value falls outside every bin.
  void accumulate(const State& state, const Covariates& covariates, double sojourn,
                  std::size_t class_index);

  std::size_t cell_count() const { return cells_.size(); }
  const Cell& cell(std::size_t i) const { return cells_[i]; }

  // Columns: bin,state,class,N,W,rate — one row per cell and class, cells in
  // key order, multi-part fields joined with ';'.
  void write_csv(std::ostream& out) const;

 private:
  using Key = std::pair<std::vector<std::size_t>, State>;

  CountingConfig config_;
  std::size_t state_width_;
  std::size_t class_count_;
  std::map<Key, std::size_t> index_;
  std::vector<Cell> cells_;
};

// Fits the estimator over every holding interval of the trajectories.
CountingMle fit_counting_mle(std::span<const Trajectory> trajectories,
                             const EquivalenceClasses& classes, CountingConfig config);

}  // namespace nctmc
