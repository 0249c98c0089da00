#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "stepbayes/random.hpp"

namespace stepbayes {

/// Piecewise-constant regression function on [0,1].
///
/// Cells are left-closed and right-open, [u_j, u_{j+1}), with u_0 = 0 and
/// u_{m+1} = 1; the last cell also contains 1.
class StepFunction {
 public:
  StepFunction(std::vector<double> breakpoints, std::vector<double> levels);

  static StepFunction constant(double level);
  static StepFunction two_level(double left, double right, double at);

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> levels() const noexcept { return levels_; }
  std::size_t cells() const noexcept { return levels_.size(); }
  double cell_begin(std::size_t i) const noexcept { return i == 0 ? 0.0 : breakpoints_[i - 1]; }
  double cell_end(std::size_t i) const noexcept {
    return i + 1 == levels_.size() ? 1.0 : breakpoints_[i];
  }
  std::size_t cell_of(double x) const noexcept;

  double operator()(double x) const noexcept { return levels_[cell_of(x)]; }

  /// Exact integral over [a, b] with 0 <= a <= b <= 1.
  double integral(double a, double b) const noexcept;

 private:
  double primitive(double x) const noexcept;

  std::vector<double> breakpoints_;
  std::vector<double> levels_;
  std::vector<double> cumulative_;  // integral from 0 to the start of each cell
};

/// Piecewise-linear interpolant of values at K+1 equispaced nodes on [0,1].
class GridFunction {
 public:
  explicit GridFunction(std::vector<double> values);

  template <class F>
  static GridFunction sample(F&& f, std::size_t intervals) {
    std::vector<double> v(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
      v[i] = f(static_cast<double>(i) / static_cast<double>(intervals));
    return GridFunction(std::move(v));
  }

  std::size_t intervals() const noexcept { return values_.size() - 1; }
  std::span<const double> values() const noexcept { return values_; }
  double node(std::size_t i) const noexcept {
    return static_cast<double>(i) / static_cast<double>(intervals());
  }

  double operator()(double x) const noexcept;

  /// Exact integral of the interpolant over [a, b].
  double integral(double a, double b) const noexcept;

 private:
  double primitive(double x) const noexcept;

  std::vector<double> values_;
  std::vector<double> cumulative_;  // integral from 0 to node i
};

using RegressionFunction = std::variant<StepFunction, GridFunction>;

double evaluate(const RegressionFunction& f, double x);
double integrate(const RegressionFunction& f, double a, double b);

/// Sorted points of [0,1] (including both ends) between which f is linear.
std::vector<double> knots(const RegressionFunction& f);

struct Observation {
  double x = 0.0;
  bool y = false;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct CellCount {
  std::size_t successes = 0;
  std::size_t failures = 0;

  std::size_t total() const noexcept { return successes + failures; }
  friend auto operator<=>(const CellCount&, const CellCount&) = default;
};

using CellCounts = std::vector<CellCount>;

/// Binary-response sample with covariates in [0,1].
///
/// Keeps the points in their original order alongside a covariate-sorted
/// view and prefix counts of successes, so counts over any covariate range
/// cost two array lookups. Covariates must be pairwise distinct.
class DataSet {
 public:
  DataSet() = default;
  explicit DataSet(std::vector<Observation> points);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  std::span<const Observation> points() const noexcept { return points_; }
  std::span<const std::size_t> sort_index() const noexcept { return order_; }
  std::span<const double> sorted_x() const noexcept { return sorted_x_; }
  std::span<const std::size_t> success_prefix() const noexcept { return success_prefix_; }
  bool sorted_y(std::size_t k) const noexcept {
    return success_prefix_[k + 1] != success_prefix_[k];
  }

  /// Counts over the sorted positions [lo, hi).
  CellCount counts(std::size_t lo, std::size_t hi) const noexcept {
    const std::size_t s = success_prefix_[hi] - success_prefix_[lo];
    return {s, hi - lo - s};
  }
  std::size_t total_successes() const noexcept { return success_prefix_.back(); }
  std::size_t total_failures() const noexcept { return size() - total_successes(); }

  /// Number of covariates strictly below `split`; throws SplitCoincidenceError
  /// when `split` equals a covariate.
  std::size_t rank_of_split(double split) const;

  DataSet with(Observation extra) const;
  /// The first k points in original order.
  DataSet prefix(std::size_t k) const;

 private:
  std::vector<Observation> points_;
  std::vector<std::size_t> order_;
  std::vector<double> sorted_x_;
  std::vector<std::size_t> success_prefix_{0};
};

DataSet sample_dataset(const RegressionFunction& f, std::size_t n, Rng& rng);
DataSet sample_dataset(const RegressionFunction& f, std::size_t n, std::uint64_t seed);

std::size_t poisson_count(double mean, std::uint64_t seed);

/// Sorted copy of a split vector; throws unless every split lies in (0,1).
std::vector<double> sorted_splits(std::span<const double> u);

/// Data ranks of sorted split points (see DataSet::rank_of_split).
std::vector<std::size_t> split_ranks(const DataSet& data, std::span<const double> sorted_u);

/// Success/failure counts per cell of the partition induced by `u`
/// (unordered). One entry per cell, left to right.
CellCounts cell_counts(const DataSet& data, std::span<const double> u);

/// The step function whose level on each cell of `u` is the mean of f there.
StepFunction average_onto(const RegressionFunction& f, std::span<const double> u);

double l1_distance(const RegressionFunction& f, const RegressionFunction& g);
double l2_squared_distance(const RegressionFunction& f, const RegressionFunction& g);

/// Removes each failure with probability rho0 and each success with
/// probability rho1, independently.
DataSet thin_dataset(const DataSet& data, double rho0, double rho1, std::uint64_t seed);

}  // namespace stepbayes
