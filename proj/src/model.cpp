#include "stepbayes/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "stepbayes/errors.hpp"

namespace stepbayes {

namespace {

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> levels)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
  if (levels_.size() != breakpoints_.size() + 1)
    throw std::invalid_argument("step function needs one more level than breakpoints");
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double u = breakpoints_[i];
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("breakpoint outside (0,1)");
    if (i > 0 && !(breakpoints_[i - 1] < u))
      throw std::invalid_argument("breakpoints must be strictly increasing");
  }
  for (double w : levels_)
    if (!is_probability(w)) throw std::invalid_argument("level outside [0,1]");
  cumulative_.resize(levels_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    cumulative_[i] = acc;
    acc += levels_[i] * (cell_end(i) - cell_begin(i));
  }
}

StepFunction StepFunction::constant(double level) { return StepFunction({}, {level}); }

StepFunction StepFunction::two_level(double left, double right, double at) {
  return StepFunction({at}, {left, right});
}

std::size_t StepFunction::cell_of(double x) const noexcept {
  return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
                                  breakpoints_.begin());
}

double StepFunction::primitive(double x) const noexcept {
  const std::size_t i = cell_of(x);
  return cumulative_[i] + levels_[i] * (x - cell_begin(i));
}

double StepFunction::integral(double a, double b) const noexcept {
  const std::size_t i = cell_of(a);
  if (b <= cell_end(i)) return levels_[i] * (b - a);
  return primitive(b) - primitive(a);
}

GridFunction::GridFunction(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("grid function needs at least two nodes");
  for (double v : values_)
    if (!is_probability(v)) throw std::invalid_argument("grid value outside [0,1]");
  const double h = 1.0 / static_cast<double>(intervals());
  cumulative_.resize(values_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i)
    cumulative_[i] = cumulative_[i - 1] + 0.5 * h * (values_[i - 1] + values_[i]);
}

double GridFunction::operator()(double x) const noexcept {
  const double K = static_cast<double>(intervals());
  const double t = std::clamp(x, 0.0, 1.0) * K;
  const std::size_t i = std::min(static_cast<std::size_t>(t), intervals() - 1);
  const double s = t - static_cast<double>(i);
  return values_[i] + s * (values_[i + 1] - values_[i]);
}

double GridFunction::primitive(double x) const noexcept {
  const double K = static_cast<double>(intervals());
  const double t = std::clamp(x, 0.0, 1.0) * K;
  const std::size_t i = std::min(static_cast<std::size_t>(t), intervals() - 1);
  const double s = t - static_cast<double>(i);
  return cumulative_[i] + (values_[i] * s + 0.5 * (values_[i + 1] - values_[i]) * s * s) / K;
}

double GridFunction::integral(double a, double b) const noexcept {
  return primitive(b) - primitive(a);
}

double evaluate(const RegressionFunction& f, double x) {
  return std::visit([x](const auto& g) { return g(x); }, f);
}

double integrate(const RegressionFunction& f, double a, double b) {
  return std::visit([a, b](const auto& g) { return g.integral(a, b); }, f);
}

std::vector<double> knots(const RegressionFunction& f) {
  std::vector<double> k{0.0};
  if (const auto* s = std::get_if<StepFunction>(&f)) {
    k.insert(k.end(), s->breakpoints().begin(), s->breakpoints().end());
  } else {
    const auto& g = std::get<GridFunction>(f);
    for (std::size_t i = 1; i < g.intervals(); ++i) k.push_back(g.node(i));
  }
  k.push_back(1.0);
  return k;
}

namespace {

// Values of f just inside the ends of [a, b], on which f is linear.
std::pair<double, double> inner_values(const RegressionFunction& f, double a, double b) {
  if (const auto* s = std::get_if<StepFunction>(&f)) {
    const double w = (*s)(0.5 * (a + b));
    return {w, w};
  }
  const auto& g = std::get<GridFunction>(f);
  return {g(a), g(b)};
}

std::vector<double> merged_knots(const RegressionFunction& f, const RegressionFunction& g) {
  auto a = knots(f);
  auto b = knots(g);
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <class SegmentIntegral>
double integrate_difference(const RegressionFunction& f, const RegressionFunction& g,
                            SegmentIntegral segment) {
  const auto k = merged_knots(f, g);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    const double a = k[i], b = k[i + 1];
    if (!(b > a)) continue;
    const auto [f0, f1] = inner_values(f, a, b);
    const auto [g0, g1] = inner_values(g, a, b);
    total += segment(b - a, f0 - g0, f1 - g1);
  }
  return total;
}

}  // namespace

double l1_distance(const RegressionFunction& f, const RegressionFunction& g) {
  return integrate_difference(f, g, [](double len, double d0, double d1) {
    if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0))
      return 0.5 * len * (std::abs(d0) + std::abs(d1));
    return 0.5 * len * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
  });
}

double l2_squared_distance(const RegressionFunction& f, const RegressionFunction& g) {
  return integrate_difference(f, g, [](double len, double d0, double d1) {
    return len * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
  });
}

DataSet::DataSet(std::vector<Observation> points) : points_(std::move(points)) {
  const std::size_t n = points_.size();
  for (const auto& p : points_)
    if (!(p.x >= 0.0 && p.x <= 1.0)) throw std::invalid_argument("covariate outside [0,1]");
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(),
            [this](std::size_t a, std::size_t b) { return points_[a].x < points_[b].x; });
  sorted_x_.resize(n);
  success_prefix_.assign(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = points_[order_[k]];
    sorted_x_[k] = p.x;
    if (k > 0 && sorted_x_[k - 1] == p.x)
      throw DuplicateCovariateError("duplicate covariate " + std::to_string(p.x));
    success_prefix_[k + 1] = success_prefix_[k] + (p.y ? 1 : 0);
  }
}

std::size_t DataSet::rank_of_split(double split) const {
  const auto it = std::lower_bound(sorted_x_.begin(), sorted_x_.end(), split);
  if (it != sorted_x_.end() && *it == split)
    throw SplitCoincidenceError("split point coincides with a covariate");
  return static_cast<std::size_t>(it - sorted_x_.begin());
}

DataSet DataSet::with(Observation extra) const {
  auto pts = points_;
  pts.push_back(extra);
  return DataSet(std::move(pts));
}

DataSet DataSet::prefix(std::size_t k) const {
  k = std::min(k, points_.size());
  return DataSet(std::vector<Observation>(points_.begin(), points_.begin() + k));
}

DataSet sample_dataset(const RegressionFunction& f, std::size_t n, Rng& rng) {
  std::vector<Observation> pts;
  pts.reserve(n);
  std::unordered_set<double> seen;
  seen.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = uniform_unit(rng);
    while (!seen.insert(x).second) x = uniform_unit(rng);
    const double v = uniform_unit(rng);
    pts.push_back({x, v < evaluate(f, x)});
  }
  return DataSet(std::move(pts));
}

DataSet sample_dataset(const RegressionFunction& f, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_dataset(f, n, rng);
}

std::size_t poisson_count(double mean, std::uint64_t seed) {
  if (mean < 0.0) throw std::invalid_argument("negative Poisson mean");
  Rng rng(seed);
  return poisson_draw(rng, mean);
}

std::vector<double> sorted_splits(std::span<const double> u) {
  std::vector<double> s(u.begin(), u.end());
  for (double v : s)
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("split point outside (0,1)");
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<std::size_t> split_ranks(const DataSet& data, std::span<const double> sorted_u) {
  std::vector<std::size_t> r(sorted_u.size());
  for (std::size_t j = 0; j < sorted_u.size(); ++j) r[j] = data.rank_of_split(sorted_u[j]);
  return r;
}

CellCounts cell_counts(const DataSet& data, std::span<const double> u) {
  const auto s = sorted_splits(u);
  const auto r = split_ranks(data, s);
  CellCounts out;
  out.reserve(r.size() + 1);
  std::size_t lo = 0;
  for (std::size_t hi : r) {
    out.push_back(data.counts(lo, hi));
    lo = hi;
  }
  out.push_back(data.counts(lo, data.size()));
  return out;
}

StepFunction average_onto(const RegressionFunction& f, std::span<const double> u) {
  auto s = sorted_splits(u);
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<double> levels(s.size() + 1);
  const auto* step = std::get_if<StepFunction>(&f);
  for (std::size_t i = 0; i <= s.size(); ++i) {
    const double a = i == 0 ? 0.0 : s[i - 1];
    const double b = i == s.size() ? 1.0 : s[i];
    if (step) {
      const std::size_t c = step->cell_of(a);
      if (b <= step->cell_end(c)) {
        levels[i] = step->levels()[c];
        continue;
      }
    }
    levels[i] = std::clamp(integrate(f, a, b) / (b - a), 0.0, 1.0);
  }
  return StepFunction(std::move(s), std::move(levels));
}

DataSet thin_dataset(const DataSet& data, double rho0, double rho1, std::uint64_t seed) {
  if (!is_probability(rho0) || !is_probability(rho1))
    throw std::invalid_argument("removal probability outside [0,1]");
  Rng rng(seed);
  std::vector<Observation> kept;
  kept.reserve(data.size());
  for (const auto& p : data.points()) {
    const double v = uniform_unit(rng);
    if (v >= (p.y ? rho1 : rho0)) kept.push_back(p);
  }
  return DataSet(std::move(kept));
}

}  // namespace stepbayes
