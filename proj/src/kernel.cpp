#include "stepbayes/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace stepbayes {

namespace {

constexpr std::size_t kTableSize = std::size_t{1} << 20;

const std::vector<double>& factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kTableSize);
    for (std::size_t k = 0; k < kTableSize; ++k) t[k] = std::lgamma(static_cast<double>(k) + 1.0);
    return t;
  }();
  return table;
}

}  // namespace

double log_sum_exp(std::span<const double> values) noexcept {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : values) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : values) s += std::exp(v - mx);
  return mx + std::log(s);
}

double log_factorial(std::size_t k) noexcept {
  if (k < kTableSize) return factorial_table()[k];
  return std::lgamma(static_cast<double>(k) + 1.0);
}

double log_beta(std::size_t successes, std::size_t failures) noexcept {
  if (successes + failures == 0) return 0.0;
  return log_factorial(successes) + log_factorial(failures) -
         log_factorial(successes + failures + 1);
}

LogWeight log_Z_u(const CellCounts& counts) noexcept {
  double s = 0.0;
  for (const auto& c : counts) s += log_beta(c);
  return LogWeight::from_log(s);
}

LogWeight log_Z_u(const DataSet& data, std::span<const double> u) {
  return log_Z_u(cell_counts(data, u));
}

std::vector<double> HeightPosterior::means() const {
  std::vector<double> m(cells());
  for (std::size_t i = 0; i < cells(); ++i) m[i] = mean(i);
  return m;
}

HeightPosterior height_posterior(const DataSet& data, std::span<const double> u) {
  return HeightPosterior(cell_counts(data, u));
}

std::vector<double> sample_heights(const HeightPosterior& hp, Rng& rng) {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  std::vector<double> w(hp.cells());
  for (std::size_t i = 0; i < hp.cells(); ++i) {
    const auto& c = hp.counts()[i];
    std::gamma_distribution<double> ga(static_cast<double>(c.successes) + 1.0);
    std::gamma_distribution<double> gb(static_cast<double>(c.failures) + 1.0);
    const double a = ga(rng);
    const double b = gb(rng);
    w[i] = std::clamp(a / (a + b), lo, hi);
  }
  return w;
}

std::vector<double> sample_heights(const HeightPosterior& hp, std::uint64_t seed) {
  Rng rng(seed);
  return sample_heights(hp, rng);
}

}  // namespace stepbayes
