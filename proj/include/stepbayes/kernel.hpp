#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stepbayes/log_weight.hpp"
#include "stepbayes/model.hpp"

namespace stepbayes {

/// log k! for integer k; table lookup below 2^20, log-gamma above.
double log_factorial(std::size_t k) noexcept;

/// log B(s, f) with B(s, f) = 1 / ((s + f + 1) * C(s + f, s)), the integral
/// of w^s (1 - w)^f over [0,1].
double log_beta(std::size_t successes, std::size_t failures) noexcept;
inline double log_beta(const CellCount& c) noexcept { return log_beta(c.successes, c.failures); }

/// Log predictive probability of the responses for a fixed split vector:
/// the sum of log_beta over the cells of u.
LogWeight log_Z_u(const DataSet& data, std::span<const double> u);
LogWeight log_Z_u(const CellCounts& counts) noexcept;

/// Independent per-cell posteriors of the step heights, density
/// proportional to w^s (1 - w)^f under a uniform prior.
class HeightPosterior {
 public:
  explicit HeightPosterior(CellCounts counts) : counts_(std::move(counts)) {}

  std::size_t cells() const noexcept { return counts_.size(); }
  const CellCounts& counts() const noexcept { return counts_; }
  double mean(std::size_t cell) const noexcept {
    const auto& c = counts_[cell];
    return (static_cast<double>(c.successes) + 1.0) / (static_cast<double>(c.total()) + 2.0);
  }
  std::vector<double> means() const;

 private:
  CellCounts counts_;
};

HeightPosterior height_posterior(const DataSet& data, std::span<const double> u);

/// One joint draw of the heights, strictly inside (0,1).
std::vector<double> sample_heights(const HeightPosterior& hp, Rng& rng);
std::vector<double> sample_heights(const HeightPosterior& hp, std::uint64_t seed);

}  // namespace stepbayes
