#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "stepbayes/log_weight.hpp"
#include "stepbayes/model.hpp"
#include "stepbayes/prior.hpp"

namespace stepbayes {

/// Spacings of the sorted covariates together with the sorted responses.
///
/// gaps[0] = x_(1), gaps[i] = x_(i+1) - x_(i), gaps[n] = 1 - x_(n). The
/// predictive probabilities depend on the data only through this pair.
struct GapDecomposition {
  std::vector<double> gaps;
  std::vector<bool> responses;

  static GapDecomposition of(const DataSet& data);
  std::size_t size() const noexcept { return responses.size(); }
  /// Rebuilds covariates as cumulative gap sums.
  DataSet to_dataset() const;
};

struct EstimateWithError {
  LogWeight estimate;
  double std_error = 0.0;
  std::size_t n_samples = 0;

  double lower() const noexcept { return estimate.log() - 3.0 * std_error; }
  double upper() const noexcept { return estimate.log() + 3.0 * std_error; }
  bool covers(double value, double sigmas = 3.0) const noexcept {
    const double d = value - estimate.log();
    return d <= sigmas * std_error && -d <= sigmas * std_error;
  }
};

inline constexpr std::size_t kDefaultExactMaxPoints = 14;

/// Exact log Z_m by the interior-gap occupancy sum; 3^(n-1) terms.
/// Throws OversizedRequestError when n > n_max.
LogWeight exact_log_Z_m(const DataSet& data, std::size_t m,
                        std::size_t n_max = kDefaultExactMaxPoints);
LogWeight exact_log_Z_m(const GapDecomposition& gaps, std::size_t m,
                        std::size_t n_max = kDefaultExactMaxPoints);

/// Weight of one run of consecutive sorted responses, as a log value.
using RunWeight = std::function<double(std::size_t successes, std::size_t failures)>;

/// log Z_0 .. log Z_{m_max} at once by a dynamic program over runs.
///
/// Uses truncated exponential generating functions in the split count, so
/// every term is nonnegative; cost O(n^2 m_max + n m_max^2). `run_weight`
/// replaces log_beta when given.
std::vector<double> series_log_Z(const DataSet& data, std::size_t m_max,
                                 const RunWeight& run_weight = {});
std::vector<double> series_log_Z(const GapDecomposition& gaps, std::size_t m_max,
                                 const RunWeight& run_weight = {});

/// Exact Poisson mixture sum_k e^-lambda lambda^k / k! Z_k, O(n^2).
LogWeight exact_log_Z_star(const DataSet& data, double lambda);

/// Plain Monte Carlo over uniform split vectors; delta-method SE on the log.
EstimateWithError mc_log_Z_m(const DataSet& data, std::size_t m, std::size_t n_samples,
                             std::uint64_t seed);

/// Monte Carlo over Poisson(lambda) many uniform splits.
EstimateWithError log_Z_star(const DataSet& data, double lambda, std::size_t n_samples,
                             std::uint64_t seed);

enum class ZSource { exact, series, mc };

struct McSettings {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
};

struct ModelPosterior {
  std::vector<double> probabilities;  // m = 0 .. m_max
  std::vector<double> log_Z;
  std::vector<double> log_Z_std_error;  // zero for exact sources
  double prior_mass = 1.0;              // nu mass on {0, .., m_max}
  bool truncated = false;               // prior_mass <= 0.999
};

ModelPosterior model_posterior(const DataSet& data, const HierarchyPrior& nu, std::size_t m_max,
                               ZSource source = ZSource::exact, const McSettings& mc = {});

}  // namespace stepbayes
