#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "stepbayes/model.hpp"
#include "stepbayes/predictive.hpp"

namespace stepbayes {

struct ZoneRow {
  std::size_t n = 0;
  std::size_t m = 0;
  double estimate = 0.0;   // n^-1 log Z_m
  double std_error = 0.0;  // of the estimate
  double reference = 0.0;  // -H(f)
};

struct SplitRow {
  std::size_t m = 0;
  std::size_t draw = 0;
  double estimate = 0.0;   // n^-1 log Z_u
  double reference = 0.0;  // -H(average_onto(f, u))
};

struct ZoneScanResult {
  std::vector<ZoneRow> rows;
  std::vector<SplitRow> split_rows;
};

struct ZoneScanSettings {
  std::size_t n_samples = 20000;
  std::size_t splits_per_m = 10;
  ZSource source = ZSource::mc;
};

ZoneScanResult middle_zone_scan(const RegressionFunction& f, std::size_t n,
                                const std::vector<std::size_t>& m_list,
                                const ZoneScanSettings& settings, std::uint64_t seed);

struct BeginningZoneReport {
  std::size_t K = 0;
  std::size_t n = 0;
  std::vector<ZoneRow> rows;  // m = 0 .. K
  double max_estimate = 0.0;
  double max_std_error = 0.0;
  double reference = 0.0;  // -H(f)
  /// reference - max_estimate; positive when every m <= K decays faster.
  double margin() const noexcept { return reference - max_estimate; }
};

/// Exact for every n via the run-segmentation series.
BeginningZoneReport beginning_zone_check(const RegressionFunction& f, std::size_t K,
                                         std::size_t n, std::uint64_t seed);

enum class ResponsePattern { observed, all_ones, all_zeros, alternating, random };

struct PsiSettings {
  std::size_t replicates = 20;
  /// 0 selects the exact Poisson-gap recursion; otherwise Monte Carlo with
  /// this many split draws per replicate.
  std::size_t inner_samples = 0;
  ResponsePattern pattern = ResponsePattern::observed;
};

struct PsiEstimate {
  std::string truth;
  double alpha = 0.0;
  double n = 0.0;
  std::size_t replicates = 0;
  double estimate = 0.0;  // mean of n^-1 log Z*_{alpha n} over replicates
  double std_error = 0.0;
  std::vector<double> values;
};

/// Replicates of n^-1 log Z*_{alpha n} on Poisson(n)-sized data from f.
PsiEstimate psi_estimate(const RegressionFunction& f, double alpha, double n,
                         const PsiSettings& settings, std::uint64_t seed);
PsiEstimate psi_estimate(double p, double alpha, double n, const PsiSettings& settings,
                         std::uint64_t seed);

struct PiecewiseReport {
  PsiEstimate direct;
  PsiEstimate left;   // pL at size b n, rescaled to [0,1]
  PsiEstimate right;  // pR at size (1 - b) n
  double combined = 0.0;
  double combined_std_error = 0.0;
  double difference() const noexcept { return direct.estimate - combined; }
  double difference_std_error() const noexcept;
  bool agrees(double sigmas = 3.0) const noexcept;
};

PiecewiseReport psi_piecewise_check(double pL, double pR, double b, double alpha, double n,
                                    const PsiSettings& settings, std::uint64_t seed);

struct EndZoneRow {
  double alpha = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double reference = 0.0;  // -H(f)
  double margin() const noexcept { return estimate - reference; }
};

struct EndZoneReport {
  std::vector<EndZoneRow> rows;
  std::string method;
  bool half_warning = false;
  std::string warning;
};

/// Constant f directly; step f through its pieces; grid f directly.
EndZoneReport end_zone_dominance(const RegressionFunction& f, const std::vector<double>& alphas,
                                 double n, const PsiSettings& settings, std::uint64_t seed);

struct BadSetReport {
  double epsilon = 0.0;
  double kappa = 0.0;
  double measure = 0.0;
  std::vector<std::pair<double, double>> witnesses;  // disjoint, sorted
};

/// Lower bound on the measure of (epsilon, kappa)-bad points, searching
/// intervals with endpoints on the covariates, the mesh kappa/(4n), and 0, 1.
BadSetReport badset_measure(const DataSet& data, const RegressionFunction& f, double epsilon,
                            double kappa);

struct SubadditiveRow {
  std::size_t n = 0;
  double mean = 0.0;        // of S_n / n
  double dispersion = 0.0;  // standard deviation of S_n / n
  double mean_abs_deviation = 0.0;
};

struct SubadditiveReport {
  std::vector<SubadditiveRow> rows;
  double final_slope = 0.0;  // change of the mean per unit n over the last two sizes
  bool dispersion_shrinks = false;
};

using SubadditiveSampler = std::function<double(std::size_t n, std::uint64_t seed)>;

SubadditiveReport subadditive_check(const SubadditiveSampler& sampler,
                                    const std::vector<std::size_t>& n_list,
                                    std::size_t replicates, std::uint64_t seed);

void write_csv(std::ostream& out, const ZoneScanResult& r);
void write_csv(std::ostream& out, const BeginningZoneReport& r);
void write_csv(std::ostream& out, const std::vector<PsiEstimate>& r, double reference);
void write_csv(std::ostream& out, const EndZoneReport& r);
void write_csv(std::ostream& out, const BadSetReport& r);
void write_csv(std::ostream& out, const SubadditiveReport& r);

}  // namespace stepbayes
