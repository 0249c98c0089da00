#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace stepbayes {

double recharge_prob(double alpha);

struct UrnState {
  std::size_t red = 1;
  std::size_t blue = 1;
  friend bool operator==(const UrnState&, const UrnState&) = default;
};

struct UrnTrace {
  std::vector<bool> draws;  // true = blue
  std::vector<UrnState> states;  // composition before each returned draw, after any recharge
};

/// Throws std::invalid_argument unless 0 < r <= 1.
UrnTrace simulate_urn(double r, std::size_t steps, std::size_t burn_in, std::uint64_t seed);

/// Exact forward filter started at the recharge state (1,1).
///
/// States with the same number of draws since the last recharge form one
/// level; level L holds L + 1 compositions, so after k observations the
/// filter carries O(k^2) probabilities.
class UrnFilter {
 public:
  explicit UrnFilter(double r);

  /// P(next draw is blue | observed prefix).
  double predict() const;
  void observe(bool blue);
  /// Advances one draw without observing its colour.
  void advance();
  /// Draws processed so far, observed or not.
  std::size_t draws() const noexcept { return draws_; }
  /// Probability of each composition before the next draw (after recharge).
  std::vector<std::pair<UrnState, double>> support() const;

 private:
  void step(int observed);  // -1: unobserved, else the colour

  double r_;
  std::size_t draws_ = 0;
  // Level L (draws since the last recharge) occupies mass_[L(L+1)/2 ..],
  // entry b giving the probability of (red, blue) = (L - b + 1, b + 1)
  // after the last draw and before the next recharge.
  std::vector<double> mass_;
  std::vector<double> scratch_;
};

double filter_q(const std::vector<bool>& prefix, double r);

struct TermEstimate {
  std::size_t k = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replicates = 0;
  double discrepancy = 0.0;  // (1 - r)^k: weight of the recharge-start convention
};

struct TermReport {
  std::vector<TermEstimate> terms;
  /// Average per-step log-ratio over the first max(k)+1 draws, for the
  /// telescoping check.
  TermEstimate block;
  double discrepancy_bound = 0.0;  // largest per-term discrepancy
};

/// Estimates E_P log(q(Y_{k+1} | Y_1..Y_k) / p(Y_{k+1})) for i.i.d.
/// Bernoulli(p) draws.
TermReport relative_entropy_terms(double p, double r, const std::vector<std::size_t>& k_list,
                                  std::size_t replicates, std::uint64_t seed);

inline constexpr std::size_t kMaxMixingBlock = 10;

/// Total variation between the law of the next m draws given `prefix` and
/// their unconditional law; exact by enumeration of all 2^m blocks.
double mixing_distance(std::size_t m, double r, const std::vector<bool>& prefix);

void write_csv(std::ostream& out, const TermReport& r);

}  // namespace stepbayes
