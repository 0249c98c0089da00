#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "stepbayes/log_weight.hpp"
#include "stepbayes/model.hpp"
#include "stepbayes/prior.hpp"

namespace stepbayes {

/// Split configuration of the chain with cached cell ranks and log Z_u.
class ChainState {
 public:
  explicit ChainState(const DataSet& data, std::vector<double> splits = {});

  std::size_t m() const noexcept { return splits_.size(); }
  const std::vector<double>& splits() const noexcept { return splits_; }
  /// ranks()[j] = number of covariates below splits()[j].
  const std::vector<std::size_t>& ranks() const noexcept { return ranks_; }
  LogWeight log_Z() const noexcept { return LogWeight::from_log(log_Z_); }
  CellCounts counts(const DataSet& data) const;

  /// Recomputes log Z_u from scratch and returns |cached - fresh|.
  double resync(const DataSet& data);

 private:
  friend class Chain;
  std::vector<double> splits_;
  std::vector<std::size_t> ranks_;
  double log_Z_ = 0.0;
};

LogWeight log_target(const ChainState& state, const HierarchyPrior& nu);

struct TuningParams {
  double p_birth = 0.35;
  double p_death = 0.35;
  double p_move = 0.30;
  double move_width = 0.05;

  void validate() const;
};

enum class MoveKind : std::size_t { birth = 0, death = 1, move = 2 };

struct MoveStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  double rate() const noexcept {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

struct StepOutcome {
  MoveKind kind = MoveKind::birth;
  bool accepted = false;
  double log_acceptance = 0.0;  // log of the Metropolis-Hastings ratio before min(1, .)
};

/// Reversible-jump sampler over split configurations; heights are
/// integrated out, so the target is nu_m Z_u.
class Chain {
 public:
  Chain(const DataSet& data, HierarchyPrior nu, TuningParams tuning, std::uint64_t seed,
        std::vector<double> initial_splits = {});

  StepOutcome step();
  /// Proposes and resolves one move of the given kind.
  StepOutcome step(MoveKind kind);

  /// Log Metropolis-Hastings ratios of specific proposals from the current
  /// state; -inf for proposals that must be rejected.
  double birth_log_ratio(double v) const;
  double death_log_ratio(std::size_t j) const;
  double move_log_ratio(std::size_t j, double v) const;

  const ChainState& state() const noexcept { return state_; }
  const std::array<MoveStats, 3>& stats() const noexcept { return stats_; }
  double resync() { return state_.resync(*data_); }

 private:
  struct Proposal {
    double log_ratio;
    double delta;       // change of log Z_u
    std::size_t pos;    // insertion index after any removal
    std::size_t rank;   // data rank of the new split
  };
  Proposal propose_birth(double v) const;
  Proposal propose_death(std::size_t j) const;
  Proposal propose_move(std::size_t j, double v) const;

  StepOutcome birth();
  StepOutcome death();
  StepOutcome move();
  bool accept(double log_ratio);

  const DataSet* data_;
  HierarchyPrior nu_;
  TuningParams tuning_;
  Rng rng_;
  ChainState state_;
  std::array<MoveStats, 3> stats_{};
};

struct ChainSettings {
  std::size_t n_iters = 200000;
  std::size_t burn_in = 50000;
  std::size_t thin = 10;
  std::size_t verify_every = 10000;
  double verify_tolerance = 1e-9;
  TuningParams tuning;
};

struct ChainSample {
  std::vector<double> splits;
  double log_target = 0.0;
  std::size_t m() const noexcept { return splits.size(); }
};

struct ChainResult {
  std::vector<ChainSample> samples;
  std::array<MoveStats, 3> stats{};
  std::vector<std::size_t> m_visits;  // post-burn-in visit counts of every step
  std::size_t verifications = 0;

  /// Fraction of post-burn-in steps spent at each m.
  std::vector<double> m_frequencies() const;
};

/// Throws CacheVerificationError when the periodic recomputation of log Z_u
/// disagrees with the incrementally maintained value.
ChainResult run_chain(const DataSet& data, const HierarchyPrior& nu,
                      const ChainSettings& settings, std::uint64_t seed);

/// Rao-Blackwellized posterior mean on K+1 equispaced nodes.
GridFunction posterior_mean(const DataSet& data, const HierarchyPrior& nu,
                            const ChainSettings& settings, std::size_t K, std::uint64_t seed);
GridFunction posterior_mean(const DataSet& data, const ChainResult& chain, std::size_t K);

/// ||g - f_true||_1 for one height draw per retained sample.
std::vector<double> posterior_l1_samples(const DataSet& data, const HierarchyPrior& nu,
                                         const RegressionFunction& f_true,
                                         const ChainSettings& settings, std::uint64_t seed);
std::vector<double> posterior_l1_samples(const DataSet& data, const ChainResult& chain,
                                         const RegressionFunction& f_true, std::uint64_t seed);

/// One JSON object per line: {"m":..,"u":[..],"log_target":..}.
void write_samples_jsonl(std::ostream& out, const ChainResult& chain);

}  // namespace stepbayes
