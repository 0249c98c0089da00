#include "stepbayes/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "stepbayes/errors.hpp"
#include "stepbayes/kernel.hpp"

namespace stepbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Change in log Z when the cells `removed` are replaced by `added`. Cells
// with equal counts on both sides cancel before any arithmetic, so a
// proposal that leaves the occupancy pattern alone yields exactly zero.
double cell_delta(std::vector<CellCount> added, std::vector<CellCount> removed) {
  for (auto a = added.begin(); a != added.end();) {
    auto r = std::find(removed.begin(), removed.end(), *a);
    if (r != removed.end()) {
      removed.erase(r);
      a = added.erase(a);
    } else {
      ++a;
    }
  }
  double d = 0.0;
  for (const auto& c : added) d += log_beta(c);
  for (const auto& c : removed) d -= log_beta(c);
  return d;
}

}  // namespace

ChainState::ChainState(const DataSet& data, std::vector<double> splits)
    : splits_(sorted_splits(splits)), ranks_(split_ranks(data, splits_)) {
  log_Z_ = log_Z_u(counts(data)).log();
}

CellCounts ChainState::counts(const DataSet& data) const {
  CellCounts out;
  out.reserve(ranks_.size() + 1);
  std::size_t lo = 0;
  for (std::size_t r : ranks_) {
    out.push_back(data.counts(lo, r));
    lo = r;
  }
  out.push_back(data.counts(lo, data.size()));
  return out;
}

double ChainState::resync(const DataSet& data) {
  const double fresh = log_Z_u(counts(data)).log();
  const double diff = std::abs(fresh - log_Z_);
  log_Z_ = fresh;
  return diff;
}

LogWeight log_target(const ChainState& state, const HierarchyPrior& nu) {
  return LogWeight::from_log(nu.log_mass(state.m())) * state.log_Z();
}

void TuningParams::validate() const {
  if (!(p_birth > 0.0 && p_death > 0.0 && p_move >= 0.0))
    throw std::invalid_argument("move probabilities must be positive");
  if (std::abs(p_birth + p_death + p_move - 1.0) > 1e-12)
    throw std::invalid_argument("move probabilities must sum to 1");
  if (!(move_width > 0.0 && move_width <= 1.0))
    throw std::invalid_argument("move width outside (0,1]");
}

Chain::Chain(const DataSet& data, HierarchyPrior nu, TuningParams tuning, std::uint64_t seed,
             std::vector<double> initial_splits)
    : data_(&data),
      nu_(std::move(nu)),
      tuning_(tuning),
      rng_(seed),
      state_(data, std::move(initial_splits)) {
  tuning_.validate();
  if (nu_.log_mass(state_.m()) == kNegInf)
    throw std::invalid_argument("initial split count has zero prior mass");
}

StepOutcome Chain::step() {
  const double v = uniform_unit(rng_);
  if (v < tuning_.p_birth) return step(MoveKind::birth);
  if (v < tuning_.p_birth + tuning_.p_death) return step(MoveKind::death);
  return step(MoveKind::move);
}

StepOutcome Chain::step(MoveKind kind) {
  StepOutcome o;
  switch (kind) {
    case MoveKind::birth:
      o = birth();
      break;
    case MoveKind::death:
      o = death();
      break;
    case MoveKind::move:
      o = move();
      break;
  }
  auto& s = stats_[static_cast<std::size_t>(kind)];
  ++s.proposed;
  if (o.accepted) ++s.accepted;
  return o;
}

bool Chain::accept(double log_ratio) {
  if (log_ratio >= 0.0) return true;
  if (log_ratio == kNegInf) return false;
  return uniform_unit(rng_) < std::exp(log_ratio);
}

Chain::Proposal Chain::propose_birth(double v) const {
  const DataSet& data = *data_;
  const auto& s = state_;
  const auto x = data.sorted_x();
  const auto it = std::lower_bound(x.begin(), x.end(), v);
  if (!(v > 0.0 && v < 1.0) || (it != x.end() && *it == v)) return {kNegInf, 0.0, 0, 0};
  const std::size_t r = static_cast<std::size_t>(it - x.begin());
  const std::size_t pos =
      static_cast<std::size_t>(std::upper_bound(s.splits_.begin(), s.splits_.end(), v) - s.splits_.begin());
  const std::size_t lo = pos > 0 ? s.ranks_[pos - 1] : 0;
  const std::size_t hi = pos < s.m() ? s.ranks_[pos] : data.size();
  const double delta = cell_delta({data.counts(lo, r), data.counts(r, hi)}, {data.counts(lo, hi)});
  const double prior = nu_.log_mass(s.m() + 1) - nu_.log_mass(s.m());
  return {prior + delta + std::log(tuning_.p_death) - std::log(tuning_.p_birth), delta, pos, r};
}

Chain::Proposal Chain::propose_death(std::size_t j) const {
  const DataSet& data = *data_;
  const auto& s = state_;
  if (j >= s.m()) return {kNegInf, 0.0, 0, 0};
  const std::size_t lo = j > 0 ? s.ranks_[j - 1] : 0;
  const std::size_t hi = j + 1 < s.m() ? s.ranks_[j + 1] : data.size();
  const std::size_t r = s.ranks_[j];
  const double delta = cell_delta({data.counts(lo, hi)}, {data.counts(lo, r), data.counts(r, hi)});
  const double prior = nu_.log_mass(s.m() - 1) - nu_.log_mass(s.m());
  return {prior + delta + std::log(tuning_.p_birth) - std::log(tuning_.p_death), delta, j, r};
}

Chain::Proposal Chain::propose_move(std::size_t j, double v) const {
  const DataSet& data = *data_;
  const auto& s = state_;
  if (j >= s.m() || !(v > 0.0 && v < 1.0)) return {kNegInf, 0.0, 0, 0};
  const auto x = data.sorted_x();
  const auto it = std::lower_bound(x.begin(), x.end(), v);
  if (it != x.end() && *it == v) return {kNegInf, 0.0, 0, 0};
  const std::size_t r_new = static_cast<std::size_t>(it - x.begin());

  // Remove split j, then insert v into the reduced configuration.
  const std::size_t m = s.m();
  const std::size_t r_old = s.ranks_[j];
  const std::size_t lo = j > 0 ? s.ranks_[j - 1] : 0;
  const std::size_t hi = j + 1 < m ? s.ranks_[j + 1] : data.size();
  // pos counts the splits <= v, u_j included when u_j <= v.
  std::size_t pos =
      static_cast<std::size_t>(std::upper_bound(s.splits_.begin(), s.splits_.end(), v) - s.splits_.begin());
  std::size_t li = pos;
  if (li > 0 && li - 1 == j) --li;
  std::size_t ri = pos;
  if (ri < m && ri == j) ++ri;
  const std::size_t lo2 = li > 0 ? s.ranks_[li - 1] : 0;
  const std::size_t hi2 = ri < m ? s.ranks_[ri] : data.size();
  const double delta = cell_delta(
      {data.counts(lo, hi), data.counts(lo2, r_new), data.counts(r_new, hi2)},
      {data.counts(lo, r_old), data.counts(r_old, hi), data.counts(lo2, hi2)});
  if (pos > j) --pos;
  return {delta, delta, pos, r_new};
}

double Chain::birth_log_ratio(double v) const { return propose_birth(v).log_ratio; }
double Chain::death_log_ratio(std::size_t j) const { return propose_death(j).log_ratio; }
double Chain::move_log_ratio(std::size_t j, double v) const { return propose_move(j, v).log_ratio; }

StepOutcome Chain::birth() {
  StepOutcome o{MoveKind::birth, false, kNegInf};
  const double v = uniform_open(rng_);
  const auto p = propose_birth(v);
  o.log_acceptance = p.log_ratio;
  if (!accept(p.log_ratio)) return o;
  auto& s = state_;
  s.splits_.insert(s.splits_.begin() + static_cast<std::ptrdiff_t>(p.pos), v);
  s.ranks_.insert(s.ranks_.begin() + static_cast<std::ptrdiff_t>(p.pos), p.rank);
  s.log_Z_ += p.delta;
  o.accepted = true;
  return o;
}

StepOutcome Chain::death() {
  StepOutcome o{MoveKind::death, false, kNegInf};
  auto& s = state_;
  if (s.m() == 0) return o;
  const std::size_t j = static_cast<std::size_t>(uniform_unit(rng_) * static_cast<double>(s.m()));
  const auto p = propose_death(j);
  o.log_acceptance = p.log_ratio;
  if (!accept(p.log_ratio)) return o;
  s.splits_.erase(s.splits_.begin() + static_cast<std::ptrdiff_t>(j));
  s.ranks_.erase(s.ranks_.begin() + static_cast<std::ptrdiff_t>(j));
  s.log_Z_ += p.delta;
  o.accepted = true;
  return o;
}

StepOutcome Chain::move() {
  StepOutcome o{MoveKind::move, false, kNegInf};
  auto& s = state_;
  if (s.m() == 0) return o;
  const std::size_t j = static_cast<std::size_t>(uniform_unit(rng_) * static_cast<double>(s.m()));
  double v = s.splits_[j] + tuning_.move_width * (uniform_unit(rng_) - 0.5);
  if (v < 0.0) v = -v;
  if (v > 1.0) v = 2.0 - v;
  const auto p = propose_move(j, v);
  o.log_acceptance = p.log_ratio;
  if (!accept(p.log_ratio)) return o;
  s.splits_.erase(s.splits_.begin() + static_cast<std::ptrdiff_t>(j));
  s.ranks_.erase(s.ranks_.begin() + static_cast<std::ptrdiff_t>(j));
  s.splits_.insert(s.splits_.begin() + static_cast<std::ptrdiff_t>(p.pos), v);
  s.ranks_.insert(s.ranks_.begin() + static_cast<std::ptrdiff_t>(p.pos), p.rank);
  s.log_Z_ += p.delta;
  o.accepted = true;
  return o;
}

std::vector<double> ChainResult::m_frequencies() const {
  std::size_t total = 0;
  for (auto c : m_visits) total += c;
  std::vector<double> f(m_visits.size(), 0.0);
  if (total == 0) return f;
  for (std::size_t m = 0; m < m_visits.size(); ++m)
    f[m] = static_cast<double>(m_visits[m]) / static_cast<double>(total);
  return f;
}

ChainResult run_chain(const DataSet& data, const HierarchyPrior& nu, const ChainSettings& settings,
                      std::uint64_t seed) {
  if (settings.n_iters < settings.burn_in) throw std::invalid_argument("burn-in exceeds iterations");
  if (settings.thin == 0) throw std::invalid_argument("thin must be at least 1");
  Chain chain(data, nu, settings.tuning, derive_seed(seed, "chain"));
  ChainResult out;
  for (std::size_t it = 0; it < settings.n_iters; ++it) {
    chain.step();
    if (settings.verify_every > 0 && (it + 1) % settings.verify_every == 0) {
      const double diff = chain.resync();
      ++out.verifications;
      if (diff > settings.verify_tolerance)
        throw CacheVerificationError("cached log Z drifted by " + std::to_string(diff) +
                                     " at iteration " + std::to_string(it + 1));
    }
    if (it < settings.burn_in) continue;
    const auto& s = chain.state();
    if (s.m() >= out.m_visits.size()) out.m_visits.resize(s.m() + 1, 0);
    ++out.m_visits[s.m()];
    if ((it - settings.burn_in) % settings.thin == 0)
      out.samples.push_back({s.splits(), log_target(s, nu).log()});
  }
  out.stats = chain.stats();
  return out;
}

GridFunction posterior_mean(const DataSet& data, const ChainResult& chain, std::size_t K) {
  if (K < 2) throw std::invalid_argument("posterior mean grid needs K >= 2");
  if (chain.samples.empty()) throw std::invalid_argument("no retained samples");
  std::vector<double> acc(K + 1, 0.0);
  for (const auto& smp : chain.samples) {
    const auto ranks = split_ranks(data, smp.splits);
    std::size_t cell = 0;
    auto cell_mean = [&](std::size_t c) {
      const std::size_t hi = c < ranks.size() ? ranks[c] : data.size();
      const auto cc = data.counts(c == 0 ? 0 : ranks[c - 1], hi);
      return (static_cast<double>(cc.successes) + 1.0) / (static_cast<double>(cc.total()) + 2.0);
    };
    double current = cell_mean(0);
    for (std::size_t i = 0; i <= K; ++i) {
      const double xi = static_cast<double>(i) / static_cast<double>(K);
      bool advanced = false;
      while (cell < smp.splits.size() && smp.splits[cell] <= xi) {
        ++cell;
        advanced = true;
      }
      if (advanced) current = cell_mean(cell);
      acc[i] += current;
    }
  }
  for (double& v : acc) v = std::clamp(v / static_cast<double>(chain.samples.size()), 0.0, 1.0);
  return GridFunction(std::move(acc));
}

GridFunction posterior_mean(const DataSet& data, const HierarchyPrior& nu,
                            const ChainSettings& settings, std::size_t K, std::uint64_t seed) {
  return posterior_mean(data, run_chain(data, nu, settings, seed), K);
}

namespace {

// Step function from a possibly repeated split list; zero-width cells vanish.
StepFunction step_from(const std::vector<double>& splits, const std::vector<double>& heights) {
  std::vector<double> u, w;
  w.push_back(heights[0]);
  for (std::size_t j = 0; j < splits.size(); ++j) {
    if (!u.empty() && splits[j] == u.back()) {
      w.back() = heights[j + 1];
      continue;
    }
    u.push_back(splits[j]);
    w.push_back(heights[j + 1]);
  }
  return StepFunction(std::move(u), std::move(w));
}

}  // namespace

std::vector<double> posterior_l1_samples(const DataSet& data, const ChainResult& chain,
                                         const RegressionFunction& f_true, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(chain.samples.size());
  for (std::size_t i = 0; i < chain.samples.size(); ++i) {
    const auto& smp = chain.samples[i];
    const HeightPosterior hp(cell_counts(data, smp.splits));
    const auto w = sample_heights(hp, derive_seed(seed, "posterior-heights", i));
    out.push_back(l1_distance(step_from(smp.splits, w), f_true));
  }
  return out;
}

std::vector<double> posterior_l1_samples(const DataSet& data, const HierarchyPrior& nu,
                                         const RegressionFunction& f_true,
                                         const ChainSettings& settings, std::uint64_t seed) {
  return posterior_l1_samples(data, run_chain(data, nu, settings, seed), f_true, seed);
}

void write_samples_jsonl(std::ostream& out, const ChainResult& chain) {
  for (const auto& s : chain.samples) {
    nlohmann::json j;
    j["m"] = s.m();
    j["u"] = s.splits;
    j["log_target"] = s.log_target;
    out << j.dump() << '\n';
  }
}

}  // namespace stepbayes
