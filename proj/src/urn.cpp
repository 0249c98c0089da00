#include "stepbayes/urn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "stepbayes/errors.hpp"
#include "stepbayes/random.hpp"

namespace stepbayes {

double recharge_prob(double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  if (std::isinf(alpha)) return 1.0;
  return alpha / (1.0 + alpha);
}

UrnTrace simulate_urn(double r, std::size_t steps, std::size_t burn_in, std::uint64_t seed) {
  if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("recharge probability must lie in (0,1]");
  Rng rng(seed);
  UrnTrace t;
  t.draws.reserve(steps);
  t.states.reserve(steps);
  UrnState s;
  for (std::size_t i = 0; i < burn_in + steps; ++i) {
    if (uniform_unit(rng) < r) s = UrnState{};
    const double blue = static_cast<double>(s.blue) / static_cast<double>(s.red + s.blue);
    const bool y = uniform_unit(rng) < blue;
    if (i >= burn_in) {
      t.states.push_back(s);
      t.draws.push_back(y);
    }
    if (y)
      ++s.blue;
    else
      ++s.red;
  }
  return t;
}

UrnFilter::UrnFilter(double r) : r_(r), mass_{1.0} {
  if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("recharge probability must lie in (0,1]");
}

double UrnFilter::predict() const {
  // Recharge mass r sits at (1,1), which draws blue with probability 1/2.
  double q = 0.0;
  std::size_t idx = 0;
  for (std::size_t L = 0; L <= draws_; ++L) {
    const double denom = static_cast<double>(L + 2);
    for (std::size_t b = 0; b <= L; ++b, ++idx)
      q += mass_[idx] * static_cast<double>(b + 1) / denom;
  }
  return (1.0 - r_) * q + 0.5 * r_;
}

void UrnFilter::step(int observed) {
  const std::size_t levels = draws_ + 1;  // current levels 0..draws_
  scratch_.assign((levels + 1) * (levels + 2) / 2, 0.0);
  double total = 0.0;
  std::size_t idx = 0;
  for (std::size_t L = 0; L < levels; ++L) {
    const std::size_t next = (L + 1) * (L + 2) / 2;  // start of level L + 1
    const double denom = static_cast<double>(L + 2);
    for (std::size_t b = 0; b <= L; ++b, ++idx) {
      double v = (1.0 - r_) * mass_[idx];
      if (L == 0) v += r_;
      const double p_blue = static_cast<double>(b + 1) / denom;
      if (observed != 0) scratch_[next + b + 1] += v * p_blue;
      if (observed != 1) scratch_[next + b] += v * (1.0 - p_blue);
      total += (observed == 1 ? p_blue : observed == 0 ? 1.0 - p_blue : 1.0) * v;
    }
  }
  if (observed >= 0)
    for (double& v : scratch_) v /= total;
  mass_.swap(scratch_);
  ++draws_;
}

void UrnFilter::observe(bool blue) { step(blue ? 1 : 0); }

void UrnFilter::advance() { step(-1); }

std::vector<std::pair<UrnState, double>> UrnFilter::support() const {
  std::vector<std::pair<UrnState, double>> out;
  std::size_t idx = 0;
  for (std::size_t L = 0; L <= draws_; ++L)
    for (std::size_t b = 0; b <= L; ++b, ++idx) {
      const double v = (1.0 - r_) * mass_[idx] + (L == 0 ? r_ : 0.0);
      if (v > 0.0) out.push_back({UrnState{L - b + 1, b + 1}, v});
    }
  return out;
}

double filter_q(const std::vector<bool>& prefix, double r) {
  UrnFilter f(r);
  for (bool y : prefix) f.observe(y);
  return f.predict();
}

TermReport relative_entropy_terms(double p, double r, const std::vector<std::size_t>& k_list,
                                  std::size_t replicates, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
  if (replicates < 2) throw std::invalid_argument("need at least two replicates");
  if (k_list.empty()) throw std::invalid_argument("empty k list");
  const std::size_t K = *std::max_element(k_list.begin(), k_list.end());
  std::vector<double> sum(K + 1, 0.0), sum_sq(K + 1, 0.0);
  double block_sum = 0.0, block_sq = 0.0;
  const double lp1 = std::log(p), lp0 = std::log1p(-p);
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    Rng rng(derive_seed(seed, "urn-terms", rep));
    UrnFilter filter(r);
    double block = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
      const bool y = uniform_unit(rng) < p;
      const double q = filter.predict();
      const double term = y ? std::log(q) - lp1 : std::log1p(-q) - lp0;
      sum[k] += term;
      sum_sq[k] += term * term;
      block += term;
      filter.observe(y);
    }
    block /= static_cast<double>(K + 1);
    block_sum += block;
    block_sq += block * block;
  }
  const double R = static_cast<double>(replicates);
  auto make = [&](std::size_t k, double s, double sq) {
    const double mean = s / R;
    const double var = std::max(0.0, (sq - R * mean * mean) / (R - 1.0));
    return TermEstimate{k, mean, std::sqrt(var / R), replicates,
                        std::pow(1.0 - r, static_cast<double>(k))};
  };
  TermReport out;
  for (auto k : k_list) {
    out.terms.push_back(make(k, sum[k], sum_sq[k]));
    out.discrepancy_bound = std::max(out.discrepancy_bound, out.terms.back().discrepancy);
  }
  out.block = make(K, block_sum, block_sq);
  return out;
}

namespace {

// Probabilities of all 2^m colour blocks from the filter's current state,
// indexed with the first draw in the lowest bit.
std::vector<double> block_law(const UrnFilter& start, std::size_t m) {
  std::vector<double> law(std::size_t{1} << m, 0.0);
  std::function<void(const UrnFilter&, std::size_t, std::size_t, double)> rec =
      [&](const UrnFilter& f, std::size_t depth, std::size_t code, double prob) {
        if (depth == m) {
          law[code] = prob;
          return;
        }
        const double q = f.predict();
        UrnFilter blue = f, red = f;
        blue.observe(true);
        red.observe(false);
        rec(blue, depth + 1, code | (std::size_t{1} << depth), prob * q);
        rec(red, depth + 1, code, prob * (1.0 - q));
      };
  rec(start, 0, 0, 1.0);
  return law;
}

}  // namespace

double mixing_distance(std::size_t m, double r, const std::vector<bool>& prefix) {
  if (m > kMaxMixingBlock)
    throw OversizedRequestError("mixing block limited to " + std::to_string(kMaxMixingBlock) +
                                " draws");
  UrnFilter cond(r), uncond(r);
  for (bool y : prefix) {
    cond.observe(y);
    uncond.advance();
  }
  for (std::size_t i = 0; i < m; ++i) {
    cond.advance();
    uncond.advance();
  }
  const auto a = block_law(cond, m);
  const auto b = block_law(uncond, m);
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

void write_csv(std::ostream& out, const TermReport& r) {
  out << "k,mean,std_error,replicates,discrepancy\n";
  char buf[160];
  for (const auto& t : r.terms) {
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%zu,%.10g\n", t.k, t.mean, t.std_error,
                  t.replicates, t.discrepancy);
    out << buf;
  }
}

}  // namespace stepbayes
