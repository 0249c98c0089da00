#include "stepbayes/predictive.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stepbayes/errors.hpp"
#include "stepbayes/kernel.hpp"

namespace stepbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::size_t> prefix_successes(const std::vector<bool>& y) {
  std::vector<std::size_t> p(y.size() + 1, 0);
  for (std::size_t i = 0; i < y.size(); ++i) p[i + 1] = p[i] + (y[i] ? 1 : 0);
  return p;
}

// log weight of the run of sorted points [lo, hi)
struct RunTable {
  std::vector<std::size_t> prefix;
  const RunWeight* custom;

  double operator()(std::size_t lo, std::size_t hi) const {
    const std::size_t s = prefix[hi] - prefix[lo];
    const std::size_t f = hi - lo - s;
    return custom && *custom ? (*custom)(s, f) : log_beta(s, f);
  }
};

// log(exp(a) - exp(b)) for a >= b; -inf when the difference vanishes.
double log_diff(double a, double b) {
  if (b == kNegInf) return a;
  if (!(a > b)) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

struct Estimate {
  double log_mean;
  double std_error;
};

// Log of the sample mean of exp(v) and the delta-method SE of that log.
Estimate log_mean_exp(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  const double n = static_cast<double>(v.size());
  const double mean = s / n;
  double ss = 0.0;
  for (double x : v) {
    const double d = std::exp(x - mx) - mean;
    ss += d * d;
  }
  const double var = ss / (n - 1.0);
  return {mx + std::log(mean), std::sqrt(var / n) / mean};
}

}  // namespace

GapDecomposition GapDecomposition::of(const DataSet& data) {
  GapDecomposition g;
  const auto x = data.sorted_x();
  const std::size_t n = x.size();
  g.gaps.resize(n + 1);
  g.responses.resize(n);
  if (n == 0) {
    g.gaps[0] = 1.0;
    return g;
  }
  g.gaps[0] = x[0];
  for (std::size_t i = 1; i < n; ++i) g.gaps[i] = x[i] - x[i - 1];
  g.gaps[n] = 1.0 - x[n - 1];
  for (std::size_t i = 0; i < n; ++i) g.responses[i] = data.sorted_y(i);
  return g;
}

DataSet GapDecomposition::to_dataset() const {
  std::vector<Observation> pts(responses.size());
  double x = 0.0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    x += gaps[i];
    pts[i] = {std::min(x, 1.0), static_cast<bool>(responses[i])};
  }
  return DataSet(std::move(pts));
}

LogWeight exact_log_Z_m(const DataSet& data, std::size_t m, std::size_t n_max) {
  return exact_log_Z_m(GapDecomposition::of(data), m, n_max);
}

LogWeight exact_log_Z_m(const GapDecomposition& gd, std::size_t m, std::size_t n_max) {
  const std::size_t n = gd.size();
  if (n > n_max)
    throw OversizedRequestError("exact predictive probability limited to " +
                                std::to_string(n_max) + " points, got " + std::to_string(n));
  const RunTable run{prefix_successes(gd.responses), nullptr};
  if (n == 0) return LogWeight::one();
  if (m == 0) return LogWeight::from_log(run(0, n));

  // Interior gaps 1..n-1 are bit positions 0..n-2.
  const std::size_t k = n - 1;
  const double c = gd.gaps[0] + gd.gaps[n];
  const double md = static_cast<double>(m);
  LogSumExp total;
  for (std::uint32_t S = 0; S < (std::uint32_t{1} << k); ++S) {
    const auto occupied = static_cast<std::size_t>(std::popcount(S));
    if (occupied > m) continue;  // m splits occupy at most m gaps

    double beta = 0.0;
    std::size_t lo = 0;
    for (std::size_t b = 0; b < k; ++b) {
      if (S >> b & 1u) {
        beta += run(lo, b + 1);
        lo = b + 1;
      }
    }
    beta += run(lo, n);

    // Probability that the occupied interior gaps are exactly S.
    LogSumExp pos, neg;
    for (std::uint32_t T = S;; T = (T - 1) & S) {
      double g = c;
      for (std::uint32_t r = T; r; r &= r - 1) g += gd.gaps[static_cast<std::size_t>(std::countr_zero(r)) + 1];
      const double term = md * std::log(g);
      if ((occupied - static_cast<std::size_t>(std::popcount(T))) % 2 == 0)
        pos.add(term);
      else
        neg.add(term);
      if (T == 0) break;
    }
    const double w = log_diff(pos.value(), neg.value());
    if (w != kNegInf) total.add(w + beta);
  }
  return LogWeight::from_log(total.value());
}

std::vector<double> series_log_Z(const DataSet& data, std::size_t m_max, const RunWeight& run_weight) {
  return series_log_Z(GapDecomposition::of(data), m_max, run_weight);
}

std::vector<double> series_log_Z(const GapDecomposition& gd, std::size_t m_max,
                                 const RunWeight& run_weight) {
  const std::size_t n = gd.size();
  const std::size_t M = m_max;
  if (n == 0) return std::vector<double>(M + 1, 0.0);
  const RunTable run{prefix_successes(gd.responses), &run_weight};

  // Power series in s = n t, truncated at degree M, stored as log
  // coefficients: low and high degrees differ by far more than a double's
  // range once n is large.
  using Series = std::vector<double>;
  const double scale_n = static_cast<double>(n);
  std::vector<Series> Q(n, Series(M + 1, kNegInf));  // segmentations of [0, i), gap i occupied
  Q[0][0] = 0.0;
  Series P(M + 1, kNegInf);
  std::vector<double> w(n), mx(M + 1), acc(M + 1);
  std::vector<double> log_e(M + 1, kNegInf);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t i = 0; i < j; ++i) w[i] = run(i, j);
    std::fill(mx.begin(), mx.end(), kNegInf);
    for (std::size_t i = 0; i < j; ++i) {
      const auto& q = Q[i];
      for (std::size_t d = 0; d <= M; ++d) mx[d] = std::max(mx[d], q[d] + w[i]);
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i = 0; i < j; ++i) {
      const auto& q = Q[i];
      for (std::size_t d = 0; d <= M; ++d) {
        const double t = q[d] + w[i] - mx[d];
        if (t > -60.0) acc[d] += std::exp(t);
      }
    }
    for (std::size_t d = 0; d <= M; ++d) P[d] = mx[d] == kNegInf ? kNegInf : mx[d] + std::log(acc[d]);
    if (j == n) break;
    // Occupy interior gap j: multiply by exp(h s) - 1 with h = n * gap.
    const double log_h = std::log(scale_n * gd.gaps[j]);
    for (std::size_t d = 1; d <= M; ++d)
      log_e[d] = static_cast<double>(d) * log_h - log_factorial(d);
    Series& out = Q[j];
    for (std::size_t t = 1; t <= M; ++t) {
      LogSumExp sum;
      for (std::size_t a = 0; a < t; ++a) sum.add(P[a] + log_e[t - a]);
      out[t] = sum.value();
    }
  }

  // Z_m = m! n^-m sum_k [s^k] Phi (n c)^(m-k) / (m-k)!, c the end-gap mass.
  const double log_nc = std::log(scale_n * (gd.gaps[0] + gd.gaps[n]));
  std::vector<double> result(M + 1, kNegInf);
  for (std::size_t m = 0; m <= M; ++m) {
    LogSumExp acc;
    for (std::size_t k = 0; k <= m; ++k) {
      const double rest = m == k ? 0.0 : static_cast<double>(m - k) * log_nc - log_factorial(m - k);
      acc.add(P[k] + rest);
    }
    const double v = acc.value();
    result[m] = v == kNegInf ? kNegInf : v + log_factorial(m) - static_cast<double>(m) * std::log(scale_n);
  }
  return result;
}

LogWeight exact_log_Z_star(const DataSet& data, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("negative split intensity");
  const std::size_t n = data.size();
  if (n == 0) return LogWeight::one();
  const auto x = data.sorted_x();
  auto run = [&data](std::size_t lo, std::size_t hi) { return log_beta(data.counts(lo, hi)); };

  // F[i]: runs covering points [0, i) with the gap after point i-1 occupied.
  // A[j]: runs covering [0, j) with the last run ending at point j-1.
  std::vector<double> F(n, kNegInf);
  F[0] = 0.0;
  std::vector<double> terms(n);
  double A = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    double mx = kNegInf;
    for (std::size_t i = 0; i < j; ++i) {
      terms[i] = F[i] == kNegInf ? kNegInf : F[i] + run(i, j) - lambda * (x[j - 1] - x[i]);
      mx = std::max(mx, terms[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < j; ++i)
      if (terms[i] != kNegInf) s += std::exp(terms[i] - mx);
    A = mx + std::log(s);
    if (j < n) {
      const double occupied = -std::expm1(-lambda * (x[j] - x[j - 1]));
      F[j] = occupied > 0.0 ? A + std::log(occupied) : kNegInf;
    }
  }
  return LogWeight::from_log(A);
}

EstimateWithError mc_log_Z_m(const DataSet& data, std::size_t m, std::size_t n_samples,
                             std::uint64_t seed) {
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  if (m == 0) return {LogWeight::from_log(log_beta(data.total_successes(), data.total_failures())), 0.0, n_samples};
  Rng rng(seed);
  const auto x = data.sorted_x();
  std::vector<double> values(n_samples);
  std::vector<std::size_t> ranks(m);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::size_t j = 0; j < m; ++j) {
      const double u = uniform_open(rng);
      ranks[j] = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), u) - x.begin());
    }
    std::sort(ranks.begin(), ranks.end());
    double v = 0.0;
    std::size_t lo = 0;
    for (std::size_t r : ranks) {
      v += log_beta(data.counts(lo, r));
      lo = r;
    }
    values[s] = v + log_beta(data.counts(lo, data.size()));
  }
  const auto e = log_mean_exp(values);
  return {LogWeight::from_log(e.log_mean), e.std_error, n_samples};
}

EstimateWithError log_Z_star(const DataSet& data, double lambda, std::size_t n_samples,
                             std::uint64_t seed) {
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  if (!(lambda >= 0.0)) throw std::invalid_argument("negative split intensity");
  if (lambda == 0.0)
    return {LogWeight::from_log(log_beta(data.total_successes(), data.total_failures())), 0.0, n_samples};
  Rng rng(seed);
  const auto x = data.sorted_x();
  const std::size_t n = data.size();
  std::vector<double> values(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    // Splits of a rate-lambda Poisson process, walked left to right
    // against the sorted covariates.
    double v = 0.0;
    std::size_t lo = 0, k = 0;
    double u = standard_exponential(rng) / lambda;
    while (u < 1.0) {
      while (k < n && x[k] < u) ++k;
      if (k > lo) {
        v += log_beta(data.counts(lo, k));
        lo = k;
      }
      u += standard_exponential(rng) / lambda;
    }
    values[s] = v + log_beta(data.counts(lo, n));
  }
  const auto e = log_mean_exp(values);
  return {LogWeight::from_log(e.log_mean), e.std_error, n_samples};
}

ModelPosterior model_posterior(const DataSet& data, const HierarchyPrior& nu, std::size_t m_max,
                               ZSource source, const McSettings& mc) {
  ModelPosterior out;
  out.log_Z.resize(m_max + 1);
  out.log_Z_std_error.assign(m_max + 1, 0.0);
  switch (source) {
    case ZSource::exact:
      for (std::size_t m = 0; m <= m_max; ++m) out.log_Z[m] = exact_log_Z_m(data, m).log();
      break;
    case ZSource::series:
      out.log_Z = series_log_Z(data, m_max);
      break;
    case ZSource::mc:
      for (std::size_t m = 0; m <= m_max; ++m) {
        const auto e = mc_log_Z_m(data, m, mc.n_samples, derive_seed(mc.seed, "model-posterior", m));
        out.log_Z[m] = e.estimate.log();
        out.log_Z_std_error[m] = e.std_error;
      }
      break;
  }
  std::vector<double> lw(m_max + 1);
  for (std::size_t m = 0; m <= m_max; ++m) lw[m] = nu.log_mass(m) + out.log_Z[m];
  const double norm = log_sum_exp(lw);
  if (norm == kNegInf) throw std::domain_error("all model weights are zero");
  out.probabilities.resize(m_max + 1);
  for (std::size_t m = 0; m <= m_max; ++m) out.probabilities[m] = std::exp(lw[m] - norm);
  out.prior_mass = nu.mass_through(m_max);
  out.truncated = out.prior_mass <= 0.999;
  return out;
}

}  // namespace stepbayes
