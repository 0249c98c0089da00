#include "stepbayes/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stepbayes/entropy.hpp"
#include "stepbayes/kernel.hpp"

namespace stepbayes {

namespace {

struct MeanSe {
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
};

MeanSe summarize(const std::vector<double>& v) {
  MeanSe r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return r;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  r.se = r.sd / std::sqrt(static_cast<double>(v.size()));
  return r;
}

std::string describe(const RegressionFunction& f) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* s = std::get_if<StepFunction>(&f)) {
    if (s->cells() == 1) {
      os << "const:" << s->levels()[0];
      return os.str();
    }
    os << "step:";
    for (std::size_t i = 0; i < s->breakpoints().size(); ++i) os << (i ? "," : "") << s->breakpoints()[i];
    os << ';';
    for (std::size_t i = 0; i < s->cells(); ++i) os << (i ? "," : "") << s->levels()[i];
    return os.str();
  }
  os << "grid:" << std::get<GridFunction>(f).intervals();
  return os.str();
}

DataSet with_pattern(const DataSet& data, ResponsePattern pattern, std::uint64_t seed) {
  if (pattern == ResponsePattern::observed) return data;
  std::vector<Observation> pts(data.points().begin(), data.points().end());
  Rng rng(seed);
  const auto order = data.sort_index();
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& p = pts[order[k]];
    switch (pattern) {
      case ResponsePattern::all_ones: p.y = true; break;
      case ResponsePattern::all_zeros: p.y = false; break;
      case ResponsePattern::alternating: p.y = k % 2 == 0; break;
      case ResponsePattern::random: p.y = uniform_unit(rng) < 0.5; break;
      case ResponsePattern::observed: break;
    }
  }
  return DataSet(std::move(pts));
}

bool is_half(const RegressionFunction& f) {
  if (const auto* s = std::get_if<StepFunction>(&f))
    return std::all_of(s->levels().begin(), s->levels().end(), [](double w) { return w == 0.5; });
  const auto v = std::get<GridFunction>(f).values();
  return std::all_of(v.begin(), v.end(), [](double w) { return w == 0.5; });
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

ZoneScanResult middle_zone_scan(const RegressionFunction& f, std::size_t n,
                                const std::vector<std::size_t>& m_list,
                                const ZoneScanSettings& settings, std::uint64_t seed) {
  for (auto m : m_list)
    if (m > n) throw std::invalid_argument("split count exceeds sample size");
  const DataSet data = sample_dataset(f, n, derive_seed(seed, "zone.data"));
  const double ref = -entropy_functional(f);
  const double nd = static_cast<double>(std::max<std::size_t>(n, 1));
  ZoneScanResult out;
  std::vector<double> series;
  if (settings.source == ZSource::series && !m_list.empty())
    series = series_log_Z(data, *std::max_element(m_list.begin(), m_list.end()));
  for (auto m : m_list) {
    ZoneRow row{n, m, 0.0, 0.0, ref};
    switch (settings.source) {
      case ZSource::mc: {
        const auto e = mc_log_Z_m(data, m, settings.n_samples, derive_seed(seed, "zone.mc", m));
        row.estimate = e.estimate.log() / nd;
        row.std_error = e.std_error / nd;
        break;
      }
      case ZSource::series:
        row.estimate = series[m] / nd;
        break;
      case ZSource::exact:
        row.estimate = exact_log_Z_m(data, m).log() / nd;
        break;
    }
    out.rows.push_back(row);
    Rng rng(derive_seed(seed, "zone.splits", m));
    for (std::size_t d = 0; d < settings.splits_per_m; ++d) {
      std::vector<double> u(m);
      for (auto& v : u) v = uniform_open(rng);
      out.split_rows.push_back({m, d, log_Z_u(data, u).log() / nd,
                                -entropy_functional(average_onto(f, u))});
    }
  }
  return out;
}

BeginningZoneReport beginning_zone_check(const RegressionFunction& f, std::size_t K,
                                         std::size_t n, std::uint64_t seed) {
  const DataSet data = sample_dataset(f, n, derive_seed(seed, "beginning.data"));
  const auto z = series_log_Z(data, K);
  BeginningZoneReport r;
  r.K = K;
  r.n = n;
  r.reference = -entropy_functional(f);
  r.max_estimate = -std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(std::max<std::size_t>(n, 1));
  for (std::size_t m = 0; m <= K; ++m) {
    r.rows.push_back({n, m, z[m] / nd, 0.0, r.reference});
    r.max_estimate = std::max(r.max_estimate, z[m] / nd);
  }
  return r;
}

PsiEstimate psi_estimate(const RegressionFunction& f, double alpha, double n,
                         const PsiSettings& settings, std::uint64_t seed) {
  if (!(n > 0.0)) throw std::invalid_argument("psi needs a positive size");
  if (settings.replicates < 2) throw std::invalid_argument("psi needs at least two replicates");
  PsiEstimate out;
  out.truth = describe(f);
  out.alpha = alpha;
  out.n = n;
  out.replicates = settings.replicates;
  const double lambda = alpha * n;
  for (std::size_t r = 0; r < settings.replicates; ++r) {
    const std::size_t size = poisson_count(n, derive_seed(seed, "psi.size", r));
    DataSet data = sample_dataset(f, size, derive_seed(seed, "psi.data", r));
    data = with_pattern(data, settings.pattern, derive_seed(seed, "psi.pattern", r));
    const double logz =
        settings.inner_samples == 0
            ? exact_log_Z_star(data, lambda).log()
            : log_Z_star(data, lambda, settings.inner_samples, derive_seed(seed, "psi.inner", r))
                  .estimate.log();
    out.values.push_back(logz / n);
  }
  const auto s = summarize(out.values);
  out.estimate = s.mean;
  out.std_error = s.se;
  return out;
}

PsiEstimate psi_estimate(double p, double alpha, double n, const PsiSettings& settings,
                         std::uint64_t seed) {
  return psi_estimate(StepFunction::constant(p), alpha, n, settings, seed);
}

double PiecewiseReport::difference_std_error() const noexcept {
  return std::hypot(direct.std_error, combined_std_error);
}

bool PiecewiseReport::agrees(double sigmas) const noexcept {
  return std::abs(difference()) <= sigmas * difference_std_error();
}

PiecewiseReport psi_piecewise_check(double pL, double pR, double b, double alpha, double n,
                                    const PsiSettings& settings, std::uint64_t seed) {
  if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("split location outside [0,1]");
  PiecewiseReport r;
  const RegressionFunction f = b <= 0.0   ? StepFunction::constant(pR)
                               : b >= 1.0 ? StepFunction::constant(pL)
                                          : StepFunction::two_level(pL, pR, b);
  r.direct = psi_estimate(f, alpha, n, settings, derive_seed(seed, "piecewise.direct"));
  double var = 0.0;
  if (b > 0.0) {
    r.left = psi_estimate(pL, alpha, b * n, settings, derive_seed(seed, "piecewise.left"));
    r.combined += b * r.left.estimate;
    var += b * b * r.left.std_error * r.left.std_error;
  }
  if (b < 1.0) {
    r.right = psi_estimate(pR, alpha, (1.0 - b) * n, settings, derive_seed(seed, "piecewise.right"));
    r.combined += (1.0 - b) * r.right.estimate;
    var += (1.0 - b) * (1.0 - b) * r.right.std_error * r.right.std_error;
  }
  r.combined_std_error = std::sqrt(var);
  return r;
}

EndZoneReport end_zone_dominance(const RegressionFunction& f, const std::vector<double>& alphas,
                                 double n, const PsiSettings& settings, std::uint64_t seed) {
  EndZoneReport out;
  const double ref = -entropy_functional(f);
  if (is_half(f)) {
    out.half_warning = true;
    out.warning = "regression function is identically 1/2; no entropy gap is expected";
  }
  const auto* step = std::get_if<StepFunction>(&f);
  out.method = step ? (step->cells() == 1 ? "direct" : "piecewise") : "direct";
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    EndZoneRow row{alphas[a], 0.0, 0.0, ref};
    if (step && step->cells() > 1) {
      double var = 0.0;
      for (std::size_t i = 0; i < step->cells(); ++i) {
        const double len = step->cell_end(i) - step->cell_begin(i);
        const auto e = psi_estimate(step->levels()[i], alphas[a], len * n, settings,
                                    derive_seed(derive_seed(seed, "end-zone.piece", i), "alpha", a));
        row.estimate += len * e.estimate;
        var += len * len * e.std_error * e.std_error;
      }
      row.std_error = std::sqrt(var);
    } else {
      const auto e = psi_estimate(f, alphas[a], n, settings, derive_seed(seed, "end-zone", a));
      row.estimate = e.estimate;
      row.std_error = e.std_error;
    }
    out.rows.push_back(row);
  }
  return out;
}

BadSetReport badset_measure(const DataSet& data, const RegressionFunction& f, double epsilon,
                            double kappa) {
  if (!(epsilon > 0.0 && kappa > 0.0)) throw std::invalid_argument("epsilon and kappa must be positive");
  BadSetReport r{epsilon, kappa, 0.0, {}};
  const std::size_t n = data.size();
  if (n == 0) return r;
  const double nd = static_cast<double>(n);
  const auto x = data.sorted_x();

  std::vector<double> cand(x.begin(), x.end());
  for (std::size_t j = 0;; ++j) {
    const double v = static_cast<double>(j) * kappa / (4.0 * nd);
    if (v > 1.0) break;
    cand.push_back(v);
  }
  cand.push_back(1.0);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  const std::size_t P = cand.size();
  std::vector<std::size_t> below(P), through(P);  // points < c, points <= c
  std::vector<double> F(P);
  for (std::size_t c = 0; c < P; ++c) {
    below[c] = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), cand[c]) - x.begin());
    through[c] = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), cand[c]) - x.begin());
    F[c] = integrate(f, 0.0, cand[c]);
  }
  const auto sp = data.success_prefix();
  const double min_len = kappa / nd;

  // For each left end, the furthest right end of a bad closed interval.
  std::vector<double> reach(P, -1.0);
  for (std::size_t a = 0; a < P; ++a) {
    const std::size_t first =
        static_cast<std::size_t>(std::lower_bound(cand.begin(), cand.end(), cand[a] + min_len) - cand.begin());
    for (std::size_t b = P; b-- > first;) {
      const double len = cand[b] - cand[a];
      if (len < min_len) break;
      const double N = static_cast<double>(through[b] - below[a]);
      const double S = static_cast<double>(sp[through[b]] - sp[below[a]]);
      const double mass = F[b] - F[a];
      const double tol = epsilon * nd * len;
      if (std::abs(N - nd * len) >= tol || std::abs(S - nd * mass) >= tol ||
          std::abs((N - S) - nd * (len - mass)) >= tol) {
        reach[a] = cand[b];
        break;
      }
    }
  }
  double cur_lo = 0.0, cur_hi = -1.0;
  for (std::size_t a = 0; a < P; ++a) {
    if (reach[a] < 0.0) continue;
    if (cand[a] > cur_hi) {
      if (cur_hi >= 0.0) r.witnesses.emplace_back(cur_lo, cur_hi);
      cur_lo = cand[a];
      cur_hi = reach[a];
    } else {
      cur_hi = std::max(cur_hi, reach[a]);
    }
  }
  if (cur_hi >= 0.0) r.witnesses.emplace_back(cur_lo, cur_hi);
  for (const auto& [lo, hi] : r.witnesses) r.measure += hi - lo;
  r.measure = std::min(r.measure, 1.0);
  return r;
}

SubadditiveReport subadditive_check(const SubadditiveSampler& sampler,
                                    const std::vector<std::size_t>& n_list, std::size_t replicates,
                                    std::uint64_t seed) {
  if (replicates < 2) throw std::invalid_argument("need at least two replicates");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw std::invalid_argument("sizes must increase");
  SubadditiveReport out;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const std::size_t n = n_list[i];
    std::vector<double> v(replicates);
    for (std::size_t r = 0; r < replicates; ++r)
      v[r] = sampler(n, derive_seed(derive_seed(seed, "subadditive", n), "replicate", r)) /
             static_cast<double>(n);
    const auto s = summarize(v);
    double mad = 0.0;
    for (double x : v) mad += std::abs(x - s.mean);
    out.rows.push_back({n, s.mean, s.sd, mad / static_cast<double>(replicates)});
  }
  if (out.rows.size() >= 2) {
    const auto& a = out.rows[out.rows.size() - 2];
    const auto& b = out.rows.back();
    out.final_slope = (b.mean - a.mean) / static_cast<double>(b.n - a.n);
    out.dispersion_shrinks = b.dispersion < out.rows.front().dispersion;
  }
  return out;
}

void write_csv(std::ostream& out, const ZoneScanResult& r) {
  out << "kind,n,m,draw,estimate,std_error,reference,margin\n";
  for (const auto& row : r.rows)
    out << "zone," << row.n << ',' << row.m << ",," << fmt(row.estimate) << ',' << fmt(row.std_error)
        << ',' << fmt(row.reference) << ',' << fmt(row.estimate - row.reference) << '\n';
  for (const auto& row : r.split_rows)
    out << "split,," << row.m << ',' << row.draw << ',' << fmt(row.estimate) << ",0,"
        << fmt(row.reference) << ',' << fmt(row.estimate - row.reference) << '\n';
}

void write_csv(std::ostream& out, const BeginningZoneReport& r) {
  out << "n,m,estimate,std_error,reference,margin\n";
  for (const auto& row : r.rows)
    out << row.n << ',' << row.m << ',' << fmt(row.estimate) << ',' << fmt(row.std_error) << ','
        << fmt(row.reference) << ',' << fmt(row.reference - row.estimate) << '\n';
  out << r.n << ",max," << fmt(r.max_estimate) << ',' << fmt(r.max_std_error) << ','
      << fmt(r.reference) << ',' << fmt(r.margin()) << '\n';
}

void write_csv(std::ostream& out, const std::vector<PsiEstimate>& r, double reference) {
  out << "truth,alpha,n,replicates,estimate,std_error,reference,margin\n";
  for (const auto& e : r)
    out << e.truth << ',' << fmt(e.alpha) << ',' << fmt(e.n) << ',' << e.replicates << ','
        << fmt(e.estimate) << ',' << fmt(e.std_error) << ',' << fmt(reference) << ','
        << fmt(e.estimate - reference) << '\n';
}

void write_csv(std::ostream& out, const EndZoneReport& r) {
  if (r.half_warning) out << "# warning: " << r.warning << '\n';
  out << "method,alpha,estimate,std_error,reference,margin\n";
  for (const auto& row : r.rows)
    out << r.method << ',' << fmt(row.alpha) << ',' << fmt(row.estimate) << ',' << fmt(row.std_error)
        << ',' << fmt(row.reference) << ',' << fmt(row.margin()) << '\n';
}

void write_csv(std::ostream& out, const BadSetReport& r) {
  out << "epsilon,kappa,measure,intervals\n";
  out << fmt(r.epsilon) << ',' << fmt(r.kappa) << ',' << fmt(r.measure) << ',' << r.witnesses.size()
      << '\n';
  out << "lo,hi\n";
  for (const auto& [lo, hi] : r.witnesses) out << fmt(lo) << ',' << fmt(hi) << '\n';
}

void write_csv(std::ostream& out, const SubadditiveReport& r) {
  out << "n,mean,dispersion,mean_abs_deviation\n";
  for (const auto& row : r.rows)
    out << row.n << ',' << fmt(row.mean) << ',' << fmt(row.dispersion) << ','
        << fmt(row.mean_abs_deviation) << '\n';
}

}  // namespace stepbayes
