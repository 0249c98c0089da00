#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "properties.hpp"
#include "stepbayes/asymptotics.hpp"
#include "stepbayes/entropy.hpp"
#include "stepbayes/io.hpp"

using namespace stepbayes;

namespace {

double sd(const std::vector<double>& v) {
  double mean = 0.0, s = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("middle zone with a constant truth, monte carlo") {
  ZoneScanSettings s;
  s.splits_per_m = 10;
  const auto r = middle_zone_scan(StepFunction::constant(0.3), 4000, {40}, s, 1);
  REQUIRE(r.rows.size() == 1);
  CHECK(std::abs(r.rows[0].estimate + shannon(0.3)) < 0.05);
  CHECK(r.rows[0].reference == doctest::Approx(-shannon(0.3)));
}

TEST_CASE("middle zone with a two-level truth") {
  ZoneScanSettings s;
  s.source = ZSource::series;
  const auto r = middle_zone_scan(StepFunction::two_level(0.2, 0.8, 0.5), 4000, {10, 40}, s, 2);
  for (const auto& row : r.rows) CHECK(std::abs(row.estimate + 0.500402) < 0.05);
  std::size_t close = 0;
  for (const auto& row : r.split_rows) close += std::abs(row.estimate - row.reference) < 0.05 ? 1 : 0;
  CHECK(static_cast<double>(close) >= 0.9 * static_cast<double>(r.split_rows.size()));
}

TEST_CASE("beginning zone") {
  const auto smooth = load_function(std::string(STEPBAYES_TEST_DATA) + "/smooth_truth.json");
  const auto a = beginning_zone_check(smooth, 2, 4000, 3);
  CHECK(a.margin() > 3.0 * a.max_std_error);
  CHECK(a.margin() > 0.0);

  const auto step = beginning_zone_check(StepFunction::two_level(0.2, 0.8, 0.4), 1, 4000, 4);
  CHECK(std::abs(step.margin()) < 0.05);

  const auto flat = beginning_zone_check(StepFunction::constant(0.35), 0, 4000, 5);
  REQUIRE(flat.rows.size() == 1);
  CHECK(std::abs(flat.rows[0].estimate + shannon(0.35)) < 0.05);
}

TEST_CASE("poissonized rate") {
  PsiSettings s;
  const double n = 2000.0;
  const auto zero = psi_estimate(0.8, 0.0, n, s, 1);
  // Stirling's correction to log B is O(log n / n).
  CHECK(std::abs(zero.estimate + shannon(0.8)) <= 3.0 * zero.std_error + std::log(n) / n);

  const auto one = psi_estimate(0.8, 1.0, n, s, 2);
  CHECK(one.estimate + shannon(0.8) + 3.0 * one.std_error < 0.0);

  const auto deep = psi_estimate(0.5, 20.0, n, s, 3);
  CHECK(std::abs(deep.estimate + std::numbers::ln2) < 0.1);
  CHECK(deep.values.size() == s.replicates);
}

TEST_CASE("poissonized rate is reproducible") {
  PsiSettings s;
  s.replicates = 3;
  CHECK(psi_estimate(0.7, 1.0, 300.0, s, 9).values == psi_estimate(0.7, 1.0, 300.0, s, 9).values);
}

TEST_CASE("piecewise combination, degenerate cases") {
  PsiSettings s;
  s.replicates = 10;
  const auto same = psi_piecewise_check(0.7, 0.7, 0.5, 1.0, 600.0, s, 1);
  CHECK(same.agrees());
  const auto whole = psi_piecewise_check(0.2, 0.8, 1.0, 1.0, 600.0, s, 2);
  CHECK(whole.combined == whole.left.estimate);
}

TEST_CASE("end zone") {
  PsiSettings s;
  s.replicates = 10;
  const auto r = end_zone_dominance(StepFunction::constant(0.8), {0.5, 1.0, 2.0}, 2000.0, s, 1);
  CHECK_FALSE(r.half_warning);
  for (const auto& row : r.rows) CHECK(row.margin() + 3.0 * row.std_error < 0.0);

  const auto half = end_zone_dominance(StepFunction::constant(0.5), {1.0}, 500.0, s, 2);
  CHECK(half.half_warning);
  CHECK_FALSE(half.warning.empty());

  const auto deep = end_zone_dominance(StepFunction::constant(0.8), {20.0}, 2000.0, s, 3);
  CHECK(std::abs(deep.rows[0].margin() + (std::numbers::ln2 - shannon(0.8))) < 0.1);
}

TEST_CASE("end zone for a step truth goes through its pieces") {
  PsiSettings s;
  s.replicates = 5;
  const auto r = end_zone_dominance(StepFunction::two_level(0.2, 0.8, 0.5), {1.0}, 1000.0, s, 4);
  CHECK(r.method.find("piece") != std::string::npos);
  CHECK(r.rows[0].margin() + 3.0 * r.rows[0].std_error < 0.0);
}

TEST_CASE("bad set measure") {
  const auto half = StepFunction::constant(0.5);
  CHECK(badset_measure(DataSet{}, half, 0.3, 50.0).measure == 0.0);
  CHECK_THROWS(badset_measure(DataSet{}, half, 0.0, 50.0));

  // Flipping every response mirrors the success and failure conditions.
  const auto d = sample_dataset(StepFunction::constant(0.7), 800, 1);
  std::vector<Observation> flipped;
  for (const auto& o : d.points()) flipped.push_back({o.x, !o.y});
  const double a = badset_measure(d, StepFunction::constant(0.7), 0.2, 20.0).measure;
  const double b = badset_measure(DataSet(flipped), StepFunction::constant(0.3), 0.2, 20.0).measure;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  CHECK(a >= 0.0);
  CHECK(a <= 1.0);

  // All-success data under f = 1: only the count-balance condition can fire.
  const auto ones = sample_dataset(StepFunction::constant(1.0), 800, 2);
  const auto r = badset_measure(ones, StepFunction::constant(1.0), 0.2, 20.0);
  for (const auto& [lo, hi] : r.witnesses) CHECK(lo < hi);
}

TEST_CASE("bad set spread shrinks and large kappa leaves no excess") {
  const auto f = StepFunction::constant(0.5);
  auto measures = [&](std::size_t n, double kappa) {
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 20; ++s)
      v.push_back(badset_measure(sample_dataset(f, n, derive_seed(1, "bad", s)), f, 0.3, kappa).measure);
    return v;
  };
  CHECK(sd(measures(5000, 50.0)) < sd(measures(500, 50.0)));
  const auto wide = measures(5000, 100.0);
  CHECK(std::none_of(wide.begin(), wide.end(), [](double m) { return m >= 0.3; }));
}

TEST_CASE("subadditive diagnostics") {
  const std::vector<std::size_t> sizes{100, 400, 1600};
  const auto expo = subadditive_check(
      [](std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += standard_exponential(rng);
        return s;
      },
      sizes, 50, 1);
  CHECK(expo.dispersion_shrinks);
  CHECK(std::abs(expo.rows.back().mean - 1.0) < 0.02);

  const auto linear = subadditive_check(
      [](std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        return 0.3 * static_cast<double>(n) + uniform_unit(rng);
      },
      sizes, 20, 2);
  CHECK(std::abs(linear.rows.back().mean - 0.3) < 1e-3);

  PsiSettings s;
  s.replicates = 2;
  const auto psi = subadditive_check(
      [&](std::size_t n, std::uint64_t seed) {
        return static_cast<double>(n) * psi_estimate(0.8, 1.0, static_cast<double>(n), s, seed).values[0];
      },
      {250, 500, 1000, 2000}, 12, 3);
  CHECK(psi.dispersion_shrinks);
}

TEST_CASE("reports serialize with a header row") {
  PsiSettings s;
  s.replicates = 2;
  std::ostringstream out;
  write_csv(out, end_zone_dominance(StepFunction::constant(0.8), {1.0}, 200.0, s, 1));
  CHECK(out.str().find("alpha") != std::string::npos);
}

TEST_CASE("asymptotics invariants on random cases") {
  for (const auto& o : props::run_module("asymptotics", false, 20261018)) {
    INFO(props::summary(o));
    CHECK(o.passed());
  }
}
