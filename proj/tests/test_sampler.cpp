#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "properties.hpp"
#include "stepbayes/predictive.hpp"
#include "stepbayes/sampler.hpp"

using namespace stepbayes;

namespace {

ChainSettings quick(std::size_t iters = 20000, std::size_t burn = 2000) {
  ChainSettings s;
  s.n_iters = iters;
  s.burn_in = burn;
  s.thin = 10;
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("target of a configuration") {
  const DataSet d({{0.3, true}, {0.7, false}});
  const auto nu = HierarchyPrior::geometric(0.5);
  CHECK(log_target(ChainState(d), nu).log() == doctest::Approx(std::log(0.5) + std::log(1.0 / 6.0)));

  // A second split in the gap already holding one changes only the prior.
  const ChainState one(d, {0.5});
  const ChainState two(d, {0.5, 0.55});
  CHECK(two.log_Z().log() == one.log_Z().log());
  CHECK(log_target(two, nu).log() - log_target(one, nu).log() ==
        doctest::Approx(nu.log_mass(2) - nu.log_mass(1)).epsilon(1e-14));
  // An end gap likewise.
  const ChainState edge(d, {0.5, 0.9});
  CHECK(edge.log_Z().log() == one.log_Z().log());
  CHECK(std::isfinite(log_target(edge, nu).log()));
}

TEST_CASE("death at zero splits is a rejection") {
  const DataSet d({{0.3, true}});
  Chain chain(d, HierarchyPrior::geometric(0.5), {}, 1);
  const auto out = chain.step(MoveKind::death);
  CHECK_FALSE(out.accepted);
  CHECK(chain.state().m() == 0);
  CHECK(chain.stats()[1].proposed == 1);
}

TEST_CASE("burn-in equal to the run length keeps nothing") {
  const DataSet d({{0.3, true}});
  auto s = quick(1000, 1000);
  CHECK(run_chain(d, HierarchyPrior::geometric(0.5), s, 1).samples.empty());
}

TEST_CASE("runs are reproducible from the seed") {
  const auto d = sample_dataset(StepFunction::two_level(0.2, 0.8, 0.5), 100, 3);
  const auto nu = HierarchyPrior::geometric(0.5);
  const auto a = run_chain(d, nu, quick(), 7), b = run_chain(d, nu, quick(), 7);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].splits == b.samples[i].splits);
  CHECK(a.verifications > 0);
}

TEST_CASE("tuning must form a distribution") {
  TuningParams t;
  t.p_birth = 0.9;
  CHECK_THROWS(t.validate());
  TuningParams w;
  w.move_width = 0.0;
  CHECK_THROWS(w.validate());
}

TEST_CASE("one data point leaves the prior on m untouched") {
  const DataSet d({{0.5, true}});
  const auto nu = HierarchyPrior::geometric(0.5).truncated(12);
  auto s = quick(1000000, 10000);
  s.thin = 1000;
  const auto freq = run_chain(d, nu, s, 4).m_frequencies();
  double tv = 0.0;
  for (std::size_t m = 0; m < std::max<std::size_t>(freq.size(), 13); ++m)
    tv += std::abs((m < freq.size() ? freq[m] : 0.0) - nu.mass(m));
  CHECK(0.5 * tv <= 0.02);
}

TEST_CASE("posterior mean") {
  const auto nu = HierarchyPrior::geometric(0.5);
  const auto ones = sample_dataset(StepFunction::constant(1.0), 500, 1);
  const auto high = posterior_mean(ones, nu, quick(), 64, 2);
  for (double v : high.values()) CHECK(v >= 0.95);

  const auto flat = posterior_mean(DataSet{}, nu, quick(), 16, 3);
  for (double v : flat.values()) CHECK(v == 0.5);

  const auto coin = sample_dataset(StepFunction::constant(0.5), 2000, 4);
  const auto mid = posterior_mean(coin, nu, quick(), 100, 5);
  const auto close = std::count_if(mid.values().begin(), mid.values().end(),
                                   [](double v) { return std::abs(v - 0.5) <= 0.1; });
  CHECK(static_cast<double>(close) >= 0.9 * 101);
}

TEST_CASE("posterior l1 draws") {
  const auto nu = HierarchyPrior::geometric(0.5);
  const auto one = StepFunction::constant(1.0);
  const auto ones = sample_dataset(one, 2000, 6);
  CHECK(median(posterior_l1_samples(ones, nu, one, quick(), 7)) < 0.1);

  const auto prior = posterior_l1_samples(DataSet{}, nu, one, quick(), 8);
  CHECK_FALSE(prior.empty());
  CHECK(std::all_of(prior.begin(), prior.end(), [](double v) { return v >= 0.0 && v <= 1.0; }));
}

TEST_CASE("samples serialize one per line") {
  const auto d = sample_dataset(StepFunction::constant(0.4), 50, 9);
  const auto r = run_chain(d, HierarchyPrior::geometric(0.5), quick(2000, 0), 1);
  std::ostringstream out;
  write_samples_jsonl(out, r);
  const auto text = out.str();
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == r.samples.size());
}

TEST_CASE("sampler invariants on random cases") {
  for (const auto& o : props::run_module("sampler", false, 20261018)) {
    INFO(props::summary(o));
    CHECK(o.passed());
  }
}
