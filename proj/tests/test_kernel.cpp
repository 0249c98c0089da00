#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "properties.hpp"
#include "stepbayes/kernel.hpp"

using namespace stepbayes;

TEST_CASE("log beta") {
  CHECK(log_beta(0, 0) == 0.0);
  CHECK(log_beta(1, 1) == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-15));
  CHECK(log_beta(1, 0) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(log_beta(3, 5) == log_beta(5, 3));
}

TEST_CASE("log beta stays accurate for large counts") {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const std::size_t s = rng() % 1000001, f = rng() % 1000001;
    const double ref = oracle::log_beta(s, f);
    CHECK(std::abs(log_beta(s, f) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("log factorial matches exact factorials") {
  double fact = 1.0;
  for (std::size_t k = 0; k <= 20; ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    CHECK(log_factorial(k) == doctest::Approx(std::log(fact)).epsilon(1e-15));
  }
}

TEST_CASE("predictive probability for fixed splits") {
  const DataSet a({{0.5, true}, {0.6, false}});
  CHECK(log_Z_u(a, std::vector<double>{}).log() == doctest::Approx(std::log(1.0 / 6.0)));
  const DataSet b({{0.25, true}, {0.75, false}});
  CHECK(log_Z_u(b, std::vector{0.5}).log() == doctest::Approx(std::log(0.25)));
  CHECK(log_Z_u(b, std::vector{0.1, 0.5}).log() == doctest::Approx(std::log(0.25)));
}

TEST_CASE("height posterior means") {
  const HeightPosterior hp(CellCounts{{0, 0}, {3, 1}, {0, 5}});
  CHECK(hp.mean(0) == 0.5);
  CHECK(hp.mean(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(hp.mean(2) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("height draws have the posterior moments") {
  const std::size_t n = 100000;
  const auto flat = sample_heights(HeightPosterior(CellCounts(n, CellCount{0, 0})), 1);
  double mean = 0.0;
  for (double w : flat) mean += w;
  mean /= n;
  CHECK(std::abs(mean - 0.5) < 3.0 / std::sqrt(12.0 * n));

  const auto skew = sample_heights(HeightPosterior(CellCounts(n, CellCount{3, 1})), 2);
  mean = 0.0;
  for (double w : skew) mean += w;
  mean /= n;
  const double sd = std::sqrt(4.0 * 2.0 / (36.0 * 7.0));  // Beta(4, 2)
  CHECK(std::abs(mean - 2.0 / 3.0) < 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("height draws stay strictly inside (0,1)") {
  CellCounts cells;
  for (std::size_t i = 0; i < 1000000; ++i)
    cells.push_back(i % 3 == 0 ? CellCount{0, 2000} : i % 3 == 1 ? CellCount{2000, 0} : CellCount{1, 0});
  const auto w = sample_heights(HeightPosterior(std::move(cells)), 3);
  CHECK(std::all_of(w.begin(), w.end(), [](double x) { return x > 0.0 && x < 1.0; }));
}

TEST_CASE("height draws are reproducible") {
  const HeightPosterior hp(CellCounts{{2, 3}, {7, 1}});
  CHECK(sample_heights(hp, 9) == sample_heights(hp, 9));
}

TEST_CASE("kernel invariants on random cases") {
  for (const auto& o : props::run_module("kernel", false, 20261018)) {
    INFO(props::summary(o));
    CHECK(o.passed());
  }
}
