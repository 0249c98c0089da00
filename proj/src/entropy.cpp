#include "stepbayes/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace stepbayes {

namespace {

double x_log_x(double x) noexcept { return x < 1e-300 ? 0.0 : x * std::log(x); }

}  // namespace

double shannon(double p) noexcept { return -x_log_x(p) - x_log_x(1.0 - p); }

double entropy_functional(const RegressionFunction& f) {
  if (const auto* s = std::get_if<StepFunction>(&f)) {
    double h = 0.0;
    for (std::size_t i = 0; i < s->cells(); ++i)
      h += (s->cell_end(i) - s->cell_begin(i)) * shannon(s->levels()[i]);
    return h;
  }
  // H o f is smooth inside each grid interval, so Simpson runs per interval.
  const auto& g = std::get<GridFunction>(f);
  const std::size_t K = g.intervals();
  std::size_t panels = std::max<std::size_t>(2, (1024 + K - 1) / K);
  if (panels % 2) ++panels;
  const auto v = g.values();
  const double width = 1.0 / static_cast<double>(K);
  const double step = 1.0 / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    const double a = v[i], b = v[i + 1];
    double s = shannon(a) + shannon(b);
    for (std::size_t k = 1; k < panels; ++k) {
      const double t = static_cast<double>(k) * step;
      s += (k % 2 ? 4.0 : 2.0) * shannon(a + t * (b - a));
    }
    total += s * step * width / 3.0;
  }
  return total;
}

double concavity_gap(const RegressionFunction& f, std::span<const double> u) {
  return entropy_functional(average_onto(f, u)) - entropy_functional(f);
}

}  // namespace stepbayes
