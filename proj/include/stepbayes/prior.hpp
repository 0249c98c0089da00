#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stepbayes {

/// Distribution of the number of split points.
class HierarchyPrior {
 public:
  enum class Kind { geometric, poisson, table };

  /// nu_m = theta (1 - theta)^m, m >= 0.
  static HierarchyPrior geometric(double theta);
  static HierarchyPrior poisson(double mean);
  /// Finite support {0, .., weights.size() - 1}; weights are normalized.
  static HierarchyPrior table(std::vector<double> weights);
  static HierarchyPrior point_mass(std::size_t m);

  /// Parses "geometric:0.5", "poisson:3", "table:1,2,1", "point:3".
  static HierarchyPrior parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }

  /// log nu_m; -inf outside the support.
  double log_mass(std::size_t m) const noexcept;
  double mass(std::size_t m) const noexcept;
  /// Total mass on {0, .., m_max}.
  double mass_through(std::size_t m_max) const noexcept;
  /// Largest m with positive mass, or SIZE_MAX for infinite support.
  std::size_t support_max() const noexcept;

  /// Restriction to {0, .., m_max}, renormalized.
  HierarchyPrior truncated(std::size_t m_max) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::geometric;
  double parameter_ = 0.5;
  std::vector<double> log_table_;
};

}  // namespace stepbayes
