#pragma once

#include <span>

#include "stepbayes/model.hpp"

namespace stepbayes {

/// Binary Shannon entropy in nats, with H(0) = H(1) = 0.
double shannon(double p) noexcept;

/// Integral of shannon(f(x)) over [0,1]: exact for step functions,
/// composite Simpson on at least 1024 panels otherwise.
double entropy_functional(const RegressionFunction& f);

/// H(average_onto(f, u)) - H(f); nonnegative by concavity.
double concavity_gap(const RegressionFunction& f, std::span<const double> u);

}  // namespace stepbayes
