#pragma once

// Reference computations that share no code with the library's routines
// they are compared against.

#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

/// log of 1 / ((s + f + 1) C(s + f, s)) straight from the binomial.
double log_beta(std::size_t s, std::size_t f);

using RunLog = std::function<double(std::size_t s, std::size_t f)>;

/// log Z_m by summing over every way of dropping m labelled splits into the
/// n + 1 gaps: multinomial probability times the product of run weights.
double composition_log_Z(const std::vector<double>& sorted_x, const std::vector<bool>& sorted_y,
                         std::size_t m, const RunLog& run = {});

/// log sum_{k <= k_max} e^-lambda lambda^k / k! Z_k for given log Z_k.
double poisson_mixture(const std::vector<double>& log_Z, double lambda);

/// P(next draw blue | prefix) by enumerating every recharge pattern.
double urn_q_bruteforce(const std::vector<bool>& prefix, double r);

/// Probability of an exact colour sequence by recharge-pattern enumeration.
double urn_sequence_prob(const std::vector<bool>& ys, double r);

}  // namespace oracle
