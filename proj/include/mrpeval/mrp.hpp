#pragma once

#include <cstdint>

#include "mrpeval/linalg.hpp"

// Tabular Markov reward processes: validation, exact value-function solves,
// the Bellman operator, the span seminorm, and the two-state experiment
// family parametrized by (discount, lambda).

namespace mrpeval {

using ValueFunction = Vector;

struct Mrp {
    Matrix transitions;        // D x D row-stochastic
    Vector rewards;            // length D
    double discount = 0.0;     // gamma in [0, 1)
    double reward_noise = 0.0; // sigma_r >= 0

    std::size_t dim() const { return rewards.size(); }
};

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kNegativeEntryTolerance = -1e-15;

/// Checks all structural invariants. Entries in [-1e-15, 0) are treated as
/// serialization round-off: clamped to zero and the row renormalized. Throws
/// ValidationError on anything worse.
Mrp validate(Mrp mrp);

/// Exact value function: theta solving (I - gamma P) theta = r by dense LU.
ValueFunction solve_value_function(const Mrp& mrp);

/// r + gamma P theta.
ValueFunction bellman_apply(const Mrp& mrp, const ValueFunction& theta);

/// max_j theta_j - min_j theta_j.
double span_seminorm(const ValueFunction& theta);

/// Scalarization of the two-state chain: stay probability p, unit reward
/// scale, and tail reward fraction tau, all derived from (gamma, lambda).
struct FamilyParams {
    double gamma = 0.0;
    double lambda = 0.0;
    double p = 0.0;         // (4 gamma - 1) / (3 gamma)
    double nu_scalar = 1.0; // reward scale in state 1
    double tau = 0.0;       // 1 - (1 - gamma)^lambda
};

FamilyParams family_params(double gamma, double lambda);

/// The two-state chain: state 1 stays with probability p and otherwise falls
/// into the absorbing state 2; rewards (1, tau) are deterministic.
Mrp two_state_family(double gamma, double lambda);

/// Same chain with Gaussian reward noise added, for exercising reward-noise
/// paths.
Mrp two_state_family(double gamma, double lambda, double reward_noise);

/// ceil(8 / (1 - gamma)^exponent) for exponent in {2, 3}, with a tiny
/// backoff so that exactly-representable quotients are not pushed up by
/// floating-point round-off.
std::uint64_t sample_size_rule(double gamma, int exponent);

} // namespace mrpeval
