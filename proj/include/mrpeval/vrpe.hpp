#pragma once

#include <cstdint>
#include <vector>

#include "mrpeval/sampling.hpp"
#include "mrpeval/td.hpp"

// Variance-reduced policy evaluation: epochs of recentered stochastic
// approximation. Each epoch first estimates the Bellman image of its
// recentering vector by Monte Carlo, then runs inner updates whose noise
// cancels at the recentering point.

namespace mrpeval {

enum class BudgetMode {
    /// Geometric-doubling recentering sizes renormalized so they spend at
    /// most half of the total budget. Default; usable at desk scale.
    Budgeted,
    /// Literal constants from the analysis; the sizes typically exceed any
    /// desk-scale budget and then construction fails loudly.
    PaperConstants,
};

struct VrpeConfig {
    std::uint64_t epochs = 0;       // M
    std::uint64_t epoch_length = 0; // K, inner steps per epoch
    std::vector<std::uint64_t> recentering_sizes; // N_1 .. N_M, doubling
    double delta = 0.0;             // failure probability
    StepsizeSchedule schedule;
    BudgetMode budget_mode = BudgetMode::Budgeted;
    std::uint64_t total_budget = 0; // N

    std::uint64_t total_samples() const; // M*K + sum of recentering sizes
};

/// Derives (M, K, N_1..N_M) from the total budget:
///   M = round(log2( N (1-gamma)^2 / (8 ln((8 D / delta) ln N)) )), at least 1
///   K = floor(N / (2 M))
///   budgeted:       N_m = floor((N/2) 2^m / (2^{M+1} - 2))
///   paper constants: N_m = ceil(2^m * 4^2 * 9^2 * ln(8 M D / delta) / (1-gamma)^2)
/// Throws when the budget cannot fund the configuration. The literal sizes
/// sum to hundreds of times any budget, so paper-constants mode always
/// reports the overflow rather than running.
VrpeConfig vrpe_parameters(std::uint64_t total_n, std::size_t d, double delta, double gamma,
                           const StepsizeSchedule& schedule, BudgetMode mode);

/// The literal recentering-size sequence for a given epoch count.
std::vector<double> paper_recentering_sizes(std::uint64_t epochs, std::size_t d, double delta,
                                            double gamma);

/// Diagnostic (unit constants) for the stepsize-dependent epoch-length
/// requirements. Advisory only: runs may proceed below the thresholds.
struct EpochLengthReport {
    StepsizeSchedule::Kind kind = StepsizeSchedule::Kind::Constant;
    double required_k = 0.0;
    std::uint64_t actual_k = 0;
    bool k_ok = false;
    double alpha = 0.0;     // constant stepsize only
    double alpha_cap = 0.0; // constant stepsize only
    bool alpha_ok = true;
    bool passed = false;
};
EpochLengthReport check_epoch_length(const VrpeConfig& config, std::size_t d,
                                     std::uint64_t total_n, double gamma);

/// Mean of n_m independent empirical-operator evaluations at theta_bar.
/// Consumes exactly n_m observations.
ValueFunction monte_carlo_recenter(ObservationStream& stream, const ValueFunction& theta_bar,
                                   std::uint64_t n_m);

/// One recentered update. A single fresh observation is shared by both
/// empirical-operator evaluations; their reward parts cancel and the
/// transition parts cancel at theta = theta_bar.
ValueFunction vrpe_update(ObservationStream& stream, const ValueFunction& theta, double alpha,
                          const ValueFunction& theta_bar,
                          const ValueFunction& recentered_target);

/// One epoch: recenter at theta_bar with n_m samples, then k inner updates
/// with the stepsize index restarting at 1. Consumes exactly n_m + k samples.
ValueFunction run_epoch(ObservationStream& stream, const ValueFunction& theta_bar,
                        std::uint64_t k, std::uint64_t n_m, const StepsizeSchedule& schedule);

/// Full run: chains config.epochs epochs, feeding each output in as the next
/// recentering vector. Total samples consumed are audited against the config.
ValueFunction run_vrpe(ObservationStream& stream, const VrpeConfig& config,
                       const ValueFunction& theta0);

} // namespace mrpeval
