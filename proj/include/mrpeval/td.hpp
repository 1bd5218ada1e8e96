#pragma once

#include <cstdint>
#include <vector>

#include "mrpeval/mrp.hpp"
#include "mrpeval/sampling.hpp"

// TD(0) stochastic approximation with constant, polynomial, and
// recentered-linear stepsizes, plus Polyak-Ruppert iterate averaging.

namespace mrpeval {

struct StepsizeSchedule {
    enum class Kind { Constant, Polynomial, RecenteredLinear };

    Kind kind = Kind::Constant;
    double alpha = 0.0;    // constant: alpha_k = alpha, alpha in (0, 1]
    double omega = 0.0;    // polynomial: alpha_k = k^-omega, omega in (0, 1)
    double discount = 0.0; // recentered linear: alpha_k = 1 / (1 + (1 - gamma) k)

    static StepsizeSchedule constant(double alpha);
    static StepsizeSchedule polynomial(double omega);
    static StepsizeSchedule recentered_linear(double discount);
};

double stepsize_at(const StepsizeSchedule& schedule, std::uint64_t k);

struct TdTrajectory {
    ValueFunction final_iterate; // theta_{N+1}
    ValueFunction final_average; // running mean of theta_1 .. theta_N
    std::uint64_t steps = 0;
    StepsizeSchedule schedule;
    /// theta_1 .. theta_{N+1}; populated only when the run keeps a trace.
    std::vector<ValueFunction> trace;
};

/// One TD update: draws a single observation and moves theta toward the
/// empirical operator value with weight alpha_k.
ValueFunction td_step(ObservationStream& stream, const ValueFunction& theta, double alpha_k);

/// n TD updates from theta0 = theta_1, maintaining the running average of
/// theta_1 .. theta_n incrementally. Consumes exactly n observations.
TdTrajectory run_td(ObservationStream& stream, const StepsizeSchedule& schedule,
                    std::uint64_t n, const ValueFunction& theta0, bool keep_trace = false);

} // namespace mrpeval
