#include "mrpeval/td.hpp"

#include <cmath>

#include "mrpeval/errors.hpp"

namespace mrpeval {

StepsizeSchedule StepsizeSchedule::constant(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ValidationError("stepsize: constant alpha must lie in (0, 1]");
    StepsizeSchedule s;
    s.kind = Kind::Constant;
    s.alpha = alpha;
    return s;
}

StepsizeSchedule StepsizeSchedule::polynomial(double omega) {
    if (!(omega > 0.0 && omega < 1.0))
        throw ValidationError("stepsize: polynomial omega must lie in (0, 1)");
    StepsizeSchedule s;
    s.kind = Kind::Polynomial;
    s.omega = omega;
    return s;
}

StepsizeSchedule StepsizeSchedule::recentered_linear(double discount) {
    if (!(discount >= 0.0 && discount < 1.0))
        throw ValidationError("stepsize: recentered-linear discount must lie in [0, 1)");
    StepsizeSchedule s;
    s.kind = Kind::RecenteredLinear;
    s.discount = discount;
    return s;
}

double stepsize_at(const StepsizeSchedule& schedule, std::uint64_t k) {
    if (k < 1) throw ValidationError("stepsize_at: step index must be >= 1");
    switch (schedule.kind) {
    case StepsizeSchedule::Kind::Constant:
        return schedule.alpha;
    case StepsizeSchedule::Kind::Polynomial:
        return std::pow(static_cast<double>(k), -schedule.omega);
    case StepsizeSchedule::Kind::RecenteredLinear:
        return 1.0 / (1.0 + (1.0 - schedule.discount) * static_cast<double>(k));
    }
    throw ValidationError("stepsize_at: unknown schedule kind");
}

ValueFunction td_step(ObservationStream& stream, const ValueFunction& theta, double alpha_k) {
    if (!(alpha_k > 0.0 && alpha_k <= 1.0))
        throw ValidationError("td_step: stepsize must lie in (0, 1]");
    const Observation obs = stream.next();
    const ValueFunction target =
        empirical_operator(stream.model().mrp(), obs.transitions, obs.rewards, theta);
    ValueFunction out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
        out[i] = (1.0 - alpha_k) * theta[i] + alpha_k * target[i];
    return out;
}

TdTrajectory run_td(ObservationStream& stream, const StepsizeSchedule& schedule,
                    std::uint64_t n, const ValueFunction& theta0, bool keep_trace) {
    if (n < 1) throw ValidationError("run_td: n must be >= 1");
    if (theta0.size() != stream.model().dim())
        throw ValidationError("run_td: theta0 dimension mismatch");

    TdTrajectory traj;
    traj.schedule = schedule;
    traj.steps = n;

    ValueFunction theta = theta0;
    ValueFunction average(theta.size(), 0.0);
    if (keep_trace) traj.trace.push_back(theta);

    for (std::uint64_t k = 1; k <= n; ++k) {
        // the average covers the pre-update iterates theta_1 .. theta_n
        const double inv_k = 1.0 / static_cast<double>(k);
        for (std::size_t i = 0; i < theta.size(); ++i)
            average[i] += (theta[i] - average[i]) * inv_k;
        theta = td_step(stream, theta, stepsize_at(schedule, k));
        if (keep_trace) traj.trace.push_back(theta);
    }

    traj.final_iterate = std::move(theta);
    traj.final_average = std::move(average);
    return traj;
}

} // namespace mrpeval
