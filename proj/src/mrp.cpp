#include "mrpeval/mrp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrpeval/errors.hpp"

namespace mrpeval {

Mrp validate(Mrp mrp) {
    const std::size_t d = mrp.rewards.size();
    if (d < 1) throw ValidationError("mrp: dimension must be at least 1");
    if (mrp.transitions.rows() != d || mrp.transitions.cols() != d)
        throw ValidationError("mrp: transition matrix must be " + std::to_string(d) + "x" +
                              std::to_string(d));
    if (!(mrp.discount >= 0.0 && mrp.discount < 1.0))
        throw ValidationError("mrp: discount must lie in [0, 1)");
    if (!(mrp.reward_noise >= 0.0)) throw ValidationError("mrp: reward_noise must be >= 0");
    for (double r : mrp.rewards)
        if (!std::isfinite(r)) throw ValidationError("mrp: rewards must be finite");

    for (std::size_t i = 0; i < d; ++i) {
        double sum = 0.0;
        bool clamped = false;
        for (std::size_t j = 0; j < d; ++j) {
            double& entry = mrp.transitions(i, j);
            if (!std::isfinite(entry)) throw ValidationError("mrp: transitions must be finite");
            if (entry < kNegativeEntryTolerance)
                throw ValidationError("mrp: negative transition entry at row " +
                                      std::to_string(i) + ", column " + std::to_string(j));
            if (entry < 0.0) {
                entry = 0.0;
                clamped = true;
            }
            sum += entry;
        }
        if (std::fabs(sum - 1.0) > kRowSumTolerance)
            throw ValidationError("mrp: row " + std::to_string(i) + " sums to " +
                                  std::to_string(sum) + ", expected 1");
        if (clamped) {
            for (std::size_t j = 0; j < d; ++j) mrp.transitions(i, j) /= sum;
        }
    }
    return mrp;
}

ValueFunction solve_value_function(const Mrp& mrp) {
    const std::size_t d = mrp.dim();
    Matrix system(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            system(i, j) = (i == j ? 1.0 : 0.0) - mrp.discount * mrp.transitions(i, j);
    ValueFunction theta = solve_linear(system, mrp.rewards);

    const double residual = linf_distance(theta, bellman_apply(mrp, theta));
    if (residual > 1e-10 * (1.0 + linf_norm(theta)))
        throw ValidationError("solve_value_function: residual " + std::to_string(residual) +
                              " exceeds tolerance");
    return theta;
}

ValueFunction bellman_apply(const Mrp& mrp, const ValueFunction& theta) {
    if (theta.size() != mrp.dim())
        throw ValidationError("bellman_apply: dimension mismatch");
    ValueFunction out(mrp.dim());
    for (std::size_t i = 0; i < mrp.dim(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < mrp.dim(); ++j) acc += mrp.transitions(i, j) * theta[j];
        out[i] = mrp.rewards[i] + mrp.discount * acc;
    }
    return out;
}

double span_seminorm(const ValueFunction& theta) {
    if (theta.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(theta.begin(), theta.end());
    return *hi - *lo;
}

FamilyParams family_params(double gamma, double lambda) {
    if (!(gamma > 0.25 && gamma < 1.0))
        throw ValidationError("two_state_family: discount must lie in (1/4, 1)");
    if (!(lambda >= 0.0)) throw ValidationError("two_state_family: lambda must be >= 0");
    FamilyParams fp;
    fp.gamma = gamma;
    fp.lambda = lambda;
    fp.p = (4.0 * gamma - 1.0) / (3.0 * gamma);
    fp.nu_scalar = 1.0;
    fp.tau = 1.0 - std::pow(1.0 - gamma, lambda);
    return fp;
}

Mrp two_state_family(double gamma, double lambda) {
    return two_state_family(gamma, lambda, 0.0);
}

Mrp two_state_family(double gamma, double lambda, double reward_noise) {
    const FamilyParams fp = family_params(gamma, lambda);
    Mrp mrp;
    mrp.transitions = Matrix(2, 2);
    mrp.transitions(0, 0) = fp.p;
    mrp.transitions(0, 1) = 1.0 - fp.p;
    mrp.transitions(1, 0) = 0.0;
    mrp.transitions(1, 1) = 1.0;
    mrp.rewards = {fp.nu_scalar, fp.nu_scalar * fp.tau};
    mrp.discount = gamma;
    mrp.reward_noise = reward_noise;
    return validate(std::move(mrp));
}

std::uint64_t sample_size_rule(double gamma, int exponent) {
    if (exponent != 2 && exponent != 3)
        throw ValidationError("sample_size_rule: exponent must be 2 or 3");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ValidationError("sample_size_rule: discount must lie in (0, 1)");
    const double value = 8.0 / std::pow(1.0 - gamma, exponent);
    // back off by ~1e-9 relative so that e.g. gamma = 0.9 yields exactly 800
    const double adjusted = value - 1e-9 * std::max(1.0, value);
    return static_cast<std::uint64_t>(std::ceil(adjusted));
}

} // namespace mrpeval
