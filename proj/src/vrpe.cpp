#include "mrpeval/vrpe.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mrpeval/errors.hpp"

namespace mrpeval {

std::uint64_t VrpeConfig::total_samples() const {
    std::uint64_t total = epochs * epoch_length;
    for (std::uint64_t n : recentering_sizes) total += n;
    return total;
}

VrpeConfig vrpe_parameters(std::uint64_t total_n, std::size_t d, double delta, double gamma,
                           const StepsizeSchedule& schedule, BudgetMode mode) {
    if (total_n < 2) throw ValidationError("vrpe_parameters: budget too small");
    if (!(delta > 0.0 && delta < 1.0))
        throw ValidationError("vrpe_parameters: delta must lie in (0, 1)");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ValidationError("vrpe_parameters: discount must lie in [0, 1)");
    if (d < 1) throw ValidationError("vrpe_parameters: dimension must be >= 1");

    const double n_real = static_cast<double>(total_n);
    const double gap = 1.0 - gamma;
    const double log_inner = std::log((8.0 * static_cast<double>(d) / delta) * std::log(n_real));
    const double m_real = std::log2(n_real * gap * gap / (8.0 * log_inner));

    VrpeConfig config;
    config.delta = delta;
    config.schedule = schedule;
    config.budget_mode = mode;
    config.total_budget = total_n;
    long long m = std::isfinite(m_real) ? std::llround(m_real) : 0;
    if (m < 1) m = 1;
    config.epochs = static_cast<std::uint64_t>(m);
    config.epoch_length = total_n / (2 * config.epochs);
    if (config.epoch_length < 1)
        throw ValidationError("vrpe_parameters: budget too small for even one epoch step");

    config.recentering_sizes.resize(config.epochs);
    if (mode == BudgetMode::Budgeted) {
        const std::uint64_t half = total_n / 2;
        const unsigned __int128 denom =
            (static_cast<unsigned __int128>(1) << (config.epochs + 1)) - 2;
        for (std::uint64_t em = 1; em <= config.epochs; ++em) {
            const unsigned __int128 numer = static_cast<unsigned __int128>(half) << em;
            const std::uint64_t size = static_cast<std::uint64_t>(numer / denom);
            if (size < 1)
                throw ValidationError("vrpe_parameters: budget too small for recentering");
            config.recentering_sizes[em - 1] = size;
        }
    } else {
        const std::vector<double> sizes =
            paper_recentering_sizes(config.epochs, d, delta, gamma);
        double spent = 0.0;
        for (std::uint64_t em = 0; em < config.epochs; ++em) {
            spent += sizes[em];
            config.recentering_sizes[em] = static_cast<std::uint64_t>(sizes[em]);
        }
        if (spent > n_real / 2.0)
            throw ValidationError(
                "vrpe_parameters: paper-constant recentering sizes exceed half the budget (" +
                std::to_string(spent) + " > " + std::to_string(n_real / 2.0) +
                "); use budgeted mode");
    }
    return config;
}

std::vector<double> paper_recentering_sizes(std::uint64_t epochs, std::size_t d, double delta,
                                            double gamma) {
    const double gap = 1.0 - gamma;
    const double log_term =
        std::log(8.0 * static_cast<double>(epochs) * static_cast<double>(d) / delta);
    std::vector<double> sizes(epochs);
    for (std::uint64_t em = 1; em <= epochs; ++em)
        sizes[em - 1] =
            std::ceil(std::ldexp(16.0 * 81.0 * log_term / (gap * gap), static_cast<int>(em)));
    return sizes;
}

EpochLengthReport check_epoch_length(const VrpeConfig& config, std::size_t d,
                                     std::uint64_t total_n, double gamma) {
    EpochLengthReport report;
    report.kind = config.schedule.kind;
    report.actual_k = config.epoch_length;
    const double gap = 1.0 - gamma;
    const double log_term =
        std::log(8.0 * static_cast<double>(total_n) * static_cast<double>(d) / config.delta);

    switch (config.schedule.kind) {
    case StepsizeSchedule::Kind::RecenteredLinear:
        report.required_k = log_term / (gap * gap * gap);
        break;
    case StepsizeSchedule::Kind::Polynomial: {
        const double omega = config.schedule.omega;
        const double exponent = std::max(1.0 / (1.0 - omega), 2.0 / omega);
        report.required_k = log_term * std::pow(1.0 / gap, exponent);
        break;
    }
    case StepsizeSchedule::Kind::Constant: {
        report.alpha = config.schedule.alpha;
        report.alpha_cap = gap * gap / ((25.0 * 1024.0) * log_term); // 5^2 * 32^2 = 25600
        report.alpha_ok = report.alpha <= report.alpha_cap;
        report.required_k = 1.0 / std::log(1.0 / (1.0 - report.alpha * gap));
        break;
    }
    }
    report.k_ok = static_cast<double>(report.actual_k) >= report.required_k;
    report.passed = report.k_ok && report.alpha_ok;
    return report;
}

ValueFunction monte_carlo_recenter(ObservationStream& stream, const ValueFunction& theta_bar,
                                   std::uint64_t n_m) {
    if (n_m < 1) throw ValidationError("monte_carlo_recenter: n_m must be >= 1");
    const Mrp& mrp = stream.model().mrp();
    if (theta_bar.size() != mrp.dim())
        throw ValidationError("monte_carlo_recenter: dimension mismatch");

    ValueFunction mean(theta_bar.size(), 0.0);
    for (std::uint64_t i = 1; i <= n_m; ++i) {
        const Observation obs = stream.next();
        const ValueFunction value = empirical_operator(mrp, obs.transitions, obs.rewards, theta_bar);
        const double inv_i = 1.0 / static_cast<double>(i);
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += (value[j] - mean[j]) * inv_i;
    }
    return mean;
}

ValueFunction vrpe_update(ObservationStream& stream, const ValueFunction& theta, double alpha,
                          const ValueFunction& theta_bar,
                          const ValueFunction& recentered_target) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("vrpe_update: stepsize must lie in (0, 1)");
    const Mrp& mrp = stream.model().mrp();
    const std::size_t dim = mrp.dim();
    if (theta.size() != dim || theta_bar.size() != dim || recentered_target.size() != dim)
        throw ValidationError("vrpe_update: dimension mismatch");

    // one draw, reused for both operator evaluations
    const Observation obs = stream.next();
    const ValueFunction at_theta = empirical_operator(mrp, obs.transitions, obs.rewards, theta);
    const ValueFunction at_bar = empirical_operator(mrp, obs.transitions, obs.rewards, theta_bar);

    ValueFunction out(dim);
    for (std::size_t i = 0; i < dim; ++i)
        out[i] = (1.0 - alpha) * theta[i] +
                 alpha * (at_theta[i] - at_bar[i] + recentered_target[i]);
    return out;
}

ValueFunction run_epoch(ObservationStream& stream, const ValueFunction& theta_bar,
                        std::uint64_t k, std::uint64_t n_m, const StepsizeSchedule& schedule) {
    if (k < 1) throw ValidationError("run_epoch: epoch length must be >= 1");
    const ValueFunction recentered = monte_carlo_recenter(stream, theta_bar, n_m);
    ValueFunction theta = theta_bar;
    for (std::uint64_t step = 1; step <= k; ++step)
        theta = vrpe_update(stream, theta, stepsize_at(schedule, step), theta_bar, recentered);
    return theta;
}

ValueFunction run_vrpe(ObservationStream& stream, const VrpeConfig& config,
                       const ValueFunction& theta0) {
    if (config.epochs < 1) throw ValidationError("run_vrpe: config must have at least one epoch");
    if (config.recentering_sizes.size() != config.epochs)
        throw ValidationError("run_vrpe: config has wrong number of recentering sizes");

    const std::uint64_t start = stream.drawn();
    ValueFunction theta = theta0;
    for (std::uint64_t em = 0; em < config.epochs; ++em)
        theta = run_epoch(stream, theta, config.epoch_length, config.recentering_sizes[em],
                          config.schedule);

    const std::uint64_t used = stream.drawn() - start;
    if (used != config.total_samples())
        throw std::logic_error("run_vrpe: sample accounting violation: used " +
                               std::to_string(used) + ", expected " +
                               std::to_string(config.total_samples()));
    return theta;
}

} // namespace mrpeval
