#include "mrpeval/complexity.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mrpeval/errors.hpp"

namespace mrpeval {

namespace {

Matrix resolvent_inverse(const Mrp& mrp) {
    const std::size_t d = mrp.dim();
    Matrix system(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            system(i, j) = (i == j ? 1.0 : 0.0) - mrp.discount * mrp.transitions(i, j);
    return invert(system);
}

} // namespace

Vector sigma_diag(const Mrp& mrp, const ValueFunction& theta) {
    const std::size_t d = mrp.dim();
    if (theta.size() != d) throw ValidationError("sigma_diag: dimension mismatch");
    Vector out(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < d; ++j) mean += mrp.transitions(i, j) * theta[j];
        double var = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = theta[j] - mean;
            var += mrp.transitions(i, j) * dev * dev;
        }
        out[i] = var;
    }
    return out;
}

ComplexityProfile complexity_profile(const Mrp& mrp, const ValueFunction& theta) {
    ComplexityProfile profile;
    profile.sigma_sq = sigma_diag(mrp, theta);
    const Matrix u = resolvent_inverse(mrp);
    const std::size_t d = mrp.dim();

    double best = -1.0;
    for (std::size_t row = 0; row < d; ++row) {
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i) acc += u(row, i) * u(row, i) * profile.sigma_sq[i];
        if (acc > best) {
            best = acc;
            profile.argmax_row = row;
        }
    }
    profile.nu = std::sqrt(best);
    profile.rho = mrp.reward_noise * max_row_two_norm(u);
    profile.span = span_seminorm(theta);
    profile.b = profile.span / (1.0 - mrp.discount);
    return profile;
}

double lower_bound_value(const ComplexityProfile& profile, double gamma, std::uint64_t n) {
    if (n < 1) throw ValidationError("lower_bound_value: n must be >= 1");
    return (gamma * profile.nu + profile.rho) / std::sqrt(static_cast<double>(n));
}

double sample_threshold_n0(const Mrp& mrp, const ComplexityProfile& profile) {
    const double gap = 1.0 - mrp.discount;
    const double discount_term = (mrp.discount * mrp.discount) / (gap * gap);
    if (profile.nu == 0.0) {
        if (profile.b > 0.0) return std::numeric_limits<double>::infinity();
        return discount_term;
    }
    const double ratio = (profile.b * profile.b) / (profile.nu * profile.nu);
    return std::max(discount_term, ratio);
}

Matrix asymptotic_covariance(const Mrp& mrp, const ValueFunction& theta_star) {
    const std::size_t d = mrp.dim();
    const Vector sq = sigma_diag(mrp, theta_star);
    const Matrix u = resolvent_inverse(mrp);
    const double g2 = mrp.discount * mrp.discount;
    const double r2 = mrp.reward_noise * mrp.reward_noise;
    Matrix cov(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                acc += u(i, k) * (g2 * sq[k] + r2) * u(j, k);
            cov(i, j) = acc;
            cov(j, i) = acc;
        }
    }
    return cov;
}

AsymptoticRisk gaussian_linf_expectation(const Matrix& cov, std::uint64_t samples,
                                         RandomSource& rng) {
    const std::size_t d = cov.rows();
    if (cov.cols() != d) throw ValidationError("gaussian_linf_expectation: cov must be square");
    if (samples < 1) throw ValidationError("gaussian_linf_expectation: samples must be >= 1");

    double scale = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) scale = std::max(scale, std::fabs(cov(i, j)));
    const double sym_tol = 1e-10 * std::max(1.0, scale);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (std::fabs(cov(i, j) - cov(j, i)) > sym_tol)
                throw ValidationError("gaussian_linf_expectation: covariance is not symmetric");

    SymmetricEigen eigen = symmetric_eigen(cov);
    double max_eig = 0.0;
    for (double v : eigen.values) max_eig = std::max(max_eig, v);
    const double psd_slack = 1e-10 * std::max(1.0, max_eig);
    for (double& v : eigen.values) {
        if (v < -psd_slack)
            throw ValidationError("gaussian_linf_expectation: covariance is not PSD (eigenvalue " +
                                  std::to_string(v) + ")");
        v = v < 0.0 ? 0.0 : v;
    }

    // factor = V diag(sqrt(lambda)); Z = factor * g with g ~ N(0, I)
    Matrix factor(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            factor(i, j) = eigen.vectors(i, j) * std::sqrt(eigen.values[j]);

    double sum = 0.0, sum_c = 0.0;     // Kahan-compensated
    double sum_sq = 0.0, sum_sq_c = 0.0;
    Vector gauss(d), z(d);
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < d; ++j) gauss[j] = rng.next_normal();
        double maxabs = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += factor(i, j) * gauss[j];
            maxabs = std::max(maxabs, std::fabs(acc));
        }
        double y = maxabs - sum_c;
        double t = sum + y;
        sum_c = (t - sum) - y;
        sum = t;
        y = maxabs * maxabs - sum_sq_c;
        t = sum_sq + y;
        sum_sq_c = (t - sum_sq) - y;
        sum_sq = t;
    }

    AsymptoticRisk risk;
    risk.covariance = cov;
    risk.mc_samples = samples;
    const double n = static_cast<double>(samples);
    risk.linf_mean = sum / n;
    if (samples > 1) {
        const double var = std::max(0.0, (sum_sq - n * risk.linf_mean * risk.linf_mean) / (n - 1.0));
        risk.mc_stderr = std::sqrt(var / n);
    }
    return risk;
}

HardAlternative construct_hard_alternative(const Mrp& mrp, std::uint64_t n) {
    const std::size_t d = mrp.dim();
    const ValueFunction theta_star = solve_value_function(mrp);
    const ComplexityProfile profile = complexity_profile(mrp, theta_star);
    if (profile.nu == 0.0)
        throw ValidationError(
            "construct_hard_alternative: nu is zero, the construction is undefined");
    const double threshold = sample_threshold_n0(mrp, profile);
    if (static_cast<double>(n) < threshold)
        throw ValidationError("construct_hard_alternative: n = " + std::to_string(n) +
                              " is below the threshold " + std::to_string(threshold));

    const Matrix u = resolvent_inverse(mrp);
    const Vector mean_next = mat_vec(mrp.transitions, theta_star); // P theta*
    const double step = 1.0 / (profile.nu * std::sqrt(2.0 * static_cast<double>(n)));

    HardAlternative alt;
    alt.matrix = Matrix(d, d);
    alt.target_row = profile.argmax_row;
    alt.sample_size = n;
    double chi = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double u_li = u(alt.target_row, i);
        for (std::size_t j = 0; j < d; ++j) {
            const double p = mrp.transitions(i, j);
            const double delta = step * p * u_li * (theta_star[j] - mean_next[i]);
            alt.matrix(i, j) = p + delta;
            if (p > 0.0) chi += delta * delta / p;
        }
    }
    alt.chi_square = chi;
    return alt;
}

double chi_square_divergence(const Mrp& p_from, const Mrp& p_to) {
    const std::size_t d = p_from.dim();
    if (p_to.dim() != d) throw ValidationError("chi_square_divergence: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double p = p_from.transitions(i, j);
            const double delta = p_to.transitions(i, j) - p;
            if (p == 0.0) {
                if (delta != 0.0) return std::numeric_limits<double>::infinity();
                continue;
            }
            acc += delta * delta / p;
        }
    }
    return acc;
}

} // namespace mrpeval
