#include <doctest.h>

#include <cmath>
#include <limits>

#include "mrpeval/complexity.hpp"
#include "mrpeval/errors.hpp"
#include "support.hpp"

using namespace mrpeval;
using testsupport::random_mrp;

namespace {

Mrp two_cycle(double gamma, Vector rewards) {
    Mrp mrp;
    mrp.transitions = Matrix(2, 2);
    mrp.transitions(0, 1) = 1.0;
    mrp.transitions(1, 0) = 1.0;
    mrp.rewards = std::move(rewards);
    mrp.discount = gamma;
    return validate(std::move(mrp));
}

Mrp identity_mrp(std::size_t d, double gamma, Vector rewards, double sigma_r = 0.0) {
    Mrp mrp;
    mrp.transitions = Matrix::identity(d);
    mrp.rewards = std::move(rewards);
    mrp.discount = gamma;
    mrp.reward_noise = sigma_r;
    return validate(std::move(mrp));
}

} // namespace

TEST_CASE("sigma_diag vanishes for point-mass rows and constant vectors") {
    const Mrp cyc = two_cycle(0.9, {1.0, -1.0});
    const Vector zero = sigma_diag(cyc, {3.0, -2.0});
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);

    RandomSource rng(41, 0);
    const Mrp rnd = random_mrp(rng, 5, 0.8, 0.0);
    const Vector constant = sigma_diag(rnd, Vector(5, 7.0));
    for (double v : constant) CHECK(std::fabs(v) < 1e-18);
}

TEST_CASE("family sigma_diag matches the Bernoulli variance") {
    const Mrp mrp = two_state_family(0.9, 1.0);
    const double p = mrp.transitions(0, 0);
    const ValueFunction theta = solve_value_function(mrp);
    const Vector sq = sigma_diag(mrp, theta);
    const double gap = theta[0] - theta[1];
    CHECK(sq[0] == doctest::Approx(p * (1.0 - p) * gap * gap).epsilon(1e-12));
    CHECK(sq[0] == doctest::Approx(0.020061728395061728).epsilon(1e-9));
    CHECK(sq[1] == 0.0);
}

TEST_CASE("complexity profile on the family") {
    const Mrp mrp = two_state_family(0.9, 1.0);
    const ValueFunction theta = solve_value_function(mrp);
    const ComplexityProfile profile = complexity_profile(mrp, theta);
    CHECK(profile.nu == doctest::Approx(1.062295731998492).epsilon(1e-9));
    CHECK(profile.rho == 0.0);
    CHECK(profile.b == doctest::Approx(7.5).epsilon(1e-9));
    CHECK(profile.span == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(profile.argmax_row == 0);
}

TEST_CASE("rho reduces to sigma_r when the discount is zero") {
    const Mrp mrp = identity_mrp(3, 0.0, {0.0, 1.0, 2.0}, 1.0);
    const ComplexityProfile profile = complexity_profile(mrp, solve_value_function(mrp));
    CHECK(profile.rho == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lower bound functional") {
    ComplexityProfile zero;
    CHECK(lower_bound_value(zero, 0.9, 100) == 0.0);

    const Mrp mrp = two_state_family(0.9, 1.0);
    const ComplexityProfile profile = complexity_profile(mrp, solve_value_function(mrp));
    CHECK(lower_bound_value(profile, 0.9, 8000) == doctest::Approx(0.010689144).epsilon(1e-6));

    const double once = lower_bound_value(profile, 0.9, 4000);
    const double twice = lower_bound_value(profile, 0.9, 8000);
    CHECK(twice == doctest::Approx(once / std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(lower_bound_value(profile, 0.9, 0), ValidationError);
}

TEST_CASE("sample threshold") {
    // constant value function: both nu and b vanish, discount term remains
    const Mrp flat = identity_mrp(2, 0.9, {0.5, 0.5});
    const ComplexityProfile fp = complexity_profile(flat, solve_value_function(flat));
    CHECK(fp.nu == 0.0);
    CHECK(sample_threshold_n0(flat, fp) == doctest::Approx(81.0).epsilon(1e-9));

    // family: the variance ratio is below the discount term
    const Mrp fam = two_state_family(0.9, 1.0);
    const ComplexityProfile famp = complexity_profile(fam, solve_value_function(fam));
    CHECK(famp.b * famp.b / (famp.nu * famp.nu) < 81.0);
    CHECK(sample_threshold_n0(fam, famp) == doctest::Approx(81.0).epsilon(1e-9));

    // deterministic transitions with a non-constant value function: nu = 0, b > 0
    const Mrp cyc = two_cycle(0.9, {0.0, 1.0});
    const ComplexityProfile cp = complexity_profile(cyc, solve_value_function(cyc));
    CHECK(cp.nu == 0.0);
    CHECK(cp.b > 0.0);
    CHECK(std::isinf(sample_threshold_n0(cyc, cp)));
}

TEST_CASE("asymptotic covariance") {
    // deterministic transitions, no reward noise: zero covariance
    const Mrp cyc = two_cycle(0.9, {1.0, 2.0});
    const Matrix zero = asymptotic_covariance(cyc, solve_value_function(cyc));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(std::fabs(zero(i, j)) < 1e-24);

    // scalar self-loop: sigma_r^2 / (1 - gamma)^2
    const Mrp loop = identity_mrp(1, 0.5, {1.0}, 1.0);
    const Matrix scalar = asymptotic_covariance(loop, solve_value_function(loop));
    CHECK(scalar(0, 0) == doctest::Approx(4.0).epsilon(1e-12));

    const Mrp fam = two_state_family(0.9, 1.0);
    const Matrix famcov = asymptotic_covariance(fam, solve_value_function(fam));
    CHECK(famcov(0, 0) == doctest::Approx(0.9140625).epsilon(1e-9));
    CHECK(std::fabs(famcov(0, 1)) < 1e-12);
    CHECK(std::fabs(famcov(1, 0)) < 1e-12);
    CHECK(std::fabs(famcov(1, 1)) < 1e-12);
}

TEST_CASE("gaussian sup-norm expectation") {
    RandomSource rng(43, 0);

    const AsymptoticRisk zero = gaussian_linf_expectation(Matrix(2, 2), 100, rng);
    CHECK(zero.linf_mean == 0.0);
    CHECK(zero.mc_stderr == 0.0);

    Matrix one(1, 1);
    one(0, 0) = 1.0;
    const AsymptoticRisk half_normal = gaussian_linf_expectation(one, 100000, rng);
    CHECK(std::fabs(half_normal.linf_mean - std::sqrt(2.0 / M_PI)) <=
          3.0 * half_normal.mc_stderr);

    const Mrp fam = two_state_family(0.9, 1.0);
    const Matrix famcov = asymptotic_covariance(fam, solve_value_function(fam));
    const AsymptoticRisk fam_risk = gaussian_linf_expectation(famcov, 100000, rng);
    CHECK(std::fabs(fam_risk.linf_mean - 0.762830427211538) <= 3.0 * fam_risk.mc_stderr);

    Matrix asym(2, 2);
    asym(0, 0) = 1.0;
    asym(0, 1) = 0.5;
    asym(1, 0) = 0.2;
    asym(1, 1) = 1.0;
    CHECK_THROWS_AS(gaussian_linf_expectation(asym, 10, rng), ValidationError);

    Matrix indefinite(2, 2);
    indefinite(0, 0) = 1.0;
    indefinite(1, 1) = -1.0;
    CHECK_THROWS_AS(gaussian_linf_expectation(indefinite, 10, rng), ValidationError);
}

TEST_CASE("hard alternative on the family") {
    const Mrp mrp = two_state_family(0.9, 1.0);
    const HardAlternative alt = construct_hard_alternative(mrp, 10000);
    CHECK(alt.target_row == 0);
    CHECK(std::fabs(alt.chi_square - 5e-5) < 1e-9);
    for (std::size_t i = 0; i < 2; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < 2; ++j) sum += alt.matrix(i, j);
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
    // the absorbing row is unchanged: its variance contribution is zero
    CHECK(alt.matrix(1, 0) == 0.0);
    CHECK(alt.matrix(1, 1) == 1.0);
}

TEST_CASE("hard alternative rejects degenerate requests") {
    const Mrp flat = identity_mrp(2, 0.9, {0.5, 0.5});
    CHECK_THROWS_AS(construct_hard_alternative(flat, 1000000), ValidationError);

    const Mrp fam = two_state_family(0.9, 1.0);
    CHECK_THROWS_AS(construct_hard_alternative(fam, 10), ValidationError); // below threshold
}

TEST_CASE("hard alternative satisfies its three properties on random instances") {
    RandomSource rng(44, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t d = 2 + rng.next_u64() % 7;
        const double gamma = rep % 2 == 0 ? 0.5 : 0.9;
        const Mrp mrp = random_mrp(rng, d, gamma, rep % 3 == 0 ? 0.5 : 0.0, rep % 5 == 0);
        const ValueFunction theta = solve_value_function(mrp);
        const ComplexityProfile profile = complexity_profile(mrp, theta);
        REQUIRE(profile.nu > 0.0);
        const auto n = static_cast<std::uint64_t>(
            std::ceil(2.0 * sample_threshold_n0(mrp, profile)));
        const HardAlternative alt = construct_hard_alternative(mrp, n);
        const double budget = 1.0 / std::sqrt(2.0 * static_cast<double>(n));

        // P1: row-stochastic
        double min_entry = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                sum += alt.matrix(i, j);
                min_entry = std::min(min_entry, alt.matrix(i, j));
            }
            CHECK(std::fabs(sum - 1.0) < 1e-12);
        }
        CHECK(min_entry >= -1e-12);

        // P2: divergence equals its budget
        CHECK(std::fabs(alt.chi_square - 0.5 / static_cast<double>(n)) < 1e-9);

        // P3: small perturbation, large value shift
        Matrix delta(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                delta(i, j) = alt.matrix(i, j) - mrp.transitions(i, j);
        CHECK(max_abs_row_sum(delta) <= budget);

        Mrp perturbed = mrp;
        perturbed.transitions = alt.matrix;
        const Vector shift = mat_vec(delta, theta);
        Matrix system(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                system(i, j) = (i == j ? 1.0 : 0.0) - gamma * mrp.transitions(i, j);
        const Vector image = solve_linear(system, shift);
        CHECK(gamma * linf_norm(image) >= gamma * profile.nu * budget - 1e-12);
    }
}

TEST_CASE("chi-square divergence") {
    const Mrp mrp = two_state_family(0.9, 1.0);
    CHECK(chi_square_divergence(mrp, mrp) == 0.0);

    const HardAlternative alt = construct_hard_alternative(mrp, 5000);
    Mrp perturbed = mrp;
    perturbed.transitions = alt.matrix;
    CHECK(std::fabs(chi_square_divergence(mrp, perturbed) - 1e-4) < 1e-9);

    // mass where the base has none
    Mrp other = mrp;
    other.transitions(1, 0) = 0.5;
    other.transitions(1, 1) = 0.5;
    CHECK(std::isinf(chi_square_divergence(mrp, other)));
}

TEST_CASE("nu matches the materialized quadratic form") {
    // row-sum shortcut vs the full U Sigma U^T product
    RandomSource rng(48, 0);
    for (int rep = 0; rep < 8; ++rep) {
        const std::size_t d = 2 + rng.next_u64() % 7;
        const Mrp mrp = random_mrp(rng, d, rep % 2 == 0 ? 0.5 : 0.9, 0.0, rep % 3 == 0);
        const ValueFunction theta = solve_value_function(mrp);
        const ComplexityProfile profile = complexity_profile(mrp, theta);

        Matrix system(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                system(i, j) = (i == j ? 1.0 : 0.0) - mrp.discount * mrp.transitions(i, j);
        const Matrix u = invert(system);
        Matrix sigma(d, d);
        const Vector sq = sigma_diag(mrp, theta);
        for (std::size_t i = 0; i < d; ++i) sigma(i, i) = sq[i];
        const Matrix quad = mat_mul(mat_mul(u, sigma), transpose(u));
        double best = 0.0;
        for (std::size_t l = 0; l < d; ++l) best = std::max(best, quad(l, l));
        CHECK(profile.nu == doctest::Approx(std::sqrt(best)).epsilon(1e-10));
    }
}

TEST_CASE("nu scales linearly with theta and keeps its argmax row") {
    RandomSource rng(45, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const Mrp mrp = random_mrp(rng, 6, 0.85, 0.0);
        ValueFunction theta(6);
        for (auto& v : theta) v = 2.0 * rng.next_uniform() - 1.0;
        const ComplexityProfile base = complexity_profile(mrp, theta);
        const double t = 0.5 + 3.0 * rng.next_uniform();
        ValueFunction scaled = theta;
        for (auto& v : scaled) v *= t;
        const ComplexityProfile after = complexity_profile(mrp, scaled);
        CHECK(after.nu == doctest::Approx(t * base.nu).epsilon(1e-10));
        CHECK(after.argmax_row == base.argmax_row);
    }
}

TEST_CASE("family complexity scales as predicted in the discount") {
    for (double lambda : {0.5, 1.5}) {
        double lo_nu = std::numeric_limits<double>::infinity(), hi_nu = 0.0;
        double lo_b = std::numeric_limits<double>::infinity(), hi_b = 0.0;
        for (double gamma : {0.7, 0.8, 0.9, 0.95, 0.99}) {
            const Mrp mrp = two_state_family(gamma, lambda);
            const ComplexityProfile profile =
                complexity_profile(mrp, solve_value_function(mrp));
            CHECK(profile.rho == 0.0);
            const double nu_scaled = profile.nu * std::pow(1.0 - gamma, 1.5 - lambda);
            const double b_scaled = profile.b * std::pow(1.0 - gamma, 2.0 - lambda);
            lo_nu = std::min(lo_nu, nu_scaled);
            hi_nu = std::max(hi_nu, nu_scaled);
            lo_b = std::min(lo_b, b_scaled);
            hi_b = std::max(hi_b, b_scaled);
        }
        CHECK(hi_nu <= 2.0 * lo_nu);
        CHECK(hi_b <= 2.0 * lo_b);
    }
}

TEST_CASE("sup-norm mean estimate respects the log-dimension cap") {
    // the Gaussian maximum cannot exceed sqrt(2 ln D) times the base
    // functional by more than Monte Carlo noise
    RandomSource rng(46, 0);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t d = 2 + rng.next_u64() % 7;
        const Mrp mrp = random_mrp(rng, d, rep % 2 == 0 ? 0.5 : 0.9, rep % 3 == 0 ? 1.0 : 0.3);
        const ValueFunction theta = solve_value_function(mrp);
        const ComplexityProfile profile = complexity_profile(mrp, theta);
        RandomSource mc(47, static_cast<std::uint64_t>(rep));
        const AsymptoticRisk risk =
            gaussian_linf_expectation(asymptotic_covariance(mrp, theta), 20000, mc);
        const double base = mrp.discount * profile.nu + profile.rho;
        CHECK(risk.linf_mean - 3.0 * risk.mc_stderr <=
              std::sqrt(2.0 * std::log(static_cast<double>(d))) * base);
    }
}
