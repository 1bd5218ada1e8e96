#pragma once

#include <cstdint>

#include "mrpeval/linalg.hpp"
#include "mrpeval/mrp.hpp"
#include "mrpeval/random.hpp"

// Instance-dependent complexity functionals for policy evaluation, the
// unit-constant local-minimax lower bound, the asymptotic Gaussian risk, and
// the hardest-local-alternative transition matrix.
//
// Throughout, U = (I - gamma P)^{-1} and Sigma(theta) is the (diagonal)
// covariance of (Z - P) theta for a one-hot row sample Z ~ P.

namespace mrpeval {

struct ComplexityProfile {
    double nu = 0.0;   // max_l sqrt( sum_i U_{l,i}^2 sigma_i^2(theta) )
    double rho = 0.0;  // sigma_r * max Euclidean row norm of U
    double b = 0.0;    // span(theta) / (1 - gamma)
    double span = 0.0; // span seminorm of theta
    Vector sigma_sq;   // per-state variances sigma_i^2(theta)
    std::size_t argmax_row = 0; // smallest row attaining nu
};

/// Diagonal of Sigma(theta): sigma_i^2 = sum_j P_ij (theta_j - (P theta)_i)^2.
Vector sigma_diag(const Mrp& mrp, const ValueFunction& theta);

ComplexityProfile complexity_profile(const Mrp& mrp, const ValueFunction& theta);

/// Unit-constant lower-bound functional (gamma * nu + rho) / sqrt(n). The
/// universal constant in front is unspecified upstream and reported as 1.
double lower_bound_value(const ComplexityProfile& profile, double gamma, std::uint64_t n);

/// Smallest sample size for which the lower bound is claimed:
/// max{ gamma^2/(1-gamma)^2, b^2/nu^2 }. Returns +infinity when nu = 0 with
/// b > 0 (the ratio blows up); the ratio is dropped when b = 0 as well.
double sample_threshold_n0(const Mrp& mrp, const ComplexityProfile& profile);

/// Covariance of the limiting Gaussian for the rescaled estimation error:
/// U (gamma^2 Sigma(theta*) + sigma_r^2 I) U^T.
Matrix asymptotic_covariance(const Mrp& mrp, const ValueFunction& theta_star);

struct AsymptoticRisk {
    Matrix covariance;
    double linf_mean = 0.0;      // Monte Carlo estimate of E ||Z||_inf
    std::uint64_t mc_samples = 0;
    double mc_stderr = 0.0;
};

/// Monte Carlo estimate of E ||Z||_inf for Z ~ Normal(0, cov), via a
/// symmetric eigendecomposition with small negative eigenvalues clamped to
/// zero. Throws if cov is asymmetric or indefinite beyond slack.
AsymptoticRisk gaussian_linf_expectation(const Matrix& cov, std::uint64_t samples,
                                         RandomSource& rng);

struct HardAlternative {
    Matrix matrix;              // the perturbed transition matrix
    std::size_t target_row = 0; // row attaining nu (smallest index on ties)
    double chi_square = 0.0;    // divergence of the perturbation, = 1/(2n)
    std::uint64_t sample_size = 0;
};

/// The hardest local alternative at sample size n: a row-stochastic
/// perturbation of P with chi-square budget exactly 1/(2n) that maximally
/// shifts the value function. Requires nu > 0 and n at or above the
/// threshold so that all entries stay nonnegative.
HardAlternative construct_hard_alternative(const Mrp& mrp, std::uint64_t n);

/// sum_ij (P'_ij - P_ij)^2 / P_ij with 0/0 treated as 0; +infinity when P'
/// places mass where P has none.
double chi_square_divergence(const Mrp& p_from, const Mrp& p_to);

} // namespace mrpeval
