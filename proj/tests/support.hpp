#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mrpeval/mrp.hpp"
#include "mrpeval/random.hpp"
#include "mrpeval/sampling.hpp"

// Shared helpers for the unit and acceptance suites.

namespace testsupport {

using namespace mrpeval;

/// Random validated MRP. Row 0 stays dense so the transition-noise
/// functional is positive; with sparse = true other rows lose entries to
/// exercise zero-probability handling.
inline Mrp random_mrp(RandomSource& rng, std::size_t d, double gamma, double sigma_r,
                      bool sparse = false) {
    Matrix p(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double w = 0.05 + rng.next_uniform();
            if (sparse && i > 0 && d > 2 && rng.next_uniform() < 0.35) w = 0.0;
            p(i, j) = w;
            sum += w;
        }
        if (sum == 0.0) {
            p(i, i) = 1.0;
            sum = 1.0;
        }
        for (std::size_t j = 0; j < d; ++j) p(i, j) /= sum;
        // one more pass so the row sums to 1 as exactly as doubles allow
        double resum = 0.0;
        for (std::size_t j = 0; j < d; ++j) resum += p(i, j);
        for (std::size_t j = 0; j < d; ++j) p(i, j) /= resum;
    }
    Mrp mrp;
    mrp.transitions = std::move(p);
    mrp.rewards.resize(d);
    for (std::size_t i = 0; i < d; ++i) mrp.rewards[i] = 2.0 * rng.next_uniform() - 1.0;
    mrp.discount = gamma;
    mrp.reward_noise = sigma_r;
    return validate(std::move(mrp));
}

/// Visits every joint next-state outcome of a small MRP with its probability
/// weight: f(sample, weight). Intended for D <= 3.
inline void for_each_outcome(const Mrp& mrp,
                             const std::function<void(const TransitionSample&, double)>& f) {
    const std::size_t d = mrp.dim();
    TransitionSample sample;
    sample.next_states.assign(d, 0);
    while (true) {
        double weight = 1.0;
        for (std::size_t i = 0; i < d; ++i)
            weight *= mrp.transitions(i, sample.next_states[i]);
        if (weight > 0.0) f(sample, weight);
        // odometer increment over the d^d outcome grid
        std::size_t pos = 0;
        while (pos < d) {
            if (++sample.next_states[pos] < d) break;
            sample.next_states[pos] = 0;
            ++pos;
        }
        if (pos == d) return;
    }
}

} // namespace testsupport
