#pragma once

#include <cstdint>
#include <vector>

#include "mrpeval/mrp.hpp"
#include "mrpeval/random.hpp"

// The generative observation model: one next-state draw per state plus a
// Gaussian reward vector, and the one-sample empirical Bellman operator they
// induce.

namespace mrpeval {

/// Per-state next-state indices; entry j is drawn from row j of the
/// transition matrix (the row-one-hot matrix Z in compact form).
struct TransitionSample {
    std::vector<std::uint32_t> next_states;
};

/// Per-state reward draws, entry j ~ Normal(r_j, sigma_r^2).
struct RewardSample {
    Vector rewards;
};

/// One generative sample: the (Z, R) pair.
struct Observation {
    TransitionSample transitions;
    RewardSample rewards;
};

/// Caches cumulative row sums of a validated MRP so that next-state draws are
/// inverse-CDF lookups. Immutable after construction; safe to share across
/// threads.
class GenerativeModel {
public:
    explicit GenerativeModel(Mrp mrp);

    const Mrp& mrp() const { return mrp_; }
    std::size_t dim() const { return mrp_.dim(); }

    TransitionSample draw_transition(RandomSource& rng) const;
    /// With sigma_r = 0 this returns the reward vector exactly and consumes
    /// no randomness.
    RewardSample draw_rewards(RandomSource& rng) const;
    Observation draw(RandomSource& rng) const;

private:
    Mrp mrp_;
    std::vector<double> row_cdf_; // D x D, row-major cumulative sums
};

/// Coordinate j of the empirical operator: rewards[j] + gamma * theta[next_states[j]].
ValueFunction empirical_operator(const Mrp& mrp, const TransitionSample& z,
                                 const RewardSample& rw, const ValueFunction& theta);

/// Counting wrapper around a model and a stream: every generative sample an
/// algorithm consumes goes through next(), so budgets can be audited.
class ObservationStream {
public:
    ObservationStream(const GenerativeModel& model, RandomSource& rng)
        : model_(&model), rng_(&rng) {}

    Observation next() {
        ++drawn_;
        return model_->draw(*rng_);
    }

    const GenerativeModel& model() const { return *model_; }
    std::uint64_t drawn() const { return drawn_; }

private:
    const GenerativeModel* model_;
    RandomSource* rng_;
    std::uint64_t drawn_ = 0;
};

} // namespace mrpeval
