#include "mrpeval/sampling.hpp"

#include <algorithm>
#include <utility>

#include "mrpeval/errors.hpp"

namespace mrpeval {

GenerativeModel::GenerativeModel(Mrp mrp) : mrp_(std::move(mrp)) {
    const std::size_t d = mrp_.dim();
    row_cdf_.resize(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            acc += mrp_.transitions(i, j);
            row_cdf_[i * d + j] = acc;
        }
        // guarantee that every uniform in [0,1) lands inside the row
        row_cdf_[i * d + d - 1] = 1.0;
    }
}

TransitionSample GenerativeModel::draw_transition(RandomSource& rng) const {
    const std::size_t d = dim();
    TransitionSample sample;
    sample.next_states.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double u = rng.next_uniform();
        const auto begin = row_cdf_.begin() + static_cast<std::ptrdiff_t>(i * d);
        const auto it = std::upper_bound(begin, begin + static_cast<std::ptrdiff_t>(d), u);
        sample.next_states[i] = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(
            it - begin, static_cast<std::ptrdiff_t>(d) - 1));
    }
    return sample;
}

RewardSample GenerativeModel::draw_rewards(RandomSource& rng) const {
    RewardSample sample;
    if (mrp_.reward_noise == 0.0) {
        sample.rewards = mrp_.rewards;
        return sample;
    }
    sample.rewards.resize(dim());
    for (std::size_t i = 0; i < dim(); ++i)
        sample.rewards[i] = mrp_.rewards[i] + mrp_.reward_noise * rng.next_normal();
    return sample;
}

Observation GenerativeModel::draw(RandomSource& rng) const {
    Observation obs;
    obs.transitions = draw_transition(rng);
    obs.rewards = draw_rewards(rng);
    return obs;
}

ValueFunction empirical_operator(const Mrp& mrp, const TransitionSample& z,
                                 const RewardSample& rw, const ValueFunction& theta) {
    const std::size_t d = mrp.dim();
    if (z.next_states.size() != d || rw.rewards.size() != d || theta.size() != d)
        throw ValidationError("empirical_operator: dimension mismatch");
    ValueFunction out(d);
    for (std::size_t j = 0; j < d; ++j) {
        const std::uint32_t next = z.next_states[j];
        if (next >= d) throw ValidationError("empirical_operator: next state out of range");
        out[j] = rw.rewards[j] + mrp.discount * theta[next];
    }
    return out;
}

} // namespace mrpeval
