#include "mrpeval/random.hpp"

#include <cmath>
#include <numbers>

namespace mrpeval {

double RandomSource::next_normal() {
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return radius * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace mrpeval
