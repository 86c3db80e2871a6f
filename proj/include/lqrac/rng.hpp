// Counter-based splittable random streams. A stream is addressed by a seed
// plus a hierarchical path (run, iteration, trajectory, subsample); distinct
// paths give statistically independent streams and the same (seed, path)
// reproduces the same draws bit-for-bit regardless of scheduling.

#ifndef LQRAC_RNG_HPP
#define LQRAC_RNG_HPP

#include <cstdint>

#include "lqrac/numerics.hpp"

namespace lqrac {

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t run, std::uint64_t iteration,
              std::uint64_t trajectory, std::uint64_t subsample);

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double next_double();

    /// Standard normal via Box-Muller (second value cached).
    double next_gaussian();

    Vec gaussian_vector(Eigen::Index n);

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lqrac

#endif
