#include "lqrac/rng.hpp"

#include <cmath>
#include <numbers>

namespace lqrac {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// Fold one path component into the key.
std::uint64_t fold_in(std::uint64_t key, std::uint64_t component) {
    return mix64(key + kGolden + mix64(component + kGolden));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t run, std::uint64_t iteration,
                     std::uint64_t trajectory, std::uint64_t subsample) {
    std::uint64_t key = mix64(seed + kGolden);
    key = fold_in(key, run);
    key = fold_in(key, iteration);
    key = fold_in(key, trajectory);
    key = fold_in(key, subsample);
    state_ = key;
}

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::next_double() {
    // 53 random bits into [0, 1).
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 shifted away from 0 so the log is finite.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

Vec RngStream::gaussian_vector(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = next_gaussian();
    return v;
}

}  // namespace lqrac
