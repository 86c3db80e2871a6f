#ifndef LQRAC_ERRORS_HPP
#define LQRAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lqrac {

// Numerics kernel failures.
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotPsd : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model / oracle layer failures.
struct UnstableGain : std::runtime_error {
    double radius;
    explicit UnstableGain(double rho)
        : std::runtime_error("gain is not stabilizing: rho(A - BK) = " + std::to_string(rho)),
          radius(rho) {}
};

struct AsymmetricTheta : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RiccatiNonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnstableClosedLoop : std::runtime_error {
    double radius;
    explicit UnstableClosedLoop(double rho)
        : std::runtime_error("Riccati gain is not stabilizing: rho(A - BK*) = " +
                             std::to_string(rho)),
          radius(rho) {}
};

struct NonPositiveConstant : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Sampling / training failures.
struct StateBlowup : std::runtime_error {
    double norm;
    explicit StateBlowup(double state_norm)
        : std::runtime_error("trajectory diverged: |x| = " + std::to_string(state_norm)),
          norm(state_norm) {}
};

struct AssumptionViolated : std::runtime_error {
    int iteration;
    double radius;
    AssumptionViolated(int t, double rho)
        : std::runtime_error("closed loop destabilized at iteration " + std::to_string(t) +
                             ": rho(A - BK) = " + std::to_string(rho)),
          iteration(t),
          radius(rho) {}
};

struct ModelParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lqrac

#endif
