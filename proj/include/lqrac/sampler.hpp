// Model-free data path: stochastic policy execution, trajectory rollout,
// and the unbiased critic-gradient estimator. Everything here touches the
// model only through the black-box step/cost closures of EnvHandle.

#ifndef LQRAC_SAMPLER_HPP
#define LQRAC_SAMPLER_HPP

#include <cstdint>
#include <functional>

#include "lqrac/numerics.hpp"
#include "lqrac/rng.hpp"

namespace lqrac {

struct LqrModel;

/// Black-box environment. The training path never reads A, B, Q, R, D_xi;
/// it only applies step/cost and knows the policy exploration level sigma.
struct EnvHandle {
    Eigen::Index state_dim = 0;
    Eigen::Index control_dim = 0;
    double sigma = 1.0;
    std::function<Vec(const Vec& x, const Vec& u, RngStream& rng)> step;
    std::function<double(const Vec& x, const Vec& u)> cost;
};

/// Wraps a ground-truth model into the black-box interface. Process noise is
/// drawn as L g with L the Cholesky factor of D_xi.
EnvHandle make_env(const LqrModel& model);

struct SampleConfig {
    int N = 100;   // independent trajectories per gradient sample
    int N0 = 100;  // burn-in length
    int N1 = 100;  // subsamples per trajectory (>= 2)
};

/// Default divergence guard on |x| during rollouts.
inline constexpr double kBlowupGuard = 1e6;

/// One policy draw: -K x + sigma w, w ~ N(0, I).
Vec sample_action(const Eigen::Ref<const Mat>& K, double sigma, const Eigen::Ref<const Vec>& x,
                  RngStream& rng);

/// Simulates N0 steps from x0 = 0 under the policy of K and returns the
/// terminal pair (x_{N0}, u_{N0}), with u_{N0} the rollout's own action at
/// x_{N0}. Throws StateBlowup if |x| ever exceeds the guard.
std::pair<Vec, Vec> rollout_burnin(const EnvHandle& env, const Eigen::Ref<const Mat>& K, int n0,
                                   RngStream& rng, double guard = kBlowupGuard);

/// Feature matrix z z^T for z = [x; u].
Mat feature_phi(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u);

/// One conditional draw of the gradient integrand estimate at a fixed pair
/// (x, u): n1 independent next-step pairs, the empirical feature drifts, and
/// the covariance-corrected quadratic term. Unbiased for f(x, u) given n1 >= 2.
Mat critic_grad_estimate_at(const EnvHandle& env, const Eigen::Ref<const Mat>& K,
                            const Eigen::Ref<const Mat>& theta, const Eigen::Ref<const Vec>& x,
                            const Eigen::Ref<const Vec>& u, int n1, RngStream& rng);

/// Full gradient sample: N burn-in pairs, one conditional estimate each,
/// averaged in trajectory order. Streams are addressed per
/// (seed, run, iteration, trajectory, subsample), so the result is
/// reproducible bit-for-bit.
Mat sample_critic_gradient(const EnvHandle& env, const Eigen::Ref<const Mat>& K,
                           const Eigen::Ref<const Mat>& theta, const SampleConfig& cfg,
                           std::uint64_t seed, std::uint64_t run, std::uint64_t iteration,
                           double guard = kBlowupGuard);

}  // namespace lqrac

#endif
