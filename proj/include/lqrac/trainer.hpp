// Interleaved single-timescale critic/actor updates with per-iteration
// diagnostics measured against the analytic oracle layer. Oracle access is
// for measurement only; the updates themselves see nothing but samples.

#ifndef LQRAC_TRAINER_HPP
#define LQRAC_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lqrac/model.hpp"
#include "lqrac/sampler.hpp"

namespace lqrac {

struct TrainConfig {
    int T = 1000;
    double alpha = 4e-3;  // critic step size
    double beta = 4e-3;   // actor step size
    double warmup_factor = 3.0;
    double warmup_fraction = 0.5;  // boosted steps for t < floor(fraction * T)
    SampleConfig sample;
    std::uint64_t seed = 0;
    std::uint64_t run = 0;  // stream component; distinct per run in sweeps
    double guard_rho = 0.999;

    void validate() const;
};

/// Diagnostics for the iterate reached after `t` updates (t = 1..T).
struct IterateLog {
    int t = 0;
    double critic_err_sq = 0;  // |theta_t - theta_{K_t}|_F^2
    double critic_err = 0;
    double actor_gap = 0;  // J(K_t) - J(K*)
    double lyapunov = 0;   // critic_err_sq + actor_gap
    double rho_closed_loop = 0;
    double norm_AmBK = 0;
    double norm_E = 0;
    double norm_K = 0;
    double norm_theta_F = 0;
    double alpha_eff = 0;
    double beta_eff = 0;
};

enum class TrainStatus { kOk, kAssumptionViolated, kStateBlowup };

struct TrainResult {
    std::vector<IterateLog> iterates;
    Mat theta;  // final critic parameter
    Mat K;      // final gain
    TrainStatus status = TrainStatus::kOk;
    int fail_iteration = -1;  // update index at which the run aborted
    std::string message;

    bool ok() const { return status == TrainStatus::kOk; }
};

/// theta - alpha * grad, symmetrized.
Mat critic_step(const Eigen::Ref<const Mat>& theta, const Eigen::Ref<const Mat>& grad_sample,
                double alpha_eff);

/// K - beta (theta^22 K - theta^21), the natural-gradient step read off the
/// critic parameter blocks.
Mat actor_step(const Eigen::Ref<const Mat>& K, const Eigen::Ref<const Mat>& theta,
               double beta_eff);

/// Step sizes in effect at iteration t (warmup boost applied while
/// t < floor(warmup_fraction * T)). The alpha/beta ratio never changes.
std::pair<double, double> effective_stepsizes(const TrainConfig& cfg, int t);

/// Runs Algorithm-style training from theta = 0, K = 0. Aborts cleanly with
/// a partial log if rho(A - BK) reaches guard_rho or a rollout diverges.
/// `sink`, when set, receives each IterateLog as it is produced.
TrainResult train(const EnvHandle& env, const LqrModel& oracle, const TrainConfig& cfg,
                  const std::function<void(const IterateLog&)>& sink = {});

struct TheoryConstants {
    double c_L = 1;             // second-moment bound on the gradient sample
    double c3 = 1;              // upper gradient-dominance constant
    double kappa = 1;           // critic/actor step-size ratio
    double sigma_min_Deps = 1;  // smallest eigenvalue of D_eps
};

/// Constant step sizes of the theoretical schedule for accuracy eps;
/// alpha / beta = kappa exactly. Throws NonPositiveConstant.
std::pair<double, double> theoretical_stepsizes(const TheoryConstants& constants, double eps);

}  // namespace lqrac

#endif
