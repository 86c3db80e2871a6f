#include "lqrac/trainer.hpp"

#include <cmath>

#include "lqrac/errors.hpp"

namespace lqrac {

void TrainConfig::validate() const {
    if (T < 0) throw ModelParseError("T must be nonnegative");
    if (!(alpha > 0) || !(beta > 0)) throw ModelParseError("step sizes must be positive");
    if (!(warmup_factor > 0)) throw ModelParseError("warmup_factor must be positive");
    if (warmup_fraction < 0 || warmup_fraction > 1)
        throw ModelParseError("warmup_fraction must lie in [0, 1]");
    if (!(guard_rho > 0) || !(guard_rho < 1))
        throw ModelParseError("guard_rho must lie in (0, 1)");
}

Mat critic_step(const Eigen::Ref<const Mat>& theta, const Eigen::Ref<const Mat>& grad_sample,
                double alpha_eff) {
    return symmetrize(theta - alpha_eff * grad_sample);
}

Mat actor_step(const Eigen::Ref<const Mat>& K, const Eigen::Ref<const Mat>& theta,
               double beta_eff) {
    const Eigen::Index k = K.rows();
    const Eigen::Index d = K.cols();
    if (theta.rows() != d + k || theta.cols() != d + k)
        throw DimensionMismatch("actor_step: theta must be (d+k) x (d+k)");
    const Mat theta22 = theta.bottomRightCorner(k, k);
    const Mat theta21 = theta.bottomLeftCorner(k, d);
    return K - beta_eff * (theta22 * K - theta21);
}

std::pair<double, double> effective_stepsizes(const TrainConfig& cfg, int t) {
    const int warm_until = static_cast<int>(std::floor(cfg.warmup_fraction * cfg.T));
    const double factor = (t < warm_until) ? cfg.warmup_factor : 1.0;
    return {factor * cfg.alpha, factor * cfg.beta};
}

TrainResult train(const EnvHandle& env, const LqrModel& oracle, const TrainConfig& cfg,
                  const std::function<void(const IterateLog&)>& sink) {
    cfg.validate();
    const auto d = oracle.state_dim();
    const auto k = oracle.control_dim();

    const double J_star = stationary_operators(oracle, solve_riccati(oracle).K).J;

    TrainResult result;
    result.theta = Mat::Zero(d + k, d + k);
    result.K = Mat::Zero(k, d);
    result.iterates.reserve(cfg.T);

    for (int t = 0; t < cfg.T; ++t) {
        const auto [alpha_eff, beta_eff] = effective_stepsizes(cfg, t);

        Mat grad;
        try {
            grad = sample_critic_gradient(env, result.K, result.theta, cfg.sample, cfg.seed,
                                          cfg.run, static_cast<std::uint64_t>(t));
        } catch (const StateBlowup& e) {
            result.status = TrainStatus::kStateBlowup;
            result.fail_iteration = t;
            result.message = e.what();
            return result;
        }

        // The actor reads the pre-update critic parameter.
        const Mat theta_next = critic_step(result.theta, grad, alpha_eff);
        const Mat K_next = actor_step(result.K, result.theta, beta_eff);

        const double rho = spectral_radius(closed_loop(oracle, K_next));
        if (rho >= cfg.guard_rho) {
            result.status = TrainStatus::kAssumptionViolated;
            result.fail_iteration = t;
            result.message = AssumptionViolated(t, rho).what();
            return result;
        }

        result.theta = theta_next;
        result.K = K_next;

        const StationaryOps ops = stationary_operators(oracle, result.K);
        IterateLog row;
        row.t = t + 1;
        row.critic_err_sq = (result.theta - ops.theta).squaredNorm();
        row.critic_err = std::sqrt(row.critic_err_sq);
        row.actor_gap = ops.J - J_star;
        row.lyapunov = row.critic_err_sq + row.actor_gap;
        row.rho_closed_loop = ops.rho;
        row.norm_AmBK = operator_norm(closed_loop(oracle, result.K));
        row.norm_E = operator_norm(ops.E);
        row.norm_K = operator_norm(result.K);
        row.norm_theta_F = result.theta.norm();
        row.alpha_eff = alpha_eff;
        row.beta_eff = beta_eff;
        result.iterates.push_back(row);
        if (sink) sink(row);
    }
    return result;
}

std::pair<double, double> theoretical_stepsizes(const TheoryConstants& constants, double eps) {
    if (!(constants.c_L > 0) || !(constants.c3 > 0) || !(constants.kappa > 0) ||
        !(constants.sigma_min_Deps > 0) || !(eps > 0))
        throw NonPositiveConstant("theoretical_stepsizes: all constants must be positive");
    const double alpha = constants.sigma_min_Deps * eps /
                         (16.0 * constants.c_L * constants.c_L * constants.c3 * constants.kappa);
    return {alpha, alpha / constants.kappa};
}

}  // namespace lqrac
