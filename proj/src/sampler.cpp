#include "lqrac/sampler.hpp"

#include <stdexcept>

#include "lqrac/errors.hpp"
#include "lqrac/model.hpp"

namespace lqrac {

EnvHandle make_env(const LqrModel& model) {
    model.validate();
    EnvHandle env;
    env.state_dim = model.state_dim();
    env.control_dim = model.control_dim();
    env.sigma = model.sigma;
    // Tiny jitter only engages if D_xi is numerically singular PSD.
    const Mat L = cholesky(model.D_xi, 1e-14 * std::max(1.0, model.D_xi.norm()));
    const Mat A = model.A;
    const Mat B = model.B;
    env.step = [A, B, L](const Vec& x, const Vec& u, RngStream& rng) -> Vec {
        return A * x + B * u + L * rng.gaussian_vector(L.cols());
    };
    const Mat Q = model.Q;
    const Mat R = model.R;
    env.cost = [Q, R](const Vec& x, const Vec& u) -> double {
        return x.dot(Q * x) + u.dot(R * u);
    };
    return env;
}

Vec sample_action(const Eigen::Ref<const Mat>& K, double sigma, const Eigen::Ref<const Vec>& x,
                  RngStream& rng) {
    return -K * x + sigma * rng.gaussian_vector(K.rows());
}

std::pair<Vec, Vec> rollout_burnin(const EnvHandle& env, const Eigen::Ref<const Mat>& K, int n0,
                                   RngStream& rng, double guard) {
    Vec x = Vec::Zero(env.state_dim);
    for (int s = 0; s < n0; ++s) {
        const Vec u = sample_action(K, env.sigma, x, rng);
        x = env.step(x, u, rng);
        const double norm = x.norm();
        if (!(norm <= guard)) throw StateBlowup(norm);
    }
    Vec u = sample_action(K, env.sigma, x, rng);
    return {std::move(x), std::move(u)};
}

Mat feature_phi(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u) {
    Vec z(x.size() + u.size());
    z << x, u;
    return z * z.transpose();
}

Mat critic_grad_estimate_at(const EnvHandle& env, const Eigen::Ref<const Mat>& K,
                            const Eigen::Ref<const Mat>& theta, const Eigen::Ref<const Vec>& x,
                            const Eigen::Ref<const Vec>& u, int n1, RngStream& rng) {
    if (n1 < 2)
        throw std::invalid_argument("critic gradient sampling needs at least two subsamples");
    const Eigen::Index d = x.size();
    const Eigen::Index n = d + u.size();

    const double c = env.cost(x, u);
    const Mat phi0 = feature_phi(x, u);

    Mat psi(n, n);
    Mat psi_sum = Mat::Zero(n, n);
    // Running sum of psi_j <psi_j, theta>; together with the mean this gives
    // the sample-covariance correction without a second pass.
    Mat quad_sum = Mat::Zero(n, n);
    Vec z(n);
    for (int j = 0; j < n1; ++j) {
        const Vec xn = env.step(x, u, rng);
        z.head(d) = xn;
        z.tail(n - d) = sample_action(K, env.sigma, xn, rng);
        psi.noalias() = z * z.transpose();
        psi -= phi0;
        psi_sum += psi;
        quad_sum += psi * psi.cwiseProduct(theta).sum();
    }
    const Mat psi_bar = psi_sum / n1;
    // sum_j (psi_j - bar) <psi_j - bar, theta> = quad_sum - n1 bar <bar, theta>
    const Mat cov_term =
        (quad_sum - n1 * psi_bar * psi_bar.cwiseProduct(theta).sum()) / (n1 - 1.0);
    return symmetrize(c * psi_bar + quad_sum / n1 - cov_term);
}

Mat sample_critic_gradient(const EnvHandle& env, const Eigen::Ref<const Mat>& K,
                           const Eigen::Ref<const Mat>& theta, const SampleConfig& cfg,
                           std::uint64_t seed, std::uint64_t run, std::uint64_t iteration,
                           double guard) {
    if (cfg.N < 1) throw std::invalid_argument("sample config needs at least one trajectory");
    if (cfg.N0 < 0) throw std::invalid_argument("burn-in length must be nonnegative");
    if (cfg.N1 < 2)
        throw std::invalid_argument("critic gradient sampling needs at least two subsamples");

    const Eigen::Index n = env.state_dim + env.control_dim;
    Mat acc = Mat::Zero(n, n);
    for (int i = 0; i < cfg.N; ++i) {
        RngStream rollout_rng(seed, run, iteration, static_cast<std::uint64_t>(i), 0);
        const auto [x, u] = rollout_burnin(env, K, cfg.N0, rollout_rng, guard);
        RngStream estimate_rng(seed, run, iteration, static_cast<std::uint64_t>(i), 1);
        acc += critic_grad_estimate_at(env, K, theta, x, u, cfg.N1, estimate_rng);
    }
    return acc / cfg.N;
}

}  // namespace lqrac
