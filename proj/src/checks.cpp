// Analytic identity suites behind the `check` subcommand. Each suite
// evaluates one identity family over randomized inputs and reports its
// worst residual.

#include <cmath>

#include "lqrac/errors.hpp"
#include "lqrac/harness.hpp"

namespace lqrac {

namespace {

Vec random_gaussian_vec(Eigen::Index n, RngStream& rng) { return rng.gaussian_vector(n); }

struct SuiteRunner {
    CheckReport report;

    void add(const std::string& name, bool pass, double residual, const std::string& note = "") {
        report.items.push_back({name, pass, residual, note});
        report.all_pass = report.all_pass && pass;
    }
};

}  // namespace

CheckReport run_checks(const LqrModel& model, std::uint64_t seed) {
    model.validate();
    SuiteRunner out;
    const auto d = model.state_dim();
    const auto k = model.control_dim();
    const auto n = d + k;

    RngStream gain_rng(seed, 0, 0, 0, 101);
    std::vector<Mat> gains;
    gains.push_back(Mat::Zero(k, d));
    for (int i = 0; i < 19; ++i) gains.push_back(random_stable_gain(model, gain_rng, 0.3));

    // Fixed-point residuals of D_K, P_K, Sigma_K, theta_K.
    {
        double worst = 0;
        for (const Mat& K : gains) {
            const StationaryOps ops = stationary_operators(model, K);
            const Mat M = closed_loop(model, K);
            const Mat C = model.Q + K.transpose() * model.R * K;
            const double rD = (ops.D - model.noise_cov_eff() - M * ops.D * M.transpose()).norm() /
                              std::max(1.0, ops.D.norm());
            const double rP =
                (ops.P - C - M.transpose() * ops.P * M).norm() / std::max(1.0, ops.P.norm());
            const double rS =
                (ops.Sigma - ops.Sigma_eps - ops.E * ops.Sigma * ops.E.transpose()).norm() /
                std::max(1.0, ops.Sigma.norm());
            Mat block_cost = Mat::Zero(n, n);
            block_cost.topLeftCorner(d, d) = model.Q;
            block_cost.bottomRightCorner(k, k) = model.R;
            const double rT =
                (ops.theta - block_cost - ops.E.transpose() * ops.theta * ops.E).norm() /
                std::max(1.0, ops.theta.norm());
            worst = std::max({worst, rD, rP, rS, rT});
        }
        out.add("fixed-point-residuals", worst <= 1e-10, worst);
    }

    // Riccati solution quality.
    {
        const RiccatiSolution sol = solve_riccati(model);
        const double g_norm = natural_gradient(model, sol.K).norm();
        const double rho = spectral_radius(closed_loop(model, sol.K));
        const bool pass = sol.residual < 1e-12 && g_norm < 1e-8 && rho < 1.0;
        out.add("riccati", pass, sol.residual,
                "|G_K*|_F = " + format_double(g_norm) + ", rho = " + format_double(rho));
    }

    // Exact gradient against central finite differences of the cost.
    {
        const double h = 1e-5;
        double worst = 0;
        for (const Mat& K : gains) {
            const Mat grad = cost_gradient(model, K);
            Mat fd(k, d);
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < d; ++j) {
                    Mat Kp = K, Km = K;
                    Kp(i, j) += h;
                    Km(i, j) -= h;
                    fd(i, j) = (cost(model, Kp) - cost(model, Km)) / (2 * h);
                }
            worst = std::max(worst, (grad - fd).norm() / std::max(1.0, grad.norm()));
        }
        out.add("cost-gradient-fd", worst <= 1e-4, worst);
    }

    // sigma^2 F(K) vec(G_K) = vec(G_K D_K).
    if (model.sigma > 0) {
        double worst = 0;
        for (const Mat& K : gains) {
            const StationaryOps ops = stationary_operators(model, K);
            const Mat G = (model.R + model.B.transpose() * ops.P * model.B) * K -
                          model.B.transpose() * ops.P * model.A;
            const Vec lhs = model.sigma * model.sigma * fisher_tensor(model, K) * vec_rowmajor(G);
            const Vec rhs = vec_rowmajor(G * ops.D);
            worst = std::max(worst, (lhs - rhs).norm() / std::max(1e-12, rhs.norm()));
        }
        out.add("fisher-identity", worst <= 1e-9, worst);
    }

    // Bellman residual of the exact Q function, conditional expectation in
    // closed form, and the Gaussian-average consistency E_u[Q] = V.
    {
        RngStream rng(seed, 0, 0, 0, 102);
        double worst_bellman = 0, worst_value = 0;
        for (const Mat& K : gains) {
            const StationaryOps ops = stationary_operators(model, K);
            const double offset = model.sigma * model.sigma *
                                      (model.R + ops.P * model.B * model.B.transpose()).trace() +
                                  (ops.D * ops.P).trace();
            for (int trial = 0; trial < 5; ++trial) {
                const Vec x = random_gaussian_vec(d, rng);
                const Vec u = random_gaussian_vec(k, rng);
                Vec z(n);
                z << x, u;
                const ValuePair vp = value_functions(model, K, x, u);
                const Vec Ez = ops.E * z;
                const double next_q =
                    Ez.dot(ops.theta * Ez) + (ops.theta * ops.Sigma_eps).trace() - offset;
                const double c = x.dot(model.Q * x) + u.dot(model.R * u);
                worst_bellman = std::max(worst_bellman, std::abs(c - ops.J + next_q - vp.Q));

                const Mat theta22 = ops.theta.bottomRightCorner(k, k);
                const double mean_q = x.dot(ops.P * x) +
                                      model.sigma * model.sigma * theta22.trace() - offset;
                worst_value = std::max(worst_value, std::abs(mean_q - vp.V));
            }
        }
        out.add("bellman-residual", worst_bellman <= 1e-9, worst_bellman);
        out.add("value-consistency", worst_value <= 1e-9, worst_value);
    }

    // Gradient dominance sandwich with per-K constants.
    {
        bool pass = true;
        double worst_violation = 0;
        RngStream rng(seed, 0, 0, 0, 103);
        for (int i = 0; i < 50; ++i) {
            const Mat K = random_stable_gain(model, rng, 0.25);
            const DominanceBounds b = gradient_dominance_check(model, K);
            const double slack = 1e-9 * std::max(1.0, b.upper);
            if (b.lower > b.gap + slack || b.gap > b.upper + slack) pass = false;
            worst_violation =
                std::max({worst_violation, b.lower - b.gap, b.gap - b.upper});
        }
        out.add("gradient-dominance", pass, worst_violation);
    }

    // Cost agreement through the two trace routes and the difference formula.
    {
        RngStream rng(seed, 0, 0, 0, 104);
        double worst_route = 0, worst_diff = 0;
        for (int i = 0; i < 10; ++i) {
            const Mat K = random_stable_gain(model, rng, 0.3);
            const Mat K2 = random_stable_gain(model, rng, 0.3);
            const double J1 = cost(model, K);
            worst_route =
                std::max(worst_route, std::abs(J1 - cost_alt(model, K)) / std::max(1.0, J1));
            const double direct = J1 - cost(model, K2);
            worst_diff = std::max(
                worst_diff, std::abs(cost_difference(model, K, K2) - direct));
        }
        out.add("cost-route-agreement", worst_route <= 1e-10, worst_route);
        out.add("cost-difference-formula", worst_diff <= 1e-8, worst_diff);
    }

    // Exact critic gradient vanishes at theta_K; Hessian form positive.
    {
        RngStream rng(seed, 0, 0, 0, 105);
        double worst_zero = 0;
        double min_quad = std::numeric_limits<double>::infinity();
        for (const Mat& K : gains) {
            const StationaryOps ops = stationary_operators(model, K);
            worst_zero = std::max(worst_zero, critic_grad_exact(model, K, ops.theta).norm());
        }
        const Mat K0 = gains[1];
        for (int i = 0; i < 100; ++i) {
            Mat M = random_symmetric(n, rng);
            M /= M.norm();
            min_quad = std::min(min_quad, critic_hessian_quadratic(model, K0, M));
        }
        out.add("critic-grad-zero-at-target", worst_zero <= 1e-9, worst_zero);
        out.add("hessian-positivity", min_quad > 0, min_quad,
                "min quadratic form over unit directions");
    }

    // E[psi] = 0 as matrices and the spectral radius identity rho(E) = rho(A-BK).
    {
        double worst_psi = 0, worst_rho = 0;
        for (const Mat& K : gains) {
            const StationaryOps ops = stationary_operators(model, K);
            worst_psi = std::max(
                worst_psi,
                (ops.E * ops.Sigma * ops.E.transpose() + ops.Sigma_eps - ops.Sigma).norm());
            worst_rho = std::max(
                worst_rho, std::abs(spectral_radius(ops.E) - spectral_radius(closed_loop(model, K))));
        }
        out.add("psi-mean-zero", worst_psi <= 1e-10, worst_psi);
        out.add("rho-concat-identity", worst_rho <= 1e-8, worst_rho);
    }

    // Reduced statistical check of the conditional estimator (full-size
    // versions live in the acceptance suite).
    if (model.sigma > 0) {
        const EnvHandle env = make_env(model);
        RngStream rng(seed, 0, 0, 0, 106);
        const Mat K = gains[2];
        const StationaryOps ops = stationary_operators(model, K);
        const Mat L = cholesky(ops.Sigma, 1e-14);
        const Mat theta = random_symmetric(n, rng, 0.5);
        const int n_draws = 20000;
        const int n1 = 4;
        double worst_sigmas = 0;
        for (int pair = 0; pair < 3; ++pair) {
            const Vec z = L * rng.gaussian_vector(n);
            const Vec x = z.head(d);
            const Vec u = z.tail(k);
            const Mat exact = critic_grad_integrand(model, K, theta, x, u);
            Mat mean = Mat::Zero(n, n);
            Mat m2 = Mat::Zero(n, n);
            RngStream draw_rng(seed, 1, static_cast<std::uint64_t>(pair), 0, 107);
            for (int s = 0; s < n_draws; ++s) {
                const Mat f = critic_grad_estimate_at(env, K, theta, x, u, n1, draw_rng);
                const Mat delta = f - mean;
                mean += delta / (s + 1.0);
                m2 += delta.cwiseProduct(f - mean);
            }
            const Mat se = (m2 / (n_draws - 1.0) / n_draws).cwiseSqrt();
            for (Eigen::Index a = 0; a < n; ++a)
                for (Eigen::Index b = 0; b < n; ++b) {
                    const double dev = std::abs(mean(a, b) - exact(a, b));
                    worst_sigmas = std::max(worst_sigmas, dev / (se(a, b) + 1e-12));
                }
        }
        out.add("estimator-unbiasedness", worst_sigmas <= 5.0, worst_sigmas,
                "worst deviation in standard errors");
    }

    return out.report;
}

}  // namespace lqrac
