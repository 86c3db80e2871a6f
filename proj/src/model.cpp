#include "lqrac/model.hpp"

#include <cmath>

#include "lqrac/errors.hpp"

namespace lqrac {

namespace {

void check_symmetric(const Mat& M, const char* name) {
    if (M.rows() != M.cols() || (M - M.transpose()).norm() > 1e-10 * std::max(1.0, M.norm()))
        throw ModelParseError(std::string(name) + " must be symmetric");
}

Mat block_cost(const LqrModel& model) {
    const auto d = model.state_dim();
    const auto k = model.control_dim();
    Mat C = Mat::Zero(d + k, d + k);
    C.topLeftCorner(d, d) = model.Q;
    C.bottomRightCorner(k, k) = model.R;
    return C;
}

double require_stable(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    const double rho = spectral_radius(closed_loop(model, K));
    if (rho >= 1.0) throw UnstableGain(rho);
    return rho;
}

// S(theta) = blkdiag(Q, R) + E^T theta E - theta; zero exactly at theta_K.
Mat bellman_slack(const LqrModel& model, const Mat& E, const Eigen::Ref<const Mat>& theta) {
    return block_cost(model) + E.transpose() * theta * E - theta;
}

}  // namespace

void LqrModel::validate() const {
    const auto d = state_dim();
    const auto k = control_dim();
    if (d <= 0 || k <= 0) throw ModelParseError("A and B must be non-empty");
    if (A.cols() != d) throw ModelParseError("A must be square");
    if (B.rows() != d) throw ModelParseError("B must have as many rows as A");
    if (Q.rows() != d || Q.cols() != d) throw ModelParseError("Q must be d x d");
    if (R.rows() != k || R.cols() != k) throw ModelParseError("R must be k x k");
    if (D_xi.rows() != d || D_xi.cols() != d) throw ModelParseError("D_xi must be d x d");
    for (const Mat* M : {&A, &B, &Q, &R, &D_xi})
        if (!all_finite(*M)) throw ModelParseError("model matrices must be finite");
    if (!std::isfinite(sigma) || sigma < 0) throw ModelParseError("sigma must be nonnegative");
    check_symmetric(Q, "Q");
    check_symmetric(R, "R");
    check_symmetric(D_xi, "D_xi");
    if (min_eigenvalue_sym(Q) <= 0) throw ModelParseError("Q must be positive definite");
    if (min_eigenvalue_sym(R) <= 0) throw ModelParseError("R must be positive definite");
    if (min_eigenvalue_sym(D_xi) < -1e-12 * std::max(1.0, D_xi.norm()))
        throw ModelParseError("D_xi must be positive semi-definite");
    if (min_eigenvalue_sym(noise_cov_eff()) <= 0)
        throw ModelParseError("effective noise covariance D_xi + sigma^2 B B^T must be positive definite");
}

Mat closed_loop(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    if (K.rows() != model.control_dim() || K.cols() != model.state_dim())
        throw DimensionMismatch("gain must be k x d");
    return model.A - model.B * K;
}

Mat concat_transition(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    const auto d = model.state_dim();
    const auto k = model.control_dim();
    Mat E(d + k, d + k);
    E.topLeftCorner(d, d) = model.A;
    E.topRightCorner(d, k) = model.B;
    E.bottomLeftCorner(k, d) = -K * model.A;
    E.bottomRightCorner(k, k) = -K * model.B;
    return E;
}

Mat concat_noise_cov(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    const auto d = model.state_dim();
    const auto k = model.control_dim();
    Mat S(d + k, d + k);
    S.topLeftCorner(d, d) = model.D_xi;
    S.topRightCorner(d, k) = -model.D_xi * K.transpose();
    S.bottomLeftCorner(k, d) = -K * model.D_xi;
    S.bottomRightCorner(k, k) =
        K * model.D_xi * K.transpose() + model.sigma * model.sigma * Mat::Identity(k, k);
    return symmetrize(S);
}

Mat state_action_cov(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                     const Eigen::Ref<const Mat>& D) {
    const auto d = model.state_dim();
    const auto k = model.control_dim();
    Mat S(d + k, d + k);
    S.topLeftCorner(d, d) = D;
    S.topRightCorner(d, k) = -D * K.transpose();
    S.bottomLeftCorner(k, d) = -K * D;
    S.bottomRightCorner(k, k) =
        K * D * K.transpose() + model.sigma * model.sigma * Mat::Identity(k, k);
    return symmetrize(S);
}

StationaryOps stationary_operators(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    StationaryOps out;
    out.rho = require_stable(model, K);
    const Mat M = closed_loop(model, K);
    const Mat D_eps = model.noise_cov_eff();

    out.D = symmetrize(solve_kron_linear(M, M.transpose(), D_eps));
    out.P = symmetrize(
        solve_kron_linear(M.transpose(), M, model.Q + K.transpose() * model.R * K));
    out.E = concat_transition(model, K);
    out.Sigma_eps = concat_noise_cov(model, K);
    out.Sigma = state_action_cov(model, K, out.D);

    // theta_K assembled from P_K; equal to the fixed point of
    // theta = blkdiag(Q, R) + E^T theta E.
    const auto d = model.state_dim();
    const auto k = model.control_dim();
    Mat AB(d, d + k);
    AB << model.A, model.B;
    out.theta = symmetrize(block_cost(model) + AB.transpose() * out.P * AB);

    out.J = (D_eps * out.P).trace() + model.sigma * model.sigma * model.R.trace();
    return out;
}

double cost(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    return stationary_operators(model, K).J;
}

double cost_alt(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    const StationaryOps ops = stationary_operators(model, K);
    return (ops.D * (model.Q + K.transpose() * model.R * K)).trace() +
           model.sigma * model.sigma * model.R.trace();
}

Mat cost_gradient(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    const StationaryOps ops = stationary_operators(model, K);
    const Mat G = (model.R + model.B.transpose() * ops.P * model.B) * K -
                  model.B.transpose() * ops.P * model.A;
    return 2.0 * G * ops.D;
}

Mat natural_gradient(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    const StationaryOps ops = stationary_operators(model, K);
    return (model.R + model.B.transpose() * ops.P * model.B) * K -
           model.B.transpose() * ops.P * model.A;
}

double cost_difference(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                       const Eigen::Ref<const Mat>& K2) {
    const StationaryOps ops = stationary_operators(model, K);
    const Mat D2 = stationary_operators(model, K2).D;
    const Mat G = (model.R + model.B.transpose() * ops.P * model.B) * K -
                  model.B.transpose() * ops.P * model.A;
    const Mat dK = K - K2;
    const Mat inner = dK.transpose() * G + G.transpose() * dK -
                      dK.transpose() * (model.R + model.B.transpose() * ops.P * model.B) * dK;
    return (D2 * inner).trace();
}

RiccatiSolution solve_riccati(const LqrModel& model) {
    constexpr double kTol = 1e-12;
    constexpr int kBudget = 100000;
    const Mat& A = model.A;
    const Mat& B = model.B;

    Mat P = model.Q;
    int iterations = 0;
    double rel_diff = std::numeric_limits<double>::infinity();
    while (iterations < kBudget) {
        const Mat BtPA = B.transpose() * P * A;
        Eigen::LLT<Mat> gram(symmetrize(model.R + B.transpose() * P * B));
        if (gram.info() != Eigen::Success)
            throw RiccatiNonConvergence("Riccati iteration: R + B^T P B lost definiteness");
        Mat next = symmetrize(model.Q + A.transpose() * P * A -
                              BtPA.transpose() * gram.solve(BtPA));
        ++iterations;
        rel_diff = (next - P).norm() / std::max(1.0, P.norm());
        P = next;
        if (rel_diff <= kTol) break;
    }
    if (rel_diff > kTol)
        throw RiccatiNonConvergence("Riccati iteration did not converge within budget");

    const Mat BtPA = B.transpose() * P * A;
    Eigen::LLT<Mat> gram(symmetrize(model.R + B.transpose() * P * B));
    RiccatiSolution out;
    out.K = gram.solve(BtPA);
    out.P = P;
    out.iterations = iterations;
    const Mat res = model.Q + A.transpose() * P * A - BtPA.transpose() * gram.solve(BtPA) - P;
    out.residual = res.norm() / std::max(1.0, P.norm());

    const double rho = spectral_radius(model.A - model.B * out.K);
    if (rho >= 1.0) throw UnstableClosedLoop(rho);
    return out;
}

ValuePair value_functions(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                          const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u) {
    const StationaryOps ops = stationary_operators(model, K);
    Vec z(x.size() + u.size());
    z << x, u;
    const double trDP = (ops.D * ops.P).trace();
    ValuePair out;
    out.V = x.dot(ops.P * x) - trDP;
    const double offset =
        model.sigma * model.sigma *
            (model.R.trace() + (ops.P * model.B * model.B.transpose()).trace()) +
        trDP;
    out.Q = z.dot(ops.theta * z) - offset;
    return out;
}

Mat psi_exact(const LqrModel& model, const Eigen::Ref<const Mat>& K,
              const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u) {
    const Mat E = concat_transition(model, K);
    Vec z(x.size() + u.size());
    z << x, u;
    const Vec Ez = E * z;
    return Ez * Ez.transpose() + concat_noise_cov(model, K) - z * z.transpose();
}

Mat critic_grad_integrand(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                          const Eigen::Ref<const Mat>& theta, const Eigen::Ref<const Vec>& x,
                          const Eigen::Ref<const Vec>& u) {
    const Mat psi = psi_exact(model, K, x, u);
    const double c = x.dot(model.Q * x) + u.dot(model.R * u);
    return (c + (psi * theta).trace()) * psi;
}

Mat critic_grad_exact(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                      const Eigen::Ref<const Mat>& theta) {
    if ((theta - theta.transpose()).norm() > 1e-9 * std::max(1.0, theta.norm()))
        throw AsymmetricTheta("critic parameter must be symmetric");
    const StationaryOps ops = stationary_operators(model, K);
    const Mat S = bellman_slack(model, ops.E, theta);
    // E[(z^T S z + const) psi(z)] collapses to 2 (E T E^T - T) with
    // T = Sigma S Sigma; the constant term drops by stationarity.
    const Mat T = ops.Sigma * S * ops.Sigma;
    return 2.0 * symmetrize(ops.E * T * ops.E.transpose() - T);
}

Mat critic_grad_exact_at_cov(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                             const Eigen::Ref<const Mat>& theta,
                             const Eigen::Ref<const Mat>& cov) {
    if ((theta - theta.transpose()).norm() > 1e-9 * std::max(1.0, theta.norm()))
        throw AsymmetricTheta("critic parameter must be symmetric");
    require_stable(model, K);
    const Mat E = concat_transition(model, K);
    const Mat Sigma_eps = concat_noise_cov(model, K);
    const Mat S = bellman_slack(model, E, theta);

    // Full fourth-moment expansion for z ~ N(0, cov); the stationarity
    // cancellations do not apply for a general covariance.
    auto drift = [&](const Mat& X) -> Mat { return E * X * E.transpose() - X; };
    const Mat fourth = (S * cov).trace() * cov + 2.0 * cov * S * cov;
    const Mat grad = drift(fourth) + (S * cov).trace() * Sigma_eps +
                     (Sigma_eps * theta).trace() * (drift(Mat(cov)) + Sigma_eps);
    return symmetrize(grad);
}

double critic_loss_exact(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                         const Eigen::Ref<const Mat>& theta) {
    const StationaryOps ops = stationary_operators(model, K);
    const Mat S = bellman_slack(model, ops.E, symmetrize(theta));
    const Mat SSig = S * ops.Sigma;
    const double g = (ops.Sigma_eps * theta).trace() - ops.J;
    return (SSig * SSig).trace() + 0.5 * (SSig.trace() + g) * (SSig.trace() + g);
}

double critic_hessian_quadratic(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                                const Eigen::Ref<const Mat>& M) {
    if ((M - M.transpose()).norm() > 1e-9 * std::max(1.0, M.norm()))
        throw AsymmetricTheta("Hessian direction must be symmetric");
    const StationaryOps ops = stationary_operators(model, K);
    const Mat W = ops.E.transpose() * M * ops.E - M;
    const Mat SW = ops.Sigma * W;
    return 2.0 * (SW * SW).trace();
}

Mat fisher_tensor(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    if (model.sigma <= 0)
        throw NonPositiveConstant("fisher_tensor requires a stochastic policy (sigma > 0)");
    const StationaryOps ops = stationary_operators(model, K);
    const auto k = model.control_dim();
    // Row-major flattening of k x d gains: F = (1/sigma^2) I_k (x) D_K.
    return kron(Mat::Identity(k, k), ops.D) / (model.sigma * model.sigma);
}

DominanceBounds gradient_dominance_check(const LqrModel& model, const Eigen::Ref<const Mat>& K) {
    const StationaryOps ops = stationary_operators(model, K);
    const RiccatiSolution opt = solve_riccati(model);
    const StationaryOps star = stationary_operators(model, opt.K);

    const Mat G = (model.R + model.B.transpose() * ops.P * model.B) * K -
                  model.B.transpose() * ops.P * model.A;
    const double trGG = G.squaredNorm();
    const double c_P = operator_norm(ops.P);
    const double c2 = min_eigenvalue_sym(model.noise_cov_eff()) /
                      (operator_norm(model.R) + c_P * std::pow(operator_norm(model.B), 2));
    const double c3 = operator_norm(star.D) / min_eigenvalue_sym(model.R);

    DominanceBounds out;
    out.lower = c2 * trGG;
    out.gap = ops.J - star.J;
    out.upper = c3 * trGG;
    return out;
}

Mat burn_in_state_cov(const LqrModel& model, const Eigen::Ref<const Mat>& K, int n) {
    const Mat M = closed_loop(model, K);
    const Mat D_eps = model.noise_cov_eff();
    Mat D = Mat::Zero(model.state_dim(), model.state_dim());
    for (int s = 0; s < n; ++s) D = symmetrize(D_eps + M * D * M.transpose());
    return D;
}

Vec vec_rowmajor(const Eigen::Ref<const Mat>& M) {
    Vec v(M.size());
    Eigen::Index idx = 0;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) v(idx++) = M(i, j);
    return v;
}

}  // namespace lqrac
