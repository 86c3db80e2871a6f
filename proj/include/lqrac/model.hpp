// Problem instances and the analytic, model-based oracle layer: stationary
// operators per gain, exact cost/gradients, the exact critic target, the
// Riccati-optimal gain, and closed-form quantities used for error tracking
// and verification. The model-free training path never calls into here; it
// only sees the black-box environment in sampler.hpp.

#ifndef LQRAC_MODEL_HPP
#define LQRAC_MODEL_HPP

#include "lqrac/numerics.hpp"

namespace lqrac {

/// Ground-truth problem instance. Dynamics x' = A x + B u + xi with
/// xi ~ N(0, D_xi), one-step cost x^T Q x + u^T R u, and Gaussian policy
/// u ~ N(-K x, sigma^2 I).
struct LqrModel {
    Mat A;     // d x d
    Mat B;     // d x k
    Mat Q;     // d x d, symmetric positive definite
    Mat R;     // k x k, symmetric positive definite
    Mat D_xi;  // d x d, symmetric positive semi-definite
    double sigma = 1.0;

    Eigen::Index state_dim() const { return A.rows(); }
    Eigen::Index control_dim() const { return B.cols(); }

    /// Effective closed-loop noise covariance D_xi + sigma^2 B B^T.
    Mat noise_cov_eff() const { return D_xi + sigma * sigma * B * B.transpose(); }

    /// Throws ModelParseError naming the first violated invariant.
    void validate() const;
};

/// Per-gain stationary quantities. All symmetric members are explicitly
/// symmetrized; each satisfies its defining fixed-point equation to 1e-10
/// relative residual.
struct StationaryOps {
    Mat E;          // concatenated transition [[A, B], [-KA, -KB]]
    Mat Sigma_eps;  // concatenated noise covariance
    Mat D;          // stationary state covariance D_K
    Mat P;          // value matrix P_K
    Mat Sigma;      // stationary state-action covariance Sigma_K
    Mat theta;      // exact critic target theta_K
    double J;       // average cost J(K)
    double rho;     // spectral radius of A - BK
};

struct RiccatiSolution {
    Mat P;            // fixed point of the Riccati equation
    Mat K;            // optimal gain (R + B^T P B)^{-1} B^T P A
    double residual;  // relative Riccati residual of P
    int iterations;
};

struct DominanceBounds {
    double lower;  // c2 * Tr(G G^T)
    double gap;    // J(K) - J(K*)
    double upper;  // c3 * Tr(G G^T)
};

Mat closed_loop(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// Concatenated transition matrix E for the joint (x, u) chain.
Mat concat_transition(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// Concatenated noise covariance Sigma_eps for the joint chain.
Mat concat_noise_cov(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// Stationary state-action covariance assembled from a state covariance D.
Mat state_action_cov(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                     const Eigen::Ref<const Mat>& D);

/// All stationary operators for a stabilizing gain.
/// Throws UnstableGain if rho(A - BK) >= 1.
StationaryOps stationary_operators(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// Average cost J(K) = Tr(D_eps P_K) + sigma^2 Tr(R).
double cost(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// Same value through the stationary-covariance route
/// Tr[D_K (Q + K^T R K)] + sigma^2 Tr(R).
double cost_alt(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// Exact gradient of J: 2 [(R + B^T P_K B) K - B^T P_K A] D_K.
Mat cost_gradient(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// G_K = (R + B^T P_K B) K - B^T P_K A; the natural gradient direction up
/// to the constant absorbed into the actor step size.
Mat natural_gradient(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// Exact cost difference J(K) - J(K2) without forming either cost:
/// Tr[D_{K2} ((K-K2)^T G_K + G_K^T (K-K2) - (K-K2)^T (R + B^T P_K B)(K-K2))].
double cost_difference(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                       const Eigen::Ref<const Mat>& K2);

/// Fixed-point iteration for the Riccati equation, started at P = Q.
/// Throws RiccatiNonConvergence / UnstableClosedLoop.
RiccatiSolution solve_riccati(const LqrModel& model);

/// Exact state and state-action values at (x, u) under the policy of K.
struct ValuePair {
    double V;
    double Q;
};
ValuePair value_functions(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                          const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u);

/// Exact conditional feature drift psi(x, u) = E z z^T E^T + Sigma_eps - z z^T.
Mat psi_exact(const LqrModel& model, const Eigen::Ref<const Mat>& K,
              const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u);

/// Exact per-pair gradient integrand f(x, u) = (c + <psi, theta>) psi.
Mat critic_grad_integrand(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                          const Eigen::Ref<const Mat>& theta, const Eigen::Ref<const Vec>& x,
                          const Eigen::Ref<const Vec>& u);

/// Closed-form critic gradient under the stationary distribution, via the
/// Gaussian fourth-moment identity. Vanishes at theta = theta_K.
/// Throws AsymmetricTheta if theta is not symmetric.
Mat critic_grad_exact(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                      const Eigen::Ref<const Mat>& theta);

/// Closed-form critic gradient when the state-action pair is drawn from
/// N(0, cov) instead of the stationary distribution; used to evaluate the
/// exact burn-in bias of the sampled estimator.
Mat critic_grad_exact_at_cov(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                             const Eigen::Ref<const Mat>& theta, const Eigen::Ref<const Mat>& cov);

/// Closed-form critic loss (up to the constant J-offset handling, exact).
double critic_loss_exact(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                         const Eigen::Ref<const Mat>& theta);

/// Hessian quadratic form E[(Tr[M psi])^2] = 2 Tr[(Sigma W)^2] with
/// W = E^T M E - M; strictly positive for nonzero symmetric M.
double critic_hessian_quadratic(const LqrModel& model, const Eigen::Ref<const Mat>& K,
                                const Eigen::Ref<const Mat>& M);

/// Flattened Fisher information of the policy, acting on row-major flattened
/// k x d matrices. Satisfies sigma^2 F(K) vec(G_K) = vec(G_K D_K).
Mat fisher_tensor(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// Gradient-dominance sandwich c2 Tr(GG^T) <= J(K) - J(K*) <= c3 Tr(GG^T)
/// with the P-norm constant instantiated per-K.
DominanceBounds gradient_dominance_check(const LqrModel& model, const Eigen::Ref<const Mat>& K);

/// State covariance after n steps from x0 = 0 (truncation of the stationary
/// series); converges to D_K geometrically.
Mat burn_in_state_cov(const LqrModel& model, const Eigen::Ref<const Mat>& K, int n);

/// Row-major flattening of a matrix, matching fisher_tensor's convention.
Vec vec_rowmajor(const Eigen::Ref<const Mat>& M);

}  // namespace lqrac

#endif
