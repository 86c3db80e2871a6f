// Dense real-matrix kernel shared by the model, sampler, and trainer layers.
// Everything here is dimension-agnostic and free of LQR-specific knowledge.

#ifndef LQRAC_NUMERICS_HPP
#define LQRAC_NUMERICS_HPP

#include <Eigen/Dense>

namespace lqrac {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// True iff every entry of M is finite (no NaN/Inf).
bool all_finite(const Eigen::Ref<const Mat>& M);

/// (M + M^T) / 2.
Mat symmetrize(const Eigen::Ref<const Mat>& M);

double frobenius_norm(const Eigen::Ref<const Mat>& M);

/// Largest singular value.
double operator_norm(const Eigen::Ref<const Mat>& M);

/// Largest eigenvalue magnitude of a square matrix.
/// Throws NonConvergence if the dense eigensolver fails.
double spectral_radius(const Eigen::Ref<const Mat>& M);

/// Lower-triangular L with L L^T = M (+ jitter * I if the plain
/// factorization fails and jitter > 0). M must be symmetric to 1e-10
/// relative. Throws NotPsd if the factorization fails even with jitter.
Mat cholesky(const Eigen::Ref<const Mat>& M, double jitter = 0.0);

/// Kronecker product, row blocks of A scaling copies of B.
Mat kron(const Eigen::Ref<const Mat>& A, const Eigen::Ref<const Mat>& B);

/// Unique X solving X = W + F X G, via the (I - G^T (x) F) vectorized
/// linear system. Requires the map X -> F X G to be a contraction
/// (rho(F) rho(G) < 1 for every use in this project). Throws
/// SingularSystem if the vectorized system is numerically singular,
/// DimensionMismatch on incompatible shapes.
Mat solve_kron_linear(const Eigen::Ref<const Mat>& F, const Eigen::Ref<const Mat>& G,
                      const Eigen::Ref<const Mat>& W);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue_sym(const Eigen::Ref<const Mat>& M);

}  // namespace lqrac

#endif
