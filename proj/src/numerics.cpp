#include "lqrac/numerics.hpp"

#include <Eigen/Eigenvalues>

#include "lqrac/errors.hpp"

namespace lqrac {

bool all_finite(const Eigen::Ref<const Mat>& M) { return M.allFinite(); }

Mat symmetrize(const Eigen::Ref<const Mat>& M) { return 0.5 * (M + M.transpose()); }

double frobenius_norm(const Eigen::Ref<const Mat>& M) { return M.norm(); }

double operator_norm(const Eigen::Ref<const Mat>& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()(0);
}

double spectral_radius(const Eigen::Ref<const Mat>& M) {
    if (M.rows() != M.cols()) throw DimensionMismatch("spectral_radius: matrix must be square");
    if (M.size() == 0) return 0.0;
    Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NonConvergence("spectral_radius: eigenvalue iteration failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat cholesky(const Eigen::Ref<const Mat>& M, double jitter) {
    if (M.rows() != M.cols()) throw DimensionMismatch("cholesky: matrix must be square");
    const double asym = (M - M.transpose()).norm();
    if (asym > 1e-10 * std::max(1.0, M.norm()))
        throw NotPsd("cholesky: input is not symmetric");

    const Mat S = symmetrize(M);
    Eigen::LLT<Mat> llt(S);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    if (jitter > 0.0) {
        Mat J = S + jitter * Mat::Identity(S.rows(), S.cols());
        llt.compute(J);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw NotPsd("cholesky: matrix is not positive semi-definite");
}

Mat kron(const Eigen::Ref<const Mat>& A, const Eigen::Ref<const Mat>& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

Mat solve_kron_linear(const Eigen::Ref<const Mat>& F, const Eigen::Ref<const Mat>& G,
                      const Eigen::Ref<const Mat>& W) {
    const Eigen::Index n = W.rows();
    if (F.rows() != F.cols() || G.rows() != G.cols())
        throw DimensionMismatch("solve_kron_linear: F and G must be square");
    if (F.rows() != n || G.rows() != W.cols())
        throw DimensionMismatch("solve_kron_linear: incompatible shapes");

    // Column-major vectorization: vec(F X G) = (G^T (x) F) vec(X).
    Mat lhs = Mat::Identity(n * W.cols(), n * W.cols()) - kron(G.transpose(), F);
    Eigen::FullPivLU<Mat> lu(lhs);
    if (!lu.isInvertible())
        throw SingularSystem("solve_kron_linear: vectorized system is singular");
    Vec w = Eigen::Map<const Vec>(W.data(), W.size());
    Vec x = lu.solve(w);
    return Eigen::Map<const Mat>(x.data(), W.rows(), W.cols());
}

double min_eigenvalue_sym(const Eigen::Ref<const Mat>& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(M));
    if (es.info() != Eigen::Success)
        throw NonConvergence("min_eigenvalue_sym: eigensolver failed");
    return es.eigenvalues()(0);
}

}  // namespace lqrac
