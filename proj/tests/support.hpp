// Shared helpers for the test binaries: canonical example models, the
// truncated-series fixed-point oracle, and small statistical utilities.

#ifndef LQRAC_TESTS_SUPPORT_HPP
#define LQRAC_TESTS_SUPPORT_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lqrac/harness.hpp"

namespace lqrac::testing {

inline std::string model_path(const std::string& name) {
    return std::string(LQRAC_MODEL_DIR) + "/" + name;
}

inline LqrModel example1() { return load_model(model_path("example1.json")); }
inline LqrModel example2() { return load_model(model_path("example2.json")); }

/// 1-dimensional model from scalars; handy for hand-computable fixed points.
inline LqrModel scalar_model(double a, double b, double q, double r, double d_xi, double sigma) {
    LqrModel m;
    m.A = Mat::Constant(1, 1, a);
    m.B = Mat::Constant(1, 1, b);
    m.Q = Mat::Constant(1, 1, q);
    m.R = Mat::Constant(1, 1, r);
    m.D_xi = Mat::Constant(1, 1, d_xi);
    m.sigma = sigma;
    return m;
}

/// Independent oracle for X = W + F X G: the truncated series
/// sum_{s<=S} F^s W G^s with S picked so the tail is below 1e-14.
inline Mat series_fixed_point(const Mat& F, const Mat& G, const Mat& W) {
    const double rate = spectral_radius(F) * spectral_radius(G);
    int terms = 64;
    if (rate > 0) {
        terms = static_cast<int>(std::ceil(std::log(1e-14) / std::log(rate))) + 2;
        terms = std::min(terms, 20000);
    }
    Mat X = W;
    Mat term = W;
    for (int s = 1; s <= terms; ++s) {
        term = F * term * G;
        X += term;
    }
    return X;
}

/// Entrywise Welford accumulator for matrix-valued Monte Carlo.
struct MatrixMoments {
    Mat mean;
    Mat m2;
    long count = 0;

    explicit MatrixMoments(Eigen::Index n) : mean(Mat::Zero(n, n)), m2(Mat::Zero(n, n)) {}

    void add(const Mat& sample) {
        ++count;
        const Mat delta = sample - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta.cwiseProduct(sample - mean);
    }

    Mat standard_error() const {
        return (m2 / (static_cast<double>(count) - 1.0) / static_cast<double>(count)).cwiseSqrt();
    }

    /// Largest deviation from `reference` measured in standard errors.
    double worst_sigmas(const Mat& reference, double extra_abs_tol = 0.0) const {
        const Mat se = standard_error();
        double worst = 0;
        for (Eigen::Index i = 0; i < mean.rows(); ++i)
            for (Eigen::Index j = 0; j < mean.cols(); ++j) {
                const double dev =
                    std::max(0.0, std::abs(mean(i, j) - reference(i, j)) - extra_abs_tol);
                worst = std::max(worst, dev / (se(i, j) + 1e-300));
            }
        return worst;
    }
};

inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace lqrac::testing

#endif
