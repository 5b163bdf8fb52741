#pragma once

// Reference computations that share no code path with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense Kronecker product A ⊗ B.
inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Vec block(const Vec& x, std::size_t i, std::size_t n) {
    return x.segment(static_cast<Eigen::Index>(i * n), static_cast<Eigen::Index>(n));
}

/// (1/2) Σ_i Σ_j ξ_i ξ_j (x_i − x_j)ᵀ(y_i − y_j), full double sum over ordered pairs.
inline double pairwise_sum(const Vec& xi, const Vec& x, const Vec& y, std::size_t n) {
    const auto nodes = static_cast<std::size_t>(xi.size());
    double total = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = 0; j < nodes; ++j) {
            total += xi(i) * xi(j) * (block(x, i, n) - block(x, j, n)).dot(block(y, i, n) - block(y, j, n));
        }
    }
    return 0.5 * total;
}

/// Strong connectivity from the Warshall transitive closure of the edge relation a_ij > 0.
inline bool strongly_connected(const Mat& a) {
    const Eigen::Index n = a.rows();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (Eigen::Index i = 0; i < n; ++i) {
        r[i][i] = true;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && a(i, j) > 0.0) r[i][j] = true;
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (r[i][k] && r[k][j]) r[i][j] = true;
            }
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!r[i][j]) return false;
        }
    }
    return true;
}

/// Left null vector from a general eigendecomposition of Aᵀ, scaled to unit sum.
inline Vec null_vector_eig(const Mat& a) {
    Eigen::EigenSolver<Mat> es(a.transpose());
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k) {
        if (std::abs(es.eigenvalues()(k)) < std::abs(es.eigenvalues()(best))) best = k;
    }
    Vec v = es.eigenvectors().col(best).real();
    return v / v.sum();
}

/// Sorted (descending) eigenvalues of a symmetric matrix via the characteristic
/// route of a general solver, real parts only.
inline std::vector<double> eigenvalues_desc(const Mat& s) {
    Eigen::EigenSolver<Mat> es(s);
    std::vector<double> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()(k).real());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// Ẋ = F(X) + c (A⊗Γ) X assembled with explicit per-node loops.
inline Vec naive_rhs(const std::function<Vec(const Vec&)>& f, const Mat& a, const Vec& gamma, const Vec& x,
                     double c) {
    const auto n = static_cast<std::size_t>(gamma.size());
    const auto nodes = static_cast<std::size_t>(a.rows());
    Vec out(x.size());
    for (std::size_t i = 0; i < nodes; ++i) {
        Vec acc = f(block(x, i, n));
        for (std::size_t j = 0; j < nodes; ++j) {
            for (std::size_t k = 0; k < n; ++k) acc(k) += c * a(i, j) * gamma(k) * x(j * n + k);
        }
        out.segment(static_cast<Eigen::Index>(i * n), static_cast<Eigen::Index>(n)) = acc;
    }
    return out;
}

/// Fourth-order Taylor polynomial of e^h.
inline double taylor4_exp(double h) { return 1.0 + h + h * h / 2.0 + h * h * h / 6.0 + h * h * h * h / 24.0; }

} // namespace oracle
