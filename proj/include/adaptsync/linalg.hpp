#pragma once

#include <Eigen/Dense>

#include <cstddef>

#include "adaptsync/errors.hpp"

namespace adaptsync {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Stacked network state X = (x_1^T, ..., x_N^T)^T viewed as an n x N matrix
// whose column i is node i.
inline Eigen::Map<const Matrix> node_view(const Vector& stacked, std::size_t n) {
    const auto n_total = static_cast<std::size_t>(stacked.size());
    if (n == 0 || n_total % n != 0) {
        throw DimensionError("stacked state of length " + std::to_string(n_total) +
                             " is not a multiple of node dimension " + std::to_string(n));
    }
    return {stacked.data(), static_cast<Eigen::Index>(n),
            static_cast<Eigen::Index>(n_total / n)};
}

inline Eigen::Map<Matrix> node_view(Vector& stacked, std::size_t n) {
    const auto n_total = static_cast<std::size_t>(stacked.size());
    if (n == 0 || n_total % n != 0) {
        throw DimensionError("stacked state of length " + std::to_string(n_total) +
                             " is not a multiple of node dimension " + std::to_string(n));
    }
    return {stacked.data(), static_cast<Eigen::Index>(n),
            static_cast<Eigen::Index>(n_total / n)};
}

inline void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + " must be square, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

/// Xᵀ(B⊗Iₙ)Y for stacked X, Y.
inline double kron_quadratic(const Matrix& b, const Vector& x, const Vector& y, std::size_t n) {
    if (x.size() != y.size()) {
        throw DimensionError("stacked vectors differ in length");
    }
    const auto xm = node_view(x, n);
    const auto ym = node_view(y, n);
    if (b.rows() != xm.cols() || b.cols() != xm.cols()) {
        throw DimensionError("matrix size does not match node count");
    }
    return xm.cwiseProduct(ym * b.transpose()).sum();
}

/// Σ_{i<j} w_ij (x_i - x_j)ᵀ diag(γ) (y_i - y_j), reading only the upper
/// triangle of w. Equals -Xᵀ(W⊗Γ)Y for symmetric W with zero row sums, but
/// works on differences only, so a large common mode cannot cancel.
inline double pairwise_form(const Matrix& w, const Vector& x, const Vector& y, std::size_t n,
                            const Vector* gamma = nullptr) {
    if (x.size() != y.size()) {
        throw DimensionError("stacked vectors differ in length");
    }
    const auto xm = node_view(x, n);
    const auto ym = node_view(y, n);
    const Eigen::Index nodes = xm.cols();
    if (w.rows() != nodes || w.cols() != nodes) {
        throw DimensionError("matrix size does not match node count");
    }
    double total = 0.0;
    for (Eigen::Index j = 1; j < nodes; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double wij = w(i, j);
            if (wij == 0.0) continue;
            double dot = 0.0;
            for (Eigen::Index k = 0; k < xm.rows(); ++k) {
                const double g = gamma ? (*gamma)(k) : 1.0;
                dot += g * (xm(k, i) - xm(k, j)) * (ym(k, i) - ym(k, j));
            }
            total += wij * dot;
        }
    }
    return total;
}

} // namespace adaptsync
