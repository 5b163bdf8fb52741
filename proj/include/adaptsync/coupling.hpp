#pragma once

// Outer coupling matrices: A1/A2 validation, irreducibility, the normalized
// left null vector xi, the projection U = diag(xi) - xi xi^T, lambda_2 of the
// xi-symmetrized matrix, and the network generators used by the experiments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "adaptsync/linalg.hpp"

namespace adaptsync {

inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kSpectralTol = 1e-10;
inline constexpr int kMaxRegenerations = 100;

enum class ConditionClass { A1, A2, Invalid };

inline const char* to_string(ConditionClass c) noexcept {
    switch (c) {
        case ConditionClass::A1: return "A1";
        case ConditionClass::A2: return "A2";
        case ConditionClass::Invalid: return "invalid";
    }
    return "invalid";
}

struct ValidationReport {
    ConditionClass tag = ConditionClass::Invalid;
    bool irreducible = false;
    std::vector<std::string> violations;
    std::vector<std::complex<double>> spectrum;

    bool valid() const noexcept { return tag != ConditionClass::Invalid; }
};

namespace detail {

inline double entry_scale(const Matrix& a) {
    return std::max(1.0, a.cwiseAbs().maxCoeff());
}

// Nodes reachable from `start` following edges j -> i whenever a(i, j) > 0.
inline std::vector<bool> reachable(const Matrix& a, Eigen::Index start, bool transpose) {
    const Eigen::Index n = a.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
        const Eigen::Index j = stack.back();
        stack.pop_back();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j || seen[static_cast<std::size_t>(i)]) continue;
            const double w = transpose ? a(j, i) : a(i, j);
            if (w > 0.0) {
                seen[static_cast<std::size_t>(i)] = true;
                stack.push_back(i);
            }
        }
    }
    return seen;
}

} // namespace detail

/// True iff the directed interaction graph (edge j -> i when a_ij > 0, i != j)
/// is strongly connected.
inline bool is_irreducible(const Matrix& a) {
    require_square(a, "coupling matrix");
    if (a.rows() == 0) return false;
    const auto all = [](const std::vector<bool>& v) {
        return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
    };
    return all(detail::reachable(a, 0, false)) && all(detail::reachable(a, 0, true));
}

/// Classify a square matrix as A1, A2 or invalid and list every failed check.
/// Reducible matrices are reported invalid: every downstream use needs a
/// strictly positive left null vector.
inline ValidationReport validate_condition(const Matrix& a) {
    require_square(a, "coupling matrix");
    const Eigen::Index n = a.rows();
    if (n < 2) {
        throw DimensionError("coupling matrix needs at least 2 nodes");
    }

    ValidationReport report;
    if (!a.allFinite()) {
        report.violations.emplace_back("matrix has non-finite entries");
        return report;
    }

    const double scale = detail::entry_scale(a);
    bool offdiag_ok = true;
    for (Eigen::Index i = 0; i < n && offdiag_ok; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && a(i, j) < 0.0) {
                offdiag_ok = false;
                report.violations.push_back("negative off-diagonal entry at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
                break;
            }
        }
    }

    const double row_tol = kStructuralTol * static_cast<double>(n) * scale;
    const Vector rows = a.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(rows(i)) > row_tol) {
            report.violations.push_back("row " + std::to_string(i) + " sums to " +
                                        std::to_string(rows(i)) + ", expected 0");
        }
    }

    report.irreducible = is_irreducible(a);
    if (!report.irreducible) {
        report.violations.emplace_back("not irreducible (interaction graph is not strongly connected)");
    }

    Eigen::EigenSolver<Matrix> solver(a, false);
    const auto& ev = solver.eigenvalues();
    report.spectrum.assign(ev.data(), ev.data() + ev.size());
    const double eig_tol = 1e-8 * static_cast<double>(n) * scale;
    int zeros = 0;
    bool nonneg_other = false;
    for (const auto& lambda : report.spectrum) {
        if (std::abs(lambda) <= eig_tol) {
            ++zeros;
        } else if (lambda.real() >= -eig_tol) {
            nonneg_other = true;
        }
    }
    if (zeros != 1) {
        report.violations.push_back("zero eigenvalue has multiplicity " + std::to_string(zeros) +
                                    ", expected 1");
    }
    if (nonneg_other) {
        report.violations.emplace_back("a nonzero eigenvalue has non-negative real part");
    }

    if (!report.violations.empty()) {
        return report;
    }
    report.tag = ConditionClass::A1;
    const double sym_tol = kStructuralTol * scale;
    if ((a - a.transpose()).cwiseAbs().maxCoeff() <= sym_tol) {
        report.tag = ConditionClass::A2;
    }
    return report;
}

/// Dense N x N outer coupling matrix together with its validation result.
/// Immutable after construction.
class CouplingMatrix {
public:
    explicit CouplingMatrix(Matrix entries)
        : entries_(std::move(entries)), report_(validate_condition(entries_)) {}

    /// Construct and insist on at least `required` (A2 implies A1).
    static CouplingMatrix require(Matrix entries, ConditionClass required) {
        CouplingMatrix m(std::move(entries));
        m.require(required);
        return m;
    }

    void require(ConditionClass required) const {
        if (!report_.valid()) {
            std::string msg = "coupling matrix is not A1:";
            for (const auto& v : report_.violations) msg += " " + v + ";";
            throw StructuralError(msg);
        }
        if (required == ConditionClass::A2 && report_.tag != ConditionClass::A2) {
            throw StructuralError("coupling matrix is A1 but not symmetric (A2 required)");
        }
    }

    std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& entries() const noexcept { return entries_; }
    ConditionClass condition() const noexcept { return report_.tag; }
    const ValidationReport& report() const noexcept { return report_; }
    bool irreducible() const noexcept { return report_.irreducible; }

private:
    Matrix entries_;
    ValidationReport report_;
};

inline bool is_irreducible(const CouplingMatrix& a) { return a.irreducible(); }

/// Normalized left null vector: xi^T A = 0, sum(xi) = 1.
class LeftEigenvector {
public:
    /// Scale `raw` to unit sum; all entries must share one strict sign.
    static LeftEigenvector normalized(Vector raw) {
        const double total = raw.sum();
        if (!(std::abs(total) > 0.0) || !raw.allFinite()) {
            throw SpectrumError("left null vector cannot be normalized");
        }
        raw /= total;
        if (raw.minCoeff() <= 0.0) {
            throw StructuralError("left null vector has non-positive entries (matrix reducible?)");
        }
        return LeftEigenvector(std::move(raw));
    }

    static LeftEigenvector uniform(std::size_t n) {
        return LeftEigenvector(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
    }

    const Vector& values() const noexcept { return xi_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(xi_.size()); }
    double operator[](std::size_t i) const { return xi_(static_cast<Eigen::Index>(i)); }

    double residual(const Matrix& a) const { return (xi_.transpose() * a).cwiseAbs().maxCoeff(); }

private:
    explicit LeftEigenvector(Vector xi) : xi_(std::move(xi)) {}
    Vector xi_;
};

/// Null-space solve of A^T via SVD, sign-fixed and normalized.
inline LeftEigenvector left_eigenvector(const CouplingMatrix& a) {
    a.require(ConditionClass::A1);
    const Matrix& m = a.entries();
    const Eigen::Index n = m.rows();

    Eigen::JacobiSVD<Matrix> svd(m.transpose(), Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    if (sv(n - 2) <= kSpectralTol * sv(0)) {
        throw SpectrumError("null space of A^T has dimension > 1");
    }
    Vector v = svd.matrixV().col(n - 1);
    if (v.sum() < 0.0) v = -v;
    auto xi = LeftEigenvector::normalized(std::move(v));

    const double norm_inf = m.cwiseAbs().rowwise().sum().maxCoeff();
    if (xi.residual(m) > kSpectralTol * norm_inf) {
        throw SpectrumError("left null vector residual exceeds tolerance");
    }
    return xi;
}

/// U = diag(xi) - xi xi^T. -U is A2; its quadratic form vanishes exactly on
/// the synchronization manifold.
class ProjectionMatrix {
public:
    const Matrix& matrix() const noexcept { return u_; }
    std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(u_.rows()); }

private:
    friend ProjectionMatrix build_projection(const LeftEigenvector& xi);
    explicit ProjectionMatrix(Matrix u) : u_(std::move(u)) {}
    Matrix u_;
};

inline ProjectionMatrix build_projection(const LeftEigenvector& xi) {
    const Vector& v = xi.values();
    Matrix u = Matrix(v.asDiagonal()) - v * v.transpose();
    const auto report = validate_condition(-u);
    if (report.tag != ConditionClass::A2) {
        throw StructuralError("-U failed A2 validation");
    }
    return ProjectionMatrix(std::move(u));
}

/// X^T (U ⊗ I_n) Y.
inline double bilinear_form(const ProjectionMatrix& u, const Vector& x, const Vector& y, std::size_t n) {
    if (x.size() != y.size() ||
        static_cast<std::size_t>(x.size()) != u.n_nodes() * n) {
        throw DimensionError("stacked states must have length N*n");
    }
    return kron_quadratic(u.matrix(), x, y, n);
}

/// (1/2) sum_ij xi_i xi_j (x_i - x_j)^T (y_i - y_j); equals bilinear_form.
inline double bilinear_form_pairwise(const LeftEigenvector& xi, const Vector& x, const Vector& y,
                                     std::size_t n) {
    if (x.size() != y.size() || static_cast<std::size_t>(x.size()) != xi.size() * n) {
        throw DimensionError("stacked states must have length N*n");
    }
    const auto xm = node_view(x, n);
    const auto ym = node_view(y, n);
    const Eigen::Index nodes = xm.cols();
    double total = 0.0;
    for (Eigen::Index i = 0; i < nodes; ++i) {
        for (Eigen::Index j = i + 1; j < nodes; ++j) {
            total += xi.values()(i) * xi.values()(j) * (xm.col(i) - xm.col(j)).dot(ym.col(i) - ym.col(j));
        }
    }
    return total;  // each unordered pair appears twice in the full sum, cancelling the 1/2
}

/// Largest non-zero eigenvalue of diag(xi) A + A^T diag(xi). Negative for
/// irreducible A1 input.
inline double lambda2(const Matrix& a, const LeftEigenvector& xi) {
    require_square(a, "coupling matrix");
    if (static_cast<std::size_t>(a.rows()) != xi.size()) {
        throw DimensionError("left eigenvector length does not match matrix");
    }
    const auto d = xi.values().asDiagonal();
    const Matrix s = d * a + a.transpose() * d;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    const Vector& ev = solver.eigenvalues();  // ascending
    const Eigen::Index n = ev.size();
    const double tol = kSpectralTol * std::max(1.0, s.cwiseAbs().maxCoeff()) * static_cast<double>(n);
    if (ev(n - 1) > tol) {
        throw SpectrumError("symmetrized matrix has a positive eigenvalue " + std::to_string(ev(n - 1)));
    }
    if (ev(n - 2) >= -tol) {
        throw SpectrumError("symmetrized matrix has a repeated zero eigenvalue");
    }
    return ev(n - 2);
}

inline double lambda2(const CouplingMatrix& a, const LeftEigenvector& xi) {
    a.require(ConditionClass::A1);
    return lambda2(a.entries(), xi);
}

/// Off-diagonals (a_ij + a_ji)/2, diagonal reset so rows sum to zero.
/// Identical to (A + A^T)/2 when A is symmetric or node-balanced.
inline Matrix symmetrized_laplacian(const Matrix& a) {
    require_square(a, "coupling matrix");
    Matrix b = 0.5 * (a + a.transpose());
    b.diagonal().setZero();
    b.diagonal() = -b.rowwise().sum();
    return b;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

namespace detail {

inline Matrix laplacian_from_weights(Matrix w) {
    w.diagonal().setZero();
    w.diagonal() = -w.rowwise().sum();
    return w;
}

// Uniform on (0, 1]; a zero weight would silently delete an edge.
inline double positive_unit(std::mt19937_64& rng) {
    return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <typename Build>
CouplingMatrix regenerate_until_irreducible(std::uint64_t seed, Build build) {
    for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
        Matrix a = build(seed + static_cast<std::uint64_t>(attempt));
        if (is_irreducible(a)) {
            return CouplingMatrix(std::move(a));
        }
    }
    throw StructuralError("random graph disconnected after " + std::to_string(kMaxRegenerations) +
                          " regenerations");
}

} // namespace detail

/// Watts-Strogatz ring (k/2 neighbours per side), edges rewired with
/// probability p, then every directed entry a_ij of an edge drawn
/// independently from U(0,1]. Asymmetric A1 in general.
inline CouplingMatrix generate_small_world_weighted(std::size_t n_nodes, std::size_t mean_degree,
                                                    double rewire_prob, std::uint64_t seed) {
    if (mean_degree == 0 || mean_degree % 2 != 0 || mean_degree >= n_nodes) {
        throw InvalidArgument("mean_degree must be even, positive and below the node count");
    }
    if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0)) {
        throw InvalidArgument("rewire_prob must lie in [0, 1]");
    }
    const auto n = static_cast<Eigen::Index>(n_nodes);
    const auto half = static_cast<Eigen::Index>(mean_degree / 2);
    return detail::regenerate_until_irreducible(seed, [=](std::uint64_t s) {
        std::mt19937_64 rng(s);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj =
            Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 1; j <= half; ++j) {
                const Eigen::Index t = (i + j) % n;
                adj(i, t) = adj(t, i) = true;
            }
        }
        for (Eigen::Index j = 1; j <= half; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                const Eigen::Index t = (i + j) % n;
                if (!adj(i, t) || coin(rng) >= rewire_prob) continue;
                std::vector<Eigen::Index> free;
                for (Eigen::Index w = 0; w < n; ++w) {
                    if (w != i && !adj(i, w)) free.push_back(w);
                }
                if (free.empty()) continue;
                std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
                const Eigen::Index w = free[pick(rng)];
                adj(i, t) = adj(t, i) = false;
                adj(i, w) = adj(w, i) = true;
            }
        }
        Matrix weights = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j && adj(i, j)) weights(i, j) = detail::positive_unit(rng);
            }
        }
        return detail::laplacian_from_weights(std::move(weights));
    });
}

/// Globally connected network: a_ij = 1 (i != j), a_ii = -(N-1).
inline CouplingMatrix generate_complete(std::size_t n_nodes) {
    if (n_nodes < 2) throw InvalidArgument("complete graph needs at least 2 nodes");
    const auto n = static_cast<Eigen::Index>(n_nodes);
    return CouplingMatrix(detail::laplacian_from_weights(Matrix::Ones(n, n)));
}

/// Erdős–Rényi graph with symmetric U(0,1] weights; regenerated until connected.
inline CouplingMatrix generate_random_symmetric(std::size_t n_nodes, double edge_prob, std::uint64_t seed) {
    if (n_nodes < 2) throw InvalidArgument("random graph needs at least 2 nodes");
    if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
        throw InvalidArgument("edge_prob must lie in (0, 1]");
    }
    const auto n = static_cast<Eigen::Index>(n_nodes);
    return detail::regenerate_until_irreducible(seed, [=](std::uint64_t s) {
        std::mt19937_64 rng(s);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        Matrix weights = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                if (coin(rng) < edge_prob) {
                    weights(i, j) = weights(j, i) = detail::positive_unit(rng);
                }
            }
        }
        return detail::laplacian_from_weights(std::move(weights));
    });
}

// ---------------------------------------------------------------------------
// Time-varying coupling
// ---------------------------------------------------------------------------

/// A(t) with a left null vector shared by every t and a declared bound
/// lambda_2(t) <= lambda_bound < 0.
class TimeVaryingCoupling {
public:
    using Generator = std::function<Matrix(double)>;

    TimeVaryingCoupling(std::string name, std::size_t n_nodes, Generator generator,
                        LeftEigenvector shared_xi, double lambda_bound)
        : name_(std::move(name)), n_nodes_(n_nodes), generator_(std::move(generator)),
          xi_(std::move(shared_xi)), lambda_bound_(lambda_bound) {
        if (xi_.size() != n_nodes_) throw DimensionError("shared xi length does not match node count");
        if (!(lambda_bound_ < 0.0)) throw InvalidArgument("lambda bound must be negative");
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t n_nodes() const noexcept { return n_nodes_; }
    const LeftEigenvector& shared_xi() const noexcept { return xi_; }
    double lambda_bound() const noexcept { return lambda_bound_; }

    /// Raw entries, no validation; the hot path of the right-hand side.
    Matrix entries_at(double t) const { return generator_(t); }

    CouplingMatrix at(double t) const { return CouplingMatrix(generator_(t)); }

    /// Check A1, the shared null vector and the lambda_2 bound at each sample.
    std::vector<std::string> check(const std::vector<double>& times) const {
        std::vector<std::string> out;
        for (double t : times) {
            const CouplingMatrix a = at(t);
            const std::string at_t = " at t=" + std::to_string(t);
            if (!a.report().valid()) {
                out.push_back("A(t) is not A1" + at_t);
                continue;
            }
            const double norm_inf = a.entries().cwiseAbs().rowwise().sum().maxCoeff();
            if (xi_.residual(a.entries()) > kSpectralTol * norm_inf) {
                out.push_back("shared xi is not a left null vector" + at_t);
            }
            if (lambda2(a.entries(), xi_) > lambda_bound_ + 1e-9) {
                out.push_back("lambda_2 exceeds declared bound" + at_t);
            }
        }
        return out;
    }

private:
    std::string name_;
    std::size_t n_nodes_;
    Generator generator_;
    LeftEigenvector xi_;
    double lambda_bound_;
};

namespace detail {

inline Matrix three_node_base(double t) {
    const double s = std::sin(t);
    const double c = std::cos(t);
    const double d = -5.0 - s - c;
    Matrix m(3, 3);
    m << d, 3.0 + s, 2.0 + c,
         2.0 + c, d, 3.0 + s,
         3.0 + s, 2.0 + c, d;
    return m;
}

} // namespace detail

/// diag(p1, p2, p3) times the rotating three-node matrix with entries built
/// from 5 + sin t + cos t. Shared xi proportional to (1/p1, 1/p2, 1/p3);
/// node-balanced when p1 = p2 = p3.
inline TimeVaryingCoupling three_node_time_varying(double p1, double p2, double p3) {
    if (!(p1 > 0.0 && p2 > 0.0 && p3 > 0.0)) {
        throw InvalidArgument("node weights p must be positive");
    }
    Vector raw(3);
    raw << 1.0 / (3.0 * p1), 1.0 / (3.0 * p2), 1.0 / (3.0 * p3);
    // With normalized xi, diag(xi) A(t) = base(t) / (3 * sum(raw)), so every
    // nonzero eigenvalue of the symmetrization is -(5 + sin t + cos t) / sum(raw).
    const double bound = -(5.0 - std::numbers::sqrt2) / raw.sum();
    Vector p(3);
    p << p1, p2, p3;
    return TimeVaryingCoupling(
        "three-node", 3, [p](double t) { return Matrix(p.asDiagonal() * detail::three_node_base(t)); },
        LeftEigenvector::normalized(raw), bound);
}

/// Symmetric (A2) counterpart: off-diagonals (5 + sin t + cos t)/2.
inline TimeVaryingCoupling three_node_time_varying_symmetric() {
    return TimeVaryingCoupling(
        "three-node-symmetric", 3, [](double t) { return symmetrized_laplacian(detail::three_node_base(t)); },
        LeftEigenvector::uniform(3), -(5.0 - std::numbers::sqrt2));
}

} // namespace adaptsync
