#pragma once

// Augmented vector fields (X, c) for the adaptive coupling-strength schemes.
//
//   linear-known            Ẋ = F(X) + c (A⊗Γ) X,      ċ = -(α/2) Xᵀ(Ξ⊗I)(A⊗Γ)X
//   linear-unknown          Ẋ as above,                ċ = -(α/2) Xᵀ(Ã⊗I)X,   Ã ∈ A2
//   linear-time-varying     Ẋ = F(X) + c (A(t)⊗Γ) X,   ċ = -(α/2) Xᵀ(Ξ⊗I)(A(t)⊗Γ)X, shared ξ
//   linear-dominated        Ẋ = F(X) + c (A(t)⊗Γ) X,   ċ = -(α/2) Xᵀ(Â⊗I)X,   â_ij >= a_ij(t)
//   nonlinear               Ẋ = F(X) + c (A⊗I) G(X),   ċ = -(α/2) Xᵀ(B⊗I)G(X)
//   nonlinear-time-varying  Ẋ = F(X) + c (A(t)⊗I) G(X), ċ = -(α/2) Xᵀ(B(t)⊗I)G(X)
//
// B is the zero-row-sum symmetrization of A (equal to A when A ∈ A2).

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "adaptsync/coupling.hpp"
#include "adaptsync/oscillators.hpp"

namespace adaptsync {

enum class SchemeKind {
    LinearKnown,
    LinearUnknown,
    LinearTimeVarying,
    LinearDominated,
    NonlinearKnown,
    NonlinearTimeVarying,
};

inline const char* to_string(SchemeKind k) noexcept {
    switch (k) {
        case SchemeKind::LinearKnown: return "linear-known";
        case SchemeKind::LinearUnknown: return "linear-unknown";
        case SchemeKind::LinearTimeVarying: return "linear-time-varying";
        case SchemeKind::LinearDominated: return "linear-dominated";
        case SchemeKind::NonlinearKnown: return "nonlinear";
        case SchemeKind::NonlinearTimeVarying: return "nonlinear-time-varying";
    }
    return "?";
}

inline SchemeKind scheme_kind_from_string(const std::string& s) {
    for (auto k : {SchemeKind::LinearKnown, SchemeKind::LinearUnknown, SchemeKind::LinearTimeVarying,
                   SchemeKind::LinearDominated, SchemeKind::NonlinearKnown, SchemeKind::NonlinearTimeVarying}) {
        if (s == to_string(k)) return k;
    }
    throw ConfigError("scheme.kind", "unknown scheme kind '" + s + "'");
}

inline bool is_nonlinear(SchemeKind k) noexcept {
    return k == SchemeKind::NonlinearKnown || k == SchemeKind::NonlinearTimeVarying;
}

/// Γ = diag(γ_1, ..., γ_n), all γ_j > 0.
class InnerCoupling {
public:
    explicit InnerCoupling(Vector gamma) : gamma_(std::move(gamma)) {
        if (gamma_.size() == 0 || !gamma_.allFinite() || gamma_.minCoeff() <= 0.0) {
            throw ConfigError("scheme.gamma", "inner coupling entries must be positive");
        }
    }
    static InnerCoupling identity(std::size_t n) {
        return InnerCoupling(Vector::Ones(static_cast<Eigen::Index>(n)));
    }

    const Vector& diagonal() const noexcept { return gamma_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(gamma_.size()); }

private:
    Vector gamma_;
};

/// Componentwise coupling function g with declared slope lower bound β.
class MonotoneCoupling {
public:
    using Component = std::function<double(double)>;

    MonotoneCoupling(std::string name, std::vector<Component> components, double beta)
        : name_(std::move(name)), components_(std::move(components)), beta_(beta) {
        if (components_.empty()) throw ConfigError("scheme.nonlinearity", "needs at least one component");
        if (!(beta_ > 0.0)) throw ConfigError("scheme.nonlinearity", "slope bound beta must be positive");
    }

    static MonotoneCoupling identity(std::size_t n) {
        return {"identity", std::vector<Component>(n, [](double u) { return u; }), 1.0};
    }
    /// g(u) = u + tanh(u); slope in (1, 2].
    static MonotoneCoupling x_plus_tanh(std::size_t n) {
        return {"x+tanh", std::vector<Component>(n, [](double u) { return u + std::tanh(u); }), 1.0};
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return components_.size(); }
    double beta() const noexcept { return beta_; }
    double operator()(std::size_t k, double u) const { return components_[k](u); }

    /// Smallest sampled difference quotient over all components on [lo, hi].
    double min_sampled_slope(double lo, double hi, std::size_t samples, std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(lo, hi);
        double slope = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < components_.size(); ++k) {
            for (std::size_t s = 0; s < samples; ++s) {
                const double u = dist(rng), v = dist(rng);
                if (u == v) continue;
                slope = std::min(slope, (components_[k](u) - components_[k](v)) / (u - v));
            }
        }
        return slope;
    }

    /// G(X): g_k applied to coordinate k of every node.
    Vector apply(const Vector& x) const {
        const std::size_t n = dim();
        const auto xm = node_view(x, n);
        Vector out(x.size());
        auto om = node_view(out, n);
        for (Eigen::Index i = 0; i < xm.cols(); ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const auto r = static_cast<Eigen::Index>(k);
                om(r, i) = components_[k](xm(r, i));
            }
        }
        return out;
    }

private:
    std::string name_;
    std::vector<Component> components_;
    double beta_;
};

using CouplingSource = std::variant<CouplingMatrix, TimeVaryingCoupling>;

inline Matrix entries_at(const CouplingSource& source, double t) {
    if (const auto* a = std::get_if<CouplingMatrix>(&source)) return a->entries();
    return std::get<TimeVaryingCoupling>(source).entries_at(t);
}

inline std::size_t n_nodes(const CouplingSource& source) {
    return std::visit([](const auto& s) { return s.n_nodes(); }, source);
}

/// Stacked node states plus the scalar coupling strength.
struct AugmentedState {
    Vector x;
    double c = 0.0;
};

/// A validated scheme. Construct through the named factories; each one
/// enforces the hypotheses its adaptive law relies on and caches ξ, U and the
/// constant adaptation matrix.
class SchemeConfig {
public:
    static SchemeConfig linear_known(CouplingMatrix a, double alpha, std::optional<InnerCoupling> gamma = {}) {
        const auto n = require_dim(gamma, 3);
        return SchemeConfig(SchemeKind::LinearKnown, std::move(a), std::nullopt, alpha,
                            gamma.value_or(InnerCoupling::identity(n)), std::nullopt, true);
    }

    static SchemeConfig linear_unknown(CouplingMatrix a, CouplingMatrix a_tilde, double alpha,
                                       std::optional<InnerCoupling> gamma = {}) {
        const auto n = require_dim(gamma, 3);
        return SchemeConfig(SchemeKind::LinearUnknown, std::move(a), std::move(a_tilde), alpha,
                            gamma.value_or(InnerCoupling::identity(n)), std::nullopt, true);
    }

    static SchemeConfig linear_time_varying(TimeVaryingCoupling a, double alpha,
                                            std::optional<InnerCoupling> gamma = {}) {
        const auto n = require_dim(gamma, 3);
        return SchemeConfig(SchemeKind::LinearTimeVarying, std::move(a), std::nullopt, alpha,
                            gamma.value_or(InnerCoupling::identity(n)), std::nullopt, true);
    }

    static SchemeConfig linear_dominated(CouplingSource a, CouplingMatrix a_hat, double alpha,
                                         std::optional<InnerCoupling> gamma = {}) {
        const auto n = require_dim(gamma, 3);
        return SchemeConfig(SchemeKind::LinearDominated, std::move(a), std::move(a_hat), alpha,
                            gamma.value_or(InnerCoupling::identity(n)), std::nullopt, true);
    }

    static SchemeConfig nonlinear(CouplingMatrix a, MonotoneCoupling g, double alpha,
                                  bool symmetrize_adaptation = true) {
        const auto n = g.dim();
        return SchemeConfig(SchemeKind::NonlinearKnown, std::move(a), std::nullopt, alpha,
                            InnerCoupling::identity(n), std::move(g), symmetrize_adaptation);
    }

    static SchemeConfig nonlinear_time_varying(TimeVaryingCoupling a, MonotoneCoupling g, double alpha,
                                               bool symmetrize_adaptation = true) {
        const auto n = g.dim();
        return SchemeConfig(SchemeKind::NonlinearTimeVarying, std::move(a), std::nullopt, alpha,
                            InnerCoupling::identity(n), std::move(g), symmetrize_adaptation);
    }

    /// Generic entry point used by the experiment driver.
    static SchemeConfig make(SchemeKind kind, CouplingSource a, std::optional<CouplingMatrix> adaptation,
                             double alpha, std::optional<InnerCoupling> gamma,
                             std::optional<MonotoneCoupling> g, bool symmetrize_adaptation) {
        std::size_t n = 3;
        if (is_nonlinear(kind)) {
            if (!g) throw ConfigError("scheme.nonlinearity", "nonlinear schemes need a coupling function");
            n = g->dim();
            if (gamma && (gamma->diagonal().array() != 1.0).any()) {
                throw ConfigError("scheme.gamma", "nonlinear schemes couple through G with Γ = I");
            }
            gamma = InnerCoupling::identity(n);
        } else if (gamma) {
            n = gamma->dim();
        }
        return SchemeConfig(kind, std::move(a), std::move(adaptation), alpha,
                            gamma.value_or(InnerCoupling::identity(n)), std::move(g), symmetrize_adaptation);
    }

    SchemeKind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    const InnerCoupling& gamma() const noexcept { return gamma_; }
    const CouplingSource& dynamics_matrix() const noexcept { return source_; }
    const std::optional<CouplingMatrix>& adaptation_matrix() const noexcept { return adaptation_; }
    const std::optional<MonotoneCoupling>& nonlinearity() const noexcept { return g_; }
    bool symmetrize_adaptation() const noexcept { return symmetrize_; }
    const LeftEigenvector& xi() const noexcept { return xi_; }
    const ProjectionMatrix& projection() const noexcept { return projection_; }
    std::size_t n_nodes() const noexcept { return n_nodes_; }
    std::size_t node_dim() const noexcept { return node_dim_; }
    bool time_varying() const noexcept { return std::holds_alternative<TimeVaryingCoupling>(source_); }

    Matrix coupling_at(double t) const { return entries_at(source_, t); }

    /// Symmetric zero-row-sum W(t) with ċ = -(α/2) Xᵀ(W⊗Γ')Y, where Y = X
    /// (linear kinds) or G(X) (nonlinear kinds) and Γ' = Γ only for the
    /// ξ-weighted kinds. For those W = (ΞA + AᵀΞ)/2, which carries the same
    /// quadratic form as ΞA.
    Matrix adaptation_at(double t) const {
        switch (kind_) {
            case SchemeKind::LinearTimeVarying: return xi_symmetrized(coupling_at(t));
            case SchemeKind::NonlinearTimeVarying: return symmetrized_laplacian(coupling_at(t));
            default: return adapt_const_;
        }
    }

    /// Γ' above: Γ for linear-known / linear-time-varying, identity otherwise.
    bool adaptation_uses_gamma() const noexcept {
        return kind_ == SchemeKind::LinearKnown || kind_ == SchemeKind::LinearTimeVarying;
    }

    void require_model(const OscillatorModel& model) const {
        if (model.dim() != node_dim_) {
            throw ConfigError("model", "model '" + model.name() + "' has dimension " + std::to_string(model.dim()) +
                                           " but the scheme couples " + std::to_string(node_dim_) +
                                           "-dimensional nodes");
        }
    }

    /// Time-sampled hypotheses (shared ξ, λ₂ bound, A2 membership, domination).
    /// Empty result means every sample passed.
    std::vector<std::string> check_along(const std::vector<double>& times) const {
        std::vector<std::string> out;
        if (const auto* tv = std::get_if<TimeVaryingCoupling>(&source_)) {
            if (kind_ != SchemeKind::LinearDominated) out = tv->check(times);
        }
        const bool needs_a2 = kind_ == SchemeKind::LinearDominated ||
                              (kind_ == SchemeKind::NonlinearTimeVarying && !symmetrize_);
        if (!time_varying() || (!needs_a2 && kind_ != SchemeKind::LinearDominated)) return out;
        for (double t : times) {
            const Matrix a = coupling_at(t);
            const std::string at_t = " at t=" + std::to_string(t);
            if (needs_a2) {
                const auto report = validate_condition(a);
                if (report.tag != ConditionClass::A2) out.push_back("A(t) is not A2" + at_t);
            }
            if (kind_ == SchemeKind::LinearDominated) {
                if (auto v = domination_violation(a)) out.push_back(*v + at_t);
            }
        }
        return out;
    }

private:
    SchemeConfig(SchemeKind kind, CouplingSource source, std::optional<CouplingMatrix> adaptation, double alpha,
                 InnerCoupling gamma, std::optional<MonotoneCoupling> g, bool symmetrize)
        : kind_(kind), alpha_(alpha), gamma_(std::move(gamma)), source_(std::move(source)),
          adaptation_(std::move(adaptation)), g_(std::move(g)), symmetrize_(symmetrize),
          xi_(LeftEigenvector::uniform(2)), projection_(build_projection(LeftEigenvector::uniform(2))) {
        if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) {
            throw ConfigError("scheme.alpha", "adaptation gain must be finite and non-negative");
        }
        n_nodes_ = adaptsync::n_nodes(source_);
        node_dim_ = gamma_.dim();
        if (g_ && g_->dim() != node_dim_) throw ConfigError("scheme.nonlinearity", "dimension mismatch with Γ");

        const bool wants_tv = kind_ == SchemeKind::LinearTimeVarying || kind_ == SchemeKind::NonlinearTimeVarying;
        if (wants_tv && !time_varying()) {
            throw ConfigError("network", std::string(to_string(kind_)) + " needs a time-varying coupling matrix");
        }
        if (!wants_tv && kind_ != SchemeKind::LinearDominated && time_varying()) {
            throw ConfigError("network", std::string(to_string(kind_)) + " needs a constant coupling matrix");
        }

        if (const auto* a = std::get_if<CouplingMatrix>(&source_)) {
            wrap_structural("network", [&] { a->require(ConditionClass::A1); });
            const bool need_a2 = kind_ == SchemeKind::LinearDominated ||
                                 (kind_ == SchemeKind::NonlinearKnown && !symmetrize_);
            if (need_a2 && a->condition() != ConditionClass::A2) {
                throw ConfigError("network", std::string(to_string(kind_)) +
                                                 " requires a symmetric (A2) coupling matrix, got " +
                                                 to_string(a->condition()));
            }
            wrap_structural("network", [&] { xi_ = left_eigenvector(*a); });
        } else {
            xi_ = std::get<TimeVaryingCoupling>(source_).shared_xi();
        }
        projection_ = build_projection(xi_);

        const bool needs_adaptation = kind_ == SchemeKind::LinearUnknown || kind_ == SchemeKind::LinearDominated;
        if (needs_adaptation) {
            if (!adaptation_) {
                throw ConfigError("adaptation_network", std::string(to_string(kind_)) + " needs an adaptation matrix");
            }
            if (adaptation_->n_nodes() != n_nodes_) {
                throw ConfigError("adaptation_network", "adaptation matrix size does not match the network");
            }
            wrap_structural("adaptation_network", [&] { adaptation_->require(ConditionClass::A2); });
            adapt_const_ = adaptation_->entries();
        } else if (adaptation_) {
            throw ConfigError("adaptation_network", std::string(to_string(kind_)) + " does not take an adaptation matrix");
        }

        switch (kind_) {
            case SchemeKind::LinearKnown:
                adapt_const_ = xi_symmetrized(std::get<CouplingMatrix>(source_).entries());
                break;
            case SchemeKind::NonlinearKnown:
                adapt_const_ = symmetrized_laplacian(std::get<CouplingMatrix>(source_).entries());
                break;
            case SchemeKind::LinearDominated:
                if (const auto* a = std::get_if<CouplingMatrix>(&source_)) {
                    if (auto v = domination_violation(a->entries())) throw ConfigError("adaptation_network", *v);
                }
                break;
            default:
                break;
        }
    }

    Matrix xi_symmetrized(const Matrix& a) const {
        const auto d = xi_.values().asDiagonal();
        return 0.5 * (d * a + a.transpose() * d);
    }

    std::optional<std::string> domination_violation(const Matrix& a) const {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                if (i != j && adapt_const_(i, j) < a(i, j) - kStructuralTol) {
                    return "dominating matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                           ") is below the coupling entry";
                }
            }
        }
        return std::nullopt;
    }

    template <typename F>
    static void wrap_structural(const std::string& path, F&& f) {
        try {
            f();
        } catch (const StructuralError& e) {
            throw ConfigError(path, e.what());
        } catch (const SpectrumError& e) {
            throw ConfigError(path, e.what());
        }
    }

    static std::size_t require_dim(const std::optional<InnerCoupling>& gamma, std::size_t fallback) {
        return gamma ? gamma->dim() : fallback;
    }

    SchemeKind kind_;
    double alpha_;
    InnerCoupling gamma_;
    CouplingSource source_;
    std::optional<CouplingMatrix> adaptation_;
    std::optional<MonotoneCoupling> g_;
    bool symmetrize_;
    LeftEigenvector xi_;
    ProjectionMatrix projection_;
    Matrix adapt_const_;
    std::size_t n_nodes_ = 0;
    std::size_t node_dim_ = 0;
};

// ---------------------------------------------------------------------------
// Right-hand side pieces
// ---------------------------------------------------------------------------

/// F(X): the node field applied block by block.
inline Vector network_drift(const OscillatorModel& model, const Vector& x, double t) {
    const auto n = model.dim();
    const auto xm = node_view(x, n);
    Vector out(x.size());
    for (Eigen::Index i = 0; i < xm.cols(); ++i) {
        const auto offset = static_cast<std::size_t>(i) * n;
        model({x.data() + offset, n}, t, {out.data() + offset, n});
    }
    return out;
}

/// (A⊗Γ)X without forming the Kronecker product: block i is Σ_j a_ij Γ x_j.
inline Vector linear_coupling_term(const Matrix& a, const InnerCoupling& gamma, const Vector& x) {
    const auto n = gamma.dim();
    const auto xm = node_view(x, n);
    if (a.rows() != xm.cols() || a.cols() != xm.cols()) {
        throw DimensionError("coupling matrix size does not match node count");
    }
    // Row sums vanish, so shifting every node by the mean changes nothing
    // except the cancellation error.
    const Matrix centered = xm.colwise() - xm.rowwise().mean();
    Vector out(x.size());
    node_view(out, n) = gamma.diagonal().asDiagonal() * (centered * a.transpose());
    return out;
}

inline Vector linear_coupling_term(const CouplingMatrix& a, const InnerCoupling& gamma, const Vector& x) {
    return linear_coupling_term(a.entries(), gamma, x);
}

/// (A⊗I)G(X).
inline Vector nonlinear_coupling_term(const Matrix& a, const MonotoneCoupling& g, const Vector& x) {
    const auto n = g.dim();
    const Vector gx = g.apply(x);
    const auto gm = node_view(gx, n);
    if (a.rows() != gm.cols() || a.cols() != gm.cols()) {
        throw DimensionError("coupling matrix size does not match node count");
    }
    const Matrix centered = gm.colwise() - gm.rowwise().mean();
    Vector out(x.size());
    node_view(out, n) = centered * a.transpose();
    return out;
}

inline Vector nonlinear_coupling_term(const CouplingMatrix& a, const MonotoneCoupling& g, const Vector& x) {
    return nonlinear_coupling_term(a.entries(), g, x);
}

namespace detail {

inline void require_state(const SchemeConfig& cfg, const Vector& x) {
    if (static_cast<std::size_t>(x.size()) != cfg.n_nodes() * cfg.node_dim()) {
        throw DimensionError("state length " + std::to_string(x.size()) + " does not match N*n = " +
                             std::to_string(cfg.n_nodes() * cfg.node_dim()));
    }
}

inline Vector coupling_term(const SchemeConfig& cfg, const Matrix& a, const Vector& x) {
    if (is_nonlinear(cfg.kind())) return nonlinear_coupling_term(a, *cfg.nonlinearity(), x);
    return linear_coupling_term(a, cfg.gamma(), x);
}

// Evaluated on node differences, so ċ >= 0 holds exactly in floating point
// for the linear kinds, however large the common mode of X.
inline double rate_from(const SchemeConfig& cfg, const Matrix& w, const Vector& x) {
    const double half_alpha = 0.5 * cfg.alpha();
    const std::size_t n = cfg.node_dim();
    if (is_nonlinear(cfg.kind())) {
        return half_alpha * pairwise_form(w, x, cfg.nonlinearity()->apply(x), n);
    }
    const Vector* gamma = cfg.adaptation_uses_gamma() ? &cfg.gamma().diagonal() : nullptr;
    return half_alpha * pairwise_form(w, x, x, n, gamma);
}

} // namespace detail

/// ċ for the scheme's adaptive law at state X and time t.
inline double adaptation_rate(const SchemeConfig& cfg, const Vector& x, double t) {
    detail::require_state(cfg, x);
    return detail::rate_from(cfg, cfg.adaptation_at(t), x);
}

/// (Ẋ, ċ) at (X, c, t).
inline AugmentedState augmented_rhs(const SchemeConfig& cfg, const OscillatorModel& model,
                                    const AugmentedState& state, double t) {
    detail::require_state(cfg, state.x);
    cfg.require_model(model);
    const Matrix a = cfg.coupling_at(t);
    AugmentedState d;
    d.x = network_drift(model, state.x, t) + state.c * detail::coupling_term(cfg, a, state.x);
    d.c = detail::rate_from(cfg, cfg.adaptation_at(t), state.x);
    return d;
}

/// V = (1/2) Xᵀ(U⊗I)X + (1/α)(c_ref - c)^2.
inline double lyapunov_value(const SchemeConfig& cfg, const AugmentedState& state, double c_ref) {
    detail::require_state(cfg, state.x);
    if (!(cfg.alpha() > 0.0)) throw InvalidArgument("Lyapunov value needs alpha > 0");
    const double q = bilinear_form_pairwise(cfg.xi(), state.x, state.x, cfg.node_dim());
    const double dc = c_ref - state.c;
    return 0.5 * q + dc * dc / cfg.alpha();
}

} // namespace adaptsync
