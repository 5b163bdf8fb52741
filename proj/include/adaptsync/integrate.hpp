#pragma once

// Fixed-step integration of the augmented system (X, c).

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adaptsync/analysis.hpp"
#include "adaptsync/dynamics.hpp"
#include "adaptsync/trajectory.hpp"

namespace adaptsync {

enum class Method { Rk4, Euler };

inline const char* to_string(Method m) noexcept { return m == Method::Rk4 ? "rk4" : "euler"; }

inline Method method_from_string(const std::string& s) {
    if (s == "rk4") return Method::Rk4;
    if (s == "euler") return Method::Euler;
    throw ConfigError("integrator.method", "unknown method '" + s + "' (expected rk4|euler)");
}

struct IntegratorConfig {
    double step = 0.005;
    double t_end = 50.0;
    std::size_t record_stride = 1;
    Method method = Method::Rk4;
    double divergence_guard = 1e6;
    bool record_snapshots = false;
    double initial_c = 0.0;
    std::optional<double> c_ref;  // Lyapunov reference; default 2 * c(T)

    std::size_t n_steps() const { return static_cast<std::size_t>(std::llround(t_end / step)); }

    void validate() const {
        if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("integrator.step", "must be positive");
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("integrator.t_end", "must be positive");
        if (record_stride == 0) throw ConfigError("integrator.record_stride", "must be at least 1");
        if (!(divergence_guard > 0.0)) throw ConfigError("integrator.divergence_guard", "must be positive");
        if (n_steps() == 0) throw ConfigError("integrator.step", "larger than the horizon");
    }
};

/// Raised when the state leaves the divergence guard or turns non-finite.
/// Carries every sample recorded before the failure.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, Trajectory prefix, double last_finite_t)
        : Error(what), prefix_(std::move(prefix)), last_t_(last_finite_t) {}

    const Trajectory& prefix() const noexcept { return prefix_; }
    double last_finite_time() const noexcept { return last_t_; }

private:
    Trajectory prefix_;
    double last_t_;
};

/// One classical four-stage Runge-Kutta step of y' = rhs(t, y).
template <typename State, typename Rhs>
State step_rk4(const Rhs& rhs, const State& y, double t, double h) {
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = rhs(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename State, typename Rhs>
State step_euler(const Rhs& rhs, const State& y, double t, double h) {
    return y + h * rhs(t, y);
}

namespace detail {

inline Vector pack(const Vector& x, double c) {
    Vector y(x.size() + 1);
    y.head(x.size()) = x;
    y(x.size()) = c;
    return y;
}

} // namespace detail

/// Integrate from (x0, c(0)) over [0, t_end]. Samples at t = 0, every
/// `record_stride` steps, and at the final step.
inline Trajectory integrate(const SchemeConfig& cfg, const OscillatorModel& model, const Vector& x0,
                            const IntegratorConfig& icfg) {
    icfg.validate();
    cfg.require_model(model);
    detail::require_state(cfg, x0);
    if (!x0.allFinite()) throw InvalidArgument("initial state must be finite");

    const std::size_t steps = icfg.n_steps();
    const double h = icfg.step;
    const auto nx = x0.size();
    const std::size_t n = cfg.node_dim();

    if (cfg.time_varying() || cfg.kind() == SchemeKind::LinearDominated) {
        std::vector<double> grid(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k) grid[k] = static_cast<double>(k) * h;
        const auto violations = cfg.check_along(grid);
        if (!violations.empty()) throw ConfigError("network", violations.front());
    }

    const auto rhs = [&](double t, const Vector& y) -> Vector {
        AugmentedState s{y.head(nx), y(nx)};
        const AugmentedState d = augmented_rhs(cfg, model, s, t);
        return detail::pack(d.x, d.c);
    };

    Trajectory traj;
    const auto record = [&](double t, const Vector& y) {
        const Vector x = y.head(nx);
        traj.times.push_back(t);
        traj.c_series.push_back(y(nx));
        traj.e_series.push_back(sync_error(x, n));
        traj.lyapunov_quadratic.push_back(0.5 * bilinear_form_pairwise(cfg.xi(), x, x, n));
        if (icfg.record_snapshots) traj.snapshots.push_back(x);
    };

    Vector y = detail::pack(x0, icfg.initial_c);
    record(0.0, y);
    double last_t = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_prev = static_cast<double>(k - 1) * h;
        Vector next = icfg.method == Method::Rk4 ? step_rk4(rhs, y, t_prev, h) : step_euler(rhs, y, t_prev, h);
        const double t = static_cast<double>(k) * h;
        if (!next.allFinite() || next.head(nx).cwiseAbs().maxCoeff() > icfg.divergence_guard) {
            traj.diverged = true;
            traj.final_state = {y.head(nx), y(nx)};
            throw DivergenceError((next.allFinite() ? "state exceeded divergence guard" : "state became non-finite") +
                                      std::string(" after t=") + format_double(last_t),
                                  std::move(traj), last_t);
        }
        y = std::move(next);
        last_t = t;
        if (k % icfg.record_stride == 0 || k == steps) record(t, y);
    }

    traj.final_state = {y.head(nx), y(nx)};
    if (cfg.alpha() > 0.0) {
        traj.apply_lyapunov_reference(icfg.c_ref.value_or(2.0 * traj.final_state.c), cfg.alpha());
    } else {
        traj.apply_lyapunov_reference(icfg.c_ref.value_or(traj.final_state.c), 0.0);
    }
    return traj;
}

} // namespace adaptsync
