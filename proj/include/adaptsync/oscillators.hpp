#pragma once

// Node vector fields (Chua, Chen, Lorenz, Rössler, plus a linear test field)
// and an empirical probe of the one-sided quadratic bound
//   (x-y)^T [f(x)-f(y)] - (x-y)^T Δ (x-y) <= -ϖ (x-y)^T (x-y).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adaptsync/linalg.hpp"

namespace adaptsync {

using ParamMap = std::map<std::string, double>;

/// Axis-aligned box in R^n.
struct Box {
    Vector lower;
    Vector upper;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(lower.size()); }
    Vector center() const { return 0.5 * (lower + upper); }
    Vector half_width() const { return 0.5 * (upper - lower); }
};

/// An autonomous n-dimensional node field f(x, t). Immutable.
class OscillatorModel {
public:
    using Field = std::function<void(std::span<const double> x, double t, std::span<double> out)>;

    OscillatorModel(std::string name, std::size_t dim, ParamMap params, Field field, Box box)
        : name_(std::move(name)), dim_(dim), params_(std::move(params)), field_(std::move(field)),
          box_(std::move(box)) {}

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return dim_; }
    const ParamMap& params() const noexcept { return params_; }
    /// Sampling box covering the attractor; also the initial-condition box.
    const Box& default_box() const noexcept { return box_; }

    void operator()(std::span<const double> x, double t, std::span<double> out) const {
        field_(x, t, out);
    }

    Vector operator()(const Vector& x, double t = 0.0) const {
        if (static_cast<std::size_t>(x.size()) != dim_) {
            throw DimensionError(name_ + " field expects dimension " + std::to_string(dim_));
        }
        Vector out(x.size());
        field_({x.data(), dim_}, t, {out.data(), dim_});
        return out;
    }

private:
    std::string name_;
    std::size_t dim_;
    ParamMap params_;
    Field field_;
    Box box_;
};

namespace detail {

inline Box cube(std::size_t n, double lo, double hi) {
    return {Vector::Constant(static_cast<Eigen::Index>(n), lo), Vector::Constant(static_cast<Eigen::Index>(n), hi)};
}

inline ParamMap merge_params(ParamMap defaults, const ParamMap& overrides, const std::string& model) {
    for (const auto& [key, value] : overrides) {
        auto it = defaults.find(key);
        if (it == defaults.end()) {
            throw ConfigError("model.params." + key, "unknown parameter for model '" + model + "'");
        }
        it->second = value;
    }
    return defaults;
}

} // namespace detail

/// Piecewise-linear Chua diode characteristic.
inline double chua_diode(double u) {
    return (2.0 / 7.0) * u - (3.0 / 14.0) * (std::abs(u + 1.0) - std::abs(u - 1.0));
}

inline Vector chua_field(const Vector& x, double alpha = 9.0, double beta = 100.0 / 7.0) {
    Vector out(3);
    out << alpha * (x(1) - chua_diode(x(0))), x(0) - x(1) + x(2), -beta * x(1);
    return out;
}

inline Vector chen_field(const Vector& x, double a = 35.0, double b = 3.0, double c = 28.0) {
    Vector out(3);
    out << a * (x(1) - x(0)), (c - a) * x(0) - x(0) * x(2) + c * x(1), x(0) * x(1) - b * x(2);
    return out;
}

inline Vector lorenz_field(const Vector& x, double sigma = 10.0, double rho = 28.0, double beta = 8.0 / 3.0) {
    Vector out(3);
    out << sigma * (x(1) - x(0)), rho * x(0) - x(0) * x(2) - x(1), x(0) * x(1) - beta * x(2);
    return out;
}

inline Vector rossler_field(const Vector& x, double a = 0.2, double b = 0.2, double c = 5.7) {
    Vector out(3);
    out << -x(1) - x(2), x(0) + a * x(1), b + x(2) * (x(0) - c);
    return out;
}

inline OscillatorModel make_chua(const ParamMap& overrides = {}) {
    auto p = detail::merge_params({{"alpha", 9.0}, {"beta", 100.0 / 7.0}}, overrides, "chua");
    const double alpha = p["alpha"], beta = p["beta"];
    return {"chua", 3, p,
            [=](std::span<const double> x, double, std::span<double> out) {
                out[0] = alpha * (x[1] - chua_diode(x[0]));
                out[1] = x[0] - x[1] + x[2];
                out[2] = -beta * x[1];
            },
            detail::cube(3, -5.0, 5.0)};
}

inline OscillatorModel make_chen(const ParamMap& overrides = {}) {
    auto p = detail::merge_params({{"a", 35.0}, {"b", 3.0}, {"c", 28.0}}, overrides, "chen");
    const double a = p["a"], b = p["b"], c = p["c"];
    return {"chen", 3, p,
            [=](std::span<const double> x, double, std::span<double> out) {
                out[0] = a * (x[1] - x[0]);
                out[1] = (c - a) * x[0] - x[0] * x[2] + c * x[1];
                out[2] = x[0] * x[1] - b * x[2];
            },
            detail::cube(3, -30.0, 30.0)};
}

inline OscillatorModel make_lorenz(const ParamMap& overrides = {}) {
    auto p = detail::merge_params({{"sigma", 10.0}, {"rho", 28.0}, {"beta", 8.0 / 3.0}}, overrides, "lorenz");
    const double sigma = p["sigma"], rho = p["rho"], beta = p["beta"];
    return {"lorenz", 3, p,
            [=](std::span<const double> x, double, std::span<double> out) {
                out[0] = sigma * (x[1] - x[0]);
                out[1] = rho * x[0] - x[0] * x[2] - x[1];
                out[2] = x[0] * x[1] - beta * x[2];
            },
            detail::cube(3, -30.0, 30.0)};
}

inline OscillatorModel make_rossler(const ParamMap& overrides = {}) {
    auto p = detail::merge_params({{"a", 0.2}, {"b", 0.2}, {"c", 5.7}}, overrides, "rossler");
    const double a = p["a"], b = p["b"], c = p["c"];
    Box box{Vector(3), Vector(3)};
    box.lower << -15.0, -15.0, 0.0;
    box.upper << 15.0, 15.0, 30.0;
    return {"rossler", 3, p,
            [=](std::span<const double> x, double, std::span<double> out) {
                out[0] = -x[1] - x[2];
                out[1] = x[0] + a * x[1];
                out[2] = b + x[2] * (x[0] - c);
            },
            std::move(box)};
}

/// f(x) = k x in R^dim. Test field: k < 0 contracts, k = 0 is the zero field.
inline OscillatorModel make_linear(const ParamMap& overrides = {}) {
    auto p = detail::merge_params({{"k", -1.0}, {"dim", 3.0}}, overrides, "linear");
    const double k = p["k"];
    const double dim_real = p["dim"];
    if (!(dim_real >= 1.0) || dim_real != std::floor(dim_real)) {
        throw ConfigError("model.params.dim", "must be a positive integer");
    }
    const auto dim = static_cast<std::size_t>(dim_real);
    return {"linear", dim, p,
            [=](std::span<const double> x, double, std::span<double> out) {
                for (std::size_t i = 0; i < x.size(); ++i) out[i] = k * x[i];
            },
            detail::cube(dim, -1.0, 1.0)};
}

inline const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names{"chua", "chen", "lorenz", "rossler", "linear"};
    return names;
}

inline OscillatorModel make_model(const std::string& name, const ParamMap& overrides = {}) {
    if (name == "chua") return make_chua(overrides);
    if (name == "chen") return make_chen(overrides);
    if (name == "lorenz") return make_lorenz(overrides);
    if (name == "rossler") return make_rossler(overrides);
    if (name == "linear") return make_linear(overrides);
    throw ConfigError("model.name", "unknown model '" + name + "' (expected chua|chen|lorenz|rossler|linear)");
}

// ---------------------------------------------------------------------------
// QUAD probe
// ---------------------------------------------------------------------------

struct QuadCertificate {
    Vector delta;  // diagonal of Δ
    double varpi = 0.0;
    Box sample_box;
    std::size_t n_samples = 0;
    double max_violation = -std::numeric_limits<double>::infinity();
    Vector argmax_x;
    Vector argmax_y;

    /// Consistent with the bound on every sample (not a proof).
    bool holds() const noexcept { return max_violation <= 0.0; }
};

/// Left side minus right side of the bound; <= 0 where it holds.
inline double quad_residual(const OscillatorModel& model, const Vector& delta, double varpi, const Vector& x,
                            const Vector& y) {
    const Vector e = x - y;
    return e.dot(model(x) - model(y)) - e.dot(delta.cwiseProduct(e)) + varpi * e.squaredNorm();
}

inline QuadCertificate quad_probe(const OscillatorModel& model, const Vector& delta, double varpi, const Box& box,
                                  std::size_t n_samples, std::uint64_t seed) {
    const auto n = model.dim();
    if (static_cast<std::size_t>(delta.size()) != n || box.dim() != n) {
        throw DimensionError("delta and box must match the model dimension");
    }
    if (n_samples == 0) throw InvalidArgument("n_samples must be at least 1");
    if ((box.upper.array() < box.lower.array()).any()) throw InvalidArgument("sample box is empty");

    QuadCertificate cert{delta, varpi, box, n_samples, -std::numeric_limits<double>::infinity(), {}, {}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto draw = [&] {
        Vector v(static_cast<Eigen::Index>(n));
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            v(k) = box.lower(k) + unit(rng) * (box.upper(k) - box.lower(k));
        }
        return v;
    };
    for (std::size_t s = 0; s < n_samples; ++s) {
        Vector x = draw();
        Vector y = draw();
        const double r = quad_residual(model, delta, varpi, x, y);
        if (r > cert.max_violation) {
            cert.max_violation = r;
            cert.argmax_x = std::move(x);
            cert.argmax_y = std::move(y);
        }
    }
    return cert;
}

} // namespace adaptsync
