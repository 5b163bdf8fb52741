// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "adaptsync/experiment.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace adaptsync;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<std::string> kOscillators{"chua", "chen", "lorenz", "rossler"};

ExperimentConfig desk_run(const std::string& model, const std::string& kind) {
    ExperimentConfig c;
    c.name = model + "-" + kind;
    c.model.name = model;
    c.scheme.kind = kind;
    c.scheme.alpha = 1.0;
    c.network.generator = "small-world";
    c.network.n_nodes = 10;
    c.network.mean_degree = 4;
    c.network.rewire_prob = 0.1;
    c.network.seed = 1;
    c.integrator.step = 0.005;
    c.integrator.t_end = 50.0;
    c.initial.seed = 1;
    c.initial.spread = 0.5;
    return c;
}

// The shared pass conditions of the synchronization criteria.
void check_sync(Outcome& o, const ExperimentConfig& c, double limit_s, bool check_monotone = true) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = run_experiment(c);
    const double elapsed = seconds_since(t0);
    const auto& rep = r.report;
    const std::string tag = c.name + ": ";
    if (!r.divergence.empty()) o.fail(tag + r.divergence);
    if (!(rep.e_final < 1e-3)) o.fail(tag + fmt("E(T)=%.3g not below 1e-3", rep.e_final));
    if (!(rep.e_final < 1e-3 * rep.e_initial)) {
        o.fail(tag + fmt("E(T)=%.3g not below 1e-3*E(0)=%.3g", rep.e_final, 1e-3 * rep.e_initial));
    }
    if (check_monotone) {
        const auto& cs = r.trajectory.c_series;
        for (std::size_t k = 1; k < cs.size(); ++k) {
            if (cs[k] < cs[k - 1] - 1e-9) {
                o.fail(tag + fmt("c decreased at t=%.4g by %.3g", r.trajectory.times[k], cs[k - 1] - cs[k]));
                break;
            }
        }
    }
    if (!(rep.c_plateau_delta < 1e-2)) o.fail(tag + fmt("|c(T)-c(T-10)|=%.3g", rep.c_plateau_delta));
    if (elapsed > limit_s) o.fail(tag + fmt("took %.1f s (limit %.0f s)", elapsed, limit_s));
    std::printf("    %-28s E(0)=%-10.4g E(T)=%-10.3g c(T)=%-8.4g %.2f s\n", c.name.c_str(), rep.e_initial,
                rep.e_final, rep.c_final, elapsed);
}

Outcome bilinear_identity() {
    Outcome o;
    gen::Rng rng(101);
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto nodes = static_cast<Eigen::Index>(gen::integer(rng, 2, 20));
        const auto n = gen::integer(rng, 1, 4);
        const auto xi = LeftEigenvector::normalized(gen::simplex_interior(rng, nodes));
        const Vector x = gen::vector(rng, nodes * static_cast<Eigen::Index>(n), 5.0);
        const Vector y = gen::vector(rng, nodes * static_cast<Eigen::Index>(n), 5.0);
        const double lhs = bilinear_form(build_projection(xi), x, y, n);
        const double rhs = oracle::pairwise_sum(xi.values(), x, y, n);
        const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
        worst = std::max(worst, rel);
        if (!(rel <= 1e-10)) o.fail(fmt("trial %.0f: relative gap %.3g", trial, rel));
    }
    const double elapsed = seconds_since(t0);
    if (elapsed > 5.0) o.fail(fmt("took %.2f s", elapsed));
    if (o.pass) o.detail = fmt("worst relative gap %.2g, %.2f s", worst, elapsed);
    return o;
}

Outcome left_eigenvector_oracle() {
    Outcome o;
    gen::Rng rng(202);
    double worst = 0.0, worst_res = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto nodes = static_cast<Eigen::Index>(gen::integer(rng, 2, 30));
        const Matrix a = gen::irreducible_a1(rng, nodes, gen::uniform(rng, 0.05, 0.6));
        const auto xi = left_eigenvector(CouplingMatrix(a));
        const Vector ref = oracle::null_vector_eig(a);
        const double gap = (xi.values() - ref).cwiseAbs().maxCoeff();
        const double norm_inf = a.cwiseAbs().rowwise().sum().maxCoeff();
        const double res = (xi.values().transpose() * a).cwiseAbs().maxCoeff() / norm_inf;
        worst = std::max(worst, gap);
        worst_res = std::max(worst_res, res);
        if (!(gap <= 1e-8)) o.fail(fmt("trial %.0f (N=%.0f): gap %.3g", trial, static_cast<double>(nodes), gap));
        if (!(res <= 1e-10)) o.fail(fmt("trial %.0f: residual %.3g·||A||", trial, res));
    }
    if (o.pass) o.detail = fmt("worst gap %.2g, worst residual %.2g·||A||", worst, worst_res);
    return o;
}

Outcome three_node_closed_forms() {
    Outcome o;
    gen::Rng rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        const double p1 = gen::uniform(rng, 0.1, 5), p2 = gen::uniform(rng, 0.1, 5), p3 = gen::uniform(rng, 0.1, 5);
        Vector ref(3);
        ref << 1 / (3 * p1), 1 / (3 * p2), 1 / (3 * p3);
        ref /= ref.sum();
        const double gap = (three_node_time_varying(p1, p2, p3).shared_xi().values() - ref).cwiseAbs().maxCoeff();
        if (!(gap <= 1e-12)) o.fail(fmt("xi gap %.3g for p=(%.3g,%.3g,...)", gap, p1, p2));
    }
    const auto tv = three_node_time_varying(1, 1, 1);
    double worst = 0.0, highest = -INFINITY;
    for (int k = 0; k < 100; ++k) {
        const double t = gen::uniform(rng, 0.0, 20.0);
        const double l2 = lambda2(tv.entries_at(t), tv.shared_xi());
        const double expect = -(5.0 + std::sin(t) + std::cos(t));
        worst = std::max(worst, std::abs(l2 - expect));
        highest = std::max(highest, l2);
        if (!(std::abs(l2 - expect) <= 1e-9)) o.fail(fmt("t=%.4g: lambda2=%.12g, expected %.12g", t, l2, expect));
        if (!(l2 <= -(5.0 - std::numbers::sqrt2) + 1e-9)) o.fail(fmt("t=%.4g: lambda2=%.12g above bound", t, l2));
    }
    if (o.pass) o.detail = fmt("worst lambda2 gap %.2g, max lambda2 %.6f", worst, highest);
    return o;
}

Outcome linear_sync() {
    Outcome o;
    for (const auto& m : kOscillators) check_sync(o, desk_run(m, "linear-known"), 30.0);
    return o;
}

Outcome unknown_sync() {
    Outcome o;
    for (const auto& m : kOscillators) {
        for (const std::string sub : {"complete", "random"}) {
            auto c = desk_run(m, "linear-unknown");
            c.name += "-" + sub;
            NetworkSpec adapt;
            adapt.n_nodes = 10;
            if (sub == "complete") {
                adapt.generator = "complete";
            } else {
                adapt.generator = "random-symmetric";
                adapt.edge_prob = 0.5;
                adapt.seed = 3;
            }
            c.adaptation_network = adapt;
            check_sync(o, c, 30.0);
        }
    }
    return o;
}

Outcome nonlinear_sync() {
    Outcome o;
    for (const auto& m : kOscillators) {
        auto c = desk_run(m, "nonlinear");
        c.scheme.nonlinearity = "x+tanh";
        c.scheme.symmetrize_adaptation = true;
        check_sync(o, c, 30.0);
    }
    return o;
}

Outcome time_varying_sync() {
    Outcome o;
    for (const auto& p : {std::array<double, 3>{1, 1, 1}, std::array<double, 3>{1, 1, 2}}) {
        ExperimentConfig c;
        c.name = "three-chua-p" + format_double(p[0]) + format_double(p[1]) + format_double(p[2]);
        c.model.name = "chua";
        c.scheme.kind = "linear-time-varying";
        c.network.generator = "three-node";
        c.network.p = p;
        c.integrator.t_end = 50.0;
        const RunResult r = run_experiment(c);
        const auto& rep = r.report;
        if (!r.divergence.empty()) o.fail(c.name + ": " + r.divergence);
        if (!(rep.e_final < 1e-3)) o.fail(c.name + fmt(": E(T)=%.3g", rep.e_final));
        if (!(rep.c_plateau_delta < 1e-2)) o.fail(c.name + fmt(": |c(T)-c(T-10)|=%.3g", rep.c_plateau_delta));
        // c rises from zero, then flattens.
        if (!(rep.c_final > 0.0)) o.fail(c.name + ": c never rose");
        std::printf("    %-28s E(0)=%-10.4g E(T)=%-10.3g c(T)=%-8.4g\n", c.name.c_str(), rep.e_initial, rep.e_final,
                    rep.c_final);
    }
    return o;
}

Outcome adaptation_sign() {
    Outcome o;
    gen::Rng rng(808);
    const auto x_plus_tanh = MonotoneCoupling::x_plus_tanh(3);
    using Factory = std::function<SchemeConfig()>;
    const std::vector<std::pair<std::string, Factory>> kinds{
        {"linear-known", [&] { return SchemeConfig::linear_known(CouplingMatrix(gen::irreducible_a1(rng, 8)), 1.0); }},
        {"linear-known-gamma",
         [&] {
             return SchemeConfig::linear_known(CouplingMatrix(gen::irreducible_a1(rng, 8)), 2.0,
                                               InnerCoupling(Vector(gen::vector(rng, 3).cwiseAbs().array() + 0.1)));
         }},
        {"linear-unknown",
         [&] {
             return SchemeConfig::linear_unknown(CouplingMatrix(gen::irreducible_a1(rng, 8)),
                                                 CouplingMatrix(gen::connected_a2(rng, 8)), 1.0);
         }},
        {"linear-dominated",
         [&] {
             const Matrix a = gen::connected_a2(rng, 8);
             return SchemeConfig::linear_dominated(CouplingMatrix(a),
                                                   CouplingMatrix(a + generate_complete(8).entries()), 1.0);
         }},
        {"linear-time-varying",
         [&] {
             return SchemeConfig::linear_time_varying(
                 three_node_time_varying(gen::uniform(rng, 0.2, 3), gen::uniform(rng, 0.2, 3), gen::uniform(rng, 0.2, 3)),
                 1.0);
         }},
        {"nonlinear",
         [&] { return SchemeConfig::nonlinear(CouplingMatrix(gen::irreducible_a1(rng, 8)), x_plus_tanh, 1.0); }},
        {"nonlinear-time-varying",
         [&] { return SchemeConfig::nonlinear_time_varying(three_node_time_varying(1, 1, 2), x_plus_tanh, 1.0); }},
    };
    double lowest = INFINITY;
    for (const auto& [label, make] : kinds) {
        std::optional<SchemeConfig> cfg;
        for (int s = 0; s < 10000; ++s) {
            if (s % 100 == 0) cfg = make();
            const auto len = static_cast<Eigen::Index>(cfg->n_nodes() * cfg->node_dim());
            const Vector x = gen::vector(rng, len, gen::uniform(rng, 0.01, 100.0));
            const double rate = adaptation_rate(*cfg, x, gen::uniform(rng, 0.0, 50.0));
            lowest = std::min(lowest, rate);
            if (!(rate >= -1e-12)) {
                o.fail(label + fmt(": rate %.3g on state %.0f", rate, s));
                break;
            }
        }
    }
    if (o.pass) o.detail = fmt("7 kinds x 10000 states, lowest rate %.3g", lowest);
    return o;
}

Outcome lyapunov_monotone() {
    Outcome o;
    const RunResult r = run_experiment(desk_run("chua", "linear-known"));
    const auto& t = r.trajectory;
    std::size_t violations = 0, first = 0;
    double worst = 0.0;
    for (std::size_t k = 1; k < t.v_series.size(); ++k) {
        const double rise = t.v_series[k] - t.v_series[k - 1];
        if (rise > 1e-6) {
            if (violations++ == 0) first = k;
            worst = std::max(worst, rise);
        }
    }
    if (violations > 0) {
        o.fail(fmt("V rises at %.0f of %.0f samples, first at t=%.4g", static_cast<double>(violations),
                   static_cast<double>(t.v_series.size() - 1), t.times[first]) +
               fmt(" (V %.10g -> %.10g), largest rise %.3g", t.v_series[first - 1], t.v_series[first], worst) +
               fmt("; c_ref=%.6g", t.c_ref));
    } else {
        o.detail = fmt("V(0)=%.6g V(T)=%.6g c_ref=%.6g", t.v_series.front(), t.v_series.back(), t.c_ref);
    }
    return o;
}

Outcome rk4_order() {
    Outcome o;
    const auto solve = [](double h) {
        const int steps = static_cast<int>(std::lround(1.0 / h));
        double y = 1.0;
        const auto rhs = [](double, double v) { return -v; };
        for (int k = 0; k < steps; ++k) y = step_rk4(rhs, y, k * h, h);
        return std::abs(y - std::exp(-1.0));
    };
    const double ratio = solve(0.1) / solve(0.05);
    if (!(ratio >= 12.0 && ratio <= 20.0)) o.fail(fmt("ratio %.4g", ratio));
    else o.detail = fmt("ratio %.4g", ratio);
    return o;
}

Outcome alpha_sweep() {
    Outcome o;
    const auto base = make_preset("fig1-linear-chua", 10).front();
    const auto rows = run_sweep(base, {0.1, 1.0, 10.0});
    std::printf("    alpha   c_final     time_to_sync  E_final\n");
    for (const auto& row : rows) {
        if (!row.report) {
            o.fail(fmt("alpha=%.3g: ", row.alpha) + row.error);
            continue;
        }
        std::printf("    %-7.3g %-11.5g %-13.5g %.3g\n", row.alpha, row.report->c_final, row.report->time_to_sync,
                    row.report->e_final);
        if (!row.report->synchronized) o.fail(fmt("alpha=%.3g did not synchronize", row.alpha));
    }
    if (o.pass) o.detail = "all three synchronized";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        const char* title;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"bilinear form equals its pairwise expansion", bilinear_identity},
        {"left eigenvector matches dense oracle", left_eigenvector_oracle},
        {"three-node closed forms", three_node_closed_forms},
        {"linear scheme synchronizes four oscillators", linear_sync},
        {"unknown-matrix scheme synchronizes (complete, random)", unknown_sync},
        {"nonlinear scheme synchronizes four oscillators", nonlinear_sync},
        {"time-varying three-node Chua synchronizes", time_varying_sync},
        {"adaptation rate is non-negative", adaptation_sign},
        {"Lyapunov value non-increasing with c_ref = 2c(T)", lyapunov_monotone},
        {"RK4 convergence ratio in [12, 20]", rk4_order},
        {"alpha sweep on the chua preset", alpha_sweep},
    };
    int failed = 0, index = 0;
    for (const auto& c : criteria) {
        ++index;
        std::printf("[%2d] %s\n", index, c.title);
        std::fflush(stdout);
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double elapsed = seconds_since(t0);
        if (!o.pass) ++failed;
        std::printf("%s %2d: %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", index, c.title, elapsed,
                    o.detail.empty() ? "" : " - ", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
