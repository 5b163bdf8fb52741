#pragma once

// Experiment configuration (JSON), bundled presets, single runs and α-sweeps.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptsync/analysis.hpp"
#include "adaptsync/integrate.hpp"
#include "adaptsync/matrix_io.hpp"

namespace adaptsync {

using nlohmann::json;

struct NetworkSpec {
    // small-world | complete | random-symmetric | three-node | three-node-symmetric | file
    std::string generator = "small-world";
    std::size_t n_nodes = 100;
    std::size_t mean_degree = 4;
    double rewire_prob = 0.1;
    double edge_prob = 0.5;
    std::uint64_t seed = 1;
    std::array<double, 3> p{1.0, 1.0, 1.0};  // three-node weights
    std::string path;                        // file generator
    double scale = 1.0;                      // multiplies every entry

    bool time_varying() const { return generator == "three-node" || generator == "three-node-symmetric"; }
};

struct ModelSpec {
    std::string name = "chua";
    ParamMap params;
};

struct SchemeSpec {
    std::string kind = "linear-known";
    double alpha = 1.0;
    std::vector<double> gamma;  // empty means identity
    std::string nonlinearity = "x+tanh";
    bool symmetrize_adaptation = true;
};

struct InitialSpec {
    std::uint64_t seed = 1;
    double spread = 0.5;  // fraction of the model box half-width
};

struct OutputSpec {
    std::string dir = ".";
    bool svg = false;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ModelSpec model;
    SchemeSpec scheme;
    NetworkSpec network;
    std::optional<NetworkSpec> adaptation_network;
    IntegratorConfig integrator;
    InitialSpec initial;
    SyncCriteria analysis;
    OutputSpec output;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {

class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "config" : path_, "expected an object");
        for (auto it = j_.begin(); it != j_.end(); ++it) pending_.push_back(it.key());
    }

    std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        std::erase(pending_, key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <typename F>
    void opt(const std::string& key, F&& read) {
        if (const json* v = find(key)) read(*v, sub(key));
    }

    void number(const std::string& key, double& out) {
        opt(key, [&](const json& v, const std::string& p) {
            if (!v.is_number()) throw ConfigError(p, "expected a number");
            out = v.get<double>();
        });
    }

    template <typename Int>
    void integer(const std::string& key, Int& out) {
        opt(key, [&](const json& v, const std::string& p) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
                throw ConfigError(p, "expected a non-negative integer");
            }
            out = static_cast<Int>(v.get<std::uint64_t>());
        });
    }

    void string(const std::string& key, std::string& out) {
        opt(key, [&](const json& v, const std::string& p) {
            if (!v.is_string()) throw ConfigError(p, "expected a string");
            out = v.get<std::string>();
        });
    }

    void boolean(const std::string& key, bool& out) {
        opt(key, [&](const json& v, const std::string& p) {
            if (!v.is_boolean()) throw ConfigError(p, "expected true or false");
            out = v.get<bool>();
        });
    }

    void finish() const {
        if (!pending_.empty()) throw ConfigError(sub(pending_.front()), "unknown field");
    }

private:
    const json& j_;
    std::string path_;
    std::vector<std::string> pending_;
};

inline json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline NetworkSpec parse_network(const json& j, const std::string& path) {
    NetworkSpec s;
    Fields f(j, path);
    f.string("generator", s.generator);
    f.integer("n_nodes", s.n_nodes);
    f.integer("mean_degree", s.mean_degree);
    f.number("rewire_prob", s.rewire_prob);
    f.number("edge_prob", s.edge_prob);
    f.integer("seed", s.seed);
    f.opt("p", [&](const json& v, const std::string& p) {
        if (!v.is_array() || v.size() != 3) throw ConfigError(p, "expected three numbers");
        for (std::size_t i = 0; i < 3; ++i) {
            if (!v[i].is_number()) throw ConfigError(p + "[" + std::to_string(i) + "]", "expected a number");
            s.p[i] = v[i].get<double>();
        }
    });
    f.string("path", s.path);
    f.number("scale", s.scale);
    f.finish();
    return s;
}

inline json network_to_json(const NetworkSpec& s) {
    return {{"generator", s.generator}, {"n_nodes", s.n_nodes},     {"mean_degree", s.mean_degree},
            {"rewire_prob", s.rewire_prob}, {"edge_prob", s.edge_prob}, {"seed", s.seed},
            {"p", s.p},                 {"path", s.path},           {"scale", s.scale}};
}

} // namespace detail

inline json to_json(const ExperimentConfig& c) {
    json params = json::object();
    for (const auto& [k, v] : c.model.params) params[k] = v;
    const auto& ic = c.integrator;
    return {
        {"name", c.name},
        {"model", {{"name", c.model.name}, {"params", params}}},
        {"scheme",
         {{"kind", c.scheme.kind},
          {"alpha", c.scheme.alpha},
          {"gamma", c.scheme.gamma.empty() ? json(nullptr) : json(c.scheme.gamma)},
          {"nonlinearity", c.scheme.nonlinearity},
          {"symmetrize_adaptation", c.scheme.symmetrize_adaptation}}},
        {"network", detail::network_to_json(c.network)},
        {"adaptation_network", c.adaptation_network ? detail::network_to_json(*c.adaptation_network) : json(nullptr)},
        {"integrator",
         {{"method", to_string(ic.method)},
          {"step", ic.step},
          {"t_end", ic.t_end},
          {"record_stride", ic.record_stride},
          {"divergence_guard", ic.divergence_guard},
          {"record_snapshots", ic.record_snapshots},
          {"initial_c", ic.initial_c},
          {"c_ref", detail::nullable(ic.c_ref)}}},
        {"initial", {{"seed", c.initial.seed}, {"spread", c.initial.spread}}},
        {"analysis",
         {{"threshold", c.analysis.threshold},
          {"relative_threshold", c.analysis.relative_threshold},
          {"window", c.analysis.window},
          {"plateau_tolerance", c.analysis.plateau_tolerance}}},
        {"output", {{"dir", c.output.dir}, {"svg", c.output.svg}}},
    };
}

/// Missing fields keep their defaults; unknown fields are errors.
inline ExperimentConfig parse_config(const json& j) {
    using detail::Fields;
    ExperimentConfig c;
    Fields root(j, "");
    root.string("name", c.name);
    root.opt("model", [&](const json& v, const std::string& p) {
        Fields f(v, p);
        f.string("name", c.model.name);
        f.opt("params", [&](const json& pv, const std::string& pp) {
            if (!pv.is_object()) throw ConfigError(pp, "expected an object of numbers");
            for (auto it = pv.begin(); it != pv.end(); ++it) {
                if (!it->is_number()) throw ConfigError(pp + "." + it.key(), "expected a number");
                c.model.params[it.key()] = it->get<double>();
            }
        });
        f.finish();
    });
    root.opt("scheme", [&](const json& v, const std::string& p) {
        Fields f(v, p);
        f.string("kind", c.scheme.kind);
        f.number("alpha", c.scheme.alpha);
        f.opt("gamma", [&](const json& g, const std::string& gp) {
            c.scheme.gamma.clear();
            if (g.is_null()) return;
            if (!g.is_array()) throw ConfigError(gp, "expected an array of positive numbers or null");
            for (const auto& e : g) {
                if (!e.is_number()) throw ConfigError(gp, "expected an array of positive numbers or null");
                c.scheme.gamma.push_back(e.get<double>());
            }
        });
        f.string("nonlinearity", c.scheme.nonlinearity);
        f.boolean("symmetrize_adaptation", c.scheme.symmetrize_adaptation);
        f.finish();
    });
    root.opt("network", [&](const json& v, const std::string& p) { c.network = detail::parse_network(v, p); });
    root.opt("adaptation_network", [&](const json& v, const std::string& p) {
        if (v.is_null()) {
            c.adaptation_network.reset();
        } else {
            c.adaptation_network = detail::parse_network(v, p);
        }
    });
    root.opt("integrator", [&](const json& v, const std::string& p) {
        Fields f(v, p);
        auto& ic = c.integrator;
        f.opt("method", [&](const json& m, const std::string& mp) {
            if (!m.is_string()) throw ConfigError(mp, "expected a string");
            ic.method = method_from_string(m.get<std::string>());
        });
        f.number("step", ic.step);
        f.number("t_end", ic.t_end);
        f.integer("record_stride", ic.record_stride);
        f.number("divergence_guard", ic.divergence_guard);
        f.boolean("record_snapshots", ic.record_snapshots);
        f.number("initial_c", ic.initial_c);
        f.opt("c_ref", [&](const json& r, const std::string& rp) {
            if (r.is_null()) {
                ic.c_ref.reset();
            } else if (r.is_number()) {
                ic.c_ref = r.get<double>();
            } else {
                throw ConfigError(rp, "expected a number or null");
            }
        });
        f.finish();
    });
    root.opt("initial", [&](const json& v, const std::string& p) {
        Fields f(v, p);
        f.integer("seed", c.initial.seed);
        f.number("spread", c.initial.spread);
        f.finish();
    });
    root.opt("analysis", [&](const json& v, const std::string& p) {
        Fields f(v, p);
        f.number("threshold", c.analysis.threshold);
        f.number("relative_threshold", c.analysis.relative_threshold);
        f.number("window", c.analysis.window);
        f.number("plateau_tolerance", c.analysis.plateau_tolerance);
        f.finish();
    });
    root.opt("output", [&](const json& v, const std::string& p) {
        Fields f(v, p);
        f.string("dir", c.output.dir);
        f.boolean("svg", c.output.svg);
        f.finish();
    });
    root.finish();
    return c;
}

/// A document is one config object or an array of them (multi-run experiments).
inline std::vector<ExperimentConfig> parse_experiment(const json& j) {
    std::vector<ExperimentConfig> out;
    if (j.is_array()) {
        if (j.empty()) throw ConfigError("config", "empty run list");
        for (std::size_t i = 0; i < j.size(); ++i) {
            try {
                out.push_back(parse_config(j[i]));
            } catch (const ConfigError& e) {
                throw ConfigError("[" + std::to_string(i) + "]" + (e.path().empty() ? "" : "." + e.path()),
                                  std::string(e.what()).substr(e.path().empty() ? 0 : e.path().size() + 2));
            }
        }
    } else {
        out.push_back(parse_config(j));
    }
    return out;
}

inline std::vector<ExperimentConfig> parse_experiment_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_experiment(j);
}

/// Relative matrix paths are resolved against the config file's directory.
inline std::vector<ExperimentConfig> load_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto runs = parse_experiment_text(text);
    const auto base = std::filesystem::path(path).parent_path();
    const auto resolve = [&](NetworkSpec& s) {
        if (s.generator == "file" && !s.path.empty() && std::filesystem::path(s.path).is_relative()) {
            s.path = (base / s.path).lexically_normal().string();
        }
    };
    for (auto& c : runs) {
        resolve(c.network);
        if (c.adaptation_network) resolve(*c.adaptation_network);
    }
    return runs;
}

inline std::string dump_experiment(const std::vector<ExperimentConfig>& runs) {
    if (runs.size() == 1) return to_json(runs.front()).dump(2) + "\n";
    json arr = json::array();
    for (const auto& c : runs) arr.push_back(to_json(c));
    return arr.dump(2) + "\n";
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return to_json(a) == to_json(b); }

// ---------------------------------------------------------------------------
// Building the objects a run needs
// ---------------------------------------------------------------------------

inline CouplingSource build_network(const NetworkSpec& s, const std::string& path) {
    if (!(s.scale > 0.0) || !std::isfinite(s.scale)) throw ConfigError(path + ".scale", "must be positive");
    try {
        if (s.generator == "three-node") return three_node_time_varying(s.p[0], s.p[1], s.p[2]);
        if (s.generator == "three-node-symmetric") return three_node_time_varying_symmetric();

        Matrix m;
        if (s.generator == "small-world") {
            m = generate_small_world_weighted(s.n_nodes, s.mean_degree, s.rewire_prob, s.seed).entries();
        } else if (s.generator == "complete") {
            m = generate_complete(s.n_nodes).entries();
        } else if (s.generator == "random-symmetric") {
            m = generate_random_symmetric(s.n_nodes, s.edge_prob, s.seed).entries();
        } else if (s.generator == "file") {
            if (s.path.empty()) throw ConfigError(path + ".path", "file generator needs a path");
            m = read_matrix_file(s.path);
        } else {
            throw ConfigError(path + ".generator", "unknown generator '" + s.generator + "'");
        }
        return CouplingMatrix(s.scale * m);
    } catch (const ConfigError&) {
        throw;
    } catch (const ParseError& e) {
        throw ConfigError(path + ".path", s.path + ": " + e.what());
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

inline OscillatorModel build_model(const ExperimentConfig& c) { return make_model(c.model.name, c.model.params); }

inline SchemeConfig build_scheme(const ExperimentConfig& c, std::size_t node_dim) {
    const SchemeKind kind = [&] {
        try {
            return scheme_kind_from_string(c.scheme.kind);
        } catch (const Error& e) {
            throw ConfigError("scheme.kind", e.what());
        }
    }();

    CouplingSource source = build_network(c.network, "network");
    std::optional<CouplingMatrix> adaptation;
    if (c.adaptation_network) {
        auto a = build_network(*c.adaptation_network, "adaptation_network");
        if (!std::holds_alternative<CouplingMatrix>(a)) {
            throw ConfigError("adaptation_network.generator", "adaptation matrix must be constant");
        }
        adaptation = std::get<CouplingMatrix>(std::move(a));
    }

    std::optional<InnerCoupling> gamma;
    if (!c.scheme.gamma.empty()) {
        try {
            gamma = InnerCoupling(Eigen::Map<const Vector>(c.scheme.gamma.data(),
                                                           static_cast<Eigen::Index>(c.scheme.gamma.size())));
        } catch (const Error& e) {
            throw ConfigError("scheme.gamma", e.what());
        }
    }

    std::optional<MonotoneCoupling> g;
    if (is_nonlinear(kind)) {
        if (c.scheme.nonlinearity == "x+tanh") {
            g = MonotoneCoupling::x_plus_tanh(node_dim);
        } else if (c.scheme.nonlinearity == "identity") {
            g = MonotoneCoupling::identity(node_dim);
        } else {
            throw ConfigError("scheme.nonlinearity", "unknown coupling function '" + c.scheme.nonlinearity +
                                                         "' (expected x+tanh|identity)");
        }
    } else if (!gamma) {
        gamma = InnerCoupling::identity(node_dim);
    }
    return SchemeConfig::make(kind, std::move(source), std::move(adaptation), c.scheme.alpha, std::move(gamma),
                              std::move(g), c.scheme.symmetrize_adaptation);
}

/// x_i = center + spread * half_width ∘ u_i with u_i ~ U(-1, 1)^n, drawn node by node.
inline Vector initial_state(const OscillatorModel& model, std::size_t n_nodes, std::uint64_t seed, double spread) {
    if (!(spread >= 0.0) || !std::isfinite(spread)) throw ConfigError("initial.spread", "must be non-negative");
    const Box& box = model.default_box();
    const Vector center = box.center();
    const Vector half = box.half_width();
    const auto n = static_cast<Eigen::Index>(model.dim());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x(static_cast<Eigen::Index>(n_nodes) * n);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            x(static_cast<Eigen::Index>(i) * n + k) = center(k) + spread * half(k) * u(rng);
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct RunResult {
    std::string name;
    Trajectory trajectory;
    SyncReport report;
    std::string divergence;  // empty unless the run left the guard
};

/// Builds everything, integrates, summarizes. Configuration problems throw
/// ConfigError; divergence is folded into the result.
inline RunResult run_experiment(const ExperimentConfig& c) {
    const OscillatorModel model = build_model(c);
    const SchemeConfig scheme = build_scheme(c, model.dim());
    const Vector x0 = initial_state(model, scheme.n_nodes(), c.initial.seed, c.initial.spread);

    RunResult r;
    r.name = c.name;
    try {
        r.trajectory = integrate(scheme, model, x0, c.integrator);
    } catch (const DivergenceError& e) {
        r.trajectory = e.prefix();
        r.divergence = e.what();
    }
    r.report = summarize(r.trajectory, c.analysis);
    return r;
}

struct SweepRow {
    double alpha = 0.0;
    std::optional<SyncReport> report;
    std::string error;
};

/// One run per α, executed concurrently. Rows follow the order of `alphas`.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::vector<double>& alphas) {
    if (alphas.empty()) throw ConfigError("alpha", "sweep needs at least one α value");
    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(alphas.size());
    for (double alpha : alphas) {
        ExperimentConfig c = base;
        c.scheme.alpha = alpha;
        jobs.push_back(std::async(std::launch::async, [c = std::move(c), alpha] {
            SweepRow row;
            row.alpha = alpha;
            try {
                RunResult r = run_experiment(c);
                row.report = r.report;
                row.error = r.divergence;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        }));
    }
    std::vector<SweepRow> rows;
    rows.reserve(jobs.size());
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "alpha,c_final,time_to_sync,E_final,synchronized,error\n";
    const auto num = [](const std::optional<SyncReport>& r, double SyncReport::*field) {
        return r ? format_double((*r).*field) : std::string("nan");
    };
    for (const auto& row : rows) {
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << format_double(row.alpha) << ',' << num(row.report, &SyncReport::c_final) << ','
           << num(row.report, &SyncReport::time_to_sync) << ',' << num(row.report, &SyncReport::e_final) << ','
           << (row.report && row.report->synchronized ? 1 : 0) << ',' << err << '\n';
    }
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace detail {

struct FigureFamily {
    int figure;
    const char* model;
};

inline constexpr std::array<FigureFamily, 4> kFamilies{{{1, "chua"}, {3, "chen"}, {5, "lorenz"}, {7, "rossler"}}};

inline ExperimentConfig preset_base(const std::string& name, const std::string& model, std::size_t n_nodes) {
    ExperimentConfig c;
    c.name = name;
    c.model.name = model;
    c.network.n_nodes = n_nodes;
    c.integrator.record_stride = 10;
    c.output.svg = true;
    return c;
}

// The unnormalized adaptation rates grow with the number of node pairs, so a
// fixed α either crawls (ξ-weighted law) or overshoots c past the RK4
// stability limit (pairwise laws) as N grows. These gains and steps keep every
// preset synchronizing between N = 10 (α = 1, h = 0.005) and N = 100.
inline void scale_for_size(ExperimentConfig& c, std::size_t n_nodes) {
    const double r = static_cast<double>(n_nodes) / 10.0;
    if (c.scheme.kind == "linear-known") {
        c.scheme.alpha = std::max(1.0, r);
    } else if (c.scheme.kind == "nonlinear") {
        c.scheme.alpha = std::min(1.0, 1.0 / r);
    } else if (c.scheme.kind == "linear-unknown") {
        c.scheme.alpha = std::min(1.0, 1.0 / (r * r * r));
    }
    if (n_nodes > 20) c.integrator.step = 0.002;
}

} // namespace detail

/// fig1/3/5/7 "-linear-" and "-nonlinear-", fig2/4/6/8 "-unknown-global-" and
/// "-unknown-random-" for chua/chen/lorenz/rossler, plus "fig9-timevarying-chua".
inline std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& f : detail::kFamilies) {
        const std::string m = f.model;
        out.push_back("fig" + std::to_string(f.figure) + "-linear-" + m);
        out.push_back("fig" + std::to_string(f.figure) + "-nonlinear-" + m);
        out.push_back("fig" + std::to_string(f.figure + 1) + "-unknown-global-" + m);
        out.push_back("fig" + std::to_string(f.figure + 1) + "-unknown-random-" + m);
    }
    out.push_back("fig9-timevarying-chua");
    return out;
}

/// Expand a preset into its runs (one, except fig9 which has two).
inline std::vector<ExperimentConfig> make_preset(const std::string& name, std::size_t n_nodes = 100) {
    if (n_nodes < 2) throw ConfigError("network.n_nodes", "needs at least 2 nodes");
    if (name == "fig9-timevarying-chua") {
        std::vector<ExperimentConfig> runs;
        for (const auto& p : {std::array<double, 3>{1, 1, 2}, std::array<double, 3>{1, 1, 1}}) {
            auto c = detail::preset_base(name + "-p" + format_double(p[0]) + format_double(p[1]) + format_double(p[2]),
                                         "chua", 3);
            c.scheme.kind = "linear-time-varying";
            c.network.generator = "three-node";
            c.network.p = p;
            runs.push_back(std::move(c));
        }
        return runs;
    }
    for (const auto& f : detail::kFamilies) {
        const std::string m = f.model;
        const std::string odd = "fig" + std::to_string(f.figure) + "-";
        const std::string even = "fig" + std::to_string(f.figure + 1) + "-";
        auto c = detail::preset_base(name, m, n_nodes);
        if (name == odd + "linear-" + m) {
            detail::scale_for_size(c, n_nodes);
            return {c};
        }
        if (name == odd + "nonlinear-" + m) {
            c.scheme.kind = "nonlinear";
            detail::scale_for_size(c, n_nodes);
            return {c};
        }
        if (name == even + "unknown-global-" + m || name == even + "unknown-random-" + m) {
            c.scheme.kind = "linear-unknown";
            NetworkSpec adapt;
            adapt.n_nodes = n_nodes;
            if (name.find("global") != std::string::npos) {
                adapt.generator = "complete";
            } else {
                adapt.generator = "random-symmetric";
                adapt.edge_prob = 0.5;
                adapt.seed = 3;
            }
            c.adaptation_network = adapt;
            detail::scale_for_size(c, n_nodes);
            return {c};
        }
    }
    throw ConfigError("preset", "unknown preset '" + name + "'");
}

} // namespace adaptsync
