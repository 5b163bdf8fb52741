// adaptsync: run, sweep, validate-matrix, quad-check.
//
// Exit codes: 0 synchronized / condition holds, 2 not synchronized / violated,
// 1 usage or configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adaptsync/experiment.hpp"
#include "adaptsync/svg.hpp"

namespace fs = std::filesystem;
using namespace adaptsync;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotSynced = 2;

struct Source {
    std::string config;
    std::string preset;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_nodes;
    std::optional<double> t_end;
    std::optional<double> step;
    std::optional<std::string> out_dir;
    bool svg = false;
};

void add_source_options(CLI::App* cmd, Source& src) {
    auto* c = cmd->add_option("--config", src.config, "experiment JSON file");
    auto* p = cmd->add_option("--preset", src.preset, "bundled preset name");
    c->excludes(p);
}

void add_override_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "initial-condition seed (beats ADAPTSYNC_SEED and the config)");
    cmd->add_option("--n-nodes", o.n_nodes, "network size for generated networks");
    cmd->add_option("--t-end", o.t_end, "integration horizon");
    cmd->add_option("--step", o.step, "fixed step size");
    cmd->add_option("--out-dir", o.out_dir, "directory for output files");
    cmd->add_flag("--svg", o.svg, "also write an SVG plot of c(t) and E(t)");
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("ADAPTSYNC_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(raw, &used);
        if (used != std::string(raw).size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("ADAPTSYNC_SEED", std::string("not a non-negative integer: '") + raw + "'");
    }
}

std::vector<ExperimentConfig> load_runs(const Source& src, const Overrides& o) {
    if (!src.config.empty()) return load_experiment_file(src.config);
    if (!src.preset.empty()) return make_preset(src.preset, o.n_nodes.value_or(100));
    throw ConfigError("config", "give --config FILE or --preset NAME");
}

void apply(std::vector<ExperimentConfig>& runs, const Overrides& o) {
    const auto env = env_seed();
    for (auto& c : runs) {
        if (o.seed) {
            c.initial.seed = *o.seed;
        } else if (env) {
            c.initial.seed = *env;
        }
        if (o.n_nodes) {
            if (!c.network.time_varying() && c.network.generator != "file") c.network.n_nodes = *o.n_nodes;
            if (c.adaptation_network && c.adaptation_network->generator != "file") {
                c.adaptation_network->n_nodes = *o.n_nodes;
            }
        }
        if (o.t_end) c.integrator.t_end = *o.t_end;
        if (o.step) c.integrator.step = *o.step;
        if (o.out_dir) c.output.dir = *o.out_dir;
        if (o.svg) c.output.svg = true;
    }
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    return out;
}

void write_artifacts(const ExperimentConfig& c, const RunResult& r) {
    const fs::path dir(c.output.dir);
    fs::create_directories(dir);
    {
        auto out = open_out(dir / (c.name + ".csv"));
        write_trajectory_csv(out, r.trajectory);
    }
    {
        auto out = open_out(dir / (c.name + "_summary.csv"));
        write_sync_report_csv(out, r.report);
    }
    {
        auto j = to_json(r.report);
        j["name"] = c.name;
        j["divergence"] = r.divergence.empty() ? json(nullptr) : json(r.divergence);
        auto out = open_out(dir / (c.name + "_summary.json"));
        out << j.dump(2) << '\n';
    }
    if (c.output.svg) {
        const auto& t = r.trajectory;
        auto out = open_out(dir / (c.name + ".svg"));
        svg::write_panels(out, c.name, {{"c(t)", t.times, t.c_series}, {"E(t)", t.times, t.e_series}});
    }
}

int cmd_run(const Source& src, const Overrides& o, std::optional<double> alpha, bool dump) {
    auto runs = load_runs(src, o);
    apply(runs, o);
    if (alpha) {
        for (auto& c : runs) c.scheme.alpha = *alpha;
    }
    if (dump) {
        std::cout << dump_experiment(runs);
        return kExitOk;
    }
    bool all_synced = true;
    for (const auto& c : runs) {
        const RunResult r = run_experiment(c);
        write_artifacts(c, r);
        if (!r.divergence.empty()) std::cerr << c.name << ": diverged: " << r.divergence << '\n';
        std::cout << c.name << ": " << (r.report.synchronized ? "synchronized" : "not synchronized")
                  << " E(0)=" << format_double(r.report.e_initial) << " E(T)=" << format_double(r.report.e_final)
                  << " c(T)=" << format_double(r.report.c_final)
                  << " t_sync=" << format_double(r.report.time_to_sync) << '\n';
        all_synced = all_synced && r.report.synchronized;
    }
    return all_synced ? kExitOk : kExitNotSynced;
}

int cmd_sweep(const Source& src, const Overrides& o, const std::vector<std::string>& alpha_text,
              const std::string& out_path) {
    std::vector<double> alphas;
    for (const auto& a : alpha_text) {
        double v = 0.0;
        if (!parse_double(a, v)) throw ConfigError("--alpha", "not a number: '" + a + "'");
        alphas.push_back(v);
    }
    if (alphas.empty()) throw ConfigError("--alpha", "sweep needs at least one α value");
    auto runs = load_runs(src, o);
    apply(runs, o);
    bool all_synced = true;
    for (const auto& c : runs) {
        const auto rows = run_sweep(c, alphas);
        const fs::path path = out_path.empty() || runs.size() > 1
                                  ? fs::path(c.output.dir) / (c.name + "_sweep.csv")
                                  : fs::path(out_path);
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        {
            auto out = open_out(path);
            write_sweep_csv(out, rows);
        }
        std::cout << "# " << c.name << " -> " << path.string() << '\n';
        write_sweep_csv(std::cout, rows);
        for (const auto& row : rows) all_synced = all_synced && row.report && row.report->synchronized;
    }
    return all_synced ? kExitOk : kExitNotSynced;
}

std::string vec_str(const Vector& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v(i));
    return s + ")";
}

int cmd_validate_matrix(const std::string& path) {
    const CouplingMatrix a(read_matrix_file(path));
    const auto& rep = a.report();
    std::cout << "class: " << to_string(rep.tag) << '\n';
    std::cout << "irreducible: " << (rep.irreducible ? "yes" : "no") << '\n';
    for (const auto& v : rep.violations) std::cout << "violation: " << v << '\n';
    if (!rep.valid()) return kExitNotSynced;

    const LeftEigenvector xi = left_eigenvector(a);
    std::cout << "xi: " << vec_str(xi.values()) << '\n';
    std::cout << "lambda2: " << format_double(lambda2(a, xi)) << '\n';
    const ProjectionMatrix u = build_projection(xi);
    const bool minus_u_a2 = validate_condition(-u.matrix()).tag == ConditionClass::A2;
    std::cout << "-U in A2: " << (minus_u_a2 ? "yes" : "no") << '\n';
    return kExitOk;
}

struct QuadArgs {
    std::string model;
    std::vector<std::string> params;
    std::vector<double> delta{0.0};
    double varpi = 0.0;
    std::vector<double> box;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::vector<double> grid;
};

ParamMap parse_params(const std::vector<std::string>& kvs) {
    ParamMap out;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        double v = 0.0;
        if (eq == std::string::npos || eq == 0 || !parse_double(std::string_view(kv).substr(eq + 1), v)) {
            throw ConfigError("--param", "expected key=value, got '" + kv + "'");
        }
        out[kv.substr(0, eq)] = v;
    }
    return out;
}

int cmd_quad_check(const QuadArgs& q) {
    const OscillatorModel model = make_model(q.model, parse_params(q.params));
    const auto n = static_cast<Eigen::Index>(model.dim());

    Box box = model.default_box();
    if (!q.box.empty()) {
        if (q.box.size() != 2) throw ConfigError("--box", "expected LO,HI");
        box = {Vector::Constant(n, q.box[0]), Vector::Constant(n, q.box[1])};
    }
    const auto delta_of = [&](const std::vector<double>& d) {
        if (d.size() == 1) return Vector::Constant(n, d[0]).eval();
        if (static_cast<Eigen::Index>(d.size()) != n) {
            throw ConfigError("--delta", "give one value or one per coordinate");
        }
        return Eigen::Map<const Vector>(d.data(), n).eval();
    };
    const auto report = [&](const QuadCertificate& cert, const std::string& label) {
        std::cout << label << "max_violation=" << format_double(cert.max_violation)
                  << " argmax_x=" << vec_str(cert.argmax_x) << " argmax_y=" << vec_str(cert.argmax_y) << '\n';
    };

    if (!q.grid.empty()) {
        std::optional<double> smallest;
        for (double d : q.grid) {
            const auto cert = quad_probe(model, Vector::Constant(n, d), q.varpi, box, q.samples, q.seed);
            report(cert, "d=" + format_double(d) + " ");
            if (cert.holds() && (!smallest || d < *smallest)) smallest = d;
        }
        if (!smallest) {
            std::cout << "no grid value is consistent\n";
            return kExitNotSynced;
        }
        std::cout << "smallest consistent d=" << format_double(*smallest) << '\n';
        return kExitOk;
    }
    const auto cert = quad_probe(model, delta_of(q.delta), q.varpi, box, q.samples, q.seed);
    report(cert, "");
    return cert.holds() ? kExitOk : kExitNotSynced;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive coupling-strength synchronization of oscillator networks"};
    app.require_subcommand(1);

    Source run_src;
    Overrides run_o;
    std::optional<double> run_alpha;
    bool dump = false;
    auto* run = app.add_subcommand("run", "integrate one experiment and write CSV/JSON/SVG artifacts");
    add_source_options(run, run_src);
    add_override_options(run, run_o);
    run->add_option("--alpha", run_alpha, "adaptation gain");
    run->add_flag("--dump-config", dump, "print the resolved config as JSON and exit");

    Source sweep_src;
    Overrides sweep_o;
    std::vector<std::string> alphas;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "one run per alpha; table of alpha, c_final, time_to_sync, E_final");
    add_source_options(sweep, sweep_src);
    add_override_options(sweep, sweep_o);
    sweep->add_option("--alpha", alphas, "alpha values, comma separated")->delimiter(',')->required();
    sweep->add_option("--out", sweep_out, "sweep CSV path (default OUT_DIR/NAME_sweep.csv)");

    std::string matrix_path;
    auto* validate = app.add_subcommand("validate-matrix", "classify a coupling matrix file");
    validate->add_option("matrix", matrix_path, "matrix file")->required();

    QuadArgs q;
    auto* quad = app.add_subcommand("quad-check", "sample the QUAD inequality for a node model");
    quad->add_option("--model", q.model, "chua|chen|lorenz|rossler|linear")->required();
    quad->add_option("--param", q.params, "parameter override key=value (repeatable)");
    quad->add_option("--delta", q.delta, "diagonal of Delta: one value or one per coordinate")->delimiter(',');
    quad->add_option("--varpi", q.varpi, "varpi");
    quad->add_option("--box", q.box, "sample cube LO,HI (default: model box)")->delimiter(',');
    quad->add_option("--samples", q.samples, "number of sampled pairs");
    quad->add_option("--seed", q.seed, "sampling seed");
    quad->add_option("--grid", q.grid, "scan Delta = d*I over these d, report the smallest consistent one")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*run) return cmd_run(run_src, run_o, run_alpha, dump);
        if (*sweep) return cmd_sweep(sweep_src, sweep_o, alphas, sweep_out);
        if (*validate) return cmd_validate_matrix(matrix_path);
        if (*quad) return cmd_quad_check(q);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
