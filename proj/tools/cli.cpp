#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nekh/certificate.hpp"
#include "nekh/csv.hpp"
#include "nekh/diophantine.hpp"
#include "nekh/dynamics.hpp"
#include "nekh/experiments.hpp"
#include "nekh/normalform.hpp"
#include "nekh/system.hpp"

#ifndef NEKH_VERSION
#define NEKH_VERSION "dev"
#endif

namespace nekh::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string out_dir = "runs";
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON in '" + path + "': " + e.what());
    }
}

std::string hash_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Run directory named by the hash of the resolved config.
struct Run {
    std::string command;
    json config;
    std::string hash;
    fs::path dir;
    std::vector<std::string> outputs;
    std::string started;

    Run(std::string cmd, json cfg, const Globals& g)
        : command(std::move(cmd)), config(std::move(cfg)), started(utc_now()) {
        hash = hash_hex(command + "\n" + config.dump());
        dir = fs::path(g.out_dir) / (command + "-" + hash);
        fs::create_directories(dir);
    }

    fs::path file(const std::string& name) {
        outputs.push_back(name);
        return dir / name;
    }

    void write_manifest(std::optional<std::uint64_t> seed) const {
        json m;
        m["tool"] = "nekh";
        m["version"] = NEKH_VERSION;
        m["command"] = command;
        m["config_hash"] = hash;
        m["seed"] = seed ? json(*seed) : json(nullptr);
        m["started_utc"] = started;
        m["finished_utc"] = utc_now();
        m["config"] = config;
        m["outputs"] = outputs;
        std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
    }
};

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write '" + p.string() + "'");
    return os;
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const std::string& path, const Globals& g, std::ostream& out, std::ostream& err) {
    json cfg = read_json_file(path);
    NearIntegrableSystem system = system_from_json(cfg.at("system"));
    const int n = system.dims();
    PhaseState s0;
    const json& init = cfg.at("initial");
    s0.action = init.at("action").get<Vec>();
    s0.theta = init.contains("theta") ? init["theta"].get<Vec>() : Vec(n, 0.0);
    if (static_cast<int>(s0.action.size()) != n || static_cast<int>(s0.theta.size()) != n)
        throw ParseError("simulate: initial state has the wrong dimension");
    IntegrateOptions opt;
    opt.horizon = cfg.at("horizon").get<double>();
    opt.h_step = cfg.at("h_step").get<double>();
    if (cfg.contains("drift_threshold")) opt.drift_threshold = cfg["drift_threshold"].get<double>();
    opt.sample_stride = cfg.value("sample_stride", std::int64_t{1});

    Run run("simulate", cfg, g);
    const TrajectoryRecord rec = integrate(system, s0, opt);
    {
        auto os = open_out(run.file("trajectory.csv"));
        write_trajectory_csv(os, rec);
    }
    run.write_manifest(g.seed);
    json summary = {{"run_dir", run.dir.string()},
                    {"exit_kind", to_string(rec.exit_kind)},
                    {"exit_time", rec.exit_time},
                    {"max_drift", rec.max_drift},
                    {"energy_drift", rec.energy_drift},
                    {"steps", rec.steps}};
    out << summary.dump() << '\n';
    if (rec.exit_kind == ExitKind::Failure) {
        err << "simulate: " << rec.message << '\n';
        return kNumericFailure;
    }
    return kOk;
}

// ---- dirichlet --------------------------------------------------------------

int cmd_dirichlet(const std::vector<double>& omega, double Q, const std::string& normalizer, std::ostream& out) {
    if (omega.size() < 2) throw ParseError("dirichlet: need at least two frequency components");
    Normalizer norm;
    if (normalizer == "largest") norm = Normalizer::Largest;
    else if (normalizer == "first") norm = Normalizer::First;
    else throw ParseError("dirichlet: unknown normalizer '" + normalizer + "'");
    const PeriodicOrbitApprox a = dirichlet_approx(omega, Q, norm);
    out << to_json(a).dump() << '\n';
    return kOk;
}

// ---- normalform -------------------------------------------------------------

NormalFormConfig normal_form_config(const json& j, NormalFormConfig c) {
    c.steps = j.value("steps", c.steps);
    c.lie_order = j.value("lie_order", c.lie_order);
    c.degree_cap = j.value("degree_cap", c.degree_cap);
    c.fourier_cap = j.value("fourier_cap", c.fourier_cap);
    c.rho = j.value("rho", c.rho);
    c.norm_order = j.value("norm_order", c.norm_order);
    c.residual_fail_threshold = j.value("residual_fail_threshold", c.residual_fail_threshold);
    c.c1 = j.value("c1", c.c1);
    c.c2 = j.value("c2", c.c2);
    c.c3 = j.value("c3", c.c3);
    return c;
}

int cmd_normalform(const std::string& path, const Globals& g, std::ostream& out) {
    json cfg = read_json_file(path);
    NearIntegrableSystem system = system_from_json(cfg.at("system"));
    NormalFormConfig nf;
    nf.steps = system.k_reg - 2;
    if (cfg.contains("normal_form")) nf = normal_form_config(cfg["normal_form"], nf);

    Vec I_star;
    IntVec p;
    double T = 0.0;
    if (cfg.contains("I_star")) {
        I_star = cfg["I_star"].get<Vec>();
        p = cfg.at("p").get<IntVec>();
        T = cfg.at("T").get<double>();
    } else {
        const Vec I0 = cfg.at("I0").get<Vec>();
        const IntegrableModel model = system.model();
        PeriodicOrbitApprox a = dirichlet_approx(frequency(model, I0), cfg.at("Q").get<double>());
        a = periodic_action(model, a, I0);
        I_star = *a.I_star;
        p = a.p;
        T = a.T;
    }
    const double mu = cfg.at("mu").get<double>();
    const LocalNormalForm res = local_normal_form(system, I_star, p, T, mu, nf);

    Run run("normalform", cfg, g);
    const json j = to_json(res);
    open_out(run.file("normalform.json")) << j.dump(2) << '\n';
    run.write_manifest(g.seed);
    json summary = {{"run_dir", run.dir.string()}, {"ledger", j["scaled"]["ledger"]}, {"measured", j["measured"]},
                    {"claimed", j["claimed"]}};
    out << summary.dump() << '\n';
    return kOk;
}

// ---- sweep ------------------------------------------------------------------

int cmd_sweep(const std::string& path, const Globals& g, std::ostream& out, std::ostream& err) {
    json raw = read_json_file(path);
    if (g.seed) raw["seed"] = *g.seed;
    const SweepConfig cfg = sweep_config_from_json(raw);
    Run run("sweep", to_json(cfg), g);
    const SweepResult res = run_sweep(cfg, g.threads);
    for (const auto& w : res.warnings) err << w << '\n';
    {
        auto os = open_out(run.file("sweep.csv"));
        write_sweep_csv(os, res.records);
    }
    run.write_manifest(cfg.seed);
    std::size_t failures = 0;
    for (const auto& r : res.records) failures += r.exit_kind == ExitKind::Failure;
    out << json{{"run_dir", run.dir.string()}, {"records", res.records.size()}, {"failures", failures}}.dump() << '\n';
    return kOk;
}

// ---- fit --------------------------------------------------------------------

int cmd_fit(const std::string& source, const std::string& quantity_name, std::optional<double> target,
            const Globals& g, std::ostream& out) {
    fs::path csv = source;
    fs::path manifest;
    if (fs::is_directory(csv)) {
        manifest = csv / "manifest.json";
        csv /= "sweep.csv";
    }
    std::ifstream in(csv);
    if (!in) throw ParseError("fit: cannot open '" + csv.string() + "'");
    const FitQuantity q = fit_quantity_from_string(quantity_name);
    FitResult fit = fit_exponent(read_sweep_csv(in), q);

    if (target) {
        fit.target_exponent = target;
    } else if (!manifest.empty() && fs::exists(manifest)) {
        const SweepConfig cfg = sweep_config_from_json(read_json_file(manifest.string()).at("config"));
        const Exponents e = cfg.exponents();
        fit.target_exponent = q == FitQuantity::ExitTime ? -e.a.value() : e.b.value();
    }
    Run run("fit", json{{"source", fs::absolute(csv).lexically_normal().string()}, {"quantity", quantity_name}}, g);
    const json j = to_json(fit);
    open_out(run.file("fit_" + quantity_name + ".json")) << j.dump(2) << '\n';
    {
        auto os = open_out(run.file("plot_" + quantity_name + ".tsv"));
        write_plot_tsv(os, fit);
    }
    run.write_manifest(g.seed);
    out << j.dump() << '\n';
    return fit.censored ? kNumericFailure : kOk;
}

// ---- certificate ------------------------------------------------------------

int cmd_certificate(const std::string& path, const Globals& g, std::ostream& out) {
    json cfg = read_json_file(path);
    NearIntegrableSystem system = system_from_json(cfg.at("system"));
    const Vec I0 = cfg.at("I0").get<Vec>();
    const std::vector<IntVec> lambda = cfg.value("lambda", std::vector<IntVec>{});
    CertificateConstants constants =
        certificate_constants_from_json(cfg.contains("constants") ? cfg["constants"] : json::object());
    if (g.seed) constants.seed = *g.seed;
    const Certificate c = build_certificate(system, I0, ResonanceModule(system.dims(), lambda), constants);

    Run run("certificate", cfg, g);
    const json j = to_json(c);
    open_out(run.file("certificate.json")) << j.dump(2) << '\n';
    run.write_manifest(g.seed);
    json summary = {{"run_dir", run.dir.string()},
                    {"branch", j["step1"]["branch"]},
                    {"Q", c.Q},
                    {"T", c.approx.T},
                    {"mu", c.mu},
                    {"tau", c.tau},
                    {"predicted_drift", c.predicted_drift}};
    if (c.validated) summary["validation"] = j["validation"];
    out << summary.dump() << '\n';
    return c.validated && !c.validation_passed ? kNumericFailure : kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"nekh: near-integrable Hamiltonian stability laboratory"};
    app.set_version_flag("--version", std::string(NEKH_VERSION));
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed override");
    app.add_option("--threads", g.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--out-dir", g.out_dir, "root directory for run outputs");

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
    simulate->add_option("config", config_path, "JSON config")->required();

    std::vector<double> omega;
    double Q = 0.0;
    std::string normalizer = "largest";
    auto* dirichlet = app.add_subcommand("dirichlet", "periodic approximation of a frequency vector");
    dirichlet->add_option("omega", omega, "frequency components")->required();
    dirichlet->add_option("--Q,-Q", Q, "period bound")->required();
    dirichlet->add_option("--normalizer", normalizer, "largest | first");

    auto* normalform = app.add_subcommand("normalform", "local normal form around a periodic action");
    normalform->add_option("config", config_path, "JSON config")->required();

    auto* sweep = app.add_subcommand("sweep", "stability sweep over eps");
    sweep->add_option("config", config_path, "JSON config")->required();

    std::string fit_source, quantity = "exit_time";
    std::optional<double> target;
    auto* fit = app.add_subcommand("fit", "log-log exponent fit of a sweep");
    fit->add_option("source", fit_source, "sweep run directory or sweep.csv")->required();
    fit->add_option("--quantity", quantity, "exit_time | max_drift");
    fit->add_option("--target", target, "exponent to compare against");

    auto* certificate = app.add_subcommand("certificate", "three-step stability certificate");
    certificate->add_option("config", config_path, "JSON config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kConfigError;
    }
    if (*seed_opt) g.seed = seed_value;

    try {
        if (*simulate) return cmd_simulate(config_path, g, out, err);
        if (*dirichlet) return cmd_dirichlet(omega, Q, normalizer, out);
        if (*normalform) return cmd_normalform(config_path, g, out);
        if (*sweep) return cmd_sweep(config_path, g, out, err);
        if (*fit) return cmd_fit(fit_source, quantity, target, g, out);
        if (*certificate) return cmd_certificate(config_path, g, out);
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DimensionError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConditionError& e) {
        err << "condition failed: " << e.condition() << " (lhs " << e.lhs() << ", rhs " << e.rhs() << ")\n";
        return kNumericFailure;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const fs::filesystem_error& e) {
        err << "io error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}

}  // namespace nekh::cli
