// Command-line front end: run certification suites, evolve a flow, sample
// phase points, and explain individual checks. Exit codes: 0 = success,
// 1 = a certified check failed (or a run aborted), 2 = configuration error.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ellax/config.hpp"
#include "ellax/dynamics.hpp"
#include "ellax/report.hpp"
#include "ellax/verify.hpp"

namespace {

using nlohmann::ordered_json;

ellax::SuiteConfig assemble_config(const std::string& config_path, int n_override,
                                   const std::string& tau_override,
                                   const std::vector<std::string>& seed_overrides,
                                   const std::vector<std::string>& tolerance_overrides) {
    ellax::SuiteConfig cfg = config_path.empty() ? ellax::default_config()
                                                 : ellax::parse_config_file(config_path);
    if (!tau_override.empty()) ellax::apply_setting(cfg, "tau", tau_override);
    if (n_override > 0) ellax::apply_setting(cfg, "n", std::to_string(n_override));
    if (!seed_overrides.empty()) {
        std::string joined;
        for (const auto& s : seed_overrides) {
            if (!joined.empty()) joined += ",";
            joined += s;
        }
        ellax::apply_setting(cfg, "seeds", joined);
    }
    for (const auto& t : tolerance_overrides) {
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ellax::ConfigError("--tolerance expects KEY=VALUE, got '" + t + "'");
        ellax::apply_setting(cfg, "tolerance." + t.substr(0, eq), t.substr(eq + 1));
    }
    return cfg;
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw ellax::ConfigError("cannot open output file: " + out_path);
    os << text;
}

int emit_report(const ellax::RunReport& report, const std::string& out_path,
                const std::string& format) {
    const std::string text = (format == "csv")
                                 ? ellax::report_to_csv(report)
                                 : ellax::report_to_json(report).dump(2) + "\n";
    write_text(text, out_path);
    if (!out_path.empty()) {
        std::size_t failed = 0;
        for (const auto& c : report.checks)
            if (!c.pass) ++failed;
        std::cerr << report.checks.size() << " checks, " << failed << " failed; report written to "
                  << out_path << "\n";
    }
    return report.all_pass() ? 0 : 1;
}

ordered_json point_to_json(const ellax::ExtendedPhasePoint& x) {
    ordered_json j;
    j["n"] = x.n;
    auto put = [](ordered_json& arr, const ellax::cplx& v) {
        arr.push_back({{"re", v.real()}, {"im", v.imag()}});
    };
    ordered_json q = ordered_json::array(), p = ordered_json::array();
    for (std::size_t a = 0; a < x.n; ++a) {
        put(q, x.q[a]);
        put(p, x.p[a]);
    }
    j["q"] = q;
    j["p"] = p;
    ordered_json alpha = ordered_json::array(), beta = ordered_json::array();
    for (std::size_t a = 0; a < x.n; ++a) {
        ordered_json ra = ordered_json::array(), rb = ordered_json::array();
        for (std::size_t i = 0; i < x.n; ++i) {
            put(ra, x.alpha(a, i));
            put(rb, x.beta(a, i));
        }
        alpha.push_back(ra);
        beta.push_back(rb);
    }
    j["alpha"] = alpha;
    j["beta"] = beta;
    return j;
}

/// Trace-invariant probes placed away from every pole the trajectory visits.
std::vector<std::pair<ellax::cplx, int>> trajectory_probes(const ellax::Torus& torus,
                                                           const ellax::Trajectory& traj) {
    std::vector<ellax::cplx> tube;
    const std::size_t stride = std::max<std::size_t>(1, traj.states.size() / 64);
    for (std::size_t s = 0; s < traj.states.size(); s += stride)
        for (std::size_t a = 0; a < traj.states[s].n; ++a) tube.push_back(traj.states[s].q[a]);
    tube.push_back(ellax::cplx{0.0, 0.0});
    ellax::CounterRng rng(0xD1CE5EEDULL);
    std::vector<std::pair<ellax::cplx, int>> probes;
    for (int rep = 0; rep < 2; ++rep) {
        const ellax::cplx w = ellax::detail::draw_probe(rng, torus, tube, 0.05);
        probes.emplace_back(w, 2);
        probes.emplace_back(w, 3);
    }
    return probes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "certified toolkit for the elliptic extended Lax differential, its exchange "
        "r-matrix structure, and the reduced dynamics"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global options after the subcommand too

    std::string config_path, tau_str, out_path, format = "json";
    int n_override = -1;
    std::vector<std::string> seed_strs, tol_strs;
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--n", n_override, "number of marked points (1..8)");
    app.add_option("--tau", tau_str, "curve modulus, e.g. 0.3+1.1i (Im > 0)");
    app.add_option("--seed", seed_strs, "sampler seed (repeatable)");
    app.add_option("--tolerance", tol_strs, "override, e.g. --tolerance yang_baxter=1e-5");
    app.add_option("--out", out_path, "write the report (or trajectory) to this file");
    app.add_option("--format", format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* cmd_run = app.add_subcommand("run", "run every configured suite");
    std::string verify_suite;
    CLI::App* cmd_verify = app.add_subcommand("verify", "run a single suite");
    cmd_verify->add_option("suite", verify_suite, "one of: theta lax rmatrix solver yang_baxter reduction dynamics")
        ->required();

    CLI::App* cmd_evolve = app.add_subcommand("evolve", "integrate a spectral-invariant flow");
    std::string z0_str = "0.37+0.21i";
    int flow_k = 2;
    double t_end = 1.0, rel_tol = 1e-10, abs_tol = 1e-12;
    cmd_evolve->add_option("--z0", z0_str, "spectral point defining H = tr L(z0)^k / k");
    cmd_evolve->add_option("--k", flow_k, "invariant power k (>= 2)");
    cmd_evolve->add_option("--t-end", t_end, "flow time (may be negative)");
    cmd_evolve->add_option("--rel-tol", rel_tol, "integrator relative tolerance");
    cmd_evolve->add_option("--abs-tol", abs_tol, "integrator absolute tolerance");

    CLI::App* cmd_sample = app.add_subcommand("sample", "emit a seeded phase-space point");
    bool opt_moment = false, opt_slice = false;
    cmd_sample->add_flag("--moment-surface", opt_moment, "restrict to the moment surface");
    cmd_sample->add_flag("--gauge-slice", opt_slice, "pin alpha to the identity slice");

    std::string explain_id;
    CLI::App* cmd_explain = app.add_subcommand("explain", "describe one certified check");
    cmd_explain->add_option("check_id", explain_id, "check identifier from a report")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are configuration errors
    }

    try {
        if (cmd_explain->parsed()) {
            const auto& reg = ellax::check_registry();
            const auto it = reg.find(explain_id);
            if (it == reg.end())
                throw ellax::ConfigError("unknown check id: '" + explain_id + "'");
            std::cout << "check:   " << explain_id << "\n"
                      << "suite:   " << it->second.suite << "\n"
                      << "anchor:  " << it->second.anchor << "\n"
                      << "formula: " << it->second.formula << "\n";
            return 0;
        }

        ellax::SuiteConfig cfg =
            assemble_config(config_path, n_override, tau_str, seed_strs, tol_strs);

        if (cmd_run->parsed() || cmd_verify->parsed()) {
            if (cmd_verify->parsed()) ellax::apply_setting(cfg, "suites", verify_suite);
            const ellax::RunReport report = ellax::run_suites(cfg);
            return emit_report(report, out_path, format);
        }

        if (cmd_sample->parsed()) {
            const ellax::Torus torus({cfg.tau});
            const ellax::ExtendedPhasePoint x =
                ellax::sample(cfg.seeds.empty() ? 1 : cfg.seeds.front(), std::size_t(cfg.n),
                              torus, {opt_moment, opt_slice});
            write_text(point_to_json(x).dump(2) + "\n", out_path);
            return 0;
        }

        // evolve
        const ellax::Torus torus({cfg.tau});
        const ellax::ExtendedPhasePoint x0 = ellax::sample(
            cfg.seeds.empty() ? 1 : cfg.seeds.front(), std::size_t(cfg.n), torus);
        ellax::FlowConfig fc;
        fc.z0 = ellax::parse_complex(z0_str);
        fc.k = flow_k;
        fc.t_end = t_end;
        fc.rel_tol = rel_tol;
        fc.abs_tol = abs_tol;
        if (fc.k < 2) throw ellax::ConfigError("flow power k must be >= 2");

        const ellax::Trajectory traj = ellax::evolve(torus, x0, fc);
        if (!out_path.empty()) ellax::write_csv(traj, out_path);

        ordered_json j;
        j["completed"] = traj.completed;
        if (!traj.completed) j["abort_reason"] = traj.abort_reason;
        j["steps"] = traj.states.size() - 1;
        j["t_end_reached"] = traj.times.back();
        const ellax::cplx h0 = ellax::hamiltonian(torus, traj.states.front(), fc);
        double h_drift = 0.0;
        for (const auto& st : traj.states)
            h_drift = std::max(h_drift, std::abs(ellax::hamiltonian(torus, st, fc) - h0) /
                                            std::max(1.0, std::abs(h0)));
        j["hamiltonian_rel_drift"] = h_drift;
        ordered_json drifts = ordered_json::array();
        for (const auto& pd : trajectory_probes(torus, traj)) {
            // evaluate drift of tr L(w)^k along the stored states
            const auto rep = ellax::conservation_report(torus, traj, {pd});
            drifts.push_back({{"w", ellax::format_complex(rep[0].w)},
                              {"k", rep[0].k},
                              {"max_rel_drift", rep[0].max_rel_drift}});
        }
        j["trace_invariant_drifts"] = drifts;
        if (!out_path.empty()) j["trajectory_csv"] = out_path;
        std::cout << j.dump(2) << "\n";
        return traj.completed ? 0 : 1;
    } catch (const ellax::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
