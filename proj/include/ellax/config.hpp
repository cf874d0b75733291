#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ellax/common.hpp"

namespace ellax {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

/// Orchestration config: flat key=value document plus CLI overrides.
struct SuiteConfig {
    cplx tau{0.0, 1.0};
    int n = 2;
    // default seeds are chosen so the unit-time flows of the dynamics suite
    // stay clear of punctures and collisions; the reversal certificate is
    // only meaningful on such well-conditioned trajectories
    std::vector<std::uint64_t> seeds{1, 5, 9};
    std::map<std::string, double> tolerances;   // starts from defaults
    std::vector<std::pair<cplx, cplx>> probes;  // empty: suites draw seeded probes
    std::vector<std::string> suites;            // empty: all, dependency order
};

inline const std::vector<std::string>& all_suites() {
    static const std::vector<std::string> order{"theta",       "lax",       "rmatrix", "solver",
                                                "yang_baxter", "reduction", "dynamics"};
    return order;
}

/// Every tolerance a suite can reference, with its pinned default.
inline const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> defaults{
        {"theta_identity", 1e-12},       // quasi-periodicity, oddness, E shifts
        {"theta_derivative_fd", 1e-8},   // series derivative vs finite differences
        {"theta_local_expansion", 1e-5}, // |z E(z) - 1| near 0
        {"lax_residue", 1e-8},           // residue = beta (x) alpha; left eigenvector
        {"lax_residue_theorem", 1e-9},   // sum of residues vanishes; regular at P on shell
        {"lax_periodicity", 1e-10},      // double periodicity of L
        {"lax_rescale", 1e-12},          // rescale invariance
        {"lax_gauge", 1e-9},             // conjugation covariance
        {"rmatrix_identity", 1e-8},      // null vectors, vanishing at P, w-residues
        {"rmatrix_quadrature", 1e-7},    // z-residue pattern, Laurent-coefficient conditions
        {"holo_basis", 1e-10},           // dual-basis normalization
        {"solver_match", 1e-9},          // solver vs closed forms
        {"solver_unique", 1e-12},        // permutation invariance of solves
        {"solver_periodicity", 1e-10},   // double periodicity of solver output
        {"yang_baxter", 1e-6},           // exchange-relation residual, relative
        {"yang_baxter_antisym", 1e-9},   // D_ijkl(z,w) = -D_klij(w,z)
        {"cross_chart", 1e-7},           // bracket agreement across pivot charts
        {"deriv_momentum", 1e-9},        // dL/dp closed form
        {"deriv_quadrature", 1e-7},      // dL/dq, dL/dalpha, dL/dbeta Laurent data
        {"involution", 1e-6},            // {tr L^k(z), tr L^k(w)} vanishing
        {"det_g", 1e-12},                // unimodularity of the compensator
        {"dressed_gauge", 1e-9},         // gauge invariance of the dressed Lax
        {"dressed_yang_baxter", 1e-5},   // dressed exchange residual at slice points
        {"rh_independence", 0.0},        // reduced kernel blind to (p, beta): bitwise
        {"gg_bracket", 1e-10},           // {G_ij, G_kl} vanishing
        {"spin_cm", 1e-12},              // constraint-surface residual identities
        {"dyn_h_drift", 1e-9},
        {"dyn_trace_drift", 1e-6},
        {"dyn_constraint_drift", 1e-6},
        {"dyn_moment_drift", 1e-6},
        {"dyn_reversal", 1e-7},
    };
    return defaults;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

}  // namespace detail

/// Parse "a", "bi", "a+bi", "a-bi", "i", "-i" into a complex number.
inline cplx parse_complex(const std::string& raw) {
    const std::string s = detail::trim(raw);
    if (s.empty()) throw ConfigError("empty complex literal");
    // locate the sign splitting real and imaginary parts (skip position 0 and
    // signs that belong to an exponent)
    std::size_t split_pos = std::string::npos;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E')
            split_pos = i;  // keep the last candidate: handles "1e-3+2e-4i"
    }
    auto parse_real = [](const std::string& t) -> double {
        if (t.empty() || t == "+") return 1.0;  // bare "i"
        if (t == "-") return -1.0;
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            throw ConfigError("malformed number: '" + t + "'");
        }
        if (used != t.size()) throw ConfigError("malformed number: '" + t + "'");
        return v;
    };
    if (s.back() == 'i' || s.back() == 'I') {
        const std::string body = s.substr(0, s.size() - 1);
        if (split_pos == std::string::npos) return cplx(0.0, parse_real(body));
        return cplx(parse_real(body.substr(0, split_pos)), parse_real(body.substr(split_pos)));
    }
    if (split_pos != std::string::npos)
        throw ConfigError("complex literal must end in 'i' when an imaginary part is present: '" +
                          s + "'");
    return cplx(parse_real(s), 0.0);
}

inline std::string format_complex(const cplx& z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real();
    if (z.imag() >= 0.0 || std::isnan(z.imag())) os << "+";
    os << z.imag() << "i";
    return os.str();
}

/// Apply one key=value setting. Unknown keys (including unknown tolerance
/// names) are rejected.
inline void apply_setting(SuiteConfig& cfg, const std::string& key, const std::string& value) {
    if (cfg.tolerances.empty()) cfg.tolerances = default_tolerances();
    if (key == "tau") {
        cfg.tau = parse_complex(value);
        if (!(cfg.tau.imag() > 0.0)) throw ConfigError("tau must have positive imaginary part");
    } else if (key == "n") {
        try {
            cfg.n = std::stoi(value);
        } catch (const std::exception&) {
            throw ConfigError("malformed integer for n: '" + value + "'");
        }
        if (cfg.n < 1 || cfg.n > 8) throw ConfigError("n must lie in 1..8");
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& tok : detail::split(value, ',')) {
            try {
                cfg.seeds.push_back(std::stoull(tok));
            } catch (const std::exception&) {
                throw ConfigError("malformed seed: '" + tok + "'");
            }
        }
        if (cfg.seeds.empty()) throw ConfigError("seeds list is empty");
    } else if (key == "suites") {
        cfg.suites.clear();
        for (const auto& tok : detail::split(value, ',')) {
            if (std::find(all_suites().begin(), all_suites().end(), tok) == all_suites().end())
                throw ConfigError("unknown suite: '" + tok + "'");
            cfg.suites.push_back(tok);
        }
    } else if (key == "probes") {
        cfg.probes.clear();
        for (const auto& tok : detail::split(value, ',')) {
            const auto parts = detail::split(tok, ':');
            if (parts.size() != 2)
                throw ConfigError("probe pair must be 'z:w', got '" + tok + "'");
            cfg.probes.emplace_back(parse_complex(parts[0]), parse_complex(parts[1]));
        }
    } else if (key.rfind("tolerance.", 0) == 0) {
        const std::string name = key.substr(10);
        auto it = cfg.tolerances.find(name);
        if (it == cfg.tolerances.end()) throw ConfigError("unknown tolerance key: '" + name + "'");
        try {
            it->second = std::stod(value);
        } catch (const std::exception&) {
            throw ConfigError("malformed tolerance value for '" + name + "'");
        }
        if (!(it->second >= 0.0)) throw ConfigError("tolerance must be nonnegative: '" + name + "'");
    } else {
        throw ConfigError("unknown config key: '" + key + "'");
    }
}

/// Parse the flat key=value config document ('#' starts a comment).
inline SuiteConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    SuiteConfig cfg;
    cfg.tolerances = default_tolerances();
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            apply_setting(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

inline SuiteConfig default_config() {
    SuiteConfig cfg;
    cfg.tolerances = default_tolerances();
    return cfg;
}

/// Canonical serialization used for hashing and report echo.
inline std::string canonical_config_string(const SuiteConfig& cfg) {
    std::ostringstream os;
    os << "tau=" << format_complex(cfg.tau) << ";n=" << cfg.n << ";seeds=";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) os << (i ? "," : "") << cfg.seeds[i];
    os << ";suites=";
    const auto& suites = cfg.suites.empty() ? all_suites() : cfg.suites;
    for (std::size_t i = 0; i < suites.size(); ++i) os << (i ? "," : "") << suites[i];
    os << ";probes=";
    for (std::size_t i = 0; i < cfg.probes.size(); ++i)
        os << (i ? "," : "") << format_complex(cfg.probes[i].first) << ":"
           << format_complex(cfg.probes[i].second);
    os << ";tolerances=";
    bool first = true;
    for (const auto& [k, v] : cfg.tolerances) {
        os << (first ? "" : ",") << k << "=" << v;
        first = false;
    }
    return os.str();
}

/// FNV-1a over the canonical config string.
inline std::uint64_t config_hash(const SuiteConfig& cfg) {
    const std::string s = canonical_config_string(cfg);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace ellax
