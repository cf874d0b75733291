#pragma once

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ellax/config.hpp"

namespace ellax {

/// One certified identity: the residual actually measured, the gate it is
/// held to, and the verdict.
struct CheckResult {
    std::string suite;
    std::string check_id;
    std::string paper_anchor;  // the identity being certified, in words
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline CheckResult make_check(std::string suite, std::string id, std::string anchor,
                              double residual, double tolerance) {
    CheckResult c;
    c.suite = std::move(suite);
    c.check_id = std::move(id);
    c.paper_anchor = std::move(anchor);
    c.max_residual = residual;
    c.tolerance = tolerance;
    c.pass = residual <= tolerance;
    return c;
}

/// Discrete convention choices settled by the verification itself.
struct ConventionChoice {
    double alpha_beta_sign = 1.0;
    bool transposed_reading = false;

    std::string bracket_sign_label() const { return alpha_beta_sign > 0 ? "+1" : "-1"; }
    std::string reading_label() const { return transposed_reading ? "transposed" : "primary"; }
};

struct RunReport {
    SuiteConfig config;
    ConventionChoice conventions;
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline std::string hex_hash(std::uint64_t h) {
    std::ostringstream os;
    os << "0x" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/// Stable-key-order JSON form of the full report.
inline nlohmann::ordered_json report_to_json(const RunReport& r, bool with_timestamp = true) {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    if (with_timestamp) j["timestamp"] = iso_timestamp();

    nlohmann::ordered_json env;
    env["version"] = kVersion;
    env["seeds"] = r.config.seeds;
    env["config_hash"] = hex_hash(config_hash(r.config));
    j["environment"] = env;

    nlohmann::ordered_json conv;
    conv["bracket_sign"] = r.conventions.bracket_sign_label();
    conv["r_index_reading"] = r.conventions.reading_label();
    j["conventions"] = conv;

    nlohmann::ordered_json cfg;
    cfg["tau"] = format_complex(r.config.tau);
    cfg["n"] = r.config.n;
    cfg["suites"] = r.config.suites.empty() ? all_suites() : r.config.suites;
    {
        nlohmann::ordered_json probes = nlohmann::ordered_json::array();
        for (const auto& [z, w] : r.config.probes)
            probes.push_back(format_complex(z) + ":" + format_complex(w));
        cfg["probes"] = probes;
    }
    {
        nlohmann::ordered_json tols;
        for (const auto& [k, v] : r.config.tolerances) tols[k] = v;
        cfg["tolerances"] = tols;
    }
    j["config"] = cfg;

    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
        nlohmann::ordered_json e;
        e["suite"] = c.suite;
        e["check_id"] = c.check_id;
        e["paper_anchor"] = c.paper_anchor;
        e["max_residual"] = c.max_residual;
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["pass"] = r.all_pass();
    return j;
}

/// CSV form: one row per check.
inline std::string report_to_csv(const RunReport& r) {
    std::ostringstream os;
    os << "suite,check_id,paper_anchor,max_residual,tolerance,pass\n";
    os.precision(12);
    for (const auto& c : r.checks) {
        std::string anchor = c.paper_anchor;
        for (auto& ch : anchor)
            if (ch == ',') ch = ';';
        os << c.suite << "," << c.check_id << "," << anchor << "," << c.max_residual << ","
           << c.tolerance << "," << (c.pass ? "true" : "false") << "\n";
    }
    return os.str();
}

}  // namespace ellax
