#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "ellax/config.hpp"
#include "ellax/report.hpp"
#include "ellax/verify.hpp"

using namespace ellax;

TEST_CASE("complex literals parse in every supported spelling") {
    REQUIRE(parse_complex("1.5") == cplx(1.5, 0.0));
    REQUIRE(parse_complex("-2") == cplx(-2.0, 0.0));
    REQUIRE(parse_complex("i") == cplx(0.0, 1.0));
    REQUIRE(parse_complex("-i") == cplx(0.0, -1.0));
    REQUIRE(parse_complex("2i") == cplx(0.0, 2.0));
    REQUIRE(parse_complex("-0.5i") == cplx(0.0, -0.5));
    REQUIRE(parse_complex("0.3+1.1i") == cplx(0.3, 1.1));
    REQUIRE(parse_complex("0.3-1.1i") == cplx(0.3, -1.1));
    REQUIRE(parse_complex("  -1.25e-1+2e-4i ") == cplx(-0.125, 2e-4));
    REQUIRE(parse_complex("1e-3+2e-4i") == cplx(1e-3, 2e-4));
    REQUIRE(parse_complex("-1+i") == cplx(-1.0, 1.0));
    REQUIRE(parse_complex("3-i") == cplx(3.0, -1.0));

    REQUIRE_THROWS_AS(parse_complex(""), ConfigError);
    REQUIRE_THROWS_AS(parse_complex("foo"), ConfigError);
    REQUIRE_THROWS_AS(parse_complex("1+2"), ConfigError);
    REQUIRE_THROWS_AS(parse_complex("1+2j"), ConfigError);
    REQUIRE_THROWS_AS(parse_complex("1.2.3i"), ConfigError);
}

TEST_CASE("complex round trip through the canonical formatter") {
    for (const cplx z : {cplx{0.3, 1.1}, cplx{-0.125, 2e-4}, cplx{0.0, 1.0}, cplx{2.0, -3.5}}) {
        REQUIRE(parse_complex(format_complex(z)) == z);
    }
}

TEST_CASE("settings validate their keys and ranges") {
    SuiteConfig cfg = default_config();

    apply_setting(cfg, "tau", "0.3+1.1i");
    REQUIRE(cfg.tau == cplx(0.3, 1.1));
    REQUIRE_THROWS_AS(apply_setting(cfg, "tau", "0.3-1.1i"), ConfigError);
    REQUIRE_THROWS_AS(apply_setting(cfg, "tau", "2"), ConfigError);

    apply_setting(cfg, "n", "3");
    REQUIRE(cfg.n == 3);
    REQUIRE_THROWS_AS(apply_setting(cfg, "n", "0"), ConfigError);
    REQUIRE_THROWS_AS(apply_setting(cfg, "n", "9"), ConfigError);
    REQUIRE_THROWS_AS(apply_setting(cfg, "n", "two"), ConfigError);

    apply_setting(cfg, "seeds", "7, 8, 9");
    REQUIRE(cfg.seeds == std::vector<std::uint64_t>{7, 8, 9});
    REQUIRE_THROWS_AS(apply_setting(cfg, "seeds", " , "), ConfigError);

    apply_setting(cfg, "suites", "theta,lax");
    REQUIRE(cfg.suites == std::vector<std::string>{"theta", "lax"});
    REQUIRE_THROWS_AS(apply_setting(cfg, "suites", "theta,bogus"), ConfigError);

    apply_setting(cfg, "probes", "0.1+0.2i:0.3+0.4i");
    REQUIRE(cfg.probes.size() == 1);
    REQUIRE(cfg.probes[0].first == cplx(0.1, 0.2));
    REQUIRE_THROWS_AS(apply_setting(cfg, "probes", "0.1+0.2i"), ConfigError);

    apply_setting(cfg, "tolerance.yang_baxter", "1e-5");
    REQUIRE(cfg.tolerances.at("yang_baxter") == 1e-5);
    REQUIRE_THROWS_AS(apply_setting(cfg, "tolerance.nonsense", "1e-5"), ConfigError);
    REQUIRE_THROWS_AS(apply_setting(cfg, "tolerance.yang_baxter", "-1"), ConfigError);
    REQUIRE_THROWS_AS(apply_setting(cfg, "bogus_key", "1"), ConfigError);
}

TEST_CASE("config files parse with comments and report line numbers") {
    const std::string path = "test_cfg_tmp.cfg";
    {
        std::ofstream os(path);
        os << "# certification setup\n";
        os << "tau = 2i   # square-ish torus\n";
        os << "\n";
        os << "n = 3\n";
        os << "seeds = 4,5\n";
        os << "tolerance.involution = 1e-5\n";
    }
    const SuiteConfig cfg = parse_config_file(path);
    REQUIRE(cfg.tau == cplx(0.0, 2.0));
    REQUIRE(cfg.n == 3);
    REQUIRE(cfg.seeds == std::vector<std::uint64_t>{4, 5});
    REQUIRE(cfg.tolerances.at("involution") == 1e-5);
    REQUIRE(cfg.tolerances.at("yang_baxter") == 1e-6);  // untouched default

    {
        std::ofstream os(path);
        os << "tau = i\n";
        os << "this line is broken\n";
    }
    try {
        parse_config_file(path);
        FAIL("malformed line not caught");
    } catch (const ConfigError& e) {
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::remove(path.c_str());
    REQUIRE_THROWS_AS(parse_config_file("no_such_file.cfg"), ConfigError);
}

TEST_CASE("config hashing is stable and sensitive") {
    const SuiteConfig a = default_config();
    SuiteConfig b = default_config();
    REQUIRE(config_hash(a) == config_hash(b));
    apply_setting(b, "n", "3");
    REQUIRE(config_hash(a) != config_hash(b));
}

TEST_CASE("check verdicts gate on the residual") {
    const CheckResult at = make_check("s", "id", "anchor", 1e-7, 1e-7);
    REQUIRE(at.pass);  // boundary counts as a pass
    REQUIRE(!make_check("s", "id", "anchor", 1.0000001e-7, 1e-7).pass);
    REQUIRE(make_check("s", "id", "anchor", 0.0, 0.0).pass);
}

TEST_CASE("JSON report shape") {
    RunReport r;
    r.config = default_config();
    r.checks.push_back(make_check("theta", "theta_oddness", "theta(-z) = -theta(z)", 1e-14, 1e-12));
    r.checks.push_back(make_check("lax", "lax_residue_tyurin", "residues are rank one", 2e-3, 1e-8));

    const auto j = report_to_json(r, false);
    REQUIRE(j["schema_version"] == kReportSchemaVersion);
    REQUIRE(!j.contains("timestamp"));
    REQUIRE(j["environment"]["version"] == std::string(kVersion));
    REQUIRE(j["environment"]["config_hash"] == hex_hash(config_hash(r.config)));
    REQUIRE(j["conventions"]["bracket_sign"] == "+1");
    REQUIRE(j["conventions"]["r_index_reading"] == "primary");
    REQUIRE(j["config"]["n"] == 2);
    REQUIRE(j["config"]["suites"].size() == all_suites().size());
    REQUIRE(j["checks"].size() == 2);
    REQUIRE(j["checks"][0]["pass"] == true);
    REQUIRE(j["checks"][1]["pass"] == false);
    REQUIRE(j["pass"] == false);

    // deterministic without the timestamp
    REQUIRE(report_to_json(r, false).dump() == j.dump());

    const auto jt = report_to_json(r, true);
    REQUIRE(jt.contains("timestamp"));
    const std::string ts = jt["timestamp"];
    REQUIRE(ts.size() == 20);  // YYYY-MM-DDTHH:MM:SSZ
    REQUIRE(ts[4] == '-');
    REQUIRE(ts[10] == 'T');
    REQUIRE(ts.back() == 'Z');
}

TEST_CASE("CSV report shape") {
    RunReport r;
    r.config = default_config();
    r.checks.push_back(make_check("lax", "lax_residue_tyurin", "residue, rank one", 1e-9, 1e-8));
    const std::string csv = report_to_csv(r);
    REQUIRE(csv.rfind("suite,check_id,paper_anchor,max_residual,tolerance,pass\n", 0) == 0);
    REQUIRE(csv.find("lax,lax_residue_tyurin,residue; rank one,") != std::string::npos);
    REQUIRE(csv.find(",true\n") != std::string::npos);
}

TEST_CASE("every registered check id is documented") {
    for (const auto& [id, info] : check_registry()) {
        REQUIRE(!info.suite.empty());
        REQUIRE(!info.anchor.empty());
        REQUIRE(!info.formula.empty());
        REQUIRE(std::find(all_suites().begin(), all_suites().end(), info.suite) !=
                all_suites().end());
        REQUIRE(id.size() > 3);
    }
    REQUIRE(check_registry().size() >= 40);
}
