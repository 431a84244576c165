#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "confmet/errors.hpp"
#include "confmet/runner.hpp"
#include "doctest.h"

using namespace confmet;

namespace {

std::string minimal_scenario_text() {
    return "name = tiny\n"
           "dimension = 4\n"
           "background = flat\n"
           "factor = 1\n"
           "suites = curvature\n"
           "[grid]\n"
           "r_min = 0.5\n"
           "r_max = 1.5\n"
           "radial_count = 9\n"
           "sphere_degree = 4\n";
}

}  // namespace

TEST_CASE("scenario parsing") {
    SUBCASE("minimal scenario fills defaults") {
        auto s = parse_scenario(minimal_scenario_text());
        CHECK(s.name == "tiny");
        CHECK(s.dimension == 4);
        CHECK(s.suites == std::vector<std::string>{"curvature"});
        CHECK(s.seed == 12345);          // default
        CHECK(s.resolution == 1.0);      // default
        CHECK(s.tc_L == 2.0);            // default
    }

    SUBCASE("factor expressions bind the dimension") {
        auto s = parse_scenario("name = p\nfactor = abs(x)^(2-n)\nsuites = curvature\n"
                                "[grid]\nr_min=0.5\nr_max=2\n");
        Expr e = parse_expression(s.factor, s.dimension);
        double x[4] = {2, 0, 0, 0};
        CHECK(e.eval(x, 4) == doctest::Approx(0.25));
    }

    SUBCASE("gbc without chi/m is a validation error") {
        CHECK_THROWS_AS(parse_scenario("name = g\nsuites = gbc\n"), Error);
        CHECK_NOTHROW(parse_scenario("name = g\nsuites = gbc\n[gbc]\nchi = 2\nm = 1\n"));
    }

    SUBCASE("unknown keys and sections rejected; parse errors carry position") {
        CHECK_THROWS_AS(parse_scenario("bogus = 1\n"), Error);
        CHECK_THROWS_AS(parse_scenario("[mystery]\nx = 1\n"), Error);
        CHECK_THROWS_AS(parse_scenario("justakey\n"), Error);
        try {
            parse_scenario("name = x\noops\n");
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }

    SUBCASE("non-positive factor rejected") {
        CHECK_THROWS_AS(parse_scenario("name = neg\nfactor = x1\nsuites = curvature\n"
                                       "[grid]\nr_min = 0.5\nr_max = 1\n"),
                        Error);
    }

    SUBCASE("round trip: serialize then parse is the identity") {
        auto s = parse_scenario(minimal_scenario_text());
        auto s2 = parse_scenario(serialize_scenario(s));
        CHECK(s == s2);
        CHECK(serialize_scenario(s) == serialize_scenario(s2));

        // and for a fully-specified scenario
        Scenario full = s;
        full.suites = {"curvature", "decay", "gbc"};
        full.has_chi = full.has_m = true;
        full.chi = 2;
        full.ends_m = 1;
        full.vd_rho = {2.0, 4.0};
        full.blowdown_scales = {0.1, 0.001};
        auto full2 = parse_scenario(serialize_scenario(full));
        CHECK(full == full2);
    }
}

TEST_CASE("report rows and pass rules") {
    auto r1 = make_row("rel", 1.005, 1.0, 0.01);
    CHECK(r1.pass);
    CHECK(r1.rel_err == doctest::Approx(0.005));
    auto r2 = make_row("abs", 5e-4, 0.0, 1e-3);
    CHECK(r2.pass);
    auto r3 = make_row("fail", 1.2, 1.0, 0.01);
    CHECK_FALSE(r3.pass);
}

TEST_CASE("run_scenario: deterministic reports, CSV/JSON agreement, exit codes") {
    auto s = parse_scenario(minimal_scenario_text());
    s.out_dir = "/tmp/confmet_test_out";

    Report rep1 = run_scenario(s);
    Report rep2 = run_scenario(s);
    CHECK(rep1.all_pass);
    CHECK(exit_code_for(rep1) == 0);

    // byte-identical JSON apart from the runtime field
    CHECK(report_to_json(rep1, false) == report_to_json(rep2, false));

    // CSV and JSON encodings agree value for value
    write_report(rep1, s.out_dir);
    std::ifstream csv(std::filesystem::path(s.out_dir) / "tiny__curvature__consistency.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "label,computed,target,tolerance,rel_err,pass,informational");
    std::size_t row_idx = 0;
    std::string line;
    const auto& table = rep1.tables.front();
    while (std::getline(csv, line)) {
        REQUIRE(row_idx < table.rows.size());
        std::stringstream ss(line);
        std::string label, computed;
        std::getline(ss, label, ',');
        std::getline(ss, computed, ',');
        CHECK(label == table.rows[row_idx].label);
        CHECK(std::stod(computed) == doctest::Approx(table.rows[row_idx].computed).epsilon(1e-15));
        ++row_idx;
    }
    CHECK(row_idx == table.rows.size());

    // JSON report exists and has the schema marker
    std::ifstream js(std::filesystem::path(s.out_dir) / "tiny__report.json");
    REQUIRE(js.good());
    std::stringstream jbuf;
    jbuf << js.rdbuf();
    CHECK(jbuf.str().find("\"schema\": 1") != std::string::npos);
}

TEST_CASE("run_scenario: failing suites produce exit code 1 and do not abort others") {
    auto s = parse_scenario(minimal_scenario_text());
    // decay on u == 1 reports ratios far from the inversion-model targets
    s.suites = {"decay", "curvature"};
    s.decay_r = 0.8;
    s.r_min = 0.05;
    s.r_max = 4.0;
    s.resolution = 0.5;
    Report rep = run_scenario(s);
    CHECK_FALSE(rep.all_pass);
    CHECK(exit_code_for(rep) == 1);
    REQUIRE(rep.tables.size() == 2);
    CHECK_FALSE(rep.tables[0].pass());
    CHECK(rep.tables[1].pass());  // curvature consistency still holds for u == 1
}

TEST_CASE("run_scenario: a throwing suite is reported as a failed table") {
    auto s = parse_scenario(minimal_scenario_text());
    s.suites = {"w-profile", "curvature"};
    s.background = "round-sphere-chart";  // w-profile needs the flat Green function
    Report rep = run_scenario(s);
    REQUIRE(rep.tables.size() == 2);
    CHECK_FALSE(rep.tables[0].pass());
    CHECK(rep.tables[0].error.find("UnsupportedBackground") != std::string::npos);
    CHECK(rep.tables[1].pass());
}
