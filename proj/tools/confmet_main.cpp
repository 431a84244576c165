#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "confmet/runner.hpp"

namespace {

int run_verify(const std::string& path, const std::string& out_override, double resolution,
               long long seed, const std::vector<std::string>& suites) {
    confmet::Scenario scenario;
    try {
        std::ifstream f(path);
        if (!f.good()) {
            std::cerr << "config error: cannot open " << path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        scenario = confmet::parse_scenario(ss.str());
        if (!out_override.empty()) scenario.out_dir = out_override;
        if (resolution > 0) scenario.resolution = resolution;
        if (seed >= 0) scenario.seed = static_cast<std::uint64_t>(seed);
        if (!suites.empty()) scenario.suites = suites;
        for (const auto& s : scenario.suites) {
            const auto& known = confmet::known_suites();
            if (std::find(known.begin(), known.end(), s) == known.end()) {
                std::cerr << "config error: unknown suite '" << s << "'\n";
                return 2;
            }
        }
    } catch (const confmet::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        confmet::Report rep = confmet::run_scenario(scenario);
        confmet::write_report(rep, scenario.out_dir);
        for (const auto& t : rep.tables) {
            std::cout << (t.pass() ? "[pass] " : "[FAIL] ") << t.suite << "/" << t.name;
            if (!t.error.empty()) std::cout << "  (" << t.error << ")";
            std::cout << "\n";
        }
        std::cout << (rep.all_pass ? "ALL PASS" : "FAILURES PRESENT") << "  ("
                  << rep.runtime_seconds << " s)\n";
        return confmet::exit_code_for(rep);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"confmet: numerical verification for conformal metrics on punctured balls"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify", "run the suites of a scenario file");
    std::string scenario_path, out_dir;
    double resolution = -1.0;
    long long seed = -1;
    std::vector<std::string> suites;
    verify->add_option("scenario", scenario_path, "scenario file")->required();
    verify->add_option("--out", out_dir, "output directory override");
    verify->add_option("--resolution", resolution, "solver resolution override");
    verify->add_option("--seed", seed, "seed override");
    verify->add_option("--suite", suites, "run only the named suites (repeatable)");

    auto* fixtures = app.add_subcommand("list-fixtures", "print the built-in factor fixtures");

    CLI11_PARSE(app, argc, argv);

    if (fixtures->parsed()) {
        for (const auto& f : confmet::builtin_fixtures()) {
            std::cout << f.name << "\tdim=" << f.dimension << "\tbackground=" << f.background
                      << "\tfactor=" << f.factor << "\n\t" << f.description << "\n";
        }
        return 0;
    }
    return run_verify(scenario_path, out_dir, resolution, seed, suites);
}
