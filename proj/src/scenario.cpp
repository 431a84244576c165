#include "confmet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "confmet/annulus_grid.hpp"
#include "confmet/errors.hpp"

namespace confmet {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double parse_number(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        require(used == v.size(), Errc::ParseError,
                "line " + std::to_string(line) + ": malformed number for " + key);
        return d;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail(Errc::ParseError, "line " + std::to_string(line) + ": malformed number for " + key);
    }
}

std::vector<double> parse_numbers(const std::string& v, int line, const std::string& key) {
    std::vector<double> out;
    for (const auto& part : split_list(v)) out.push_back(parse_number(part, line, key));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

}  // namespace

const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> kSuites = {
        "curvature", "three-circle", "decay",   "volume-density",
        "blow-down", "gbc",          "riem-l2", "w-profile"};
    return kSuites;
}

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    s.suites.clear();
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string l = raw;
        auto hash = l.find('#');
        if (hash != std::string::npos) l = l.substr(0, hash);
        l = trim(l);
        if (l.empty()) continue;
        if (l.front() == '[') {
            require(l.back() == ']', Errc::ParseError,
                    "line " + std::to_string(line) + ", column " + std::to_string(l.size()) +
                        ": unterminated section header");
            section = trim(l.substr(1, l.size() - 2));
            static const std::vector<std::string> kSections = {
                "grid",   "solver",  "decay",   "volume-density", "blow-down",
                "gbc",    "three-circle", "riem-l2", "w-profile",     "output"};
            require(std::find(kSections.begin(), kSections.end(), section) != kSections.end(),
                    Errc::ValidationError, "unknown section [" + section + "]");
            continue;
        }
        auto eq = l.find('=');
        require(eq != std::string::npos, Errc::ParseError,
                "line " + std::to_string(line) + ", column 1: expected key = value");
        std::string key = trim(l.substr(0, eq));
        std::string val = trim(l.substr(eq + 1));
        require(!key.empty(), Errc::ParseError,
                "line " + std::to_string(line) + ", column 1: empty key");

        auto is = [&](const char* sec, const char* k) { return section == sec && key == k; };
        if (section.empty()) {
            if (key == "name") {
                s.name = val;
            } else if (key == "dimension") {
                s.dimension = static_cast<int>(parse_number(val, line, key));
            } else if (key == "background") {
                s.background = val;
            } else if (key == "factor") {
                s.factor = val;
            } else if (key == "suites") {
                s.suites = split_list(val);
            } else if (key == "seed") {
                s.seed = static_cast<std::uint64_t>(parse_number(val, line, key));
            } else {
                fail(Errc::ValidationError, "unknown key '" + key + "'");
            }
        } else if (is("grid", "r_min")) {
            s.r_min = parse_number(val, line, key);
        } else if (is("grid", "r_max")) {
            s.r_max = parse_number(val, line, key);
        } else if (is("grid", "radial_count")) {
            s.radial_count = static_cast<int>(parse_number(val, line, key));
        } else if (is("grid", "sphere_degree")) {
            s.sphere_degree = static_cast<int>(parse_number(val, line, key));
        } else if (is("solver", "resolution")) {
            s.resolution = parse_number(val, line, key);
        } else if (is("decay", "r")) {
            s.decay_r = parse_number(val, line, key);
        } else if (is("volume-density", "rho")) {
            s.vd_rho = parse_numbers(val, line, key);
        } else if (is("volume-density", "r_min")) {
            s.vd_r_min = parse_number(val, line, key);
        } else if (is("volume-density", "r_max")) {
            s.vd_r_max = parse_number(val, line, key);
        } else if (is("blow-down", "scales")) {
            s.blowdown_scales = parse_numbers(val, line, key);
        } else if (is("gbc", "chi")) {
            s.chi = parse_number(val, line, key);
            s.has_chi = true;
        } else if (is("gbc", "m")) {
            s.ends_m = parse_number(val, line, key);
            s.has_m = true;
        } else if (is("three-circle", "L")) {
            s.tc_L = parse_number(val, line, key);
        } else if (is("three-circle", "r_anchor")) {
            s.tc_r_anchor = parse_number(val, line, key);
        } else if (is("three-circle", "theta")) {
            s.tc_theta = parse_number(val, line, key);
        } else if (is("riem-l2", "r0")) {
            s.riem_r0 = parse_number(val, line, key);
        } else if (is("riem-l2", "levels")) {
            s.riem_levels = static_cast<int>(parse_number(val, line, key));
        } else if (is("w-profile", "radii")) {
            s.wprofile_radii = parse_numbers(val, line, key);
        } else if (is("output", "dir")) {
            s.out_dir = val;
        } else {
            fail(Errc::ValidationError, "unknown key '" + key + "' in section [" + section + "]");
        }
    }

    // validation
    require(s.dimension >= 3 && s.dimension <= 8, Errc::ValidationError,
            "field 'dimension' must be in [3,8]");
    require(s.background == "flat" || s.background == "round-sphere-chart", Errc::ValidationError,
            "field 'background' must be flat or round-sphere-chart");
    for (const auto& suite : s.suites)
        require(std::find(known_suites().begin(), known_suites().end(), suite) !=
                    known_suites().end(),
                Errc::ValidationError, "field 'suites' contains unknown suite '" + suite + "'");
    bool needs_gbc = std::find(s.suites.begin(), s.suites.end(), "gbc") != s.suites.end();
    if (needs_gbc)
        require(s.has_chi && s.has_m, Errc::ValidationError,
                "field 'gbc.chi'/'gbc.m': the gbc suite requires both topology inputs");
    require(s.r_min > 0 && s.r_min < s.r_max, Errc::ValidationError,
            "field 'grid.r_min/r_max' must satisfy 0 < r_min < r_max");
    require(s.radial_count >= 2, Errc::ValidationError, "field 'grid.radial_count' must be >= 2");
    require(s.sphere_degree >= 2, Errc::ValidationError, "field 'grid.sphere_degree' must be >= 2");
    require(s.resolution > 0, Errc::ValidationError, "field 'solver.resolution' must be positive");

    // the factor must compile and be positive on the declared annulus
    Expr factor = parse_expression(s.factor, s.dimension);
    {
        auto sq = build_sphere_quadrature(Dimension(s.dimension), 4);
        auto grid = build_annulus_grid(s.r_min, s.r_max, 9, sq);
        std::vector<double> x(s.dimension);
        for (std::size_t ir = 0; ir < grid.radial_count(); ++ir)
            for (std::size_t is = 0; is < grid.sphere.count(); ++is) {
                grid.point(ir, is, x.data());
                double v = factor.eval(x.data(), s.dimension);
                require(std::isfinite(v) && v > 0.0, Errc::ValidationError,
                        "field 'factor' is not positive on the declared annulus");
            }
    }
    return s;
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream o;
    o << "name = " << s.name << "\n";
    o << "dimension = " << s.dimension << "\n";
    o << "background = " << s.background << "\n";
    o << "factor = " << s.factor << "\n";
    if (!s.suites.empty()) {
        o << "suites = ";
        for (std::size_t i = 0; i < s.suites.size(); ++i) {
            if (i) o << ", ";
            o << s.suites[i];
        }
        o << "\n";
    }
    o << "seed = " << s.seed << "\n";
    o << "\n[grid]\n";
    o << "r_min = " << fmt(s.r_min) << "\n";
    o << "r_max = " << fmt(s.r_max) << "\n";
    o << "radial_count = " << s.radial_count << "\n";
    o << "sphere_degree = " << s.sphere_degree << "\n";
    o << "\n[solver]\n";
    o << "resolution = " << fmt(s.resolution) << "\n";
    o << "\n[decay]\n";
    o << "r = " << fmt(s.decay_r) << "\n";
    o << "\n[volume-density]\n";
    o << "rho = " << fmt_list(s.vd_rho) << "\n";
    o << "r_min = " << fmt(s.vd_r_min) << "\n";
    o << "r_max = " << fmt(s.vd_r_max) << "\n";
    o << "\n[blow-down]\n";
    o << "scales = " << fmt_list(s.blowdown_scales) << "\n";
    if (s.has_chi || s.has_m) {
        o << "\n[gbc]\n";
        if (s.has_chi) o << "chi = " << fmt(s.chi) << "\n";
        if (s.has_m) o << "m = " << fmt(s.ends_m) << "\n";
    }
    o << "\n[three-circle]\n";
    o << "L = " << fmt(s.tc_L) << "\n";
    o << "r_anchor = " << fmt(s.tc_r_anchor) << "\n";
    o << "theta = " << fmt(s.tc_theta) << "\n";
    o << "\n[riem-l2]\n";
    o << "r0 = " << fmt(s.riem_r0) << "\n";
    o << "levels = " << s.riem_levels << "\n";
    o << "\n[w-profile]\n";
    o << "radii = " << fmt_list(s.wprofile_radii) << "\n";
    o << "\n[output]\n";
    o << "dir = " << s.out_dir << "\n";
    return o.str();
}

BackgroundMetric scenario_background(const Scenario& s) {
    Dimension d(s.dimension);
    if (s.background == "flat") return BackgroundMetric::flat(d);
    return BackgroundMetric::round_sphere_chart(d);
}

ConformalFactor scenario_factor(const Scenario& s) {
    return ConformalFactor::expression(parse_expression(s.factor, s.dimension));
}

const std::vector<Fixture>& builtin_fixtures() {
    static const std::vector<Fixture> kFixtures = {
        {"inversion", "absx^(2-n)", 4, "flat",
         "harmonic puncture model; g = |x|^{-4} delta is the inverted flat metric"},
        {"round-sphere", "(2/(1+absx^2))^((n-2)/2)", 4, "flat",
         "stereographic factor of the unit sphere"},
        {"cylinder", "absx^((2-n)/2)", 4, "flat", "borderline factor; v = 1 on the cylinder"},
        {"perturbed-inversion", "absx^(2-n)*(1+absx^2)", 4, "flat",
         "inversion model with a smooth relative perturbation"},
        {"two-charge", "1+absx^(2-n)", 4, "flat",
         "bounded + harmonic mix; constant part washes out under blow-down"},
        {"counterexample-rho", "rho_4^(-2)", 5, "flat",
         "scalar-flat factor singular along an axis; volume density stays away from 1"},
        {"green-log", "absx^(2-n)*log(absx^(-1))", 4, "flat",
         "logarithmic factor; w = u/G grows like log(1/r)"},
    };
    return kFixtures;
}

}  // namespace confmet
