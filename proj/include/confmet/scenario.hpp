#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "confmet/background.hpp"
#include "confmet/conformal_factor.hpp"

namespace confmet {

/// A scenario drives one verification run: which metric, which suites, at
/// what resolution. The on-disk format is nested key-value text (see
/// parse_scenario); serialize/parse round-trips exactly.
struct Scenario {
    std::string name = "scenario";
    int dimension = 4;
    std::string background = "flat";  // flat | round-sphere-chart
    std::string factor = "1";
    std::vector<std::string> suites;
    std::uint64_t seed = 12345;

    // [grid]
    double r_min = 0.1;
    double r_max = 2.0;
    int radial_count = 33;
    int sphere_degree = 6;

    // [solver]
    double resolution = 1.0;

    // [decay]
    double decay_r = 0.125;

    // [volume-density]
    std::vector<double> vd_rho = {4.0, 8.0, 16.0, 32.0};
    double vd_r_min = 0.02;
    double vd_r_max = 4.0;

    // [blow-down]
    std::vector<double> blowdown_scales = {1e-1, 1e-2, 1e-3};

    // [gbc]
    bool has_chi = false, has_m = false;
    double chi = 0.0;
    double ends_m = 0.0;

    // [three-circle]
    double tc_L = 2.0;  // default segment length; empirical override per run
    double tc_r_anchor = 0.5;
    double tc_theta = 8.0;  // annulus ratio for the energy-ratio row

    // [riem-l2]
    double riem_r0 = 0.5;
    int riem_levels = 10;

    // [w-profile]
    std::vector<double> wprofile_radii = {0.5, 0.25, 0.125, 0.0625};

    // [output]
    std::string out_dir = "out";

    bool operator==(const Scenario&) const = default;
};

/// Parse the scenario text. ParseError carries line/column; ValidationError
/// names the offending field. Unknown keys and sections are rejected; the
/// factor must compile and be positive on the declared annulus.
Scenario parse_scenario(const std::string& text);

/// Canonical serialization; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// Compile the scenario's metric data.
BackgroundMetric scenario_background(const Scenario& s);
ConformalFactor scenario_factor(const Scenario& s);

/// The suite names the runner understands.
const std::vector<std::string>& known_suites();

/// Built-in factor fixtures for `list-fixtures`.
struct Fixture {
    std::string name;
    std::string factor;
    int dimension;
    std::string background;
    std::string description;
};
const std::vector<Fixture>& builtin_fixtures();

}  // namespace confmet
