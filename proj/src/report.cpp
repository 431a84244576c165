#include "confmet/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "confmet/errors.hpp"
#include "json.hpp"

namespace confmet {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_');
    return out;
}

}  // namespace

ReportRow make_row(const std::string& label, double computed, double target, double tolerance) {
    ReportRow r;
    r.label = label;
    r.computed = computed;
    r.target = target;
    r.tolerance = tolerance;
    if (target != 0.0) {
        r.rel_err = std::abs(computed - target) / std::abs(target);
        r.pass = r.rel_err <= tolerance;
    } else {
        r.rel_err = std::abs(computed);
        r.pass = std::abs(computed) <= tolerance;
    }
    return r;
}

ReportRow info_row(const std::string& label, double computed) {
    ReportRow r;
    r.label = label;
    r.computed = computed;
    r.target = computed;
    r.tolerance = 0.0;
    r.rel_err = 0.0;
    r.pass = true;
    r.informational = true;
    return r;
}

bool ReportTable::pass() const {
    if (!error.empty()) return false;
    for (const auto& r : rows)
        if (!r.informational && !r.pass) return false;
    return true;
}

std::string report_to_json(const Report& r, bool include_runtime) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["scenario"] = serialize_scenario(r.scenario);
    nlohmann::ordered_json tables = nlohmann::ordered_json::array();
    for (const auto& t : r.tables) {
        nlohmann::ordered_json jt;
        jt["suite"] = t.suite;
        jt["name"] = t.name;
        jt["pass"] = t.pass();
        if (!t.error.empty()) jt["error"] = t.error;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            nlohmann::ordered_json jr;
            jr["label"] = row.label;
            jr["computed"] = row.computed;
            jr["target"] = row.target;
            jr["tolerance"] = row.tolerance;
            jr["rel_err"] = row.rel_err;
            jr["pass"] = row.pass;
            jr["informational"] = row.informational;
            rows.push_back(jr);
        }
        jt["rows"] = rows;
        tables.push_back(jt);
    }
    j["tables"] = tables;
    nlohmann::ordered_json prov;
    prov["tool"] = "confmet";
    prov["version"] = kToolVersion;
    prov["resolution"] = r.scenario.resolution;
    prov["seed"] = r.scenario.seed;
    prov["runtime_seconds"] = include_runtime ? r.runtime_seconds : 0.0;
    j["provenance"] = prov;
    j["all_pass"] = r.all_pass;
    return j.dump(2) + "\n";
}

std::string table_to_csv(const ReportTable& t) {
    std::string out = "label,computed,target,tolerance,rel_err,pass,informational\n";
    for (const auto& row : t.rows) {
        out += row.label + "," + fmt(row.computed) + "," + fmt(row.target) + "," +
               fmt(row.tolerance) + "," + fmt(row.rel_err) + "," + (row.pass ? "true" : "false") +
               "," + (row.informational ? "true" : "false") + "\n";
    }
    return out;
}

void write_report(const Report& r, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::string base = sanitize(r.scenario.name);
    {
        std::ofstream f(fs::path(out_dir) / (base + "__report.json"), std::ios::binary);
        require(f.good(), Errc::InternalError, "cannot write report JSON");
        f << report_to_json(r, true);
    }
    for (const auto& t : r.tables) {
        std::string fname = base + "__" + sanitize(t.suite) + "__" + sanitize(t.name) + ".csv";
        std::ofstream f(fs::path(out_dir) / fname, std::ios::binary);
        require(f.good(), Errc::InternalError, "cannot write CSV table");
        f << table_to_csv(t);
    }
}

}  // namespace confmet
