#pragma once

#include <string>
#include <vector>

#include "confmet/scenario.hpp"

namespace confmet {

inline constexpr const char* kToolVersion = "0.1.0";

/// One numeric check. Pass is recomputable from the row: when target != 0 the
/// tolerance is relative (|computed-target|/|target| <= tolerance), when
/// target == 0 it is absolute (|computed| <= tolerance).
struct ReportRow {
    std::string label;
    double computed = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    double rel_err = 0.0;
    bool pass = false;
    bool informational = false;  // carried in the table but not gating
};

ReportRow make_row(const std::string& label, double computed, double target, double tolerance);
ReportRow info_row(const std::string& label, double computed);

struct ReportTable {
    std::string suite;
    std::string name;
    std::vector<ReportRow> rows;
    std::string error;  // non-empty when the suite failed to run
    bool pass() const;
};

struct Report {
    Scenario scenario;
    std::vector<ReportTable> tables;
    double runtime_seconds = 0.0;
    bool all_pass = false;
};

/// Deterministic JSON document (schema 1). The runtime field is the one
/// value allowed to differ between identical runs; `include_runtime = false`
/// replaces it with 0 for byte-comparisons.
std::string report_to_json(const Report& r, bool include_runtime = true);

/// Write <out_dir>/<name>__report.json plus one CSV per table
/// (<out_dir>/<name>__<suite>__<table>.csv, '.' decimals, '\n' newlines,
/// header row first).
void write_report(const Report& r, const std::string& out_dir);

std::string table_to_csv(const ReportTable& t);

}  // namespace confmet
