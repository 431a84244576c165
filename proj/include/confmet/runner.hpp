#pragma once

#include "confmet/report.hpp"

namespace confmet {

/// Run every suite the scenario requests. A suite that throws contributes a
/// failing table carrying the error text; the others still run.
Report run_scenario(const Scenario& s);

/// Exit-code mapping of the CLI: 0 all-pass, 1 any-fail, 2 config error,
/// 3 internal error.
int exit_code_for(const Report& r);

}  // namespace confmet
