#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "prusim/norm.hpp"

namespace prusim {

enum ExitCode { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitBudget = 3 };

inline constexpr const char* kReportSchema = "prusim.report/1";
inline constexpr const char* kBudgetEnv = "PRUSIM_BUDGET";

// Suite budget from defaults, then PRUSIM_BUDGET ("time=SECONDS,memory_gib=G"),
// then explicit flags (negative means unset). Throws std::invalid_argument on a
// malformed variable.
Budget resolve_budget(double time_flag, double memory_gib_flag, const char* env);

// Entry point shared by the executable and the tests. Human-readable tables go
// to out, diagnostics to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prusim
