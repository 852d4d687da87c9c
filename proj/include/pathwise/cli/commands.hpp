#pragma once

#include "pathwise/cli/options.hpp"

#include <ostream>

namespace pathwise::cli {

// Executes a fully-resolved config, writing the report to `out`.
// Returns 0 on success, 1 when a verification quantity fails.
// Configuration problems surface as validation_error (exit code 2 in main).
int run_command(const RunConfig& cfg, std::ostream& out);

} // namespace pathwise::cli
