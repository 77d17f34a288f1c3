#pragma once

#include <map>
#include <string>
#include <vector>

namespace nstr::cli {

using Config = std::map<std::string, std::string>;

/// Dispatch for `nstr <command> [config-file] [key=value ...]`.
/// Exit codes: 0 converged, 2 iteration budget exhausted, 1 error.
int main_entry(const std::vector<std::string>& args);

int cmd_solve(Config config);
int cmd_counterexample(Config config);
int cmd_experiment1(Config config);
int cmd_table1(Config config);

}  // namespace nstr::cli
