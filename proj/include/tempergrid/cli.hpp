#pragma once

#include <string>
#include <vector>

namespace tempergrid {

// Entry point shared by the binary and in-process tests. args excludes the
// program name. Returns the process exit code: 0 success, 2 bad
// input/config, 3 resource-guard refusal.
int run_cli(const std::vector<std::string>& args);

}  // namespace tempergrid
