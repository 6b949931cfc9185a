#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "signrev/solver.hpp"

namespace signrev {

/// Runs one command. Returns 0 on success, 1 when verification fails and 2
/// on usage or input errors.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

/// {"distance", "reversals", "pairs", "prefix"} as printed by `sort --format json`.
std::string scenario_json(const SortingScenario& s);

}  // namespace signrev
