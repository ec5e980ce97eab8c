#pragma once

// Run configuration: flat `key = value` lines grouped under [phantom] and
// [solver] sections. `#` starts a comment. Unknown keys are errors.

#include <filesystem>
#include <string>

#include "mocomp/phantom.hpp"
#include "mocomp/solver.hpp"

namespace mocomp {

struct RunConfig {
  PhantomSpec phantom;
  SolverConfig solver;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c exactly.
std::string format_config(const RunConfig& cfg);

bool operator==(const Ellipse& a, const Ellipse& b);
bool operator==(const PhantomSpec& a, const PhantomSpec& b);
bool operator==(const SolverConfig& a, const SolverConfig& b);

}  // namespace mocomp
