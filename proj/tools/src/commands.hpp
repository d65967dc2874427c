#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "run_config.hpp"

namespace spsc::cli {

// Each command writes its files under config.out_dir and a short report to
// `log`. Configuration problems throw ConfigError; anything else propagates
// as a runtime failure.

void cmd_mc(const RunConfig& config, std::ostream& log);
void cmd_spsc(const RunConfig& config, std::ostream& log);

/// `pilot_file`, when non-empty, is a CSV `observable,s,mean` whose rows
/// replace the pilot simulation.
void cmd_nreps(const RunConfig& config, const std::string& pilot_file, std::ostream& log);

void cmd_compare(const RunConfig& config, std::ostream& log);

/// One grid axis: a model field and the values it takes.
using SweepAxis = std::pair<std::string, std::vector<double>>;

/// Outcome frequencies over the Cartesian product of `axes`, each point
/// estimated from `reps` MC replications.
void cmd_sweep(const RunConfig& config, const std::vector<SweepAxis>& axes, std::size_t reps, std::ostream& log);

/// Parses and runs a full command line; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spsc::cli
