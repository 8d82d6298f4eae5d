#pragma once

// Batch runner behind the `bklab` executable: one subcommand per experiment,
// a JSON config in, CSV/JSON result files out. Every file starts with the
// config hash, seed, horizon and module versions.

#include <iosfwd>
#include <string>
#include <vector>

#include "bklab/config.hpp"

namespace bklab::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kModuleVersions =
    "funclib/1,classes/1,generators/1,exact/1,montecarlo/1,bounds/1,series/1,cli/1";

struct Invocation {
  std::string command;
  config::json config;  // after --seed / --trials overrides
  std::string out_dir = ".";
  unsigned threads = 1;
};

const std::vector<std::string>& commands();

/// Runs one subcommand and returns the files written. Throws LabError.
std::vector<std::string> execute(const Invocation& inv, std::ostream& out);

/// Full command line entry point; returns the process exit status and writes
/// failures to `err` as a single line "error:<kind>:<message>".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// %.17g, or "nan"/"inf"/"-inf".
std::string format_number(double v);

}  // namespace bklab::cli
