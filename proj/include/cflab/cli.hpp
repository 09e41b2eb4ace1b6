#pragma once

// The cflab command-line surface, callable in-process.

#include <iosfwd>
#include <string>
#include <vector>

#include "cflab/covers.hpp"
#include "cflab/spectra.hpp"

namespace cflab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the directory relative --output paths resolve under.
inline constexpr const char* kOutputDirEnv = "CFLAB_OUTPUT_DIR";

/// Runs one command; `args` excludes the program name. Results go to `out`
/// (or the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Spec-string grammars shared with the Python bindings. Malformed text throws
/// std::invalid_argument.
///   seq:    exp_floor | power:alpha | scaled_power:M:e | const:c | list:a,b,c | rational:p/q | tau:alpha
///   phi:    power:c:gamma | exp:c:b | dexp:a:b | epl:p:q
///   family: D:M:e | C:alpha:eps | Ctilde:alpha:eps | box:lo:hi | monotone:L | single:a,b,c
PQSeq parse_seq(const std::string& text);
PhiSpec parse_phi(const std::string& text);
ConstraintFamily parse_family(const std::string& text);

}  // namespace cflab::cli
