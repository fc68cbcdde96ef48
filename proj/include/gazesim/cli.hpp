#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gazesim/config.hpp"

namespace gazesim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;

/// Runs `gazesim <subcommand> [flags]`; args excludes the program name.
/// Returns the process exit code: 0 success, 1 I/O failure, 2 validation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommand bodies, callable directly with a resolved configuration.
void preprocess(const RunConfig& config, std::ostream& out, std::ostream& err);
void similarity(const RunConfig& config, std::ostream& out);
void cluster(const RunConfig& config, std::ostream& out);
void sweep(const RunConfig& config, std::ostream& out);
void correlate(const RunConfig& config, std::ostream& out);
void serve(const RunConfig& config, std::ostream& out);

}  // namespace gazesim::cli
