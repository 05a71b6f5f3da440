#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace cbrm::cli {

struct RunOptions {
  /// ANSI emphasis in table output.
  bool color = false;
};

/// Runs one invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err,
        const RunOptions& options = {});

}  // namespace cbrm::cli
