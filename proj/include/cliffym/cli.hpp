#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cliffym {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvariantBreach = 1,
  kExitConfigError = 2,
  kExitSolverFailure = 3,
};

/// Parses "+,+,-" or "1,1,-1" into +-1 entries. Throws ConfigError.
std::vector<int> parse_signs(const std::string& text);

/// Sign vectors for a block count k: j trailing minus signs for j = 0..k.
std::vector<std::vector<int>> sign_variants(int k);

/// Entry point shared by the tool and the tests. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cliffym
