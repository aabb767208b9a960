#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsgame {

/// Command-line entry point. Exit codes: 0 success or PASS, 1 FAIL verdict or
/// solver failure, 2 usage or ingestion error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace rsgame
