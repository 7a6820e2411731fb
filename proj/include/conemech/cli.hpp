#pragma once

#include <iosfwd>

namespace conemech {

// Exit codes: 0 success, 1 infeasible result under --strict, 2 input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conemech
