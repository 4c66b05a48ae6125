#pragma once

#include <ostream>

namespace flipfair {

/// Exit codes: 0 ok, 1 bad input, 2 usage, 3 budget refusal, 4 fixture failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flipfair
