#pragma once

#include <string>
#include <vector>

namespace mfa::cli {

// Exit codes: 0 success, 1 validation error, 2 compute error.
int run(int argc, const char* const* argv);

} // namespace mfa::cli
