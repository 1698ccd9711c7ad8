#pragma once

// The parabolica command-line front end, callable in-process.

#include <ostream>

#include "parabolica/error.hpp"

namespace parabolica::cli {

/// 1 validation (and I/O), 2 numerical, 3 invariant.
int exit_code(ErrorKind kind) noexcept;

/// Runs one invocation. Results go to `out`; errors go to `err` as a JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace parabolica::cli
