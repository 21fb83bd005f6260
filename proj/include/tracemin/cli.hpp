#pragma once

#include <iosfwd>

namespace tracemin {

namespace exit_code {
constexpr int ok             = 0;
constexpr int violation      = 1;
constexpr int input_error    = 2;
constexpr int not_reproduced = 3;
constexpr int no_violation   = 4;
}  // namespace exit_code

/**
 * The tracemin command line: gen, monitor, validate, convert, simplify and
 * bench. Returns the exit code.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tracemin
