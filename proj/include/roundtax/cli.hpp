#pragma once

#include <iosfwd>

namespace roundtax {

/// The `roundtax` command line. The report goes to `out`; failures print one
/// line `roundtax: error: <kind>: <message>` to `err`, with kind one of usage,
/// input, domain or runtime. Returns the process exit code (0, 1 or 2).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace roundtax
