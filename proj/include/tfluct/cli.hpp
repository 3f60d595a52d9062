#pragma once

#include <iosfwd>
#include <string>

namespace tfluct::cli {

/// Runs one command line. Output is buffered and written to `out` only on
/// success; diagnostics go to `err`. Returns 0 on success, 1 when a
/// verification or estimate fails, 2 on usage or configuration errors.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// %.12g, with ".0" appended to integral values ("12.0", "8.0").
std::string format_value(double x);

} // namespace tfluct::cli
