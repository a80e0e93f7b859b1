#pragma once

namespace tsnet::cli {

// Entry point behind main(): parses the command line, dispatches the
// subcommand, and maps library errors to single-line diagnostics. Returns
// the process exit status (0 ok, 1 runtime error, 2 usage error).
int run(int argc, const char* const* argv);

}  // namespace tsnet::cli
