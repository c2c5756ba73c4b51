#pragma once

namespace edof::cli {

/// Runs one `edof` subcommand. Returns the process exit code: 0 on success,
/// 1 on runtime or I/O failure, 2 on usage errors.
int dispatch(int argc, const char* const* argv);

} // namespace edof::cli
