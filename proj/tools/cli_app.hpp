#pragma once

namespace ctic {

/// Full command-line surface of the tool. Returns the process exit code:
/// 0 on success, 2 for configuration/usage problems (bad arguments, missing
/// files, unknown presets, schema violations), 3 for malformed or invalid
/// input data, 1 for everything unexpected.
int run_cli(int argc, const char* const* argv);

} // namespace ctic
