// Command-line front end. Exit codes: 0 success, 1 invalid arguments,
// 2 numerical failure, 3 acceptance violation (trivial-bound breach).
#pragma once

namespace orlicz {

inline constexpr const char* kToolVersion = "0.1.0";

int cli_main(int argc, const char* const* argv);

}  // namespace orlicz
