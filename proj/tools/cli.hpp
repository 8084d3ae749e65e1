#pragma once

#include <iosfwd>

namespace atp::cli {

// Exit codes: 0 success, 1 usage error, 2 data error.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace atp::cli
