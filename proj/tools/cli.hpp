#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace socel::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kQueryError = 1;
inline constexpr int kStreamError = 2;
inline constexpr int kCapacity = 3;

// Entry point of the `socel` tool. args excludes the program name. `in` is
// read when the stream path is "-" or omitted.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace socel::cli
