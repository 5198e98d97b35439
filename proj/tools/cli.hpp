#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>

namespace quatmark::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFormat = 2,
  kCapacity = 3,
  kInvariant = 4,
};

/// Entry point shared by the executable and the tests. Normal output goes to
/// `out`, diagnostics and usage text to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Decimal or 0x-prefixed hexadecimal 64-bit key. Throws PreconditionError.
std::uint64_t parse_key(std::string_view text);

/// "ROWSxCOLS", both positive. Throws PreconditionError.
struct Dims {
  std::size_t rows = 0;
  std::size_t cols = 0;
};
Dims parse_dims(std::string_view text);

}  // namespace quatmark::cli
