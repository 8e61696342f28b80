#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arxtrail {

using u64 = std::uint64_t;

enum class ErrorCode {
  InvalidArgument = 1,
  WidthMismatch,
  InvalidDifferential,
  Parse,
  LimitExceeded,
  SolverMissing,
  SolverTimeout,
  SolverFailed,
  Io,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

constexpr unsigned kMaxWordBits = 64;

constexpr u64 word_mask(unsigned n) { return n >= 64 ? ~u64{0} : ((u64{1} << n) - 1); }

constexpr int bit_of(u64 x, unsigned i) { return static_cast<int>((x >> i) & 1u); }

constexpr u64 rotl(u64 x, unsigned r, unsigned n) {
  r %= n;
  x &= word_mask(n);
  if (r == 0) return x;
  return ((x << r) | (x >> (n - r))) & word_mask(n);
}

constexpr u64 rotr(u64 x, unsigned r, unsigned n) { return rotl(x, (n - (r % n)) % n, n); }

void check_width(unsigned n);

// Accepts "0x..." hex, "0b..." binary or plain decimal. Throws Error(Parse) on
// malformed input or a value that does not fit in n bits.
u64 parse_word(std::string_view text, unsigned n);

std::string format_hex(u64 value, unsigned n);
std::string format_bin(u64 value, unsigned n);

}  // namespace arxtrail
