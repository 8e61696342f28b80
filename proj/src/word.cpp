#include "arxtrail/word.hpp"

#include <cctype>
#include <cstdio>

namespace arxtrail {

void check_width(unsigned n) {
  if (n < 1 || n > kMaxWordBits)
    throw Error(ErrorCode::InvalidArgument, "word size must be in [1, 64], got " + std::to_string(n));
}

u64 parse_word(std::string_view text, unsigned n) {
  check_width(n);
  std::string s;
  for (char ch : text)
    if (ch != '_' && ch != '\'' && !std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw Error(ErrorCode::Parse, "empty word literal");

  unsigned base = 10;
  std::size_t pos = 0;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    pos = 2;
  } else if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
    base = 2;
    pos = 2;
  }
  if (pos >= s.size()) throw Error(ErrorCode::Parse, "malformed word literal '" + std::string(text) + "'");

  u64 value = 0;
  for (; pos < s.size(); ++pos) {
    char ch = static_cast<char>(std::tolower(static_cast<unsigned char>(s[pos])));
    unsigned digit;
    if (ch >= '0' && ch <= '9')
      digit = static_cast<unsigned>(ch - '0');
    else if (ch >= 'a' && ch <= 'f')
      digit = static_cast<unsigned>(ch - 'a' + 10);
    else
      throw Error(ErrorCode::Parse, "bad digit in word literal '" + std::string(text) + "'");
    if (digit >= base) throw Error(ErrorCode::Parse, "bad digit in word literal '" + std::string(text) + "'");
    u64 next = value * base + digit;
    if ((next - digit) / base != value) throw Error(ErrorCode::Parse, "word literal overflows 64 bits");
    value = next;
  }
  if (value & ~word_mask(n))
    throw Error(ErrorCode::Parse, "value '" + std::string(text) + "' does not fit in " + std::to_string(n) + " bits");
  return value;
}

std::string format_hex(u64 value, unsigned n) {
  unsigned digits = (n + 3) / 4;
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%0*llx", static_cast<int>(digits), static_cast<unsigned long long>(value));
  return buf;
}

std::string format_bin(u64 value, unsigned n) {
  std::string out = "0b";
  for (unsigned i = n; i-- > 0;) out.push_back(bit_of(value, i) ? '1' : '0');
  return out;
}

}  // namespace arxtrail
