#include "valuecast/text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>

namespace valuecast::text {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

// ASCII base letters for U+00C0..U+017F. '\0' keeps the code point as is.
constexpr std::string_view kLatin1Fold =
    "aaaaaaaceeeeiiii"    // C0-CF (Æ folds to 'a')
    "dnooooo\0ouuuuyts"   // D0-DF (× kept, Þ->t, ß->s)
    "aaaaaaaceeeeiiii"    // E0-EF
    "dnooooo\0ouuuuyty";  // F0-FF (÷ kept)
constexpr std::string_view kLatinExtAFold =
    "aaaaaaccccccccdd"    // 100-10F
    "ddeeeeeeeeeegggg"    // 110-11F
    "gggghhhhiiiiiiii"    // 120-12F
    "iiiijjkkklllllll"    // 130-13F
    "lllnnnnnnnnnoooo"    // 140-14F
    "oooorrrrrrssssss"    // 150-15F
    "ssttttttuuuuuuuu"    // 160-16F
    "uuuuwwyyyzzzzzzs";   // 170-17F

void append_folded(std::string& out, std::uint32_t cp) {
  char folded = '\0';
  if (cp >= 0xC0 && cp <= 0xFF) {
    folded = kLatin1Fold[cp - 0xC0];
  } else if (cp >= 0x100 && cp <= 0x17F) {
    folded = kLatinExtAFold[cp - 0x100];
  }
  if (folded != '\0') {
    out.push_back(folded);
    return;
  }
  // Re-encode anything we do not fold.
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::string normalize_key(std::string_view s) {
  std::string folded;
  folded.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = b0;
    std::size_t len = 1;
    if (b0 >= 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    }
    if (i + len > s.size()) {
      // Truncated sequence: keep the raw byte.
      folded.push_back(static_cast<char>(b0));
      ++i;
      continue;
    }
    for (std::size_t k = 1; k < len; ++k) {
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    }
    append_folded(folded, cp);
    i += len;
  }

  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (char c : to_lower(folded)) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string format_double(double x) {
  if (x == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double x, int decimals) {
  std::array<char, 64> buf{};
  double r = round_to(x, decimals);
  if (r == 0.0) r = 0.0;  // drop negative zero
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), r,
                                       std::chars_format::fixed, decimals);
  return std::string(buf.data(), ptr);
}

double round_to(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The small nudge absorbs representation error such as 69.845000000001.
  return std::round(x * scale + (x >= 0 ? 1e-9 : -1e-9)) / scale;
}

}  // namespace valuecast::text
