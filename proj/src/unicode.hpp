#pragma once

// Minimal UTF-8 decoding and code point classification.
//
// The class tables cover Latin, Greek, Cyrillic, Armenian, Hebrew, Arabic,
// Devanagari, Thai, Hangul, kana and CJK letters plus the common punctuation
// blocks. Code points outside these ranges are treated as symbols.

#include <cstdint>
#include <string>
#include <string_view>

namespace likefarm::detail {

enum class CharClass : std::uint8_t { Letter, Digit, Whitespace, Punctuation, Symbol };

/// Decodes the code point at `pos` and advances it. Invalid sequences yield
/// U+FFFD and consume one byte.
char32_t next_code_point(std::string_view text, std::size_t& pos);

CharClass classify(char32_t cp);
bool is_uppercase(char32_t cp);
bool is_apostrophe(char32_t cp);
bool is_sentence_terminator(char32_t cp);

void append_utf8(std::string& out, char32_t cp);

/// ASCII letters are lowered; other code points are left unchanged.
std::string ascii_lower(std::string_view word);

}  // namespace likefarm::detail
