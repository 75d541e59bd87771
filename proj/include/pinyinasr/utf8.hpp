#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pinyinasr::utf8 {

/// Decodes UTF-8 into code points; nullopt on malformed input.
std::optional<std::u32string> decode(std::string_view text);

std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);

/// Splits valid UTF-8 into one string per code point; nullopt on malformed input.
std::optional<std::vector<std::string>> split_chars(std::string_view text);

bool is_hanzi(char32_t cp);
bool is_punctuation(char32_t cp);
bool is_space(char32_t cp);

}  // namespace pinyinasr::utf8
