#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pvikit::text {

// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to
// U+FFFD one byte at a time, so every input yields a result.
std::vector<char32_t> decode_utf8(std::string_view s);

std::string encode_utf8(const std::vector<char32_t>& scalars);

std::size_t scalar_count(std::string_view s);

// Whitespace-delimited tokens (ASCII whitespace).
std::vector<std::string> split_whitespace(std::string_view s);

// True if s contains a C0/C1 control character or DEL.
bool has_control_char(std::string_view s);

}  // namespace pvikit::text
