#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace alignforge::text {

/// Byte offset of the first ill-formed UTF-8 sequence, if any.
std::optional<std::size_t> find_invalid_utf8(std::string_view s);

/// NFC normalization. Input must be valid UTF-8.
std::string nfc(std::string_view s);

/// Splits valid UTF-8 into one string per code point.
std::vector<std::string> code_points(std::string_view s);

/// Whitespace split, then every punctuation code point (general category
/// P*) becomes its own token. NFC-normalizes first; never lowercases.
std::vector<std::string> tokenize(std::string_view s);

/// Split on Unicode whitespace only.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(std::span<const std::string> tokens, std::string_view sep = " ");

/// True if the last code point of `s` has the Sentence_Terminal property
/// (".", "!", "?", "。", "؟", "।", ...).
bool ends_with_sentence_terminal(std::string_view s);

}  // namespace alignforge::text
