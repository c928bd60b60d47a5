#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace osmeval {

std::string to_lower(std::string_view s);

/// Collapse runs of whitespace to single spaces and trim both ends.
std::string collapse_whitespace(std::string_view s);

/// Replace ASCII punctuation with spaces (keeps letters, digits, whitespace).
std::string strip_punctuation(std::string_view s);

/// Whitespace-split. Input is used as-is; normalize first if needed.
std::vector<std::string> split_tokens(std::string_view s);

/// Parse a single token as a non-negative integer: either a digit string or
/// an English number word in [zero, twenty].
std::optional<long long> parse_number_token(std::string_view token);

/// First parsable number (digits or zero..twenty word) in free text, after
/// lowercasing and punctuation stripping.
std::optional<long long> extract_number(std::string_view text);

/// Leading yes/no token of an answer after lowercasing and punctuation
/// stripping. Empty when the first token is neither.
std::optional<bool> extract_yes_no(std::string_view text);

std::string base64_encode(std::span<const unsigned char> data);

/// Case/punctuation/whitespace-insensitive key for duplicate detection.
std::string normalize_question_text(std::string_view s);

}  // namespace osmeval
