#include "osmeval/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace osmeval {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

const std::array<std::string_view, 21> kNumberWords = {
    "zero", "one",     "two",    "three",    "four",     "five",    "six",
    "seven", "eight",  "nine",   "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::string strip_punctuation(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (std::isalnum(c) || is_space(c)) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back(' ');
        }
    }
    return out;
}

std::vector<std::string> split_tokens(std::string_view s) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t start = i;
        while (i < s.size() && !is_space(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) tokens.emplace_back(s.substr(start, i - start));
    }
    return tokens;
}

std::optional<long long> parse_number_token(std::string_view token) {
    if (token.empty()) return std::nullopt;
    if (std::all_of(token.begin(), token.end(),
                    [](unsigned char c) { return std::isdigit(c) != 0; })) {
        long long value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec == std::errc{} && ptr == token.data() + token.size()) return value;
        return std::nullopt;
    }
    for (std::size_t i = 0; i < kNumberWords.size(); ++i) {
        if (token == kNumberWords[i]) return static_cast<long long>(i);
    }
    return std::nullopt;
}

std::optional<long long> extract_number(std::string_view text) {
    const std::string normalized = strip_punctuation(to_lower(text));
    for (const auto& token : split_tokens(normalized)) {
        if (auto value = parse_number_token(token)) return value;
    }
    return std::nullopt;
}

std::optional<bool> extract_yes_no(std::string_view text) {
    const std::string normalized = strip_punctuation(to_lower(text));
    const auto tokens = split_tokens(normalized);
    if (tokens.empty()) return std::nullopt;
    if (tokens.front() == "yes") return true;
    if (tokens.front() == "no") return false;
    return std::nullopt;
}

std::string base64_encode(std::span<const unsigned char> data) {
    static constexpr char kAlphabet[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= data.size()) {
        const std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
        out.push_back(kAlphabet[(n >> 6) & 63]);
        out.push_back(kAlphabet[n & 63]);
        i += 3;
    }
    const std::size_t rest = data.size() - i;
    if (rest == 1) {
        const std::uint32_t n = data[i] << 16;
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
        out.append("==");
    } else if (rest == 2) {
        const std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
        out.push_back(kAlphabet[(n >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::string normalize_question_text(std::string_view s) {
    return collapse_whitespace(strip_punctuation(to_lower(s)));
}

}  // namespace osmeval
