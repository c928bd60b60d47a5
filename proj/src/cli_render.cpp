#include "osmeval/cli/render.hpp"

#include <cmath>
#include <cstdint>

#include "osmeval/errors.hpp"

namespace osmeval::cli {

std::string format_fixed(double value, int decimals) {
    if (decimals < 0 || decimals > 12) throw ContractViolation("decimals out of range");
    if (!std::isfinite(value)) return "nan";
    double scale = 1.0;
    for (int i = 0; i < decimals; ++i) scale *= 10.0;
    // nearbyint under the default rounding mode is round-half-even.
    double scaled = std::nearbyint(value * scale);
    if (scaled == 0.0) scaled = 0.0;  // normalize -0
    const bool negative = scaled < 0.0;
    auto magnitude = static_cast<std::uint64_t>(negative ? -scaled : scaled);

    std::string digits = std::to_string(magnitude);
    if (decimals == 0) return (negative ? "-" : "") + digits;
    if (digits.size() <= static_cast<std::size_t>(decimals)) {
        digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(decimals), 1, '.');
    return (negative ? "-" : "") + digits;
}

std::string csv_escape(std::string_view field) {
    const bool needs_quoting =
        field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quoting) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string render_csv(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            out += csv_escape(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

std::string render_markdown_table(const std::vector<std::string>& header,
                                  const std::vector<std::vector<std::string>>& rows) {
    std::string out = "|";
    for (const auto& h : header) out += " " + h + " |";
    out += "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
    out += "\n";
    for (const auto& row : rows) {
        out += "|";
        for (const auto& cell : row) out += " " + cell + " |";
        out += "\n";
    }
    return out;
}

}  // namespace osmeval::cli
