#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace osmeval::cli {

/// Fixed-point rendering with round-half-even at the last kept digit;
/// metrics use 3 decimals, percentages 2.
std::string format_fixed(double value, int decimals);

/// RFC-4180 quoting: fields containing comma, quote, CR or LF are quoted,
/// embedded quotes doubled.
std::string csv_escape(std::string_view field);

/// Rows to CSV text with CRLF record separators.
std::string render_csv(const std::vector<std::vector<std::string>>& rows);

std::string render_markdown_table(const std::vector<std::string>& header,
                                  const std::vector<std::vector<std::string>>& rows);

}  // namespace osmeval::cli
