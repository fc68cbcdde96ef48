#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Minimal delimited-text helpers shared by the parsers and writers.
namespace gazesim::csv {

using Row = std::vector<std::string>;

/// Splits one line on `delim`, honouring double-quoted fields ("" escapes a quote).
Row split_line(std::string_view line, char delim);

/// Splits on runs of whitespace.
Row split_whitespace(std::string_view line);

/// Lines of `text` with trailing '\r' stripped. Blank lines are kept so callers
/// can report 1-based line numbers.
std::vector<std::string_view> lines(std::string_view text);

std::string_view trim(std::string_view s);

bool is_blank(std::string_view s);

/// Tab if the header line has a tab, else comma.
char sniff_delimiter(std::string_view header_line);

/// Strict full-token parse; nullopt for empty or non-numeric tokens.
std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_int(std::string_view token);

/// Shortest text that parses back to exactly the same double (17 significant
/// digits at most).
std::string format_double(double value);

/// Quotes a field if it contains the delimiter, a quote, or a newline.
std::string escape(std::string_view field, char delim = ',');

std::string join(const Row& row, char delim = ',');

}  // namespace gazesim::csv
