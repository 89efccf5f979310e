#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rsa::io {

// Significant digits for lossless binary64 interchange (matrices, vectors).
inline constexpr int kExactDigits = 17;
// Significant digits for human-facing reports.
inline constexpr int kReportDigits = 6;

std::string format_number(double value, int significant_digits = kExactDigits);

// Strict parse of a full field; throws ValidationError naming `what`.
double parse_double(std::string_view field, std::string_view what);
long long parse_int(std::string_view field, std::string_view what);

// Splits one delimited line. Double-quoted fields may contain the delimiter
// and escaped quotes ("").
std::vector<std::string> split_fields(std::string_view line, char delim = ',');

// Quotes a CSV field when it contains the delimiter, a quote or a newline.
std::string quote_field(std::string_view field, char delim = ',');

// Reads all lines (without terminators, tolerating CRLF). Throws IoError.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes `content` verbatim; throws IoError.
void write_text(const std::filesystem::path& path, std::string_view content);

std::string trim(std::string_view s);

}  // namespace rsa::io
