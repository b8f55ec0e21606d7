#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dsgm {

/// Shortest round-trip decimal representation.
std::string format_double(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

struct CsvRecord {
  std::size_t line = 0;  // 1-based source line
  std::vector<std::string> fields;
};

/// Reads comma-separated records. Blank lines and lines starting with '#' are skipped;
/// fields are trimmed. No quoting support: none of the formats here need it.
std::vector<CsvRecord> read_csv(std::istream& in);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);

/// Strict numeric parsing; throws std::invalid_argument naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace dsgm
