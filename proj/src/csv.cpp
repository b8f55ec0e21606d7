#include "dsgm/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace dsgm {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view text, char delimiter) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(delimiter, start);
    parts.emplace_back(trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<CsvRecord> read_csv(std::istream& in) {
  std::vector<CsvRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    records.push_back({number, split(body, ',')});
  }
  return records;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw std::invalid_argument("cannot parse " + std::string(what) + " from '" + std::string(text) +
                                "'");
  }
  return value;
}

long long parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  long long value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw std::invalid_argument("cannot parse " + std::string(what) + " from '" + std::string(text) +
                                "'");
  }
  return value;
}

}  // namespace dsgm
