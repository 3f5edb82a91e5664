#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace roundtax {

/// Malformed input file; the message names the path, line and field.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& field, const std::string& what);

  const std::string& path() const { return path_; }
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string path_;
  int line_;
  std::string field_;
};

/// Comma-delimited UTF-8 text, one record per line. Blank lines and lines whose
/// first non-space character is '#' are skipped. Fields are trimmed.
class DelimitedReader {
 public:
  explicit DelimitedReader(std::string path);

  /// False at end of file.
  bool next(std::vector<std::string>& fields);

  int line() const { return line_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const;

  std::int64_t integer(const std::string& text, const std::string& field) const;
  double real(const std::string& text, const std::string& field) const;

 private:
  std::string path_;
  std::ifstream in_;
  int line_ = 0;
};

std::vector<std::string> split_fields(std::string_view line, char delimiter = ',');

}  // namespace roundtax
