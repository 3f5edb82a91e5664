#include "roundtax/delimited.hpp"

#include <charconv>
#include <cstdlib>

namespace roundtax {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string describe(const std::string& path, int line, const std::string& field, const std::string& what) {
  std::string msg = path;
  if (line > 0) msg += ":" + std::to_string(line);
  if (!field.empty()) msg += ": field '" + field + "'";
  return msg + ": " + what;
}

}  // namespace

ParseError::ParseError(const std::string& path, int line, const std::string& field, const std::string& what)
    : std::runtime_error(describe(path, line, field, what)), path_(path), line_(line), field_(field) {}

DelimitedReader::DelimitedReader(std::string path) : path_(std::move(path)), in_(path_) {
  if (!in_) throw ParseError(path_, 0, "", "cannot open file");
}

bool DelimitedReader::next(std::vector<std::string>& fields) {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    if (line_ == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.erase(0, 3);
    const std::string_view content = trim(raw);
    if (content.empty() || content.front() == '#') continue;
    fields = split_fields(content);
    return true;
  }
  return false;
}

void DelimitedReader::fail(const std::string& field, const std::string& what) const {
  throw ParseError(path_, line_, field, what);
}

std::int64_t DelimitedReader::integer(const std::string& text, const std::string& field) const {
  std::int64_t value = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || p != text.data() + text.size()) fail(field, "expected an integer, got '" + text + "'");
  return value;
}

double DelimitedReader::real(const std::string& text, const std::string& field) const {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) fail(field, "expected a number, got '" + text + "'");
  return value;
}

std::vector<std::string> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace roundtax
