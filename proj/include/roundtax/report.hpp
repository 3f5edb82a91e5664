#pragma once

#include <map>
#include <string>
#include <vector>

namespace roundtax {

/// A titled table rendered either as aligned text or as CSV.
class ReportTable {
 public:
  ReportTable(std::string title, std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  void add_note(std::string note) { notes_.push_back(std::move(note)); }

  const std::string& title() const { return title_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  /// First column left-aligned, the rest right-aligned.
  std::string text() const;
  /// Header row then data rows; a cell holding ',' or '"' is quoted.
  std::string csv() const;

 private:
  std::string title_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> notes_;
};

/// Tables plus the CSV section names under which they appear in the machine-readable file.
struct Report {
  std::vector<ReportTable> tables;

  std::string text() const;
  /// Each table preceded by a `# title` line and separated by a blank line.
  std::string csv() const;
};

struct PlotSeries {
  std::string name;
  std::map<int, double> points;
};

/// A small static SVG line chart with integer x values (years).
std::string svg_line_plot(const std::string& title, const std::string& y_label, const std::vector<PlotSeries>& series);

/// Thousands separators: 1234567 -> "1,234,567".
std::string group_thousands(const std::string& integer_text);

/// printf-style fixed formatting of a double.
std::string fixed(double value, int places);

}  // namespace roundtax
