#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace central_approx {

using Cell = std::variant<std::string, std::int64_t, double>;

/// A titled table plus key/value notes, rendered as an aligned table, CSV or
/// JSON. Reals are printed with 12 significant digits.
struct Report {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> notes;

  void add_row(std::vector<Cell> row);
  void note(std::string key, std::string value) { notes.emplace_back(std::move(key), std::move(value)); }
};

std::string format_real(double x);
std::string format_cell(const Cell& c);

void render_table(const Report& r, std::ostream& out);
/// Header line, then one line per row. Notes are emitted as leading
/// "# key: value" comment lines.
void render_csv(const Report& r, std::ostream& out);
void render_json(const Report& r, std::ostream& out);
void render(const Report& r, const std::string& format, std::ostream& out);

/// Parses CSV produced by render_csv (comment lines skipped) into a header
/// and rows of strings.
std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>> parse_csv(
    const std::string& text);

}  // namespace central_approx
