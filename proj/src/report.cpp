#include "central_approx/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "central_approx/error.hpp"

namespace central_approx {

void Report::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("report: row width mismatch");
  rows.push_back(std::move(row));
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return format_real(std::get<double>(c));
}

void render_table(const Report& r, std::ostream& out) {
  if (!r.title.empty()) out << r.title << "\n";
  std::vector<std::size_t> width(r.columns.size());
  for (std::size_t j = 0; j < r.columns.size(); ++j) width[j] = r.columns[j].size();
  std::vector<std::vector<std::string>> text;
  for (const auto& row : r.rows) {
    std::vector<std::string> t;
    for (std::size_t j = 0; j < row.size(); ++j) {
      t.push_back(format_cell(row[j]));
      width[j] = std::max(width[j], t.back().size());
    }
    text.push_back(std::move(t));
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) out << "  ";
      out << cells[j] << std::string(width[j] - cells[j].size(), ' ');
    }
    out << "\n";
  };
  if (!r.columns.empty()) {
    line(r.columns);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
  }
  for (const auto& t : text) line(t);
  for (const auto& [k, v] : r.notes) out << k << ": " << v << "\n";
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void render_csv(const Report& r, std::ostream& out) {
  for (const auto& [k, v] : r.notes) out << "# " << k << ": " << v << "\n";
  for (std::size_t j = 0; j < r.columns.size(); ++j) out << (j ? "," : "") << csv_escape(r.columns[j]);
  out << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << csv_escape(format_cell(row[j]));
    out << "\n";
  }
}

void render_json(const Report& r, std::ostream& out) {
  nlohmann::ordered_json root;
  root["title"] = r.title;
  root["columns"] = r.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const Cell& c = row[j];
      if (const auto* s = std::get_if<std::string>(&c))
        obj[r.columns[j]] = *s;
      else if (const auto* i = std::get_if<std::int64_t>(&c))
        obj[r.columns[j]] = *i;
      else if (std::isfinite(std::get<double>(c)))
        obj[r.columns[j]] = std::stod(format_real(std::get<double>(c)));
      else
        obj[r.columns[j]] = format_real(std::get<double>(c));
    }
    rows.push_back(std::move(obj));
  }
  root["rows"] = std::move(rows);
  nlohmann::ordered_json notes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.notes) notes[k] = v;
  root["notes"] = std::move(notes);
  out << root.dump(2) << "\n";
}

void render(const Report& r, const std::string& format, std::ostream& out) {
  if (format == "table")
    render_table(r, out);
  else if (format == "csv")
    render_csv(r, out);
  else if (format == "json")
    render_json(r, out);
  else
    throw ValidationError("unknown output format '" + format + "' (expected table, csv or json)");
}

std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>> parse_csv(
    const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '#') {
      i = text.find('\n', i);
      if (i == std::string::npos) break;
      ++i;
      continue;
    }
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (; i < text.size(); ++i) {
      const char c = text[i];
      if (quoted) {
        if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          fields.back() += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.emplace_back();
      } else if (c == '\n') {
        ++i;
        break;
      } else {
        fields.back() += c;
      }
    }
    lines.push_back(std::move(fields));
  }
  if (lines.empty()) return {};
  auto header = std::move(lines.front());
  lines.erase(lines.begin());
  return {std::move(header), std::move(lines)};
}

}  // namespace central_approx
