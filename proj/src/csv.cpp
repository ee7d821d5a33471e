#include "uqbench/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace uqbench {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "?" || s == "NA" || s == "nan";
}

}  // namespace

TabularDataset load_csv(const std::string& path,
                        const std::string& label_column, const LabelRule& rule,
                        const std::map<std::string, ColumnKind>& schema_hints) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) label_idx = i;
  }
  if (label_idx == header.size()) {
    throw std::runtime_error("label column '" + label_column +
                             "' not found in " + path);
  }

  std::vector<std::vector<std::string>> raw(header.size());
  std::size_t n_rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": ragged row (" +
                               std::to_string(fields.size()) + " fields, " +
                               std::to_string(header.size()) + " expected)");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      std::string v = trim(fields[i]);
      if (is_missing(v)) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": missing value in column '" + header[i] +
                                 "'");
      }
      raw[i].push_back(std::move(v));
    }
    ++n_rows;
  }
  if (n_rows == 0) throw std::runtime_error("CSV has no data rows: " + path);

  // Label binarization.
  const std::vector<std::string>& raw_labels = raw[label_idx];
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& v : raw_labels) ++counts[v];

  std::string positive;
  switch (rule.mode) {
    case LabelRule::Mode::positive_value: {
      if (!counts.count(rule.positive)) {
        throw std::runtime_error("positive label value '" + rule.positive +
                                 "' never occurs in " + path);
      }
      positive = rule.positive;
      break;
    }
    case LabelRule::Mode::majority: {
      std::size_t best = 0;
      for (const auto& [v, c] : counts) {
        if (c > best || (c == best && v < positive)) {
          best = c;
          positive = v;
        }
      }
      break;
    }
    case LabelRule::Mode::auto_two: {
      if (counts.size() != 2) {
        throw std::runtime_error(
            "label column '" + label_column + "' has " +
            std::to_string(counts.size()) +
            " distinct values and no one-vs-all mapping configured");
      }
      std::vector<std::string> vals;
      for (const auto& [v, c] : counts) vals.push_back(v);
      double a, b;
      if (parse_double(vals[0], a) && parse_double(vals[1], b)) {
        positive = (a > b) ? vals[0] : vals[1];
      } else {
        positive = std::max(vals[0], vals[1]);
      }
      break;
    }
  }
  std::vector<int> labels(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    labels[r] = (raw_labels[r] == positive) ? 1 : 0;
  }
  if (rule.mode == LabelRule::Mode::auto_two) {
    bool any0 = false, any1 = false;
    for (int y : labels) (y ? any1 : any0) = true;
    if (!any0 || !any1) {
      throw std::runtime_error("label column '" + label_column +
                               "' is single-class after mapping");
    }
  }

  // Feature columns with kind inference.
  std::vector<Column> columns;
  columns.reserve(header.size() - 1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i == label_idx) continue;
    Column col;
    col.schema.name = header[i];

    bool all_numeric = true;
    std::vector<double> parsed(n_rows);
    for (std::size_t r = 0; r < n_rows && all_numeric; ++r) {
      all_numeric = parse_double(raw[i][r], parsed[r]);
    }
    auto hint = schema_hints.find(header[i]);
    bool categorical =
        (hint != schema_hints.end()) ? hint->second == ColumnKind::categorical
                                     : !all_numeric;
    if (categorical) {
      col.schema.kind = ColumnKind::categorical;
      col.values = std::move(raw[i]);
      for (const auto& v : col.values) {
        if (std::find(col.schema.categories.begin(),
                      col.schema.categories.end(),
                      v) == col.schema.categories.end()) {
          col.schema.categories.push_back(v);
        }
      }
    } else {
      if (!all_numeric) {
        throw std::runtime_error("column '" + header[i] +
                                 "' hinted numeric but has non-numeric values");
      }
      col.schema.kind = ColumnKind::numeric;
      col.numeric = std::move(parsed);
    }
    columns.push_back(std::move(col));
  }

  std::string name = path;
  std::size_t slash = name.find_last_of("/\\");
  if (slash != std::string::npos) name = name.substr(slash + 1);
  std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);

  return TabularDataset(name, std::move(columns), std::move(labels));
}

}  // namespace uqbench
