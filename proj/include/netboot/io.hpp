#pragma once

// CSV output with a fixed numeric format so repeated runs produce identical
// bytes, plus a small numeric-CSV reader for regression data files.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netboot/errors.hpp"

namespace netboot {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  const auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(cells[i]);
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw InvalidInput("csv row width mismatch");
    emit(row);
  }
  if (!out) throw InvalidInput("write failed: " + path);
}

struct NumericCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Comma-separated numbers with one header line. Every data row must match the
// header's width.
inline NumericCsv read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  NumericCsv out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (out.header.empty()) {
      out.header = cells;
      continue;
    }
    if (cells.size() != out.header.size())
      throw ParseError("expected " + std::to_string(out.header.size()) + " cells, got " +
                           std::to_string(cells.size()),
                       lineno);
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        row[i] = std::stod(cells[i], &used);
        while (used < cells[i].size() && std::isspace(static_cast<unsigned char>(cells[i][used])))
          ++used;
        if (used != cells[i].size()) throw std::invalid_argument("trailing junk");
      } catch (const std::exception&) {
        throw ParseError("bad number '" + cells[i] + "'", lineno);
      }
    }
    out.rows.push_back(std::move(row));
  }
  if (out.header.empty()) throw ParseError("empty file", 0);
  return out;
}

}  // namespace netboot
