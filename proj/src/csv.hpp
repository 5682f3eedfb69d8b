#pragma once

// Minimal numeric CSV reader: one header row, comma-separated numbers.

#include <fmt/core.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "smoothride/error.hpp"

namespace smoothride::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name, const std::string& file) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ParseError(fmt::format("{}: missing column \"{}\"", file, name));
  }
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  Table table;
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(fmt::format("{}: empty file", path.string()));
  }
  for (std::string_view h : split(line)) table.header.emplace_back(h);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != table.header.size()) {
      throw ParseError(fmt::format("{}:{}: expected {} fields, got {}",
                                   path.string(), line_no,
                                   table.header.size(), fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto f = fields[i];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[i]);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw ParseError(fmt::format("{}:{}: field \"{}\" is not a number",
                                     path.string(), line_no, table.header[i]));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace smoothride::csv
