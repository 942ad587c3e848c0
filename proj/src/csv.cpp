#include "drem/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dremix {

std::string to_csv(const RunRecord& record) {
  std::string out;
  for (std::size_t c = 0; c < record.columns.size(); ++c) {
    if (c) out += ',';
    out += record.columns[c];
  }
  out += '\n';
  char buf[32];
  for (const auto& row : record.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const RunRecord& record, const std::string& path) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing: " + std::strerror(errno));
  const std::string text = to_csv(record);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::string sweep_path(const std::string& path, std::size_t index, std::size_t count) {
  if (count <= 1) return path;
  const std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path() / (p.stem().string() + "_" + std::to_string(index) + p.extension().string());
  return out.string();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return t;
  std::istringstream header(line);
  for (std::string cell; std::getline(header, cell, ',');) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != t.columns.size()) throw std::runtime_error("csv row has " + std::to_string(row.size()) + " cells, header has " + std::to_string(t.columns.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace dremix
