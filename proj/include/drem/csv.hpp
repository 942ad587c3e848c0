#pragma once

#include <string>
#include <vector>

#include "drem/scenario.hpp"

namespace dremix {

/// Header plus one line per row, values as %.17g, LF line endings.
std::string to_csv(const RunRecord& record);

/// Writes to_csv(record) to path, creating parent directories. Throws std::runtime_error
/// naming the path on failure.
void emit_csv(const RunRecord& record, const std::string& path);

/// Path for record index of a sweep: "out/a.csv" -> "out/a_3.csv". Unchanged when count == 1.
std::string sweep_path(const std::string& path, std::size_t index, std::size_t count);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvTable parse_csv(const std::string& text);

}  // namespace dremix
