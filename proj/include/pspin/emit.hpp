#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace pspin {

using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct RunMeta {
  std::string version;
  std::uint64_t seed = 0;
  /// Compact JSON of the full configuration.
  std::string config_json;
};

enum class Format { csv, json };

/// Shortest representation that parses back to the same double.
std::string format_double(double x);

std::string render(const Table& table, Format format, const RunMeta& meta);

/// Writes render(...) to path ("-" is stdout). A failed write removes the file.
void emit(const Table& table, Format format, const std::filesystem::path& path, const RunMeta& meta);

}  // namespace pspin
