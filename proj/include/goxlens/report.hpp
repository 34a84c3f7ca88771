#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "goxlens/types.hpp"
#include "json.hpp"

namespace goxlens {

/// FNV-1a 64 over a canonical byte stream of the inputs.
class Digest {
 public:
  Digest& update(std::string_view bytes);
  Digest& update(double v);
  Digest& update(std::int64_t v);
  Digest& update(const VecXd& v);
  Digest& update(const MatXd& m);
  std::uint64_t value() const { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

using Cell = std::variant<std::string, double, std::int64_t>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Table& add(std::vector<Cell> row);
};

struct StudyReport {
  std::string study;
  std::string inputs_digest;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<Table> tables;
  std::vector<std::string> notes;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();  ///< study-specific structured results

  const Table& table(std::string_view name) const;
  Table* find_table(std::string_view name);
  nlohmann::ordered_json to_json() const;
};

/// Non-finite doubles become the strings "inf", "-inf", "nan".
nlohmann::ordered_json json_number(double v);

std::string table_csv(const Table& t);

/// Writes to a temporary sibling and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// report.json plus <table>.csv for each table.
void write_report(const std::filesystem::path& dir, const StudyReport& report);

}  // namespace goxlens
