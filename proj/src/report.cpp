#include "goxlens/report.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "goxlens/csv.hpp"
#include "goxlens/error.hpp"

namespace goxlens {

Digest& Digest::update(std::string_view bytes) {
  for (unsigned char c : bytes) h_ = (h_ ^ c) * 0x100000001b3ULL;
  return *this;
}

Digest& Digest::update(double v) {
  // Normalize -0 so equal values hash equally.
  if (v == 0) v = 0;
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) h_ = (h_ ^ ((bits >> (8 * i)) & 0xff)) * 0x100000001b3ULL;
  return *this;
}

Digest& Digest::update(std::int64_t v) { return update(std::string_view(reinterpret_cast<const char*>(&v), sizeof v)); }

Digest& Digest::update(const VecXd& v) {
  update(static_cast<std::int64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) update(v(i));
  return *this;
}

Digest& Digest::update(const MatXd& m) {
  update(static_cast<std::int64_t>(m.rows()));
  update(static_cast<std::int64_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) update(m(i, j));
  return *this;
}

std::string Digest::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

Table& Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error("table '" + name + "': row width does not match columns");
  rows.push_back(std::move(row));
  return *this;
}

const Table& StudyReport::table(std::string_view name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw Error("report has no table '" + std::string(name) + "'");
}

Table* StudyReport::find_table(std::string_view name) {
  for (auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

nlohmann::ordered_json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return json_number(*d);
  return std::get<std::int64_t>(c);
}

std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return csv::format_double(*d);
  return std::to_string(std::get<std::int64_t>(c));
}

}  // namespace

nlohmann::ordered_json StudyReport::to_json() const {
  nlohmann::ordered_json j;
  j["study"] = study;
  j["inputs_digest"] = inputs_digest;
  j["parameters"] = parameters;
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : tables) {
    nlohmann::ordered_json tj;
    tj["name"] = t.name;
    tj["columns"] = t.columns;
    tj["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json rj = nlohmann::ordered_json::array();
      for (const auto& c : r) rj.push_back(cell_json(c));
      tj["rows"].push_back(std::move(rj));
    }
    j["tables"].push_back(std::move(tj));
  }
  if (!extra.empty()) j["results"] = extra;
  j["notes"] = notes;
  return j;
}

std::string table_csv(const Table& t) {
  std::ostringstream out;
  csv::write_row(out, t.columns);
  for (const auto& r : t.rows) {
    std::vector<std::string> fields;
    fields.reserve(r.size());
    for (const auto& c : r) fields.push_back(cell_text(c));
    csv::write_row(out, fields);
  }
  return out.str();
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_report(const std::filesystem::path& dir, const StudyReport& report) {
  std::filesystem::create_directories(dir);
  for (const auto& t : report.tables) atomic_write(dir / (t.name + ".csv"), table_csv(t));
  atomic_write(dir / "report.json", report.to_json().dump(2) + "\n");
}

}  // namespace goxlens
