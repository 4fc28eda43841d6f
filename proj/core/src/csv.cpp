#include "ccg/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ccg/errors.hpp"

namespace ccg {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) *out_ << ',';
    *out_ << fields[i];
  }
  *out_ << '\n';
}

void CsvWriter::row(std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (auto f : fields) {
    if (!first) *out_ << ',';
    *out_ << f;
    first = false;
  }
  *out_ << '\n';
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError("missing CSV column '" + std::string(name) + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_csv(in);
}

void write_fw_trace(std::ostream& out, const FwResult& fw, bool timing) {
  CsvWriter w(out);
  w.row({"iter", "potential", "gamma", "gap", "wall_ms"});
  for (const auto& r : fw.trace) {
    w.row({std::to_string(r.iter), format_double(r.potential), format_double(r.gamma),
           format_optional(r.gap), format_double(timing ? r.wall_ms : 0.0)});
  }
}

void write_zo_trace(std::ostream& out, const ZoTrace& trace, bool timing) {
  CsvWriter w(out);
  w.row({"outer_iter", "phi_hat", "ghat_norm", "grad_map_norm", "wall_ms", "max_inner_gap"});
  for (const auto& r : trace.rows) {
    w.row({std::to_string(r.outer_iter), format_double(r.phi_hat), format_optional(r.ghat_norm),
           format_optional(r.grad_map_norm), format_double(timing ? r.wall_ms : 0.0),
           format_optional(r.max_inner_gap)});
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace ccg
