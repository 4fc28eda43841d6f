#pragma once

#include <filesystem>
#include <initializer_list>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccg/equilibrium.hpp"
#include "ccg/leader.hpp"

namespace ccg {

/// Shortest round-trip decimal form of `value`.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);

/// Comma-separated rows without quoting; fields must not contain commas.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(&out) {}
  void row(const std::vector<std::string>& fields);
  void row(std::initializer_list<std::string_view> fields);

 private:
  std::ostream* out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws ValidationError when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// `iter,potential,gamma,gap,wall_ms`; wall_ms is written as 0 when
/// `timing` is false so that output is reproducible byte for byte.
void write_fw_trace(std::ostream& out, const FwResult& fw, bool timing = true);
/// `outer_iter,phi_hat,ghat_norm,grad_map_norm,wall_ms,max_inner_gap`.
void write_zo_trace(std::ostream& out, const ZoTrace& trace, bool timing = true);

/// Opens `path` for writing, creating parent directories; throws Error on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace ccg
