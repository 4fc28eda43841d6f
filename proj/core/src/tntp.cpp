#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string_view>

#include "ccg/errors.hpp"
#include "ccg/network.hpp"

namespace ccg {

namespace {

constexpr std::array<std::string_view, 10> kLinkColumns = {
    "init_node", "term_node", "capacity", "length", "free_flow_time",
    "b",         "power",     "speed",    "toll",   "link_type"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_number(std::string_view token) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

NodeId to_node_id(double value, std::size_t line) {
  if (value != std::floor(value)) throw ParseError(line, "node id is not an integer");
  return static_cast<NodeId>(value);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  return in;
}

}  // namespace

DirectedNetwork parse_tntp(std::istream& in) {
  DirectedNetwork net;
  bool have_node_count = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '~') continue;

    if (line.front() == '<') {
      const auto close = line.find('>');
      if (close == std::string_view::npos) throw ParseError(line_no, "malformed metadata header");
      const std::string_view key = trim(line.substr(1, close - 1));
      const std::string_view value = trim(line.substr(close + 1));
      if (key == "NUMBER OF NODES") {
        const auto count = to_number(value);
        if (!count || *count < 1 || *count != std::floor(*count)) {
          throw ParseError(line_no, "<NUMBER OF NODES> must be a positive integer");
        }
        net.node_count = static_cast<int>(*count);
        have_node_count = true;
      }
      continue;
    }

    if (line.back() != ';') throw ParseError(line_no, "link row does not end with ';'");
    const auto tokens = split_ws(trim(line.substr(0, line.size() - 1)));
    std::vector<double> fields;
    fields.reserve(tokens.size());
    for (std::string_view tok : tokens) {
      const auto v = to_number(tok);
      if (!v) throw ParseError(line_no, "non-numeric field '" + std::string(tok) + "'");
      fields.push_back(*v);
    }
    if (fields.size() < 3) throw ParseError(line_no, "link row has fewer than 3 numeric fields");
    if (!have_node_count) throw ParseError(line_no, "link row before <NUMBER OF NODES>");

    Arc arc;
    arc.tail = to_node_id(fields[0], line_no);
    arc.head = to_node_id(fields[1], line_no);
    for (NodeId id : {arc.tail, arc.head}) {
      if (id < 1 || id > net.node_count) {
        throw ValidationError("line " + std::to_string(line_no) + ": node id " + std::to_string(id) +
                              " exceeds declared node count " + std::to_string(net.node_count));
      }
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string name =
          c < kLinkColumns.size() ? std::string(kLinkColumns[c]) : "column_" + std::to_string(c);
      arc.raw_attributes[name] = fields[c];
    }
    arc.free_flow_time = fields.size() > 4 ? fields[4] : 0.0;
    if (arc.free_flow_time < 0.0) {
      throw ValidationError("line " + std::to_string(line_no) + ": negative free_flow_time");
    }
    net.arcs.push_back(std::move(arc));
  }
  if (!have_node_count) throw ParseError(0, "missing <NUMBER OF NODES> metadata");
  return net;
}

DirectedNetwork parse_tntp_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  try {
    return parse_tntp(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

std::map<NodeId, Point> parse_coordinates(std::istream& in) {
  std::map<NodeId, Point> coords;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '~') continue;
    if (line.back() == ';') line = trim(line.substr(0, line.size() - 1));
    const auto tokens = split_ws(line);
    if (tokens.size() < 3) throw ParseError(line_no, "coordinate row needs node_id x y");
    const auto id = to_number(tokens[0]);
    const auto x = to_number(tokens[1]);
    const auto y = to_number(tokens[2]);
    if (!id || !x || !y) {
      if (coords.empty() && line_no == 1) continue;  // header row
      throw ParseError(line_no, "non-numeric coordinate row");
    }
    coords[to_node_id(*id, line_no)] = Point{*x, *y};
  }
  return coords;
}

std::map<NodeId, Point> parse_coordinates_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_coordinates(in);
}

}  // namespace ccg
