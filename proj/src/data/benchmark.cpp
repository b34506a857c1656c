#include "mtlkd/data/benchmark.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "mtlkd/core/error.hpp"

namespace mtlkd::data {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_int(std::string_view tok, long long& out) {
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && p == tok.data() + tok.size();
}

double parse_real(std::string_view tok, std::string_view what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw DataError("expected a number for " + std::string(what) + ", got '" +
                    std::string(tok) + "'");
  }
  return v;
}

bool is_section_keyword(std::string_view t) {
  return t.ends_with("_SECTION") || t == "EOF";
}

// Translates coordinates to the origin and divides by the larger span.
double rescale(std::vector<Point>& pts) {
  double minx = std::numeric_limits<double>::max(), miny = minx;
  double maxx = std::numeric_limits<double>::lowest(), maxy = maxx;
  for (const auto& p : pts) {
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
  }
  double span = std::max(maxx - minx, maxy - miny);
  if (!(span > 0.0)) span = 1.0;
  for (auto& p : pts) p = {(p.x - minx) / span, (p.y - miny) / span};
  return span;
}

}  // namespace

CvrplibHeader parse_cvrplib_header(std::string_view text) {
  CvrplibHeader h;
  bool have_dim = false;
  for (auto raw : split_lines(text)) {
    auto line = trim(raw);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    const auto first = tokens(line).front();
    if (colon == std::string_view::npos) {
      if (is_section_keyword(first)) break;
      continue;
    }
    const auto key = trim(line.substr(0, colon));
    const auto value = trim(line.substr(colon + 1));
    if (is_section_keyword(key)) break;
    if (key == "NAME") {
      h.name = std::string(value);
    } else if (key == "TYPE") {
      h.type = std::string(value);
    } else if (key == "EDGE_WEIGHT_TYPE") {
      h.edge_weight_type = std::string(value);
    } else if (key == "DIMENSION") {
      long long d = 0;
      if (!parse_int(value, d) || d < 2) throw DataError("bad DIMENSION '" + std::string(value) + "'");
      h.dimension = static_cast<int>(d);
      have_dim = true;
    } else if (key == "CAPACITY") {
      h.capacity = parse_real(value, "CAPACITY");
    }
  }
  if (!have_dim) throw DataError("CVRPLIB header has no DIMENSION");
  if (!(h.capacity > 0.0)) throw DataError("CVRPLIB header has no positive CAPACITY");
  return h;
}

Instance parse_cvrplib(std::string_view text) {
  const CvrplibHeader h = parse_cvrplib_header(text);
  const int dim = h.dimension;
  std::map<long long, Point> coords;
  std::map<long long, long long> demands;
  std::vector<long long> depots;
  std::string section;
  bool saw_coords = false, saw_demand = false, saw_depot = false;

  for (auto raw : split_lines(text)) {
    auto line = trim(raw);
    if (line.empty()) continue;
    auto tok = tokens(line);
    if (is_section_keyword(tok[0]) || (tok[0].back() == ':' && is_section_keyword(tok[0].substr(0, tok[0].size() - 1)))) {
      section = std::string(tok[0]);
      if (section == "NODE_COORD_SECTION") saw_coords = true;
      if (section == "DEMAND_SECTION") saw_demand = true;
      if (section == "DEPOT_SECTION") saw_depot = true;
      if (section == "EOF") break;
      if (section != "NODE_COORD_SECTION" && section != "DEMAND_SECTION" &&
          section != "DEPOT_SECTION") {
        throw DataError("unsupported CVRPLIB section " + section);
      }
      continue;
    }
    if (section.empty()) continue;  // still in the header
    long long id = 0;
    if (!parse_int(tok[0], id)) throw DataError("bad node id '" + std::string(tok[0]) + "'");
    if (section == "NODE_COORD_SECTION") {
      if (tok.size() < 3) throw DataError("coordinate line needs 3 fields");
      coords[id] = {parse_real(tok[1], "x"), parse_real(tok[2], "y")};
    } else if (section == "DEMAND_SECTION") {
      if (tok.size() < 2) throw DataError("demand line needs 2 fields");
      long long d = 0;
      if (!parse_int(tok[1], d)) {
        throw DataError("non-integer demand '" + std::string(tok[1]) + "' for node " +
                        std::to_string(id));
      }
      demands[id] = d;
    } else if (section == "DEPOT_SECTION") {
      if (id == -1) {
        section = "DONE";
        continue;
      }
      depots.push_back(id);
    }
  }
  if (!saw_coords) throw DataError("missing NODE_COORD_SECTION");
  if (!saw_demand) throw DataError("missing DEMAND_SECTION");
  if (!saw_depot || depots.empty()) throw DataError("missing DEPOT_SECTION");
  if (depots.size() != 1) throw DataError("exactly one depot is supported");
  if (static_cast<int>(coords.size()) != dim || static_cast<int>(demands.size()) != dim) {
    throw DataError("section sizes do not match DIMENSION " + std::to_string(dim));
  }
  const long long depot = depots.front();
  if (!coords.contains(depot)) throw DataError("depot id has no coordinates");
  if (demands[depot] != 0) throw DataError("depot demand must be 0");

  Instance inst;
  inst.name = h.name;
  inst.variant = VariantSpec{};
  inst.capacity = h.capacity;
  inst.coords.push_back(coords[depot]);
  inst.demand.push_back(0);
  for (const auto& [id, p] : coords) {
    if (id == depot) continue;
    if (!demands.contains(id)) throw DataError("node " + std::to_string(id) + " has no demand");
    inst.coords.push_back(p);
    inst.demand.push_back(static_cast<int>(demands[id]));
  }
  inst.distance_scale = rescale(inst.coords);
  inst.service_time.assign(inst.coords.size(), 0.0);
  inst.tw.assign(inst.coords.size(), TimeWindow{0.0, kDepotHorizon});
  inst.validate();
  return inst;
}

SolomonHeader parse_solomon_header(std::string_view text) {
  SolomonHeader h;
  const auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw DataError("empty Solomon file");
  h.name = std::string(trim(lines[i]));
  for (; i < lines.size(); ++i) {
    if (trim(lines[i]) == "VEHICLE") break;
  }
  // Skip the "NUMBER CAPACITY" caption, then read the two values.
  for (++i; i < lines.size(); ++i) {
    auto tok = tokens(lines[i]);
    if (tok.empty() || tok[0] == "NUMBER") continue;
    if (tok.size() != 2) throw DataError("malformed VEHICLE block");
    h.vehicles = static_cast<int>(parse_real(tok[0], "vehicle count"));
    h.capacity = parse_real(tok[1], "vehicle capacity");
    break;
  }
  if (!(h.capacity > 0.0)) throw DataError("Solomon file has no VEHICLE capacity");
  return h;
}

Instance parse_solomon(std::string_view text) {
  const SolomonHeader h = parse_solomon_header(text);
  const auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]) != "CUSTOMER") ++i;
  if (i == lines.size()) throw DataError("missing CUSTOMER block");

  struct Row {
    double x, y, demand, ready, due, service;
  };
  std::vector<Row> rows;
  for (++i; i < lines.size(); ++i) {
    auto tok = tokens(lines[i]);
    if (tok.empty()) continue;
    if (std::isalpha(static_cast<unsigned char>(tok[0][0]))) continue;  // caption
    if (tok.size() != 7) {
      throw DataError("malformed column count (" + std::to_string(tok.size()) +
                      ") on line " + std::to_string(i + 1));
    }
    Row r{parse_real(tok[1], "XCOORD"), parse_real(tok[2], "YCOORD"),
          parse_real(tok[3], "DEMAND"), parse_real(tok[4], "READY TIME"),
          parse_real(tok[5], "DUE DATE"), parse_real(tok[6], "SERVICE TIME")};
    if (static_cast<double>(static_cast<long long>(r.demand)) != r.demand) {
      throw DataError("non-integer demand on line " + std::to_string(i + 1));
    }
    rows.push_back(r);
  }
  if (rows.size() < 2) throw DataError("Solomon file needs a depot and customers");

  Instance inst;
  inst.name = h.name;
  inst.variant = VariantSpec{.time_window = true};
  inst.capacity = h.capacity;
  for (const auto& r : rows) {
    inst.coords.push_back({r.x, r.y});
    inst.demand.push_back(static_cast<int>(r.demand));
  }
  const double scale = rescale(inst.coords);
  inst.distance_scale = scale;
  for (const auto& r : rows) {
    inst.tw.push_back({r.ready / scale, r.due / scale});
    inst.service_time.push_back(r.service / scale);
  }
  inst.validate();
  return inst;
}

Instance parse_benchmark(std::string_view text) {
  if (text.find("NODE_COORD_SECTION") != std::string_view::npos) return parse_cvrplib(text);
  if (text.find("CUSTOMER") != std::string_view::npos) return parse_solomon(text);
  throw DataError("unrecognised benchmark format");
}

}  // namespace mtlkd::data
