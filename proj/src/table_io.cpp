#include "qlane/table_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qlane/errors.hpp"
#include "qlane/random.hpp"

namespace qlane {

using nlohmann::json;

namespace {

constexpr std::string_view kQuadHeader = "state_id,role,self_type,opp_type,R,S,T,P";
constexpr std::string_view kUtilityHeader = "state_id,role,self_type,opp_type,U_CC,U_CD,U_DC,U_DD";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, const std::string& where) {
  s = trim(s);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw ParseError(where + ": invalid number '" + std::string(s) + "'");
  }
  return value;
}

json stats_to_json(const StandardizationStats& s) {
  return {{"mean", s.mean}, {"std", s.std}};
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string serialize_table(const PayoffTable& table) {
  std::string out;
  out += "# qlane payoff table\n";
  out += kQuadHeader;
  out += '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (auto r : kRoles) {
      for (auto t : kInteractionTypes) {
        const auto& q = table.quad(i, r, t.self, t.opponent);
        out += table.state_ids()[i];
        out += ',';
        out += to_string(r);
        out += ',';
        out += to_string(t.self);
        out += ',';
        out += to_string(t.opponent);
        for (double v : {q.r, q.s, q.t, q.p}) {
          out += ',';
          out += format_double(v);
        }
        out += '\n';
      }
    }
  }
  return out;
}

std::string serialize_table_metadata(const PayoffTable& table) {
  json meta;
  meta["format"] = "qlane-payoff-table";
  meta["version"] = 1;
  const bool synthetic = table.provenance().kind == PayoffTable::Provenance::Kind::Synthetic;
  meta["provenance"] = synthetic ? "synthetic" : "loaded";
  if (synthetic) meta["seed"] = table.provenance().seed;
  meta["standardization"] = table.stats() ? stats_to_json(*table.stats()) : json(nullptr);
  meta["n_states"] = table.size();
  return meta.dump(2) + "\n";
}

PayoffTable parse_table(std::string_view csv, std::string_view source_name) {
  const std::string src(source_name);
  std::istringstream in{std::string(csv)};
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  bool utility_schema = false;

  struct Record {
    std::size_t state;
    Role role;
    VehicleType self, opp;
    PayoffQuad quad;
  };
  std::vector<std::string> ids;
  std::map<std::string, std::size_t, std::less<>> index;
  std::vector<Record> records;
  std::map<std::tuple<std::size_t, Role, VehicleType, VehicleType>, std::size_t> seen;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = src + ":" + std::to_string(line_no);
    if (!have_header) {
      if (line == kQuadHeader) {
        utility_schema = false;
      } else if (line == kUtilityHeader) {
        utility_schema = true;
      } else {
        throw ParseError(where + ": unrecognized header '" + std::string(line) + "'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 8) {
      throw ParseError(where + ": expected 8 fields, got " + std::to_string(fields.size()));
    }
    Record rec{};
    const std::string id(trim(fields[0]));
    if (id.empty()) throw ParseError(where + ": empty state_id");
    try {
      rec.role = parse_role(trim(fields[1]));
      rec.self = parse_vehicle_type(trim(fields[2]));
      rec.opp = parse_vehicle_type(trim(fields[3]));
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    std::array<double, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) v[k] = parse_number(fields[4 + k], where);
    if (utility_schema) {
      try {
        rec.quad = quad_from_utilities(v[0], v[1], v[2], v[3], rec.role);
      } catch (const DomainError& e) {
        throw ParseError(where + ": " + e.what());
      }
    } else {
      rec.quad = {v[0], v[1], v[2], v[3]};
    }
    auto it = index.find(id);
    if (it == index.end()) {
      it = index.emplace(id, ids.size()).first;
      ids.push_back(id);
    }
    rec.state = it->second;
    if (!seen.emplace(std::tuple{rec.state, rec.role, rec.self, rec.opp}, line_no).second) {
      throw ParseError(where + ": duplicate record for state " + id);
    }
    records.push_back(rec);
  }
  if (!have_header) throw ParseError(src + ": missing header");
  if (ids.empty()) throw ParseError(src + ": no records");

  PayoffTable table(std::move(ids));
  for (const auto& rec : records) table.set(rec.state, rec.role, rec.self, rec.opp, rec.quad);
  table.check_complete();
  return table;
}

std::filesystem::path table_metadata_path(const std::filesystem::path& table_path) {
  auto p = table_path;
  p += ".meta.json";
  return p;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void save_table(const PayoffTable& table, const std::filesystem::path& path) {
  write_text_file(path, serialize_table(table));
  write_text_file(table_metadata_path(path), serialize_table_metadata(table));
}

PayoffTable load_table(const std::filesystem::path& path) {
  PayoffTable table = parse_table(read_text_file(path), path.string());
  const auto meta_path = table_metadata_path(path);
  if (!std::filesystem::exists(meta_path)) return table;

  json meta;
  try {
    meta = json::parse(read_text_file(meta_path));
    if (meta.value("provenance", "loaded") == "synthetic") {
      table.set_provenance({PayoffTable::Provenance::Kind::Synthetic, meta.at("seed").get<std::uint64_t>()});
    }
    if (meta.contains("standardization") && !meta["standardization"].is_null()) {
      StandardizationStats stats;
      stats.mean = meta["standardization"].at("mean").get<std::array<double, kStateDim>>();
      stats.std = meta["standardization"].at("std").get<std::array<double, kStateDim>>();
      table.set_stats(stats);
    }
  } catch (const json::exception& e) {
    throw ParseError(meta_path.string() + ": " + e.what());
  }
  return table;
}

std::string table_digest(const PayoffTable& table) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_table(table))));
  return buf;
}

std::string serialize_coefficients(const UtilityCoefficients& coeffs) {
  json list = json::array();
  for (auto r : kRoles)
    for (auto t : kInteractionTypes)
      for (auto o : kOutcomes) {
        list.push_back({{"role", to_string(r)},
                        {"self", to_string(t.self)},
                        {"opp", to_string(t.opponent)},
                        {"outcome", to_string(o)},
                        {"beta", coeffs.at(r, t, o)}});
      }
  return json{{"format", "qlane-coefficients"}, {"coefficients", list}}.dump(2) + "\n";
}

UtilityCoefficients parse_coefficients(std::string_view json_text) {
  UtilityCoefficients out;
  std::map<UtilityCoefficients::Key, bool> seen;
  try {
    const json doc = json::parse(json_text);
    const auto& list = doc.at("coefficients");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& e = list[i];
      const std::string where = "coefficients[" + std::to_string(i) + "]";
      try {
        const Role r = parse_role(e.at("role").get<std::string>());
        const InteractionType t{parse_vehicle_type(e.at("self").get<std::string>()),
                                parse_vehicle_type(e.at("opp").get<std::string>())};
        const Outcome o = parse_outcome(e.at("outcome").get<std::string>());
        const auto beta = e.at("beta").get<std::vector<double>>();
        if (beta.size() != kFeatureDim) {
          throw ParseError("beta must have " + std::to_string(kFeatureDim) + " entries");
        }
        FeatureVector fv{};
        std::copy(beta.begin(), beta.end(), fv.begin());
        out.set(r, t, o, fv);
        seen[{r, t, o}] = true;
      } catch (const std::exception& ex) {
        throw ParseError(where + ": " + ex.what());
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("coefficient file: ") + e.what());
  }
  for (auto r : kRoles)
    for (auto t : kInteractionTypes)
      for (auto o : kOutcomes) {
        if (o != Outcome::DD && !seen.count({r, t, o})) {
          throw CompletenessError("coefficient file lacks " + std::string(to_string(r)) + "/" +
                                  std::string(to_string(t.self)) + "-" + std::string(to_string(t.opponent)) +
                                  "/" + std::string(to_string(o)));
        }
      }
  return out;
}

void save_coefficients(const UtilityCoefficients& coeffs, const std::filesystem::path& path) {
  write_text_file(path, serialize_coefficients(coeffs));
}

UtilityCoefficients load_coefficients(const std::filesystem::path& path) {
  return parse_coefficients(read_text_file(path));
}

}  // namespace qlane
