#include "sitnikov/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sitnikov/error.hpp"

namespace sitnikov::io {

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, std::size_t line, std::size_t column) {
  const std::string s = trim(cell);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    parse_error(line, "column " + std::to_string(column) + ": not a finite number: '" + s + "'");
  }
  return v;
}

std::vector<std::size_t> parse_permutation(const Json& j, const char* key, std::size_t n) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorCode::kParseError, std::string("sidecar: '") + key + "' must be an array");
  }
  std::vector<std::size_t> out;
  for (const auto& v : j[key]) {
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > static_cast<long long>(n)) {
      throw Error(ErrorCode::kParseError,
                  std::string("sidecar: '") + key + "' entries must be integers in 1.." + std::to_string(n));
    }
    out.push_back(static_cast<std::size_t>(v.get<long long>() - 1));
  }
  if (out.size() != n) {
    throw Error(ErrorCode::kParseError, std::string("sidecar: '") + key + "' must list " + std::to_string(n) +
                                            " images");
  }
  return out;
}

}  // namespace

std::string_view library_version() noexcept { return SITNIKOV_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

TrajectoryTable parse_trajectory_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::kParseError, "empty trajectory file");
  for (auto& h : header) h = trim(h);
  if (header.size() < 5 || header.size() % 2 == 0 || header[0] != "t") {
    parse_error(lineno, "header must be t,x1,y1,...,xn,yn with n >= 2");
  }
  const std::size_t n = (header.size() - 1) / 2;
  for (std::size_t j = 0; j < n; ++j) {
    const std::string x = "x" + std::to_string(j + 1);
    const std::string y = "y" + std::to_string(j + 1);
    if (header[1 + 2 * j] != x || header[2 + 2 * j] != y) {
      parse_error(lineno, "expected columns " + x + "," + y + " at position " + std::to_string(2 + 2 * j));
    }
  }

  TrajectoryTable table;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      parse_error(lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                              std::to_string(cells.size()));
    }
    const double t = parse_number(cells[0], lineno, 1);
    if (!table.times.empty() && !(t > table.times.back())) parse_error(lineno, "times must increase strictly");
    table.times.push_back(t);
    std::vector<Vec2> row(n);
    for (std::size_t j = 0; j < n; ++j) {
      row[j].x = parse_number(cells[1 + 2 * j], lineno, 2 + 2 * j);
      row[j].y = parse_number(cells[2 + 2 * j], lineno, 3 + 2 * j);
    }
    table.positions.push_back(std::move(row));
  }
  if (table.times.empty()) throw Error(ErrorCode::kParseError, "trajectory file has no data rows");
  table.masses.assign(n, 0.0);
  return table;
}

SymmetrySpec parse_sidecar(const Json& j, TrajectoryTable& table) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "sidecar must be a JSON object");
  const std::size_t n = table.positions.empty() ? 0 : table.positions.front().size();
  if (!j.contains("masses") || !j["masses"].is_array() || j["masses"].size() != n) {
    throw Error(ErrorCode::kParseError, "sidecar: 'masses' must list " + std::to_string(n) + " numbers");
  }
  table.masses.clear();
  for (const auto& m : j["masses"]) {
    if (!m.is_number()) throw Error(ErrorCode::kParseError, "sidecar: masses must be numbers");
    table.masses.push_back(m.get<double>());
  }
  SymmetrySpec spec;
  if (!j.contains("d") || !j["d"].is_number_integer()) {
    throw Error(ErrorCode::kParseError, "sidecar: 'd' must be an integer");
  }
  spec.d = j["d"].get<int>();
  if (spec.d < 2) throw Error(ErrorCode::kParseError, "sidecar: 'd' must be >= 2");
  spec.zeta1 = parse_permutation(j, "zeta1", n);
  spec.zeta2 = parse_permutation(j, "zeta2", n);
  if (j.contains("R")) {
    const auto& r = j["R"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_array() || !r[1].is_array() || r[0].size() != 2 ||
        r[1].size() != 2) {
      throw Error(ErrorCode::kParseError, "sidecar: 'R' must be a 2x2 array");
    }
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (!r[a][b].is_number()) throw Error(ErrorCode::kParseError, "sidecar: 'R' entries must be numbers");
        spec.reflection[a][b] = r[a][b].get<double>();
      }
    }
  }
  spec.validate(n);
  return spec;
}

TrajectoryInput read_trajectory(const std::filesystem::path& csv, const std::filesystem::path& sidecar) {
  TrajectoryInput out;
  std::istringstream in(read_file(csv));
  try {
    out.table = parse_trajectory_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), csv.string() + ": " + e.message());
  }
  Json j;
  try {
    j = Json::parse(read_file(sidecar));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, sidecar.string() + ": " + e.what());
  }
  out.spec = parse_sidecar(j, out.table);
  return out;
}

std::string trajectory_csv(const TrajectoryTable& table) {
  std::string s = "t";
  for (std::size_t j = 0; j < table.bodies(); ++j) {
    s += ",x" + std::to_string(j + 1) + ",y" + std::to_string(j + 1);
  }
  s += '\n';
  for (std::size_t k = 0; k < table.times.size(); ++k) {
    s += format_double(table.times[k]);
    for (const Vec2& q : table.positions[k]) s += ',' + format_double(q.x) + ',' + format_double(q.y);
    s += '\n';
  }
  return s;
}

Json sidecar_json(const TrajectoryTable& table, const SymmetrySpec& spec) {
  Json j;
  j["masses"] = table.masses;
  const Json s = to_json(spec);
  for (const auto& [k, v] : s.items()) j[k] = v;
  return j;
}

std::string csv_preamble(std::string_view config_hash) {
  return "# version=" + std::string(library_version()) + " config_hash=" + std::string(config_hash) + "\n";
}

std::string profile_csv(const FullProfile& profile, std::string_view config_hash) {
  std::string s = csv_preamble(config_hash);
  s += "t,z,zdot\n";
  for (std::size_t k = 0; k < profile.size(); ++k) {
    s += format_double(profile.t[k]) + ',' + format_double(profile.z[k]) + ',' + format_double(profile.zdot[k]) +
         '\n';
  }
  return s;
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

Json to_json(const SymmetrySpec& spec) {
  Json j;
  j["d"] = spec.d;
  Json z1 = Json::array(), z2 = Json::array();
  for (std::size_t v : spec.zeta1) z1.push_back(v + 1);
  for (std::size_t v : spec.zeta2) z2.push_back(v + 1);
  j["zeta1"] = z1;
  j["zeta2"] = z2;
  j["R"] = {{spec.reflection[0][0], spec.reflection[0][1]}, {spec.reflection[1][0], spec.reflection[1][1]}};
  return j;
}

Json to_json(const SymmetryCertificate& c) {
  Json j;
  j["passed"] = c.passed;
  j["max_rotation_residual"] = c.max_rotation_residual;
  j["max_reversal_residual"] = c.max_reversal_residual;
  j["max_mass_residual"] = c.max_mass_residual;
  j["tolerance"] = c.tolerance;
  j["grid_size"] = c.grid_size;
  return j;
}

Json to_json(const RadialConstants& c) {
  Json j;
  j["alpha_j"] = c.alpha_j;
  j["beta_j"] = c.beta_j;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["alpha_min"] = c.alpha_min;
  return j;
}

}  // namespace sitnikov::io
