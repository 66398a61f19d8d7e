#pragma once

// File formats: trajectory CSV + JSON sidecar in, JSON reports and CSV
// tables out. Numbers are written with round-trip precision so reruns are
// byte-identical.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sitnikov/primaries.hpp"
#include "sitnikov/profile.hpp"

namespace sitnikov::io {

using Json = nlohmann::ordered_json;

std::string_view library_version() noexcept;

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
/// "fnv1a64:" followed by 16 hex digits.
std::string digest(std::string_view bytes);

/// %.17g, with "nan", "inf" and "-inf" spelled out.
std::string format_double(double x);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

struct TrajectoryInput {
  TrajectoryTable table;
  SymmetrySpec spec;
};

/// CSV header `t,x1,y1,...,xn,yn`. Errors are Error(kParseError) with the
/// line number.
TrajectoryTable parse_trajectory_csv(std::istream& in);
/// Sidecar `{masses, d, zeta1, zeta2, R}`; permutations are 1-based lists of
/// images. Fills `table.masses`.
SymmetrySpec parse_sidecar(const Json& sidecar, TrajectoryTable& table);
TrajectoryInput read_trajectory(const std::filesystem::path& csv, const std::filesystem::path& sidecar);

std::string trajectory_csv(const TrajectoryTable& table);
Json sidecar_json(const TrajectoryTable& table, const SymmetrySpec& spec);

/// `# key=value ...` comment line that opens every CSV output.
std::string csv_preamble(std::string_view config_hash);
std::string profile_csv(const FullProfile& profile, std::string_view config_hash);

/// Doubles that JSON cannot hold (inf, nan) become strings.
Json number(double x);

Json to_json(const SymmetrySpec& spec);
Json to_json(const SymmetryCertificate& cert);
Json to_json(const RadialConstants& constants);

}  // namespace sitnikov::io
