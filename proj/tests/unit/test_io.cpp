#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "sitnikov/error.hpp"
#include "sitnikov/io.hpp"

using namespace sitnikov;

TEST_CASE("FNV-1a reference vectors") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(io::digest("a") == "fnv1a64:af63dc4c8601ec8c");
}

TEST_CASE("doubles survive a text round trip") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, 40.0 * u(rng));
    CHECK(std::strtod(io::format_double(x).c_str(), nullptr) == x);
  }
  CHECK(io::format_double(INFINITY) == "inf");
  CHECK(io::number(INFINITY) == "inf");
  CHECK(io::number(2.5) == 2.5);
}

TEST_CASE("trajectory CSV and sidecar round trip through ingestion") {
  const auto ens = build_circular_polygon(4, 2);
  TrajectoryTable table = sample_ensemble(ens, 128);
  std::istringstream csv("# comment\n" + io::trajectory_csv(table));
  TrajectoryTable parsed = io::parse_trajectory_csv(csv);
  REQUIRE(parsed.times.size() == table.times.size());
  const auto side = io::sidecar_json(table, ens.symmetry());
  CHECK(side["zeta1"][0] == ens.symmetry().zeta1[0] + 1);  // 1-based on disk
  const SymmetrySpec spec = io::parse_sidecar(side, parsed);
  CHECK(spec.zeta1 == ens.symmetry().zeta1);
  CHECK(spec.zeta2 == ens.symmetry().zeta2);
  CHECK(parsed.masses == table.masses);
  for (std::size_t k = 0; k < table.times.size(); ++k) {
    CHECK(parsed.times[k] == table.times[k]);
    CHECK(parsed.positions[k][3].y == table.positions[k][3].y);
  }
  const auto back = ingest_trajectory(parsed, spec);
  CHECK(std::abs(back.constants().beta - ens.constants().beta) <= 1e-8 * ens.constants().beta);
}

TEST_CASE("malformed CSV is reported with its line") {
  const auto fails = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    CHECK_THROWS_WITH_AS(io::parse_trajectory_csv(in), doctest::Contains(needle.c_str()), Error);
  };
  fails("", "empty");
  fails("t,x1,y1\n", "header");
  fails("t,x1,y1,x3,y3\n0,1,0,-1,0\n", "expected columns x2,y2");
  fails("t,x1,y1,x2,y2\n0,1,0,-1,0\n0.1,1,0,-1\n", "line 3: expected 5 fields, got 4");
  fails("t,x1,y1,x2,y2\n0,1,0,-1,zz\n", "line 2: column 5");
  fails("t,x1,y1,x2,y2\n0,1,0,-1,0\n0,1,0,-1,0\n", "line 3: times must increase");
  fails("t,x1,y1,x2,y2\n", "no data rows");
}

TEST_CASE("sidecar validation") {
  TrajectoryTable table;
  table.positions = {{{1, 0}, {-1, 0}}};
  const io::Json good = io::Json::parse(R"({"masses":[0.5,0.5],"d":2,"zeta1":[2,1],"zeta2":[1,2],"R":[[1,0],[0,-1]]})");
  CHECK_NOTHROW(io::parse_sidecar(good, table));
  for (const char* bad : {R"({"masses":[0.5],"d":2,"zeta1":[2,1],"zeta2":[1,2]})",
                          R"({"masses":[0.5,0.5],"zeta1":[2,1],"zeta2":[1,2]})",
                          R"({"masses":[0.5,0.5],"d":2,"zeta1":[0,1],"zeta2":[1,2]})",
                          R"({"masses":[0.5,0.5],"d":2,"zeta1":[2,1],"zeta2":[1,2],"R":[[1,0]]})"}) {
    CHECK_THROWS_AS(io::parse_sidecar(io::Json::parse(bad), table), Error);
  }
  // Not an orthogonal involution.
  CHECK_THROWS_AS(io::parse_sidecar(io::Json::parse(R"({"masses":[0.5,0.5],"d":2,"zeta1":[2,1],"zeta2":[1,2],"R":[[2,0],[0,1]]})"), table),
                  Error);
}
