#include "sitnikov/primaries.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "sitnikov/error.hpp"
#include "sitnikov/numerics.hpp"

namespace sitnikov {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Matrix2 rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Matrix2{{{c, -s}, {s, c}}};
}

bool is_permutation(const std::vector<std::size_t>& p, std::size_t n) {
  if (p.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (std::size_t v : p) {
    if (v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::vector<std::size_t> compose_power(const std::vector<std::size_t>& p, int power) {
  std::vector<std::size_t> out(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    std::size_t v = j;
    for (int k = 0; k < power; ++k) v = p[v];
    out[j] = v;
  }
  return out;
}

bool is_identity(const std::vector<std::size_t>& p) {
  for (std::size_t j = 0; j < p.size(); ++j)
    if (p[j] != j) return false;
  return true;
}

double max_mass_residual(std::span<const MassedOrbit> orbits, const std::vector<std::size_t>& p) {
  double worst = 0.0;
  for (std::size_t j = 0; j < orbits.size(); ++j) {
    const double mj = orbits[j].mass();
    worst = std::max(worst, std::abs(orbits[p[j]].mass() - mj) / mj);
  }
  return worst;
}

}  // namespace

// ---------------------------------------------------------------------------

MassedOrbit::MassedOrbit(double mass, Motion motion) : mass_(mass), motion_(std::move(motion)) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::kInvalidArgument, "masses must be positive");
  }
}

Vec2 MassedOrbit::position(double t) const {
  return std::visit(
      Overloaded{
          [t](const CircularMotion& c) {
            const double ang = c.angular_velocity * t + c.phase;
            return Vec2{c.radius * std::cos(ang), c.radius * std::sin(ang)};
          },
          [t](const KeplerMotion& k) {
            const double ecc_anomaly =
                solve_kepler(k.mean_motion * t + k.mean_anomaly_at_epoch, k.eccentricity);
            const double u = k.semi_major_axis * (std::cos(ecc_anomaly) - k.eccentricity);
            const double v = k.semi_major_axis *
                             std::sqrt(1.0 - k.eccentricity * k.eccentricity) *
                             std::sin(ecc_anomaly);
            return sitnikov::apply(rotation(k.periapsis_angle), Vec2{u, v});
          },
          [t](const SampledMotion& s) { return Vec2{s.x(t), s.y(t)}; },
      },
      motion_);
}

double MassedOrbit::radius(double t) const {
  return std::visit(
      Overloaded{
          [](const CircularMotion& c) { return c.radius; },
          [t](const KeplerMotion& k) {
            const double ecc_anomaly =
                solve_kepler(k.mean_motion * t + k.mean_anomaly_at_epoch, k.eccentricity);
            return k.semi_major_axis * (1.0 - k.eccentricity * std::cos(ecc_anomaly));
          },
          [t](const SampledMotion& s) { return s.radius(t); },
      },
      motion_);
}

double MassedOrbit::angle(double t) const {
  const Vec2 q = position(t);
  return std::atan2(q.y, q.x);
}

std::string_view MassedOrbit::representation() const {
  return std::visit(Overloaded{
                        [](const CircularMotion&) { return std::string_view("analytic-circular"); },
                        [](const KeplerMotion&) { return std::string_view("analytic-kepler"); },
                        [](const SampledMotion&) { return std::string_view("sampled"); },
                    },
                    motion_);
}

// ---------------------------------------------------------------------------

void SymmetrySpec::validate(std::size_t bodies) const {
  if (d < 2) throw Error(ErrorCode::kInvalidArgument, "symmetry order d must be >= 2");
  if (!is_permutation(zeta1, bodies) || !is_permutation(zeta2, bodies)) {
    throw Error(ErrorCode::kInvalidArgument, "zeta1 and zeta2 must be permutations of the bodies");
  }
  if (!is_identity(compose_power(zeta1, d))) {
    throw Error(ErrorCode::kInvalidArgument, "zeta1 must have order dividing d");
  }
  if (!is_identity(compose_power(zeta2, 2))) {
    throw Error(ErrorCode::kInvalidArgument, "zeta2 must be an involution");
  }
  const Matrix2& r = reflection;
  const double sq00 = r[0][0] * r[0][0] + r[0][1] * r[1][0];
  const double sq01 = r[0][0] * r[0][1] + r[0][1] * r[1][1];
  const double sq10 = r[1][0] * r[0][0] + r[1][1] * r[1][0];
  const double sq11 = r[1][0] * r[0][1] + r[1][1] * r[1][1];
  const double orth = std::abs(r[0][0] * r[0][0] + r[1][0] * r[1][0] - 1.0) +
                      std::abs(r[0][1] * r[0][1] + r[1][1] * r[1][1] - 1.0) +
                      std::abs(r[0][0] * r[0][1] + r[1][0] * r[1][1]);
  const double inv = std::abs(sq00 - 1.0) + std::abs(sq01) + std::abs(sq10) + std::abs(sq11 - 1.0);
  if (orth > 1e-12 || inv > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "R must be an orthogonal involution");
  }
}

SymmetryCertificate certify_symmetry(std::span<const MassedOrbit> orbits, const SymmetrySpec& spec,
                                     double tolerance, std::size_t grid) {
  const std::size_t n = orbits.size();
  spec.validate(n);
  if (grid == 0) throw Error(ErrorCode::kInvalidArgument, "certification grid must be non-empty");
  const Matrix2 rot = rotation(2.0 * kPi / spec.d);

  SymmetryCertificate cert;
  cert.tolerance = tolerance;
  cert.grid_size = grid;
  std::vector<Vec2> now(n), reversed(n);
  for (std::size_t k = 0; k < grid; ++k) {
    const double t = kPi * static_cast<double>(k) / static_cast<double>(grid);
    for (std::size_t j = 0; j < n; ++j) {
      now[j] = orbits[j].position(t);
      reversed[j] = orbits[j].position(-t);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 rotated = sitnikov::apply(rot, now[j]);
      const Vec2 target = now[spec.zeta1[j]];
      cert.max_rotation_residual =
          std::max(cert.max_rotation_residual, norm({target.x - rotated.x, target.y - rotated.y}));
      const Vec2 mirrored = sitnikov::apply(spec.reflection, reversed[j]);
      const Vec2 image = now[spec.zeta2[j]];
      cert.max_reversal_residual =
          std::max(cert.max_reversal_residual, norm({image.x - mirrored.x, image.y - mirrored.y}));
    }
  }
  cert.max_mass_residual =
      std::max(max_mass_residual(orbits, spec.zeta1), max_mass_residual(orbits, spec.zeta2));
  cert.passed = cert.max_rotation_residual <= tolerance && cert.max_reversal_residual <= tolerance &&
                cert.max_mass_residual <= tolerance;
  return cert;
}

RadialConstants radial_constants(std::span<const MassedOrbit> orbits, std::size_t samples) {
  if (samples < 8) throw Error(ErrorCode::kInvalidArgument, "need at least 8 extrema samples");
  RadialConstants rc;
  const double h = kPi / static_cast<double>(samples);
  for (const MassedOrbit& orbit : orbits) {
    std::size_t kmin = 0, kmax = 0;
    double rmin = orbit.radius(0.0), rmax = rmin;
    for (std::size_t k = 1; k < samples; ++k) {
      const double r = orbit.radius(h * static_cast<double>(k));
      if (r < rmin) {
        rmin = r;
        kmin = k;
      }
      if (r > rmax) {
        rmax = r;
        kmax = k;
      }
    }
    const auto radius = [&orbit](double t) { return orbit.radius(t); };
    const auto neg_radius = [&orbit](double t) { return -orbit.radius(t); };
    const double tmax = h * static_cast<double>(kmax);
    const double tmin = h * static_cast<double>(kmin);
    rmax = std::max(rmax, numerics::golden_section_max(radius, tmax - h, tmax + h, 1e-12).second);
    rmin = std::min(rmin, -numerics::golden_section_max(neg_radius, tmin - h, tmin + h, 1e-12).second);
    if (!(rmin > 0.0)) {
      throw Error(ErrorCode::kOriginCrossing, "an orbit reaches the origin");
    }
    rc.alpha_j.push_back(rmin);
    rc.beta_j.push_back(rmax);
    rc.alpha += orbit.mass() / (rmin * rmin * rmin);
    rc.beta += orbit.mass() / (rmax * rmax * rmax);
  }
  rc.alpha_min = rc.alpha_j.empty() ? 0.0 : *std::min_element(rc.alpha_j.begin(), rc.alpha_j.end());
  return rc;
}

// ---------------------------------------------------------------------------

PrimaryEnsemble PrimaryEnsemble::create(std::vector<MassedOrbit> orbits, SymmetrySpec spec,
                                        double tolerance, std::string label,
                                        std::size_t certification_grid) {
  if (orbits.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two primaries");
  PrimaryEnsemble ens;
  ens.certificate_ = certify_symmetry(orbits, spec, tolerance, certification_grid);
  if (!ens.certificate_.passed) {
    std::ostringstream msg;
    msg << "symmetry residuals exceed " << tolerance
        << " (rotation " << ens.certificate_.max_rotation_residual << ", reversal "
        << ens.certificate_.max_reversal_residual << ", mass " << ens.certificate_.max_mass_residual
        << ")";
    throw CertificationFailure(msg.str(), ens.certificate_);
  }
  ens.constants_ = radial_constants(orbits);
  ens.orbits_ = std::move(orbits);
  ens.symmetry_ = std::move(spec);
  ens.label_ = std::move(label);
  return ens;
}

std::vector<double> PrimaryEnsemble::masses() const {
  std::vector<double> m;
  m.reserve(orbits_.size());
  for (const auto& o : orbits_) m.push_back(o.mass());
  return m;
}

double polygon_radius(int n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "polygon needs n >= 2");
  double sum = 0.0;
  for (int k = 1; k < n; ++k) sum += 1.0 / std::sin(kPi * k / n);
  const double omega = 2.0;
  return std::cbrt(sum / (4.0 * n) / (omega * omega));
}

PrimaryEnsemble build_circular_polygon(int n, int d) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "polygon needs n >= 2");
  if (d == 0) d = n;
  if (d < 2 || n % d != 0) throw Error(ErrorCode::kInvalidArgument, "d must divide n and be >= 2");
  const double a = polygon_radius(n);
  std::vector<MassedOrbit> orbits;
  SymmetrySpec spec;
  spec.d = d;
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t j = 0; j < un; ++j) {
    orbits.emplace_back(1.0 / n, CircularMotion{a, 2.0, 2.0 * kPi * static_cast<double>(j) / n});
    spec.zeta1.push_back((j + un / static_cast<std::size_t>(d)) % un);
    spec.zeta2.push_back((un - j) % un);
  }
  return PrimaryEnsemble::create(std::move(orbits), std::move(spec), kDefaultCertificationTolerance,
                                 "circular:" + std::to_string(n));
}

double solve_kepler(double mean_anomaly, double e) {
  const double reduced = std::remainder(mean_anomaly, 2.0 * kPi);
  const double turns = mean_anomaly - reduced;
  if (e == 0.0) return mean_anomaly;
  double ecc = e < 0.8 ? reduced + e * std::sin(reduced) : (reduced >= 0.0 ? kPi : -kPi);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = ecc - e * std::sin(ecc) - reduced;
    const double fp = 1.0 - e * std::cos(ecc);
    const double step = f / fp;
    ecc -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(ecc))) break;
  }
  return ecc + turns;
}

PrimaryEnsemble build_kepler_pair(double e) {
  if (!(e >= 0.0 && e < 1.0)) {
    throw Error(ErrorCode::kEccentricityOutOfRange, "eccentricity must lie in [0, 1)");
  }
  const double a = std::pow(2.0, -5.0 / 3.0);
  std::vector<MassedOrbit> orbits;
  orbits.emplace_back(0.5, KeplerMotion{a, e, 2.0, 0.0, 0.0});
  orbits.emplace_back(0.5, KeplerMotion{a, e, 2.0, 0.0, kPi});
  SymmetrySpec spec;
  spec.d = 2;
  spec.zeta1 = {1, 0};
  spec.zeta2 = {0, 1};
  std::ostringstream label;
  label << "kepler:" << e;
  return PrimaryEnsemble::create(std::move(orbits), std::move(spec), kDefaultCertificationTolerance,
                                 label.str());
}

// ---------------------------------------------------------------------------

PrimaryEnsemble ingest_trajectory(const TrajectoryTable& table, const SymmetrySpec& spec,
                                  const IngestOptions& options, std::string label) {
  const std::size_t n = table.bodies();
  const std::size_t rows = table.times.size();
  if (n < 2) throw Error(ErrorCode::kInvalidTable, "table needs at least two bodies");
  if (rows < 9) throw Error(ErrorCode::kInvalidTable, "table needs at least 9 time samples");
  if (table.positions.size() != rows) {
    throw Error(ErrorCode::kInvalidTable, "positions and times have different lengths");
  }
  for (const auto& row : table.positions) {
    if (row.size() != n) throw Error(ErrorCode::kInvalidTable, "row with wrong number of bodies");
  }
  for (double m : table.masses) {
    if (!(m > 0.0)) throw Error(ErrorCode::kInvalidTable, "masses must be positive");
  }
  const std::size_t intervals = rows - 1;
  const double h = kPi / static_cast<double>(intervals);
  if (table.times.front() != 0.0 && std::abs(table.times.front()) > 1e-12) {
    throw Error(ErrorCode::kInvalidTable, "time grid must start at 0");
  }
  if (std::abs(table.times.back() - kPi) > 1e-9) {
    throw Error(ErrorCode::kInvalidTable, "time grid must end at pi");
  }
  for (std::size_t k = 0; k < rows; ++k) {
    if (std::abs(table.times[k] - h * static_cast<double>(k)) > 1e-8 * h) {
      throw Error(ErrorCode::kInvalidTable, "time grid must be uniform on [0, pi]");
    }
  }

  double closure = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 a = table.positions.front()[j];
    const Vec2 b = table.positions.back()[j];
    closure = std::max(closure, norm({b.x - a.x, b.y - a.y}));
  }
  if (closure > options.tol_closure) {
    std::ostringstream msg;
    msg << "endpoint closure " << closure << " exceeds " << options.tol_closure;
    throw Error(ErrorCode::kNotPeriodic, msg.str());
  }
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (norm(table.positions[k][j]) < options.tol_origin) {
        std::ostringstream msg;
        msg << "body " << j + 1 << " passes within " << options.tol_origin
            << " of the origin at t = " << table.times[k];
        throw Error(ErrorCode::kOriginCrossing, msg.str());
      }
    }
  }

  std::vector<MassedOrbit> orbits;
  std::vector<double> xs(intervals), ys(intervals), rs(intervals);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < intervals; ++k) {
      xs[k] = table.positions[k][j].x;
      ys[k] = table.positions[k][j].y;
      rs[k] = norm(table.positions[k][j]);
    }
    orbits.emplace_back(table.masses[j],
                        SampledMotion{TrigSeries::fit(xs, kPi), TrigSeries::fit(ys, kPi),
                                      TrigSeries::fit(rs, kPi)});
  }
  PrimaryEnsemble ens = PrimaryEnsemble::create(std::move(orbits), spec, options.tolerance,
                                                std::move(label), options.certification_grid);

  double total = 0.0;
  for (double m : table.masses) total += m;
  if (std::abs(total - 1.0) > options.tol_mass) {
    std::ostringstream msg;
    msg << "masses sum to " << total << ", expected 1";
    throw Error(ErrorCode::kInvalidTable, msg.str());
  }
  for (std::size_t k = 0; k < rows; ++k) {
    Vec2 com;
    for (std::size_t j = 0; j < n; ++j) {
      com.x += table.masses[j] * table.positions[k][j].x;
      com.y += table.masses[j] * table.positions[k][j].y;
    }
    if (norm(com) > options.tol_com) {
      std::ostringstream msg;
      msg << "center of mass off the origin by " << norm(com) << " at t = " << table.times[k];
      throw Error(ErrorCode::kInvalidTable, msg.str());
    }
  }
  return ens;
}

TrajectoryTable sample_ensemble(const PrimaryEnsemble& ensemble, std::size_t intervals) {
  if (intervals < 8) throw Error(ErrorCode::kInvalidArgument, "need at least 8 intervals");
  TrajectoryTable table;
  table.masses = ensemble.masses();
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double t = kPi * static_cast<double>(k) / static_cast<double>(intervals);
    table.times.push_back(t);
    std::vector<Vec2> row;
    for (const auto& orbit : ensemble.orbits()) row.push_back(orbit.position(t));
    table.positions.push_back(std::move(row));
  }
  // The grid end is the same instant as its start for a pi-periodic solution.
  table.times.back() = kPi;
  return table;
}

// ---------------------------------------------------------------------------

namespace {

// Enumerates permutations p with allowed[p(j)][j] for every j, calling
// accept(p) on each; stops at the first accepted permutation.
bool enumerate_matchings(const std::vector<std::vector<bool>>& allowed, std::vector<std::size_t>& p,
                         std::vector<bool>& used, std::size_t j,
                         const std::function<bool(const std::vector<std::size_t>&)>& accept) {
  const std::size_t n = allowed.size();
  if (j == n) return accept(p);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i] || !allowed[i][j]) continue;
    used[i] = true;
    p[j] = i;
    if (enumerate_matchings(allowed, p, used, j + 1, accept)) return true;
    used[i] = false;
  }
  return false;
}

}  // namespace

std::optional<SymmetrySpec> search_symmetry(std::span<const MassedOrbit> orbits, int d,
                                            const Matrix2& reflection, double tolerance,
                                            std::size_t grid) {
  const std::size_t n = orbits.size();
  if (n > 8) throw Error(ErrorCode::kInvalidArgument, "symmetry search is limited to n <= 8");
  if (d < 2) throw Error(ErrorCode::kInvalidArgument, "symmetry order d must be >= 2");
  const Matrix2 rot = rotation(2.0 * kPi / d);
  std::vector<std::vector<Vec2>> now(grid, std::vector<Vec2>(n)), rev(grid, std::vector<Vec2>(n));
  for (std::size_t k = 0; k < grid; ++k) {
    const double t = kPi * static_cast<double>(k) / static_cast<double>(grid);
    for (std::size_t j = 0; j < n; ++j) {
      now[k][j] = orbits[j].position(t);
      rev[k][j] = orbits[j].position(-t);
    }
  }
  // allowed1[i][j]: body i can be the rotation image of body j.
  std::vector<std::vector<bool>> allowed1(n, std::vector<bool>(n)), allowed2 = allowed1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool same_mass = std::abs(orbits[i].mass() - orbits[j].mass()) <= tolerance * orbits[j].mass();
      double r1 = 0.0, r2 = 0.0;
      for (std::size_t k = 0; k < grid; ++k) {
        const Vec2 a = sitnikov::apply(rot, now[k][j]);
        const Vec2 b = sitnikov::apply(reflection, rev[k][j]);
        r1 = std::max(r1, norm({now[k][i].x - a.x, now[k][i].y - a.y}));
        r2 = std::max(r2, norm({now[k][i].x - b.x, now[k][i].y - b.y}));
      }
      allowed1[i][j] = same_mass && r1 <= tolerance;
      allowed2[i][j] = same_mass && r2 <= tolerance;
    }
  }
  SymmetrySpec spec;
  spec.d = d;
  spec.reflection = reflection;
  std::vector<std::size_t> p(n);
  std::vector<bool> used(n, false);
  const bool found1 = enumerate_matchings(allowed1, p, used, 0, [&](const auto& perm) {
    if (!is_identity(compose_power(perm, d))) return false;
    spec.zeta1 = perm;
    return true;
  });
  if (!found1) return std::nullopt;
  std::fill(used.begin(), used.end(), false);
  const bool found2 = enumerate_matchings(allowed2, p, used, 0, [&](const auto& perm) {
    if (!is_identity(compose_power(perm, 2))) return false;
    spec.zeta2 = perm;
    return true;
  });
  if (!found2) return std::nullopt;
  return spec;
}

}  // namespace sitnikov
