#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <vector>

#include "sitnikov/app.hpp"
#include "sitnikov/conservative.hpp"
#include "sitnikov/continuation.hpp"
#include "sitnikov/error.hpp"
#include "sitnikov/field.hpp"
#include "sitnikov/io.hpp"
#include "sitnikov/primaries.hpp"
#include "sitnikov/shooting.hpp"
#include "sitnikov/spectral.hpp"

namespace py = pybind11;
using namespace sitnikov;

namespace {

using EnsemblePtr = std::shared_ptr<PrimaryEnsemble>;

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict profile_dict(const FullProfile& p) {
  py::dict d;
  d["t"] = array(p.t);
  d["z"] = array(p.z);
  d["zdot"] = array(p.zdot);
  d["zero_count"] = p.zero_count;
  d["evenness"] = p.residuals.evenness;
  d["antiperiodicity"] = p.residuals.antiperiodicity;
  d["midpoint_zero"] = p.residuals.midpoint_zero;
  return d;
}

py::dict certificate_dict(const SymmetryCertificate& c) {
  py::dict d;
  d["passed"] = c.passed;
  d["max_rotation_residual"] = c.max_rotation_residual;
  d["max_reversal_residual"] = c.max_reversal_residual;
  d["max_mass_residual"] = c.max_mass_residual;
  d["tolerance"] = c.tolerance;
  d["grid_size"] = c.grid_size;
  return d;
}

py::dict verification_dict(const VerificationReport& r) {
  py::dict d;
  d["lambda"] = r.lambda;
  d["ode_residual"] = r.ode_residual;
  d["velocity_residual"] = r.velocity_residual;
  d["evenness"] = r.symmetry.evenness;
  d["antiperiodicity"] = r.symmetry.antiperiodicity;
  d["midpoint_zero"] = r.symmetry.midpoint_zero;
  d["zero_count"] = r.zero_count ? py::object(py::int_(*r.zero_count)) : py::object(py::none());
  d["expected_zero_count"] = r.expected_zero_count;
  d["sup_norm"] = r.sup_norm;
  d["samples_per_period"] = r.samples_per_period;
  d["passed"] = r.passed;
  return d;
}

py::dict spectral_dict(const SpectralReport& r) {
  py::dict d;
  d["lambda"] = r.lambda;
  d["q"] = r.q;
  d["p_max"] = r.p_max;
  d["etas"] = array(r.etas);
  d["mus"] = array(r.mus);
  d["error_estimates"] = array(r.error_estimates);
  d["interior_zeros"] = r.interior_zeros;
  d["bounds_lo"] = array(r.bounds_lo);
  d["bounds_hi"] = array(r.bounds_hi);
  d["verdicts"] = std::vector<bool>(r.verdicts.begin(), r.verdicts.end());
  return d;
}

py::dict branch_dict(const Branch& b) {
  py::dict d;
  d["p"] = b.p;
  d["q"] = b.q;
  d["status"] = std::string(to_string(b.status));
  d["message"] = b.message;
  d["seed_zeta"] = b.seed_zeta;
  d["m_user"] = b.m_user;
  d["epsilon1"] = b.epsilon1;
  std::vector<double> lambda, zeta, sup, winding;
  std::vector<int> zeros;
  for (const auto& p : b.points) {
    lambda.push_back(p.lambda);
    zeta.push_back(p.zeta);
    sup.push_back(p.sup_norm);
    winding.push_back(p.winding_integral);
    zeros.push_back(p.zero_count);
  }
  d["lambda"] = array(lambda);
  d["zeta"] = array(zeta);
  d["sup_norm"] = array(sup);
  d["winding_integral"] = array(winding);
  d["zero_count"] = zeros;
  py::list folds;
  for (const auto& f : b.folds) folds.append(py::make_tuple(f.lambda, f.zeta));
  d["folds"] = folds;
  d["contradicts_trivial_exclusion"] = b.contradicts_trivial_exclusion;
  d["rejected_steps"] = b.rejected_steps;
  if (b.final_profile.size() > 0) d["final_profile"] = profile_dict(b.final_profile);
  return d;
}

ShootingMode mode_for(int p, bool relaxed) {
  return relaxed && p % 2 == 0 ? ShootingMode::kRelaxedEven : ShootingMode::kAntiPeriodic;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symmetric periodic satellite orbits of generalized Sitnikov problems";
  m.attr("__version__") = std::string(io::library_version());

  static py::exception<Error> error_type(m, "SitnikovError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type;
      PyErr_SetObject(exc.ptr(), py::make_tuple(std::string(to_string(e.code())), e.message()).ptr());
    }
  });

  py::class_<PrimaryEnsemble, EnsemblePtr>(m, "PrimaryEnsemble")
      .def_property_readonly("label", &PrimaryEnsemble::label)
      .def_property_readonly("size", &PrimaryEnsemble::size)
      .def_property_readonly("masses", &PrimaryEnsemble::masses)
      .def_property_readonly("alpha", [](const PrimaryEnsemble& e) { return e.constants().alpha; })
      .def_property_readonly("beta", [](const PrimaryEnsemble& e) { return e.constants().beta; })
      .def_property_readonly("alpha_j", [](const PrimaryEnsemble& e) { return e.constants().alpha_j; })
      .def_property_readonly("beta_j", [](const PrimaryEnsemble& e) { return e.constants().beta_j; })
      .def_property_readonly("certificate", [](const PrimaryEnsemble& e) { return certificate_dict(e.certificate()); })
      .def("position", [](const PrimaryEnsemble& e, std::size_t j, double t) {
        const Vec2 v = e.orbits().at(j).position(t);
        return py::make_tuple(v.x, v.y);
      });

  m.def("circular_polygon", [](int n, int d) { return std::make_shared<PrimaryEnsemble>(build_circular_polygon(n, d)); },
        py::arg("n"), py::arg("d") = 0, "n equal masses on a rotating regular polygon (period pi)");
  m.def("kepler_pair", [](double e) { return std::make_shared<PrimaryEnsemble>(build_kepler_pair(e)); },
        py::arg("eccentricity"), "two equal masses on mirror Keplerian ellipses (period pi)");
  m.def(
      "load_trajectory",
      [](const std::filesystem::path& csv, const std::filesystem::path& sidecar, double tolerance) {
        const auto in = io::read_trajectory(csv, sidecar);
        IngestOptions o;
        o.tolerance = tolerance;
        return std::make_shared<PrimaryEnsemble>(ingest_trajectory(in.table, in.spec, o, csv.filename().string()));
      },
      py::arg("csv"), py::arg("sidecar"), py::arg("tolerance") = kDefaultCertificationTolerance);
  m.def("solve_kepler", &solve_kepler, py::arg("mean_anomaly"), py::arg("eccentricity"));

  m.def("field_bounds", [](const EnsemblePtr& e) {
    const auto b = field_bounds(*e);
    py::dict d;
    d["m"] = b.m;
    d["M"] = b.M;
    d["scan_m"] = b.scan_m;
    d["scan_M"] = b.scan_M;
    return d;
  });

  py::class_<HomotopyField>(m, "HomotopyField")
      .def(py::init([](const EnsemblePtr& e) { return HomotopyField(e); }), py::arg("ensemble"))
      .def("potential",
           [](const HomotopyField& f, double t, double z, double lambda) {
             const auto s = f.potential(t, z, lambda);
             return py::make_tuple(s.value, s.dz, s.dzz);
           },
           py::arg("t"), py::arg("z"), py::arg("lam"), "(U, dU/dz, d2U/dz2)")
      .def("weight", &HomotopyField::weight, py::arg("t"), py::arg("lam"))
      .def("evaluate",
           [](const HomotopyField& f, double t, double z, double lambda) {
             const auto s = f.evaluate(t, z, lambda);
             return py::make_tuple(s.acceleration, s.stiffness, s.lambda_sensitivity);
           },
           py::arg("t"), py::arg("z"), py::arg("lam"));

  py::class_<ConservativeSystem>(m, "ConservativeSystem")
      .def(py::init([](const EnsemblePtr& e) { return ConservativeSystem::from_ensemble(*e); }), py::arg("ensemble"))
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("masses"), py::arg("radii"))
      .def_property_readonly("min_energy", &ConservativeSystem::min_energy)
      .def_property_readonly("beta", &ConservativeSystem::beta)
      .def_property_readonly("small_oscillation_period", &ConservativeSystem::small_oscillation_period)
      .def("potential", &ConservativeSystem::potential)
      .def("amplitude_of_energy", &ConservativeSystem::amplitude_of_energy)
      .def("period_of_amplitude", &ConservativeSystem::period_of_amplitude)
      .def("period_function", &ConservativeSystem::period_function)
      .def("period_by_integration", [](const ConservativeSystem& s, double e) { return s.period_by_integration(e); });

  m.def(
      "solve_seed",
      [](const EnsemblePtr& e, int p, int q, bool relaxed) {
        SeedOptions o;
        o.relaxed_symmetry = relaxed;
        const auto seed = solve_seed(ConservativeSystem::from_ensemble(*e), p, q, o);
        py::dict d;
        d["energy"] = seed.level.energy;
        d["amplitude"] = seed.level.amplitude;
        d["period"] = seed.level.period;
        d["zero_count"] = seed.zero_count;
        d["energy_drift"] = seed.energy_drift;
        d["window_residual"] = seed.window_residual;
        d["profile"] = profile_dict(seed.profile);
        return d;
      },
      py::arg("ensemble"), py::arg("p"), py::arg("q") = 1, py::arg("relaxed_symmetry") = false);

  m.def(
      "shoot",
      [](const EnsemblePtr& e, double zeta, double lambda, int q, bool relaxed) {
        ShotOptions o;
        o.mode = relaxed ? ShootingMode::kRelaxedEven : ShootingMode::kAntiPeriodic;
        ShotResult r;
        {
          py::gil_scoped_release release;
          r = shoot(HomotopyField(e), zeta, lambda, q, o);
        }
        return py::make_tuple(r.residual, r.derivative_wrt_amplitude, r.derivative_wrt_lambda);
      },
      py::arg("ensemble"), py::arg("zeta"), py::arg("lam"), py::arg("q") = 1, py::arg("relaxed") = false,
      "(residual, dR/dzeta, dR/dlambda)");

  m.def(
      "continue_branch",
      [](const EnsemblePtr& e, int p, int q, std::optional<double> m_user, std::optional<double> epsilon1,
         bool relaxed) {
        Branch b;
        {
          py::gil_scoped_release release;
          SeedOptions so;
          so.relaxed_symmetry = relaxed;
          const auto seed = solve_seed(ConservativeSystem::from_ensemble(*e), p, q, so);
          ContinuationConfig c;
          c.m_user = m_user;
          c.epsilon1 = epsilon1;
          b = continue_branch(HomotopyField(e), seed, c);
        }
        return branch_dict(b);
      },
      py::arg("ensemble"), py::arg("p"), py::arg("q") = 1, py::arg("m_user") = py::none(),
      py::arg("epsilon1") = py::none(), py::arg("relaxed_symmetry") = false);

  m.def(
      "verify_orbit",
      [](const EnsemblePtr& e, double zeta, double lambda, int p, int q, bool relaxed) {
        ShotOptions o;
        o.mode = mode_for(p, relaxed);
        VerificationReport r;
        {
          py::gil_scoped_release release;
          r = verify_orbit(HomotopyField(e), zeta, lambda, p, q, o);
        }
        return verification_dict(r);
      },
      py::arg("ensemble"), py::arg("zeta"), py::arg("lam"), py::arg("p"), py::arg("q") = 1,
      py::arg("relaxed_symmetry") = false);

  m.def(
      "sturm_eigenvalues",
      [](const EnsemblePtr& e, double lambda, int p_max, int q) {
        SpectralReport r;
        {
          py::gil_scoped_release release;
          r = sturm_eigenvalues(HomotopyField(e), lambda, p_max, q);
        }
        return spectral_dict(r);
      },
      py::arg("ensemble"), py::arg("lam"), py::arg("p_max") = -1, py::arg("q") = 1);
  m.def(
      "sturm_eigenvalues_weight",
      [](const std::function<double(double)>& weight, int p_max, int q) {
        return spectral_dict(sturm_eigenvalues(weight, 0.0, p_max, q));
      },
      py::arg("weight"), py::arg("p_max"), py::arg("q") = 1, "eigenvalues for a Python weight F(t)");

  m.def(
      "run",
      [](const std::string& command, const std::string& builtin, const std::vector<int>& ps,
         const std::vector<int>& qs, const std::filesystem::path& out, int threads) {
        app::RunConfig c;
        c.command = command;
        c.source.builtin = builtin;
        c.ps = ps;
        c.qs = qs;
        c.out_dir = out;
        c.threads = threads;
        py::gil_scoped_release release;
        return app::run(c);
      },
      py::arg("command"), py::arg("builtin"), py::arg("p") = std::vector<int>{1},
      py::arg("q") = std::vector<int>{1}, py::arg("out") = "out", py::arg("threads") = 1,
      "run a CLI command; returns its exit code");
}
