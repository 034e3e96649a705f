#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "floqspin/drive.hpp"
#include "floqspin/errors.hpp"
#include "floqspin/floquet.hpp"
#include "floqspin/optimize.hpp"
#include "floqspin/spin_model.hpp"
#include "floqspin/stroboscopic.hpp"
#include "floqspin/vanvleck.hpp"

namespace py = pybind11;
using namespace floqspin;

namespace {

StaticParams make_params(double spin, double D, double E, const Mat3& g, const Vec3& bs) {
  StaticParams p;
  p.spin = spin;
  p.D = D;
  p.E = E;
  p.g = g;
  p.Bs = bs;
  return p;
}

FourierField drive_of(const std::string& polarization, double amplitude, double hbar_omega) {
  return to_fourier(DriveSpec{hbar_omega, amplitude, polarization_from_name(polarization)});
}

py::dict snapshot_dict(const LevelSnapshot& s) {
  py::dict d;
  d["energies"] = s.energies;
  d["states"] = s.states;
  d["gradients"] = s.gradients;
  d["multiplicity"] = s.multiplicity;
  d["theta"] = s.theta;
  d["min_overlap"] = s.min_overlap;
  return d;
}

}  // namespace

PYBIND11_MODULE(_floqspin, m) {
  m.doc() = "Floquet spin-Hamiltonian engine (compiled core)";
  m.attr("__version__") = FLOQSPIN_VERSION;
  m.attr("MU_B") = units::kBohrMagneton;
  m.attr("HBAR") = units::kHbar;

  py::register_exception<InconsistentInput>(m, "InconsistentInput", PyExc_ValueError);
  py::register_exception<UnsupportedSpin>(m, "UnsupportedSpin", PyExc_ValueError);
  py::register_exception<UnsupportedParameters>(m, "UnsupportedParameters", PyExc_ValueError);
  py::register_exception<BranchAmbiguity>(m, "BranchAmbiguity", PyExc_RuntimeError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  py::class_<StaticParams>(m, "StaticParams")
      .def(py::init(&make_params), py::arg("spin") = 1.0, py::arg("D") = 5.0, py::arg("E") = 0.0,
           py::arg("g") = Mat3(2.0 * Mat3::Identity()), py::arg("Bs") = Vec3(Vec3::Zero()))
      .def_readwrite("spin", &StaticParams::spin)
      .def_readwrite("D", &StaticParams::D)
      .def_readwrite("E", &StaticParams::E)
      .def_readwrite("g", &StaticParams::g)
      .def_readwrite("Bs", &StaticParams::Bs)
      .def("warnings", &StaticParams::warnings);

  m.def(
      "spin_operators",
      [](double spin) {
        const auto ops = build_spin_operators(spin);
        return py::make_tuple(ops.sx(), ops.sy(), ops.sz());
      },
      py::arg("spin"), "(s_x, s_y, s_z) in the |S, m> basis, m descending");
  m.def(
      "static_hamiltonian", [](const StaticParams& p) { return build_static_hamiltonian(p, build_spin_operators(p.spin)); },
      py::arg("params"));
  m.def(
      "solve_static",
      [](const StaticParams& p) {
        const auto s = solve_static(p);
        return py::make_tuple(s.energies, s.states);
      },
      py::arg("params"), "Ascending energies [ueV] and eigenvector columns");

  m.def("polarization_names", &polarization_names);
  m.def("linear_polarization_names", &linear_polarization_names);
  m.def("circular_polarization_names", &circular_polarization_names);
  m.def(
      "polarization",
      [](const std::string& name) {
        const auto p = polarization_from_name(name);
        return py::make_tuple(p.cos, p.sin);
      },
      py::arg("name"), "(P_cos, P_sin) unit vectors");
  m.def(
      "field_at",
      [](const std::string& pol, double amplitude, double hbar_omega, double t) {
        return field_at(drive_of(pol, amplitude, hbar_omega), hbar_omega, t);
      },
      py::arg("polarization"), py::arg("amplitude"), py::arg("hbar_omega") = 20.0, py::arg("t"));

  m.def(
      "quasienergies",
      [](const StaticParams& p, const std::string& pol, double amplitude, double hbar_omega, int n_floquet) {
        const auto sol = solve_floquet(p, drive_of(pol, amplitude, hbar_omega), hbar_omega, n_floquet);
        return sol.quasienergies;
      },
      py::arg("params"), py::arg("polarization"), py::arg("amplitude"), py::arg("hbar_omega") = 20.0,
      py::arg("n_floquet") = kDefaultFloquetCutoff, "Full ascending Floquet spectrum");
  m.def(
      "levels",
      [](const StaticParams& p, const std::string& pol, double amplitude, double hbar_omega, double step,
         int n_floquet) {
        TrackingSettings ts;
        ts.max_step = step;
        ts.n_floquet = n_floquet;
        return snapshot_dict(continued_levels(p, polarization_from_name(pol), hbar_omega, amplitude, ts));
      },
      py::arg("params"), py::arg("polarization"), py::arg("amplitude"), py::arg("hbar_omega") = 20.0,
      py::arg("step") = 1.0, py::arg("n_floquet") = kDefaultFloquetCutoff,
      "Physical quasienergies and Hellmann-Feynman gradients reached by amplitude continuation");
  m.def(
      "track",
      [](const StaticParams& p, const std::string& pol, const std::vector<double>& grid, double hbar_omega,
         double step, bool gradients) {
        TrackingSettings ts;
        ts.max_step = step;
        ts.compute_gradients = gradients;
        const auto tr = track_levels(p, monochromatic_ramp(polarization_from_name(pol)), hbar_omega, grid, ts);
        py::dict d;
        d["amplitudes"] = tr.amplitudes;
        d["energies"] = tr.energies;
        if (gradients) {
          std::vector<std::vector<Vec3>> g;
          for (const auto& row : tr.gradients) {
            auto& out = g.emplace_back();
            for (const auto& lg : row) out.push_back(lg.gradient);
          }
          d["gradients"] = g;
        }
        std::vector<std::string> warnings;
        for (const auto& w : tr.warnings) warnings.push_back(w.message);
        d["warnings"] = warnings;
        return d;
      },
      py::arg("params"), py::arg("polarization"), py::arg("grid"), py::arg("hbar_omega") = 20.0, py::arg("step") = 1.0,
      py::arg("gradients") = false);
  m.def("fold", &fold_quasienergy, py::arg("value"), py::arg("hbar_omega") = 20.0);

  m.def(
      "effective_hamiltonian",
      [](const StaticParams& p, const std::string& pol, double amplitude, double hbar_omega, int time_steps,
         double t0) {
        const auto h =
            effective_hamiltonian_exact(p, drive_of(pol, amplitude, hbar_omega), hbar_omega, {time_steps, t0});
        py::dict d;
        d["matrix"] = h.matrix;
        if (h.coefficients) {
          d["coefficients"] = *h.coefficients;
          d["d_tensor"] = h.d_tensor;
          d["zeeman_field"] = h.zeeman_field;
        }
        return d;
      },
      py::arg("params"), py::arg("polarization"), py::arg("amplitude"), py::arg("hbar_omega") = 20.0,
      py::arg("time_steps") = 100, py::arg("t0") = 0.0, "Stroboscopic effective Hamiltonian of the one-cycle propagator");
  m.def(
      "vanvleck",
      [](const StaticParams& p, const std::string& pol, double amplitude, double hbar_omega) {
        const auto r = vanvleck_spin(p, drive_of(pol, amplitude, hbar_omega), hbar_omega);
        py::dict d;
        d["matrix"] = r.h_eff;
        d["zero_field"] = r.zero_field;
        d["delta_zero_field"] = r.delta_zero_field;
        d["zeeman"] = r.zeeman;
        d["neq"] = r.neq;
        d["effective_field"] = r.field.total();
        d["first_order_field"] = r.field.first_order;
        return d;
      },
      py::arg("params"), py::arg("polarization"), py::arg("amplitude"), py::arg("hbar_omega") = 20.0,
      "Closed-form second-order high-frequency effective Hamiltonian");

  m.def(
      "smfs",
      [](const StaticParams& p, const std::string& pol, double amplitude, double hbar_omega, double step) {
        const auto r = smfs_sweep(p, polarization_from_name(pol), hbar_omega, {0.0, amplitude}, SmfsSettings{}, step)
                           .back();
        py::dict d;
        d["Bs"] = r.bs_opt;
        d["theta"] = r.theta;
        d["energies"] = r.energies;
        d["gradients"] = r.gradients;
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("params"), py::arg("polarization"), py::arg("amplitude"), py::arg("hbar_omega") = 20.0,
      py::arg("step") = 5.0, "Static field minimizing the summed gradient magnitudes; starts from Bs = 0, B_F = 0");
  m.def(
      "cancel",
      [](const StaticParams& p, const std::string& pol, double amplitude, double hbar_omega, double step,
         double tolerance, int max_iterations) {
        CancellationSettings s;
        s.tolerance = tolerance;
        s.max_iterations = max_iterations;
        const auto r = cancellation_sweep(p, polarization_from_name(pol), hbar_omega, {0.0, amplitude}, s, step).back();
        py::dict d;
        d["Bs"] = r.bs_opt;
        d["residual"] = r.residual;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["matrix"] = r.h_eff.matrix;
        return d;
      },
      py::arg("params"), py::arg("polarization"), py::arg("amplitude"), py::arg("hbar_omega") = 20.0,
      py::arg("step") = 1.0, py::arg("tolerance") = 1e-4, py::arg("max_iterations") = 500,
      "Static field nulling the effective Zeeman vector, warm-started along the amplitude");
}
