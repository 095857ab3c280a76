// Python bindings: configuration, one-step and batch runs, diagnostics and
// the pointwise constitutive kernels.  Fields cross the boundary as numpy
// arrays shaped (components, nz, ny, nx).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qtensor/checks.hpp"
#include "qtensor/config.hpp"
#include "qtensor/diagnostics.hpp"
#include "qtensor/errors.hpp"
#include "qtensor/presets.hpp"
#include "qtensor/simulate.hpp"
#include "qtensor/snapshot.hpp"

namespace py = pybind11;
using namespace qtensor;

namespace {

template <int N>
py::array_t<double> to_numpy(const Field<N>& f) {
  const GridSpec& g = f.grid();
  py::array_t<double> a({static_cast<py::ssize_t>(N), static_cast<py::ssize_t>(g.nz), static_cast<py::ssize_t>(g.ny),
                         static_cast<py::ssize_t>(g.nx)});
  std::copy(f.data().begin(), f.data().end(), a.mutable_data());
  return a;
}

template <int N>
void from_numpy(Field<N>& f, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (static_cast<std::size_t>(a.size()) != f.size())
    throw std::invalid_argument("array has " + std::to_string(a.size()) + " values, field needs " +
                                std::to_string(f.size()));
  std::copy(a.data(), a.data() + a.size(), f.data().begin());
}

Mat3d to_mat(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != 3 || a.shape(1) != 3) throw std::invalid_argument("expected a 3x3 array");
  Mat3d m;
  std::copy(a.data(), a.data() + 9, m.m.begin());
  return m;
}

py::array_t<double> from_mat(const Mat3d& m) {
  py::array_t<double> a({3, 3});
  std::copy(m.m.begin(), m.m.end(), a.mutable_data());
  return a;
}

py::dict record_dict(const DiagnosticsRecord& r) {
  py::dict d;
  const auto names = record_columns();
  const auto values = record_values(r);
  for (std::size_t k = 0; k < names.size(); ++k) d[py::str(names[k])] = values[k];
  return d;
}

py::dict report_dict(const CriterionReport& r) {
  auto row = [](const CriterionRow& c) {
    py::dict d;
    d["family"] = c.family;
    d["label"] = c.label;
    d["q"] = c.q;
    d["r"] = c.r;
    d["in_range"] = c.in_range;
    d["available"] = c.available;
    d["value"] = c.value;
    return d;
  };
  py::list rows;
  for (const auto& c : r.rows) rows.append(row(c));
  py::list gammas;
  for (const auto& g : r.gamma_rows) {
    py::dict d;
    d["q"] = g.q;
    d["gamma"] = g.gamma;
    d["lap_q"] = row(g.lap_q);
    d["dt_q"] = row(g.dt_q);
    gammas.append(d);
  }
  py::dict out;
  out["rows"] = rows;
  out["gamma_rows"] = gammas;
  out["grad_q_linf_l3"] = row(r.grad_q_linf_l3);
  out["grad_q_l3_l9"] = row(r.grad_q_l3_l9);
  out["t_first"] = r.t_first;
  out["t_last"] = r.t_last;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Q-tensor / incompressible Navier-Stokes simulator core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<NumericalBlowup>(m, "NumericalBlowup", PyExc_RuntimeError);
  py::register_exception<StepRejected>(m, "StepRejected", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::enum_<BoundaryTag>(m, "BoundaryTag").value("Wall", BoundaryTag::Wall).value("Periodic", BoundaryTag::Periodic);
  py::enum_<Stretching>(m, "Stretching")
      .value("FullGradient", Stretching::FullGradient)
      .value("Corotational", Stretching::Corotational);
  py::enum_<PotentialKind>(m, "PotentialKind")
      .value("FF", PotentialKind::FF)
      .value("FZ", PotentialKind::FZ)
      .value("M1", PotentialKind::M1);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init(&GridSpec::make), py::arg("nx"), py::arg("ny"), py::arg("nz"), py::arg("lx") = 1.0,
           py::arg("ly") = 1.0, py::arg("lz") = 1.0,
           py::arg("bc") = std::array<BoundaryTag, 3>{BoundaryTag::Periodic, BoundaryTag::Periodic,
                                                      BoundaryTag::Periodic})
      .def_readonly("nx", &GridSpec::nx)
      .def_readonly("ny", &GridSpec::ny)
      .def_readonly("nz", &GridSpec::nz)
      .def_readonly("lx", &GridSpec::lx)
      .def_readonly("ly", &GridSpec::ly)
      .def_readonly("lz", &GridSpec::lz)
      .def_readonly("bc", &GridSpec::bc)
      .def_property_readonly("h_min", &GridSpec::h_min)
      .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double nu, double gamma, double epsilon, double a, double b, double c) {
             ModelParams p{nu, gamma, epsilon, a, b, c};
             validate(p);
             return p;
           }),
           py::arg("nu") = 1.0, py::arg("gamma") = 1.0, py::arg("epsilon") = 1.0, py::arg("a") = 0.0,
           py::arg("b") = 0.0, py::arg("c") = 1.0)
      .def_readwrite("nu", &ModelParams::nu)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def_readwrite("epsilon", &ModelParams::epsilon)
      .def_readwrite("a", &ModelParams::a)
      .def_readwrite("b", &ModelParams::b)
      .def_readwrite("c", &ModelParams::c);

  py::class_<VariantConfig>(m, "VariantConfig")
      .def(py::init([](Stretching s, PotentialKind k, double theta) { return VariantConfig{s, k, theta}; }),
           py::arg("stretching") = Stretching::Corotational, py::arg("potential") = PotentialKind::FZ,
           py::arg("m1_theta") = 1.0)
      .def_readwrite("stretching", &VariantConfig::stretching)
      .def_readwrite("potential", &VariantConfig::potential)
      .def_readwrite("m1_theta", &VariantConfig::m1_theta);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("grid", &RunConfig::grid)
      .def_readwrite("params", &RunConfig::params)
      .def_readwrite("variants", &RunConfig::variants)
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("source") = "<config>");
  m.def("load_config", &load_config, py::arg("path"));
  m.def("serialize_config", &serialize_config);
  m.def("desk_config", &desk_config, py::arg("n") = 48);

  py::class_<SimState>(m, "SimState")
      .def_readwrite("t", &SimState::t)
      .def_readwrite("step_index", &SimState::step_index)
      .def_property_readonly("grid", &SimState::grid)
      .def_property(
          "u", [](const SimState& s) { return to_numpy(s.u); },
          [](SimState& s, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
            from_numpy(s.u, a);
          })
      .def_property(
          "p", [](const SimState& s) { return to_numpy(s.p); },
          [](SimState& s, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
            from_numpy(s.p, a);
          })
      .def_property(
          "q", [](const SimState& s) { return to_numpy(s.q); },
          [](SimState& s, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
            from_numpy(s.q, a);
          });
  m.def("zero_state", &SimState::zero, py::arg("grid"));
  m.def("initial_state", &initial_state, py::arg("config"));

  py::class_<Stepper>(m, "Stepper")
      .def(py::init([](const GridSpec& g, const ModelParams& p, const VariantConfig& v, bool couple_flow) {
             return Stepper(g, p, v, StepOptions{couple_flow, false});
           }),
           py::arg("grid"), py::arg("params"), py::arg("variants") = VariantConfig{}, py::arg("couple_flow") = true)
      .def(
          "step",
          [](Stepper& st, const SimState& s, double dt, bool viscous_implicit) {
            StepControl c;
            c.dt = dt;
            c.cfl_target = 1.0;
            c.viscous_implicit = viscous_implicit;
            return st.step(s, c);
          },
          py::arg("state"), py::arg("dt"), py::arg("viscous_implicit") = false);

  m.def(
      "simulate",
      [](const RunConfig& cfg, const std::filesystem::path& out_dir) {
        const SimulateResult r = simulate(cfg, out_dir);
        py::dict d;
        d["steps"] = r.steps;
        d["t"] = r.final_state.t;
        d["max_residual"] = r.max_residual;
        d["csv"] = r.csv;
        d["snapshots"] = r.snapshots;
        d["report"] = report_dict(r.report);
        d["final_state"] = r.final_state;
        return d;
      },
      py::arg("config"), py::arg("out_dir"));

  m.def(
      "energy_ledger",
      [](const SimState& s, const ModelParams& p, const VariantConfig& v) { return record_dict(energy_ledger(s, p, v)); },
      py::arg("state"), py::arg("params"), py::arg("variants") = VariantConfig{});
  m.def("max_principle_bound", [](const SimState& s, const ModelParams& p) { return max_principle_bound(s.q, p); });
  m.def("conjugate_exponent", &conjugate_exponent);
  m.def("serrin_exponent", &serrin_exponent);
  m.def("gamma_exponent", &gamma_exponent);
  m.def("parse_exponent", &parse_exponent);

  m.def(
      "read_snapshot",
      [](const std::filesystem::path& path, std::array<BoundaryTag, 3> bc) {
        Snapshot snap = read_snapshot(path, bc);
        SimState s;
        s.t = snap.t;
        s.p = std::move(snap.p);
        s.u = std::move(snap.u);
        s.q = std::move(snap.q);
        return s;
      },
      py::arg("path"),
      py::arg("bc") = std::array<BoundaryTag, 3>{BoundaryTag::Periodic, BoundaryTag::Periodic, BoundaryTag::Periodic});

  m.def(
      "potential",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& q, const ModelParams& p,
         const VariantConfig& v) { return from_mat(potential_f(to_mat(q), p, v)); },
      py::arg("q"), py::arg("params"), py::arg("variants") = VariantConfig{});
  m.def(
      "bulk_energy_density",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& q, const ModelParams& p) {
        return bulk_F(to_mat(q), p);
      },
      py::arg("q"), py::arg("params"));
}
