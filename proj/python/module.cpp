#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "nlkg/blowup.hpp"
#include "nlkg/cones.hpp"
#include "nlkg/conslaws.hpp"
#include "nlkg/initial_data.hpp"
#include "nlkg/ode_oracle.hpp"
#include "nlkg/profiles.hpp"

namespace py = pybind11;
using namespace nlkg;

namespace {

std::vector<py::ssize_t> shape_of(const GridSpec& g) {
  return std::vector<py::ssize_t>(static_cast<std::size_t>(g.dim), static_cast<py::ssize_t>(g.n));
}

py::array_t<double> to_array(const Field& f) {
  py::array_t<double> out(shape_of(f.grid()));
  auto src = f.values();
  std::copy(src.begin(), src.end(), out.mutable_data());
  return out;
}

Field to_field(const GridSpec& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != g.dim) throw DomainError("array rank does not match the grid dimension");
  for (int k = 0; k < g.dim; ++k)
    if (a.shape(k) != static_cast<py::ssize_t>(g.n)) throw DomainError("array shape does not match the grid");
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> vec(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict series_dict(const DiagnosticSeries& s) {
  py::dict d;
  d["name"] = s.name;
  d["times"] = vec(s.times);
  d["values"] = vec(s.values);
  return d;
}

}  // namespace

PYBIND11_MODULE(_nlkg, m) {
  m.doc() = "Pseudo-spectral NLKG solver with conservation-law, light-cone, blowup and profile diagnostics";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<CorruptionError>(m, "CorruptionError", error.ptr());
  auto convergence = py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());
  py::register_exception<StagnationError>(m, "StagnationError", convergence.ptr());
  py::register_exception<ExtractionExhausted>(m, "ExtractionExhausted", error.ptr());

  py::class_<GridSpec>(m, "Grid")
      .def(py::init([](int dim, std::size_t n, double length) {
             GridSpec g{dim, n, length};
             g.validate();
             return g;
           }),
           py::arg("dim"), py::arg("n"), py::arg("length"))
      .def_readonly("dim", &GridSpec::dim)
      .def_readonly("n", &GridSpec::n)
      .def_readonly("length", &GridSpec::box_length)
      .def_property_readonly("spacing", &GridSpec::spacing)
      .def_property_readonly("volume", &GridSpec::volume)
      .def("coordinates", [](const GridSpec& g) {
        std::vector<double> x(g.n);
        for (std::size_t i = 0; i < g.n; ++i) x[i] = g.coordinate(i);
        return vec(x);
      })
      .def("__repr__", [](const GridSpec& g) {
        return "Grid(dim=" + std::to_string(g.dim) + ", n=" + std::to_string(g.n) + ", length=" +
               std::to_string(g.box_length) + ")";
      });

  py::class_<Physics>(m, "Physics")
      .def(py::init([](double mass, double exponent) { return Physics{mass, exponent}; }), py::arg("mass"),
           py::arg("exponent"))
      .def_readwrite("mass", &Physics::mass)
      .def_readwrite("exponent", &Physics::exponent);

  py::enum_<Regime>(m, "Regime")
      .value("sub_conformal", Regime::sub_conformal)
      .value("conformal", Regime::conformal)
      .value("super_conformal", Regime::super_conformal);

  py::class_<CriticalParams>(m, "CriticalParams")
      .def_readonly("dim", &CriticalParams::dim)
      .def_readonly("exponent", &CriticalParams::exponent)
      .def_readonly("s_c", &CriticalParams::s_c)
      .def_readonly("alpha", &CriticalParams::alpha)
      .def_readonly("regime", &CriticalParams::regime);
  m.def("critical_exponent", &critical_exponent, py::arg("dim"), py::arg("p"));

  py::class_<State>(m, "State")
      .def(py::init([](const GridSpec& g, const Physics& ph, py::array_t<double> u, py::array_t<double> v, double t) {
             State s{to_field(g, u), to_field(g, v), t, ph};
             s.validate();
             return s;
           }),
           py::arg("grid"), py::arg("physics"), py::arg("u"), py::arg("v"), py::arg("time") = 0.0)
      .def_property_readonly("u", [](const State& s) { return to_array(s.u); })
      .def_property_readonly("v", [](const State& s) { return to_array(s.v); })
      .def_readonly("time", &State::time)
      .def_readonly("physics", &State::physics)
      .def_property_readonly("grid", [](const State& s) { return s.grid(); });

  m.def("gaussian", [](const GridSpec& g, const Physics& ph, double a, double w, Point c) { return gaussian(g, ph, a, w, c); },
        py::arg("grid"), py::arg("physics"), py::arg("amplitude"), py::arg("width"), py::arg("center") = Point{});
  m.def("constant", [](const GridSpec& g, const Physics& ph, double a, double b) { return constant(g, ph, a, b); },
        py::arg("grid"), py::arg("physics"), py::arg("amplitude"), py::arg("velocity") = 0.0);
  m.def("plane_wave",
        [](const GridSpec& g, const Physics& ph, std::array<int, 3> k, double a, bool travelling) {
          return plane_wave(g, ph, k, a, travelling);
        },
        py::arg("grid"), py::arg("physics"), py::arg("wave_index"), py::arg("amplitude"), py::arg("travelling") = false);
  m.def("negative_energy",
        [](const GridSpec& g, const Physics& ph, double a, double w) { return negative_energy(g, ph, a, w); },
        py::arg("grid"), py::arg("physics"), py::arg("amplitude"), py::arg("width"));
  m.def("zero_state", [](const GridSpec& g, const Physics& ph) { return zero_state(g, ph); }, py::arg("grid"),
        py::arg("physics"));

  m.def("energy", &energy, py::arg("state"));
  m.def("lebesgue_norm",
        [](const GridSpec& g, py::array_t<double> f, double q) { return lebesgue_norm(to_field(g, f), q).value; },
        py::arg("grid"), py::arg("field"), py::arg("q"));
  m.def("sobolev_norm",
        [](const GridSpec& g, py::array_t<double> f, double s, bool homogeneous, double mass) {
          return sobolev_norm(to_field(g, f), s, homogeneous, mass);
        },
        py::arg("grid"), py::arg("field"), py::arg("s"), py::arg("homogeneous") = true, py::arg("mass") = 1.0);
  m.def("lp_project",
        [](const GridSpec& g, py::array_t<double> f, double N, const std::string& mode) {
          LpMode md = mode == "leq" ? LpMode::leq : mode == "gt" ? LpMode::gt : mode == "band" ? LpMode::band
                    : throw DomainError("lp_project: mode must be leq, gt or band");
          return to_array(lp_project(to_field(g, f), N, md));
        },
        py::arg("grid"), py::arg("field"), py::arg("frequency"), py::arg("mode"));
  m.def("dyadic_frequencies", [](const GridSpec& g) { return vec(dyadic_frequencies(g)); }, py::arg("grid"));

  py::enum_<Termination>(m, "Termination")
      .value("reached_t_max", Termination::reached_t_max)
      .value("blowup_detected", Termination::blowup_detected)
      .value("dt_underflow", Termination::dt_underflow)
      .value("corrupted", Termination::corrupted);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("dt_init", &SolverConfig::dt_init)
      .def_readwrite("dt_min", &SolverConfig::dt_min)
      .def_readwrite("cfl_safety", &SolverConfig::cfl_safety)
      .def_readwrite("theta", &SolverConfig::theta)
      .def_readwrite("adaptive", &SolverConfig::adaptive)
      .def_readwrite("blowup_threshold", &SolverConfig::blowup_threshold)
      .def_readwrite("t_max", &SolverConfig::t_max)
      .def_readwrite("snapshot_stride", &SolverConfig::snapshot_stride)
      .def_readwrite("monitor_stride", &SolverConfig::monitor_stride)
      .def_readwrite("store_snapshots", &SolverConfig::store_snapshots)
      .def_readwrite("nonlinear", &SolverConfig::nonlinear);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("snapshots", &Trajectory::snapshots)
      .def_readonly("termination", &Trajectory::termination)
      .def_readonly("last", &Trajectory::last)
      .def_readonly("steps", &Trajectory::steps)
      .def("series", [](const Trajectory& t, const std::string& name) {
        const auto& s = t.at(name);
        return py::make_tuple(vec(s.times), vec(s.values));
      })
      .def("series_names", [](const Trajectory& t) {
        std::vector<std::string> names;
        for (const auto& [k, _] : t.series) names.push_back(k);
        return names;
      });

  m.def("evolve", [](const State& s, const SolverConfig& c) {
    py::gil_scoped_release release;
    return evolve(s, c);
  }, py::arg("state"), py::arg("config"));

  m.def("lifespan_upper", &lifespan_upper, py::arg("amplitude"), py::arg("p"));

  py::class_<BlowupReport>(m, "BlowupReport")
      .def_readonly("detected", &BlowupReport::detected)
      .def_readonly("t_star", &BlowupReport::t_star)
      .def_readonly("rate_exponents", &BlowupReport::rate_exponents)
      .def_readonly("fit_residual", &BlowupReport::fit_residual)
      .def_readonly("diagnostics", &BlowupReport::diagnostics);
  m.def("detect_and_fit", [](const Trajectory& t) { return detect_and_fit(t); }, py::arg("trajectory"));
  m.def("critical_norm_series", [](const Trajectory& t) { return series_dict(critical_norm_series(t)); },
        py::arg("trajectory"));

  py::class_<ConcavityReport>(m, "ConcavityReport")
      .def_readonly("inequality_violations", &ConcavityReport::inequality_violations)
      .def_readonly("concavity_violations", &ConcavityReport::concavity_violations)
      .def_readonly("checked", &ConcavityReport::checked);
  m.def("concavity_check",
        [](const Trajectory& t, double drift_tol, double tol) {
          return concavity_check(resolved_window(mass_diagnostics(t), drift_tol), tol);
        },
        py::arg("trajectory"), py::arg("drift_tol") = 1e-2, py::arg("tol") = 1e-6);

  py::class_<ConeSpec>(m, "Cone")
      .def(py::init([](Point vertex, double top_time, double vertex_time, bool reflected) {
             return ConeSpec{vertex, top_time, vertex_time, reflected};
           }),
           py::arg("vertex") = Point{}, py::arg("top_time") = 1.0, py::arg("vertex_time") = 0.0,
           py::arg("reflected") = false)
      .def_readwrite("top_time", &ConeSpec::top_time)
      .def_readwrite("vertex_time", &ConeSpec::vertex_time)
      .def_readwrite("reflected", &ConeSpec::reflected);
  m.def("L_functional", &L_functional, py::arg("state"), py::arg("cone"));
  m.def("Z_functional", &Z_functional, py::arg("state"), py::arg("cone"));
  m.def("lyapunov_series", [](const Trajectory& t, const ConeSpec& c) { return series_dict(lyapunov_series(t, c)); },
        py::arg("trajectory"), py::arg("cone"));

  py::class_<SlabIdentity>(m, "SlabIdentity")
      .def_readonly("lhs", &SlabIdentity::lhs)
      .def_readonly("rhs", &SlabIdentity::rhs)
      .def_readonly("gap", &SlabIdentity::gap);
  m.def("charge_slab_identity", &charge_slab_identity, py::arg("trajectory"), py::arg("t0"), py::arg("t1"));

  py::class_<DecouplingGaps>(m, "DecouplingGaps")
      .def_readonly("h1", &DecouplingGaps::h1)
      .def_readonly("hsc", &DecouplingGaps::hsc)
      .def_readonly("lp", &DecouplingGaps::lp)
      .def_readonly("separation_nondecreasing", &DecouplingGaps::separation_nondecreasing);

  m.def(
      "decompose",
      [](const GridSpec& g, const std::vector<py::array_t<double>>& members, double p, std::size_t j_max, double tol) {
        FunctionFamily fam;
        for (const auto& a : members) fam.members.push_back(to_field(g, a));
        const auto params = critical_exponent(g.dim, p);
        const auto dec = bubble_decompose(fam, params, j_max, tol);
        py::list profiles, centers;
        for (const auto& b : dec.bubbles) {
          profiles.append(to_array(b.profile));
          centers.append(b.centers);
        }
        py::dict out;
        out["profiles"] = profiles;
        out["centers"] = centers;
        out["epsilon"] = vec(dec.epsilon);
        out["converged"] = dec.converged;
        out["gaps"] = decoupling_audit(dec, fam, params);
        return out;
      },
      py::arg("grid"), py::arg("members"), py::arg("p"), py::arg("j_max"), py::arg("tol"));
  m.def(
      "synthetic_family",
      [](const GridSpec& g, const std::vector<std::pair<double, double>>& bubbles, const std::vector<long>& seps) {
        std::vector<SyntheticBubble> bs;
        for (const auto& [a, w] : bubbles) bs.push_back({a, w});
        const auto s = synthetic_family(g, bs, seps);
        py::list members;
        for (const auto& f : s.family.members) members.append(to_array(f));
        return py::make_tuple(members, s.centers);
      },
      py::arg("grid"), py::arg("bubbles"), py::arg("separations"));
}
