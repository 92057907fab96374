#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fhl/errors.hpp"
#include "fhl/field.hpp"
#include "fhl/fractional_flow.hpp"
#include "fhl/fractional_ops.hpp"
#include "fhl/local_flow.hpp"
#include "fhl/oscillation.hpp"

namespace py = pybind11;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

// Arrays cross the boundary as (points, m); a 1-D array is read as m = 1.
fhl::Field to_field(const fhl::Grid& g, const Array& a) {
  g.validate();
  const auto pts = g.space_points();
  if (a.ndim() == 1 && static_cast<std::size_t>(a.shape(0)) == pts)
    return fhl::Field(g, 1, std::vector<double>(a.data(), a.data() + pts));
  if (a.ndim() == 2 && static_cast<std::size_t>(a.shape(0)) == pts && a.shape(1) >= 1)
    return fhl::Field(g, static_cast<int>(a.shape(1)), std::vector<double>(a.data(), a.data() + a.size()));
  throw fhl::GridMismatchError("array shape does not match the grid (expected (points,) or (points, m))");
}

Array to_array(const fhl::Field& f) {
  Array out({static_cast<py::ssize_t>(f.points()), static_cast<py::ssize_t>(f.m())});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

py::tuple trajectory_tuple(const fhl::Trajectory& t) {
  Array frames({static_cast<py::ssize_t>(t.size()), static_cast<py::ssize_t>(t.frames.front().points()),
                static_cast<py::ssize_t>(t.m())});
  double* dst = frames.mutable_data();
  for (const auto& f : t.frames) dst = std::copy(f.values().begin(), f.values().end(), dst);
  return py::make_tuple(py::array(py::cast(t.times)), frames);
}

fhl::Trajectory from_frames(const fhl::Grid& g, const std::vector<double>& times, const Array& frames) {
  if (frames.ndim() != 3 || static_cast<std::size_t>(frames.shape(0)) != times.size())
    throw fhl::GridMismatchError("frames must have shape (len(times), points, m)");
  fhl::Trajectory t;
  t.times = times;
  const auto per = static_cast<std::size_t>(frames.shape(1) * frames.shape(2));
  for (std::size_t j = 0; j < times.size(); ++j) {
    Array one({frames.shape(1), frames.shape(2)});
    std::copy(frames.data() + j * per, frames.data() + (j + 1) * per, one.mutable_data());
    t.frames.push_back(to_field(g, one));
  }
  return t;
}

}  // namespace

PYBIND11_MODULE(_fhl, m) {
  m.doc() = "fhl core: periodic fields, local and fractional flows, oscillation cascades";

  auto base = py::register_exception<fhl::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<fhl::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<fhl::HypothesisError>(m, "HypothesisError", base.ptr());

  py::class_<fhl::Grid>(m, "Grid")
      .def(py::init(&fhl::Grid::space), py::arg("n"), py::arg("N"), py::arg("L"))
      .def_readonly("n", &fhl::Grid::n)
      .def_readonly("N", &fhl::Grid::N)
      .def_readonly("L", &fhl::Grid::L)
      .def_property_readonly("h", &fhl::Grid::h)
      .def_property_readonly("points", &fhl::Grid::space_points)
      .def("coords", [](const fhl::Grid& g) {
        Array out({static_cast<py::ssize_t>(g.space_points()), static_cast<py::ssize_t>(g.n)});
        for (std::size_t p = 0; p < g.space_points(); ++p)
          for (int i = 0; i < g.n; ++i) out.mutable_at(p, i) = g.point(p)[i];
        return out;
      })
      .def("__repr__", [](const fhl::Grid& g) {
        return "Grid(n=" + std::to_string(g.n) + ", N=" + std::to_string(g.N) + ", L=" + std::to_string(g.L) + ")";
      });

  m.def(
      "frac_laplacian_spectral",
      [](const fhl::Grid& g, const Array& u, double s) {
        return to_array(fhl::frac_laplacian_spectral(to_field(g, u), fhl::FracParams::make(s, g.n)));
      },
      py::arg("grid"), py::arg("u"), py::arg("s"));
  m.def(
      "frac_laplacian_quadrature",
      [](const fhl::Grid& g, const Array& u, double s) {
        return to_array(fhl::frac_laplacian_quadrature(to_field(g, u), fhl::FracParams::make(s, g.n)));
      },
      py::arg("grid"), py::arg("u"), py::arg("s"));
  m.def(
      "bilinear_B",
      [](const fhl::Grid& g, const Array& u, const Array& w, double s, bool continuum) {
        const auto mode = continuum ? fhl::BMode::continuum_quadrature : fhl::BMode::kernel_consistent;
        return to_array(fhl::bilinear_B(to_field(g, u), to_field(g, w), fhl::FracParams::make(s, g.n), mode));
      },
      py::arg("grid"), py::arg("u"), py::arg("w"), py::arg("s"), py::arg("continuum") = false);
  m.def(
      "carre_du_champ_residual",
      [](const fhl::Grid& g, const Array& u, double s) {
        return fhl::carre_du_champ_residual(to_field(g, u), fhl::FracParams::make(s, g.n));
      },
      py::arg("grid"), py::arg("u"), py::arg("s"));

  m.def(
      "run_local",
      [](const fhl::Grid& g, const Array& u0, double T, double dt, int sample_every, double t_start) {
        fhl::LocalRunOptions opt;
        opt.sample_every = sample_every;
        opt.t_start = t_start;
        fhl::LocalRun run;
        {
          py::gil_scoped_release release;
          run = fhl::run_local(to_field(g, u0), T, dt > 0.0 ? dt : fhl::local_dt_max(g), opt);
        }
        return trajectory_tuple(run.trajectory);
      },
      py::arg("grid"), py::arg("u0"), py::arg("T"), py::arg("dt") = 0.0, py::arg("sample_every") = 1,
      py::arg("t_start") = 0.0,
      "Harmonic-map heat flow; returns (times, frames) with frames shaped (samples, points, m).");
  m.def(
      "run_fractional",
      [](const fhl::Grid& g, const Array& u0, double s, double T, double dt, int sample_every, double t_start) {
        const auto p = fhl::FracParams::make(s, g.n);
        const auto u = to_field(g, u0);
        fhl::FractionalRunOptions opt;
        opt.sample_every = sample_every;
        opt.t_start = t_start;
        fhl::FractionalRun run;
        {
          py::gil_scoped_release release;
          run = fhl::run_fractional(u, T, dt > 0.0 ? dt : fhl::fractional_dt_max(g, p), p,
                                    fhl::frac_harmonic_rhs(u.sup_norm()), opt);
        }
        const py::tuple tf = trajectory_tuple(run.trajectory);
        return py::make_tuple(tf[0], tf[1], run.stats.total_hits());
      },
      py::arg("grid"), py::arg("u0"), py::arg("s"), py::arg("T"), py::arg("dt") = 0.0,
      py::arg("sample_every") = 1, py::arg("t_start") = 0.0,
      "Fractional harmonic-map flow; returns (times, frames, hypothesis_hits).");

  py::class_<fhl::CascadeLevel>(m, "CascadeLevel")
      .def_readonly("k", &fhl::CascadeLevel::k)
      .def_readonly("radius", &fhl::CascadeLevel::radius)
      .def_readonly("t_lo", &fhl::CascadeLevel::t_lo)
      .def_readonly("t_hi", &fhl::CascadeLevel::t_hi)
      .def_readonly("M_k", &fhl::CascadeLevel::M_k)
      .def_readonly("rho", &fhl::CascadeLevel::rho)
      .def_readonly("samples", &fhl::CascadeLevel::samples)
      .def_readonly("tail", &fhl::CascadeLevel::tail);
  py::class_<fhl::CascadeReport>(m, "CascadeReport")
      .def_readonly("M", &fhl::CascadeReport::M)
      .def_readonly("levels", &fhl::CascadeReport::levels)
      .def_readonly("max_level", &fhl::CascadeReport::max_level)
      .def_readonly("degenerate", &fhl::CascadeReport::degenerate)
      .def_readonly("alpha_fit", &fhl::CascadeReport::alpha_fit)
      .def_readonly("delta_witness", &fhl::CascadeReport::delta_witness)
      .def_readonly("C0", &fhl::CascadeReport::C0);

  m.def(
      "oscillation_cascade",
      [](const fhl::Grid& g, const std::vector<double>& times, const Array& frames, double r, double s,
         bool fractional, double anchor_x, double anchor_t, int levels) {
        fhl::CascadeOptions opt;
        opt.anchor_x = {anchor_x, 0.0};
        opt.anchor_t = anchor_t;
        opt.max_levels = levels;
        return fhl::oscillation_cascade(from_frames(g, times, frames), r, s,
                                        fractional ? fhl::CascadeMode::fractional : fhl::CascadeMode::local, opt);
      },
      py::arg("grid"), py::arg("times"), py::arg("frames"), py::arg("r") = 0.5, py::arg("s") = 1.0,
      py::arg("fractional") = false, py::arg("anchor_x") = 0.0, py::arg("anchor_t") = 0.0, py::arg("levels") = 12);
  m.def("fit_alpha", &fhl::fit_alpha, py::arg("M_k"), py::arg("r"));
}
