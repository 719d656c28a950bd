#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "hch/heat.hpp"
#include "hch/magnetic.hpp"
#include "hch/schrodinger.hpp"
#include "hch/stochastic.hpp"

namespace py = pybind11;
using namespace hch;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

// Points cross the boundary as flat sequences (x^1..x^d, y^1..y^d, s).
HPoint to_point(const std::vector<double>& c) {
  if (c.size() % 2 != 1) throw DimensionError("point needs 2d+1 coordinates");
  return HPoint(std::vector<double>(c.begin(), c.end() - 1), c.back());
}

std::vector<double> from_point(const HPoint& p) {
  std::vector<double> c = p.z;
  c.push_back(p.s);
  return c;
}

std::vector<HPoint> to_points(const std::vector<std::vector<double>>& cs) {
  std::vector<HPoint> out;
  out.reserve(cs.size());
  for (const auto& c : cs) out.push_back(to_point(c));
  return out;
}

std::vector<py::ssize_t> shape_of(const GridSpec& g) {
  std::vector<py::ssize_t> shape;
  for (const auto& a : g.axes()) shape.push_back(a.n);
  return shape;
}

Repr parse_repr(const std::string& name) {
  if (name == "physical") return Repr::Physical;
  if (name == "partial") return Repr::Partial;
  if (name == "spectral") return Repr::Spectral;
  throw std::invalid_argument("unknown representation '" + name + "'");
}

Flavor parse_flavor(const std::string& name) {
  if (name == "heat") return Flavor::Heat;
  if (name == "schrodinger") return Flavor::Schrodinger;
  throw std::invalid_argument("unknown flavor '" + name + "'");
}

HeatStepMethod parse_method(const std::string& name, int q, std::size_t samples, std::uint64_t seed) {
  if (name == "dense") return DenseSpectral{};
  if (name == "quadrature") return Quadrature{q};
  if (name == "monte_carlo") return MonteCarlo{samples, RngStream{seed, 0}};
  throw std::invalid_argument("unknown heat method '" + name + "'");
}

ShearMethod parse_shear(const std::string& name) {
  if (name == "dense") return ShearMethod::Dense;
  if (name == "interpolated") return ShearMethod::Interpolated;
  throw std::invalid_argument("unknown shear method '" + name + "'");
}

StepOrder parse_order(const std::string& name) {
  if (name == "SM") return StepOrder::SM;
  if (name == "MS") return StepOrder::MS;
  throw std::invalid_argument("unknown step order '" + name + "'");
}

PotentialSpec gaussian_potential(double amplitude, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian potential: width must be positive");
  return {[amplitude, width](const HPoint& q) {
            double r2 = 0.0;
            for (double v : q.z) r2 += v * v;
            return amplitude * std::exp(-r2 / (2 * width * width));
          },
          std::abs(amplitude)};
}

Field field_from_array(const GridSpec& g, const ComplexArray& values, const std::string& repr) {
  const auto shape = shape_of(g);
  if (values.ndim() != static_cast<py::ssize_t>(shape.size())) throw DimensionError("array rank does not match the grid");
  for (std::size_t a = 0; a < shape.size(); ++a) {
    if (values.shape(static_cast<py::ssize_t>(a)) != shape[a]) throw DimensionError("array shape does not match the grid");
  }
  return Field(g, parse_repr(repr), std::vector<cplx>(values.data(), values.data() + values.size()));
}

ComplexArray field_to_array(const Field& f) {
  ComplexArray out(shape_of(f.grid));
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["se"] = e.se;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Chernoff approximations of heat and Schrodinger flows on the Heisenberg group";

  auto abort = py::register_exception<NumericalAbort>(m, "NumericalAbort", PyExc_RuntimeError);
  py::register_exception<CausticError>(m, "CausticError", abort.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<RepresentationError>(m, "RepresentationError", PyExc_ValueError);

  m.def("group_mul", [](const std::vector<double>& p, const std::vector<double>& q) {
    return from_point(group_mul(to_point(p), to_point(q)));
  });
  m.def("group_inv", [](const std::vector<double>& p) { return from_point(group_inv(to_point(p))); });
  m.def("dilate", [](const std::vector<double>& p, double lam) { return from_point(dilate(to_point(p), lam)); });
  m.def("koranyi_gauge", [](const std::vector<double>& p) { return koranyi_gauge(to_point(p)).value; });
  m.def("koranyi_dist", [](const std::vector<double>& p, const std::vector<double>& q) {
    return koranyi_dist(to_point(p), to_point(q)).value;
  });

  py::class_<GridSpec>(m, "Grid")
      .def(py::init(&GridSpec::uniform), py::arg("d"), py::arg("nz"), py::arg("lz"), py::arg("ns"), py::arg("ls"),
           "Uniform grid: nz nodes on [-lz, lz) per horizontal axis, ns nodes on [-ls, ls) for s.")
      .def_property_readonly("d", &GridSpec::dim)
      .def_property_readonly("shape", [](const GridSpec& g) { return shape_of(g); })
      .def("nodes", [](const GridSpec& g, int a) {
        const Axis& ax = g.axis(a);
        std::vector<double> n(static_cast<std::size_t>(ax.n));
        for (int j = 0; j < ax.n; ++j) n[static_cast<std::size_t>(j)] = ax.node(j);
        return n;
      })
      .def("freqs", [](const GridSpec& g, int a) {
        const Axis& ax = g.axis(a);
        std::vector<double> n(static_cast<std::size_t>(ax.n));
        for (int j = 0; j < ax.n; ++j) n[static_cast<std::size_t>(j)] = ax.freq(j);
        return n;
      })
      .def("__eq__", &GridSpec::operator==);

  py::class_<Field>(m, "Field")
      .def(py::init(&field_from_array), py::arg("grid"), py::arg("values"), py::arg("repr") = "physical")
      .def_readonly("grid", &Field::grid)
      .def_property_readonly("repr", [](const Field& f) { return std::string(repr_name(f.repr)); })
      .def_property_readonly("values", &field_to_array, "Copy of the samples shaped like the grid.")
      .def("norm", &l2_norm)
      .def("to_repr", [](const Field& f, const std::string& r) { return to_repr(f, parse_repr(r)); })
      .def("__call__", [](const Field& f, const std::vector<double>& c) { return interpolate(f, c); },
           "Catmull-Rom read at an off-grid point.");

  py::class_<PotentialSpec>(m, "Potential")
      .def_static("zero", &PotentialSpec::zero)
      .def_static("constant", &PotentialSpec::constant, py::arg("value"))
      .def_static("gaussian", &gaussian_potential, py::arg("amplitude"), py::arg("width"),
                  "amplitude * exp(-|z|^2 / (2 width^2)).")
      .def("__call__", [](const PotentialSpec& c, const std::vector<double>& p) { return c(to_point(p)); });

  m.def(
      "make_packet",
      [](const GridSpec& g, const std::vector<double>& center, const std::vector<double>& widths,
         const std::vector<double>& momentum) { return make_packet({to_point(center), widths, momentum}, g); },
      py::arg("grid"), py::arg("center"), py::arg("widths"), py::arg("momentum") = std::vector<double>{});
  m.def("relative_l2_error", &relative_l2_error);
  m.def("partial_ft", &partial_ft);
  m.def("inverse_partial_ft", &inverse_partial_ft);

  m.def(
      "heat_step",
      [](const Field& f, double tau, const std::string& method, const PotentialSpec& c, int q, std::size_t samples,
         std::uint64_t seed) { return heat_step(f, tau, c, parse_method(method, q, samples, seed)); },
      py::arg("field"), py::arg("tau"), py::arg("method") = "dense", py::arg("potential") = PotentialSpec::zero(),
      py::arg("q") = 8, py::arg("samples") = 4096, py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());
  m.def(
      "evolve_heat",
      [](const Field& f, double t, int n, const std::string& method, const PotentialSpec& c, int q,
         std::size_t samples, std::uint64_t seed) {
        return chernoff_evolve_heat(f, t, n, c, parse_method(method, q, samples, seed));
      },
      py::arg("field"), py::arg("t"), py::arg("n"), py::arg("method") = "dense",
      py::arg("potential") = PotentialSpec::zero(), py::arg("q") = 8, py::arg("samples") = 4096, py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());
  m.def("apply_sublaplacian", &apply_sublaplacian, py::call_guard<py::gil_scoped_release>());

  m.def(
      "schrodinger_step",
      [](const Field& f, double tau, const std::string& shear) { return schrodinger_step(f, tau, parse_shear(shear)); },
      py::arg("field"), py::arg("tau"), py::arg("shear") = "dense", py::call_guard<py::gil_scoped_release>());
  m.def(
      "evolve_schrodinger",
      [](const Field& f, double t, int n, const PotentialSpec& v, const std::string& shear, const std::string& order) {
        return chernoff_evolve_schrodinger(f, t, n, VPotentialSpec{v, true}, parse_shear(shear), parse_order(order));
      },
      py::arg("field"), py::arg("t"), py::arg("n"), py::arg("potential") = PotentialSpec::zero(),
      py::arg("shear") = "dense", py::arg("order") = "SM", py::call_guard<py::gil_scoped_release>());

  m.def(
      "mehler_kernel",
      [](double alpha, double t, const std::vector<double>& z, const std::vector<double>& zp,
         const std::string& flavor) { return mehler_kernel({alpha, t, parse_flavor(flavor)}, z, zp); },
      py::arg("alpha"), py::arg("t"), py::arg("z"), py::arg("zp"), py::arg("flavor") = "heat");
  m.def("caustic_distance", &caustic_distance, py::arg("alpha"), py::arg("t"));
  m.def(
      "oracle_evolve",
      [](const Field& f, double t, const std::string& flavor) { return oracle_evolve(f, t, parse_flavor(flavor)); },
      py::arg("field"), py::arg("t"), py::arg("flavor") = "heat", py::call_guard<py::gil_scoped_release>());
  m.def(
      "oracle_point",
      [](const Field& f, const std::vector<double>& p, double t, const std::string& flavor) {
        return oracle_evaluate_point(f, to_point(p), t, parse_flavor(flavor));
      },
      py::arg("field"), py::arg("point"), py::arg("t"), py::arg("flavor") = "heat");

  m.def(
      "fk_estimate",
      [](const Field& f, const std::vector<std::vector<double>>& points, double t, std::size_t paths, int steps,
         std::uint64_t seed, std::uint64_t stream) {
        const auto pts = to_points(points);
        std::vector<Estimate> est;
        {
          py::gil_scoped_release release;
          est = fk_estimate_many(f, pts, t, paths, steps, RngStream{seed, stream});
        }
        py::list out;
        for (const auto& e : est) out.append(estimate_dict(e));
        return out;
      },
      py::arg("field"), py::arg("points"), py::arg("t"), py::arg("paths"), py::arg("steps"), py::arg("seed") = 0,
      py::arg("stream") = 0);
  m.def(
      "fk_estimate_with_budget",
      [](const Field& f, const std::vector<std::vector<double>>& points, double t, std::size_t paths, int steps,
         std::uint64_t seed, std::uint64_t stream) {
        const auto pts = to_points(points);
        FKBudget b;
        {
          py::gil_scoped_release release;
          b = fk_estimate_with_budget(f, pts, t, paths, steps, RngStream{seed, stream});
        }
        py::list out;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          py::dict d = estimate_dict(b.estimates[i]);
          d["time_budget"] = b.time_budget[i];
          d["interp_budget"] = b.interp_budget[i];
          out.append(d);
        }
        return out;
      },
      py::arg("field"), py::arg("points"), py::arg("t"), py::arg("paths"), py::arg("steps"), py::arg("seed") = 0,
      py::arg("stream") = 0);
  m.def(
      "sample_bm_levy",
      [](double t, int steps, std::uint64_t seed, std::uint64_t stream, int d) {
        const BMPath p = sample_bm_levy(t, steps, RngStream{seed, stream}, d);
        py::dict out;
        out["times"] = p.times;
        out["b"] = p.b;
        out["levy"] = p.levy;
        return out;
      },
      py::arg("t"), py::arg("steps"), py::arg("seed") = 0, py::arg("stream") = 0, py::arg("d") = 1);
  m.def(
      "levy_area_samples",
      [](double t, int steps, std::size_t paths, std::uint64_t seed, std::uint64_t stream) {
        return levy_area_samples(t, steps, paths, RngStream{seed, stream});
      },
      py::arg("t"), py::arg("steps"), py::arg("paths"), py::arg("seed") = 0, py::arg("stream") = 0,
      py::call_guard<py::gil_scoped_release>());
}
