#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vlgreedy/democracy_lab.hpp"
#include "vlgreedy/error.hpp"
#include "vlgreedy/greedy_approx.hpp"
#include "vlgreedy/haar_system.hpp"
#include "vlgreedy/variable_norm.hpp"

namespace py = pybind11;
using namespace vlg;

namespace {

CubeFamily family_of(const std::vector<std::string>& cubes, int dim) {
  std::vector<DyadicCube> out;
  out.reserve(cubes.size());
  for (const auto& c : cubes) out.push_back(parse_cube(c, dim));
  return CubeFamily(std::move(out));
}

std::vector<std::string> labels_of(const CubeFamily& family) {
  std::vector<std::string> out;
  for (const auto& q : family) out.push_back(to_string(q));
  return out;
}

GridFunction function_of(const ExponentField& p, std::vector<double> values) {
  return GridFunction(p.grid(), std::move(values));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Variable-exponent norms, Haar greedy approximation and democracy functions";

  static py::exception<Error> error_type(m, "VlgError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr ptr) {
    try {
      if (ptr) std::rethrow_exception(ptr);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  py::class_<ExponentField>(m, "ExponentField")
      .def(py::init([](int dim, int depth, std::vector<double> values) {
             return ExponentField(Grid(dim, depth), std::move(values));
           }),
           py::arg("dim"), py::arg("depth"), py::arg("values"))
      .def_static(
          "constant",
          [](int dim, int depth, double value) { return build_exponent(Grid(dim, depth), ConstantExponent{value}); },
          py::arg("dim"), py::arg("depth"), py::arg("value"))
      .def_static(
          "smoothstep",
          [](int dim, int depth, double p_left, double p_right, double start, double end, int axis) {
            return build_exponent(Grid(dim, depth), SmoothstepExponent{p_left, p_right, start, end, axis});
          },
          py::arg("dim"), py::arg("depth"), py::arg("p_left") = 2.0, py::arg("p_right") = 4.0,
          py::arg("start") = 0.25, py::arg("end") = 0.75, py::arg("axis") = 0)
      .def_property_readonly("dim", [](const ExponentField& p) { return p.grid().dim(); })
      .def_property_readonly("depth", [](const ExponentField& p) { return p.grid().depth(); })
      .def_property_readonly("p_minus", &ExponentField::p_minus)
      .def_property_readonly("p_plus", &ExponentField::p_plus)
      .def_property_readonly("values",
                             [](const ExponentField& p) { return std::vector<double>(p.values().begin(), p.values().end()); })
      .def("__len__", [](const ExponentField& p) { return p.values().size(); });

  m.def(
      "luxemburg_norm",
      [](const std::vector<double>& values, const ExponentField& p) { return luxemburg_norm(values, p); },
      py::arg("values"), py::arg("p"));
  m.def(
      "char_norm", [](const ExponentField& p, const std::string& cube) { return char_norm(p, parse_cube(cube, p.grid().dim())); },
      py::arg("p"), py::arg("cube"), "Norm of the indicator of a cube given as 'j:k0[,k1,...]'.");
  m.def(
      "harmonic_mean_exponent",
      [](const ExponentField& p, const std::string& cube) {
        return harmonic_mean_exponent(p, parse_cube(cube, p.grid().dim()));
      },
      py::arg("p"), py::arg("cube"));
  m.def("log_holder_constant", &log_holder_constant, py::arg("p"));

  m.def(
      "analyze",
      [](const ExponentField& p, std::vector<double> values) {
        const auto c = analyze(function_of(p, std::move(values)));
        return std::vector<double>(c.flat().begin(), c.flat().end());
      },
      py::arg("p"), py::arg("values"), "Haar coefficients in canonical basis order on p's grid.");
  m.def(
      "synthesize",
      [](const ExponentField& p, const std::vector<double>& coefficients) {
        HaarCoefficients c(p.grid());
        if (coefficients.size() != c.size()) throw Error(ErrorKind::AlignmentError, "coefficient count mismatch");
        std::copy(coefficients.begin(), coefficients.end(), c.flat().begin());
        return synthesize(c).values;
      },
      py::arg("p"), py::arg("coefficients"));
  m.def(
      "equivalence_ratio",
      [](const ExponentField& p, std::vector<double> values) {
        return equivalence_ratio(function_of(p, std::move(values)), p);
      },
      py::arg("p"), py::arg("values"));

  m.def(
      "greedy_residual",
      [](const ExponentField& p, std::vector<double> values, std::size_t n) {
        return greedy_residual(function_of(p, std::move(values)), p, n);
      },
      py::arg("p"), py::arg("values"), py::arg("n"));
  m.def(
      "best_subset_residual",
      [](const ExponentField& p, std::vector<double> values, std::size_t n) {
        return best_subset_residual(function_of(p, std::move(values)), p, n);
      },
      py::arg("p"), py::arg("values"), py::arg("n"));
  m.def(
      "mixed_mass_function",
      [](const ExponentField& p, std::size_t terms, std::uint64_t seed) {
        return mixed_mass_function(p, terms, seed).values;
      },
      py::arg("p"), py::arg("terms"), py::arg("seed"));

  m.def(
      "democracy_norm",
      [](const ExponentField& p, const std::vector<std::string>& cubes, int type) {
        return democracy_norm(family_of(cubes, p.grid().dim()), type, p);
      },
      py::arg("p"), py::arg("cubes"), py::arg("type") = 1);
  m.def(
      "square_sum_norm",
      [](const ExponentField& p, const std::vector<std::string>& cubes) {
        return square_sum_norm(family_of(cubes, p.grid().dim()), p);
      },
      py::arg("p"), py::arg("cubes"));
  m.def(
      "linearized_norm",
      [](const ExponentField& p, const std::vector<std::string>& cubes) {
        return linearized_norm(family_of(cubes, p.grid().dim()), p);
      },
      py::arg("p"), py::arg("cubes"));
  m.def(
      "construct_gamma1",
      [](const ExponentField& p, double eps, std::size_t n) { return labels_of(construct_gamma1(p, eps, n)); },
      py::arg("p"), py::arg("epsilon"), py::arg("n"));
  m.def(
      "construct_gamma2",
      [](const ExponentField& p, double eps, std::size_t n) { return labels_of(construct_gamma2(p, eps, n)); },
      py::arg("p"), py::arg("epsilon"), py::arg("n"));

  m.def(
      "fit_exponent",
      [](const std::vector<std::pair<double, double>>& pairs) {
        const auto f = fit_exponent(pairs);
        return py::dict(py::arg("slope") = f.slope, py::arg("intercept") = f.intercept,
                        py::arg("r_squared") = f.r_squared);
      },
      py::arg("pairs"));
  m.def(
      "estimate_democracy",
      [](const ExponentField& p, std::vector<std::size_t> ns, std::uint64_t seed, std::size_t random_families,
         unsigned threads) {
        DemocracyOptions opt;
        opt.ns = std::move(ns);
        opt.seed = seed;
        opt.random_families = random_families;
        opt.threads = threads;
        const auto rec = estimate_democracy(p, opt);
        py::list rows;
        for (const auto& r : rec.rows)
          rows.append(py::dict(py::arg("N") = r.n, py::arg("h_l_est") = r.h_l_est, py::arg("h_r_est") = r.h_r_est,
                               py::arg("argmin") = r.argmin, py::arg("argmax") = r.argmax,
                               py::arg("families") = r.families));
        auto slope = [](const std::optional<PowerFit>& f) -> py::object {
          return f ? py::object(py::float_(f->slope)) : py::object(py::none());
        };
        return py::dict(py::arg("rows") = rows, py::arg("slope_r") = slope(rec.fit_r),
                        py::arg("slope_l") = slope(rec.fit_l),
                        py::arg("capacity_errors") = rec.capacity_errors.size());
      },
      py::arg("p"), py::arg("ns"), py::arg("seed"), py::arg("random_families") = 100, py::arg("threads") = 1);
}
