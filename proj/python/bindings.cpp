#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>

#include "ergodix/error.hpp"
#include "ergodix/invariants.hpp"
#include "ergodix/io.hpp"
#include "ergodix/mixing.hpp"
#include "ergodix/parallel.hpp"
#include "ergodix/runner.hpp"
#include "ergodix/spectral.hpp"
#include "ergodix/vdc.hpp"

namespace py = pybind11;
using namespace ergodix;

namespace {

GroupElement element(const std::vector<std::int64_t>& g) { return GroupElement(g); }

// Opaque holder; stl.h would otherwise convert the variant by value.
struct PyObservable {
  Observable value;
};

std::vector<Observable> unwrap(const std::vector<PyObservable>& obs) {
  std::vector<Observable> out;
  for (const auto& o : obs) out.push_back(o.value);
  return out;
}

std::string statistic_json(const MixingStatistic& s) { return to_json(s).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compiled core of ergodix; the Python package wraps these in a friendlier surface.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("set_thread_count", &set_thread_count, py::arg("threads"));
  m.def("thread_count", &thread_count);

  m.def("box_size", [](std::size_t q, std::int64_t n) { return box_window(q, n).size(); });
  m.def("folner_defect",
        [](std::size_t q, std::int64_t n, const std::vector<std::int64_t>& g) {
          return folner_defect(box_window(q, n), element(g));
        },
        py::arg("q"), py::arg("n"), py::arg("g"));
  m.def("tempelman_ratio", [](std::size_t q, std::int64_t n) { return tempelman_ratio(box_window(q, n)); },
        py::arg("q"), py::arg("n"));

  m.def("clock_matrix", &clock_matrix, py::arg("p"), py::arg("Q"));
  m.def("shift_matrix", &shift_matrix, py::arg("Q"));

  py::class_<PyObservable>(m, "Observable");

  py::class_<System>(m, "System")
      .def_static("rotation", [](std::int64_t p, std::int64_t Q) { return System(rotation_algebra_system(p, Q)); })
      .def_static("clock_shift", [](std::int64_t p, std::int64_t Q) { return System(clock_shift_system(p, Q)); })
      .def_static("permutation", [](std::int64_t N) { return System(permutation_system(N)); })
      .def_static("shift", [](std::size_t q, std::size_t d) { return System(shift_system(q, d)); },
                  py::arg("q") = 1, py::arg("d") = 2)
      .def_static("finite",
                  [](const std::vector<Matrix>& generators, const Matrix& density) {
                    return System(FiniteSystem(generators, State(density)));
                  },
                  py::arg("generators"), py::arg("density"))
      .def_static("from_config",
                  [](const std::string& text, std::optional<std::uint64_t> seed) {
                    return parse_system(Json::parse(text), seed);
                  },
                  py::arg("config"), py::arg("seed") = py::none())
      .def_property_readonly("is_finite", &System::is_finite)
      .def_property_readonly("rank", &System::rank)
      .def_property_readonly("tracial", &System::tracial)
      .def_property_readonly("label", &System::label)
      .def("observable",
           [](const System& s, const std::string& text) { return PyObservable{parse_observable(s, Json::parse(text))}; })
      .def("matrix", [](const System& s, const Matrix& a) {
        PyObservable o{a};
        s.check(o.value);
        return o;
      })
      .def("named", [](const System& s, const std::string& name) { return Matrix(s.finite().named().at(name)); })
      .def("act",
           [](const System& s, const Matrix& a, const std::vector<std::int64_t>& g) {
             return s.finite().act(a, element(g));
           })
      .def("state", [](const System& s, const PyObservable& a) { return s.state(a.value); });

  m.def("weak_mixing_defect",
        [](const System& s, const PyObservable& a, const PyObservable& b, std::int64_t n_min, std::int64_t n_max) {
          return statistic_json(
              weak_mixing_defect(s, a.value, b.value, Homomorphism::identity(s.rank()), box_schedule(s.rank(), n_min, n_max)));
        },
        py::arg("system"), py::arg("a"), py::arg("b"), py::arg("n_min"), py::arg("n_max"));

  m.def("higher_order_defect",
        [](const System& s, const std::vector<PyObservable>& obs, const std::vector<std::int64_t>& scalars,
           std::int64_t n_min, std::int64_t n_max) {
          HigherOrderSpec spec;
          spec.observables = unwrap(obs);
          for (auto k : scalars) spec.homs.push_back(Homomorphism::scalar(s.rank(), k));
          spec.validate(s);
          return statistic_json(higher_order_defect(s, spec, box_schedule(s.rank(), n_min, n_max)));
        },
        py::arg("system"), py::arg("observables"), py::arg("homs"), py::arg("n_min"), py::arg("n_max"));

  m.def("dichotomy", [](const System& s) { return to_json(dichotomy_classify(s.finite())).dump(); });

  m.def("szemeredi",
        [](const System& s, const PyObservable& a, const std::vector<std::int64_t>& exponents, std::int64_t n_min,
           std::int64_t n_max) {
          return to_json(szemeredi_driver(s, a.value, exponents, box_schedule(s.rank(), n_min, n_max))).dump();
        },
        py::arg("system"), py::arg("a"), py::arg("exponents"), py::arg("n_min"), py::arg("n_max"));

  m.def("vdc_report",
        [](const std::string& kind, double alpha, const std::vector<std::int64_t>& n_values, double tolerance) {
          Vector v = Vector::Ones(1);
          std::optional<VectorSequence> f;
          if (kind == "weyl_quadratic") f = weyl_quadratic_sequence(alpha, v);
          else if (kind == "linear_phase") f = linear_phase_sequence(alpha, v);
          else if (kind == "constant") f = constant_sequence(v);
          else throw InvalidArgument("unknown sequence kind '" + kind + "'");
          WindowSchedule windows;
          for (auto n : n_values) windows.push_back(box_window(1, n));
          return to_json(van_der_corput_report(*f, windows, tolerance)).dump();
        },
        py::arg("kind"), py::arg("alpha"), py::arg("n_values"), py::arg("tolerance") = 0.05);

  m.def("invariants",
        [](std::uint64_t seed, const std::map<std::string, std::size_t>& trials) {
          py::list out;
          for (const auto& r : run_invariant_suites(seed, trials)) {
            py::dict d;
            d["name"] = r.name;
            d["trials"] = r.trials;
            d["failures"] = r.failures;
            d["worst"] = r.worst;
            out.append(d);
          }
          return out;
        },
        py::arg("seed"), py::arg("trials") = std::map<std::string, std::size_t>{});

  m.def("run",
        [](const std::string& command, const std::string& config, const std::string& out_dir, std::size_t threads,
           std::optional<std::uint64_t> seed) {
          RunOptions o;
          o.command = command;
          o.config = Json::parse(config);
          o.out_dir = out_dir;
          o.threads = threads;
          o.seed = seed;
          RunResult r;
          {
            py::gil_scoped_release release;
            r = run(o);
          }
          py::dict d;
          d["exit_code"] = r.exit_code;
          std::vector<std::string> paths;
          for (const auto& p : r.artifacts) paths.push_back(p.string());
          d["artifacts"] = paths;
          d["failures"] = r.failures;
          return d;
        },
        py::arg("command"), py::arg("config"), py::arg("out_dir"), py::arg("threads") = 0,
        py::arg("seed") = py::none());
}
