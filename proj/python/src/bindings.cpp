#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "famlab/boolalg.hpp"
#include "famlab/config.hpp"
#include "famlab/error.hpp"
#include "famlab/experiment.hpp"
#include "famlab/famlimit.hpp"
#include "famlab/intnum.hpp"
#include "famlab/ptree.hpp"
#include "famlab/suites.hpp"

namespace py = pybind11;
using namespace famlab;

namespace {

py::object fraction(const Rational& q) {
  static py::object F = py::module_::import("fractions").attr("Fraction");
  return F(config::rational_text(q));
}

Rational rational(const py::handle& h) {
  return config::parse_rational(config::json(py::str(h).cast<std::string>()));
}

boolalg::Element element(std::size_t n, const std::vector<std::size_t>& atoms) {
  return boolalg::Element::from_atoms(n, atoms);
}

py::dict outcome(const experiment::Outcome& out) {
  py::dict d;
  d["kind"] = out.kind;
  d["passed"] = out.passed;
  d["report"] = out.report.dump();
  d["files"] = out.files;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact finitely additive measure experiments";

  py::register_exception<Error>(m, "FamlabError");

  m.def(
      "generated_atoms",
      [](std::size_t n, const std::vector<std::vector<std::size_t>>& gens) {
        std::vector<boolalg::Element> g;
        for (const auto& a : gens) g.push_back(element(n, a));
        std::vector<std::vector<std::size_t>> out;
        for (const auto& a : boolalg::generated_atoms_with_patterns(
                 g, boolalg::Element::one(n), std::max<std::size_t>(16, g.size()))) {
          out.push_back(a.atom.atoms());
        }
        return out;
      },
      py::arg("atom_count"), py::arg("generators"));

  m.def(
      "binomial",
      [](std::size_t n, const py::object& p) {
        auto d = ptree::binomial(n, rational(p));
        py::list out;
        for (const auto& q : d.probs) out.append(fraction(q));
        return out;
      },
      py::arg("n"), py::arg("p"));

  m.def(
      "sandwich",
      [](std::size_t n, const std::vector<std::vector<std::size_t>>& Q, std::size_t max_len) {
        std::vector<boolalg::Element> q;
        for (const auto& a : Q) q.push_back(element(n, a));
        auto r = intnum::sandwich(q, max_len);
        return py::make_tuple(fraction(r.lower), fraction(r.upper));
      },
      py::arg("atom_count"), py::arg("Q"), py::arg("max_len") = 6);

  m.def(
      "paper_parameters",
      [](const py::object& eps, const std::vector<py::object>& masses, std::size_t istar) {
        std::vector<Rational> a;
        for (const auto& x : masses) a.push_back(rational(x));
        auto p = famlimit::paper_parameters(rational(eps), a, istar);
        return py::make_tuple(p.h_star, fraction(p.eps_star));
      },
      py::arg("eps"), py::arg("masses"), py::arg("istar"));

  m.def(
      "run_spec",
      [](const std::string& spec, const std::string& base, std::optional<std::uint64_t> seed,
         std::optional<std::uint64_t> budget, std::optional<unsigned> threads) {
        experiment::Overrides o{seed, budget, threads};
        experiment::Outcome out;
        {
          py::gil_scoped_release release;
          out = experiment::run(config::json::parse(spec), base, o);
        }
        return outcome(out);
      },
      py::arg("spec"), py::arg("base") = ".", py::arg("seed") = py::none(),
      py::arg("budget") = py::none(), py::arg("threads") = py::none());

  m.def(
      "verify",
      [](const std::string& doc) { return outcome(experiment::verify(config::json::parse(doc))); },
      py::arg("certificate"));

  m.def(
      "run_suite",
      [](const std::string& name, std::uint64_t seed, const std::string& data) {
        suites::Result r;
        {
          py::gil_scoped_release release;
          r = suites::run(name, seed, data);
        }
        return py::make_tuple(r.passed, r.checks, r.detail);
      },
      py::arg("name"), py::arg("seed"), py::arg("data"));

  m.attr("suite_names") = suites::names();
}
