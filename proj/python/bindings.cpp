#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oligoscope/json_io.hpp"

namespace py = pybind11;
namespace og = oligoscope;

namespace {

// structured values cross the boundary as JSON-shaped python objects
py::object json_to_py(const og::json& j) {
  py::module_ pyjson = py::module_::import("json");
  return pyjson.attr("loads")(j.dump());
}

og::json py_to_json(const py::object& obj) {
  py::module_ pyjson = py::module_::import("json");
  std::string dumped = pyjson.attr("dumps")(obj).cast<std::string>();
  return og::json::parse(dumped);
}

og::ClassKind kind_of(const std::string& name, int den) {
  return og::ClassKind::from_name(name, den);
}

og::TypeSpec type_of(const py::object& spec, og::ClassKind kind, int arity) {
  if (py::isinstance<py::str>(spec)) {
    std::string s = spec.cast<std::string>();
    if (s == "distinct" || s == "proper" || s == "atom") return og::TypeSpec::distinct(kind, arity);
    throw og::DomainError("bad_type", "unknown type shorthand: " + s);
  }
  return og::type_from_json(py_to_json(spec));
}

}  // namespace

PYBIND11_MODULE(_oligoscope, m) {
  m.doc() = "finite windows of automorphism-group compactification semigroups";

  py::register_exception<og::DomainError>(m, "DomainError");

  m.def(
      "count_orbits",
      [](const std::string& kind, int n, int den) {
        return og::count_orbits(kind_of(kind, den), n);
      },
      py::arg("kind"), py::arg("n"), py::arg("den") = 1);

  m.def(
      "enumerate_age",
      [](const std::string& kind, int n, int den) {
        py::list out;
        for (const auto& s : og::enumerate_age(kind_of(kind, den), n))
          out.append(json_to_py(og::to_json(s)));
        return out;
      },
      py::arg("kind"), py::arg("n"), py::arg("den") = 1);

  m.def(
      "pair_type_count",
      [](const std::string& kind, int n, int den) {
        return og::enumerate_pair_types(kind_of(kind, den), n).size();
      },
      py::arg("kind"), py::arg("n"), py::arg("den") = 1);

  m.def(
      "compose",
      [](const py::object& p, const py::object& q) {
        return json_to_py(og::to_json(
            og::compose(og::partial_iso_from_json(py_to_json(p)), og::partial_iso_from_json(py_to_json(q)))));
      },
      py::arg("p"), py::arg("q"));

  m.def("involution", [](const py::object& p) {
    return json_to_py(og::to_json(og::involution(og::partial_iso_from_json(py_to_json(p)))));
  });

  m.def("is_idempotent", [](const py::object& p) {
    return og::is_idempotent(og::partial_iso_from_json(py_to_json(p)));
  });

  m.def(
      "star_closure",
      [](const py::list& gens) {
        std::vector<og::PartialIso> g;
        for (const auto& item : gens)
          g.push_back(og::partial_iso_from_json(py_to_json(item.cast<py::object>())));
        return json_to_py(og::to_json(og::generate_star_semigroup(g)));
      },
      py::arg("generators"));

  m.def("green_leq", [](const py::object& p, const py::object& q) {
    return og::green_leq(og::partial_iso_from_json(py_to_json(p)),
                         og::partial_iso_from_json(py_to_json(q)));
  });

  m.def(
      "central_idempotents",
      [](const py::object& window_structure) {
        py::list out;
        for (const auto& e :
             og::central_idempotents(og::structure_from_json(py_to_json(window_structure))))
          out.append(json_to_py(og::to_json(e)));
        return out;
      },
      py::arg("window_structure"));

  m.def(
      "roelcke_distance",
      [](const std::vector<int>& g, const std::vector<int>& h) {
        return og::roelcke_distance(g, h).str();
      },
      py::arg("g"), py::arg("h"));

  m.def(
      "classify_stability",
      [](const std::string& kind, const std::string& formula, const py::object& type_x,
         const py::object& type_y, int arity_x, int arity_y, int den) {
        og::ClassKind k = kind_of(kind, den);
        og::Formula phi = og::parse_formula(formula, k, arity_x, arity_y);
        og::TypeSpec p = type_of(type_x, k, arity_x);
        og::TypeSpec q = type_of(type_y, k, arity_y);
        return json_to_py(og::to_json(og::classify_stability(phi, p, q)));
      },
      py::arg("kind"), py::arg("formula"), py::arg("type_x") = "distinct",
      py::arg("type_y") = "distinct", py::arg("arity_x") = 1, py::arg("arity_y") = 1,
      py::arg("den") = 1);

  m.def(
      "find_order_witness",
      [](const std::string& kind, const std::string& formula, int length,
         const py::object& type_x, const py::object& type_y, int arity_x, int arity_y, int den) {
        og::ClassKind k = kind_of(kind, den);
        og::Formula phi = og::parse_formula(formula, k, arity_x, arity_y);
        og::TypeSpec p = type_of(type_x, k, arity_x);
        og::TypeSpec q = type_of(type_y, k, arity_y);
        auto r = og::find_order_witness(phi, p, q, length);
        py::dict out;
        out["found"] = r.witness.has_value();
        out["budget_exhausted"] = r.budget_exhausted;
        if (r.witness) out["witness"] = json_to_py(og::to_json(*r.witness));
        return out;
      },
      py::arg("kind"), py::arg("formula"), py::arg("length") = 4, py::arg("type_x") = "distinct",
      py::arg("type_y") = "distinct", py::arg("arity_x") = 1, py::arg("arity_y") = 1,
      py::arg("den") = 1);

  m.def(
      "coupling_compose",
      [](const py::object& a, const py::object& b) {
        return json_to_py(og::to_json(og::coupling_compose(og::coupling_from_json(py_to_json(a)),
                                                           og::coupling_from_json(py_to_json(b)))));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "coupling_identity",
      [](int n) { return json_to_py(og::to_json(og::CouplingMatrix::identity(n))); }, py::arg("n"));

  m.def(
      "coupling_partition_idempotents",
      [](int n) {
        py::list out;
        for (const auto& e : og::coupling_idempotent_scan(n)) out.append(json_to_py(og::to_json(e)));
        return out;
      },
      py::arg("n"));

  m.def(
      "coupling_central_idempotents",
      [](int n) {
        py::list out;
        for (const auto& e : og::coupling_central_idempotents(n))
          out.append(json_to_py(og::to_json(e)));
        return out;
      },
      py::arg("n"));

  m.def(
      "operator_norm",
      [](const py::object& a, double tol) {
        return og::operator_norm(og::contraction_from_json(py_to_json(a)), tol);
      },
      py::arg("a"), py::arg("tol") = 1e-9);

  m.def(
      "check_projection",
      [](const py::object& a, double tol) {
        return og::check_projection(og::contraction_from_json(py_to_json(a)), tol);
      },
      py::arg("a"), py::arg("tol") = 1e-9);
}
