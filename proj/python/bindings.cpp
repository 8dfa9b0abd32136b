#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nestlie/bimodule.hpp"
#include "nestlie/fixtures.hpp"
#include "nestlie/lie.hpp"
#include "nestlie/nest.hpp"
#include "nestlie/subspace.hpp"
#include "nestlie/version.hpp"

namespace py = pybind11;
using namespace nestlie;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-dimensional toolkit for Lie modules over nest algebras";
  m.attr("__version__") = kVersion;

  py::class_<Nest>(m, "Nest")
      .def(py::init<int, std::vector<int>>(), py::arg("n"), py::arg("boundaries"))
      .def_property_readonly("dimension", &Nest::dimension)
      .def_property_readonly("length", &Nest::length)
      .def_property_readonly("boundaries",
                             [](const Nest& nest) { return nest.boundaries(); })
      .def("boundary", &Nest::boundary, py::arg("k"))
      .def("atom_range", &Nest::atom_range, py::arg("k"))
      .def("atom_of", &Nest::atom_of, py::arg("coordinate"))
      .def("__repr__", [](const Nest& nest) {
        std::string text = "Nest(n=" + std::to_string(nest.dimension()) + ", [";
        for (std::size_t i = 0; i < nest.boundaries().size(); ++i) {
          if (i) text += ", ";
          text += std::to_string(nest.boundaries()[i]);
        }
        return text + "])";
      });

  m.def("matrix_unit", &matrix_unit, py::arg("n"), py::arg("i"), py::arg("j"));
  m.def("nest_projection", &nest_projection, py::arg("nest"), py::arg("k"));
  m.def("predecessor", &predecessor, py::arg("nest"), py::arg("k"));
  m.def("algebra_basis", &algebra_basis, py::arg("nest"));
  m.def("diagonal_basis", &diagonal_basis, py::arg("nest"));
  m.def("expectation", &expectation, py::arg("nest"), py::arg("t"));
  m.def("rank_one", &rank_one, py::arg("x"), py::arg("y"));
  m.def("rank_one_in_algebra", &rank_one_in_algebra, py::arg("nest"), py::arg("x"),
        py::arg("y"));
  m.def(
      "vector_projections",
      [](const Nest& nest, const Vector& z) {
        const auto vp = vector_projections(nest, z);
        return py::make_tuple(vp.p, vp.phat);
      },
      py::arg("nest"), py::arg("z"),
      "Returns (least k fixing z, greatest k annihilating z).");

  py::class_<OperatorSubspace>(m, "OperatorSubspace")
      .def_static("zero", &OperatorSubspace::zero, py::arg("n"), py::arg("tol") = 0.0)
      .def_static("full", &OperatorSubspace::full, py::arg("n"), py::arg("tol") = 0.0)
      .def_static("from_units", &OperatorSubspace::from_units, py::arg("n"),
                  py::arg("units"), py::arg("tol") = 0.0)
      .def_property_readonly("matrix_dim", &OperatorSubspace::matrix_dim)
      .def_property_readonly("dim", &OperatorSubspace::dim)
      .def_property_readonly("tol", &OperatorSubspace::tol)
      .def_property_readonly("basis",
                             [](const OperatorSubspace& s) { return s.basis(); })
      .def("basis_matrix", &OperatorSubspace::basis_matrix, py::arg("j"))
      .def("basis_matrices", &OperatorSubspace::basis_matrices)
      .def(
          "contains",
          [](const OperatorSubspace& s, const Matrix& t) { return contains(s, t); },
          py::arg("t"))
      .def(
          "residual_norm",
          [](const OperatorSubspace& s, const Matrix& t) { return residual_norm(s, t); },
          py::arg("t"))
      .def(
          "includes",
          [](const OperatorSubspace& a, const OperatorSubspace& b) {
            return includes(a, b);
          },
          py::arg("other"))
      .def(
          "equals",
          [](const OperatorSubspace& a, const OperatorSubspace& b) {
            return equal(a, b);
          },
          py::arg("other"))
      .def(
          "sum",
          [](const OperatorSubspace& a, const OperatorSubspace& b) {
            return sum(a, b);
          },
          py::arg("other"))
      .def(
          "intersect",
          [](const OperatorSubspace& a, const OperatorSubspace& b) {
            return intersect(a, b);
          },
          py::arg("other"))
      .def("__repr__", [](const OperatorSubspace& s) {
        return "OperatorSubspace(n=" + std::to_string(s.matrix_dim()) +
               ", dim=" + std::to_string(s.dim()) + ")";
      });

  m.def(
      "span_of",
      [](const std::vector<Matrix>& generators, int n, double tol) {
        return span_of(generators, n, tol);
      },
      py::arg("generators"), py::arg("n"), py::arg("tol") = 0.0);

  m.def("lie_closure", &lie_closure, py::arg("seed"), py::arg("nest"));
  m.def("is_lie_closed", &is_lie_closed, py::arg("l"), py::arg("nest"));
  m.def("corner_compress_check", &corner_compress_check, py::arg("l"), py::arg("nest"));
  m.def("bimodule_closure", &bimodule_closure, py::arg("m"), py::arg("nest"));
  m.def("is_bimodule", &is_bimodule, py::arg("m"), py::arg("nest"));
  m.def("largest_bimodule", &largest_bimodule, py::arg("m"), py::arg("nest"));
  m.def(
      "phi_table",
      [](const OperatorSubspace& s, const Nest& nest) {
        return phi_of(s, nest).table();
      },
      py::arg("m"), py::arg("nest"),
      "Order homomorphism of the subspace as the table [phi(0), ..., phi(m)].");
  m.def(
      "bimodule_from_table",
      [](const Nest& nest, const std::vector<int>& table) {
        return bimodule_from_table(nest, table);
      },
      py::arg("nest"), py::arg("table"));

  py::enum_<Dichotomy>(m, "Dichotomy")
      .value("lower_zero", Dichotomy::lower_zero)
      .value("upper_full", Dichotomy::upper_full)
      .value("violation", Dichotomy::violation);
  m.def("dichotomy_check", &dichotomy_check, py::arg("l"), py::arg("nest"),
        py::arg("k"));

  py::class_<KDecomposition>(m, "KDecomposition")
      .def_readonly("k_v", &KDecomposition::k_v)
      .def_readonly("k_l", &KDecomposition::k_l)
      .def_readonly("k_d", &KDecomposition::k_d)
      .def_readonly("k_delta", &KDecomposition::k_delta)
      .def_readonly("k_total", &KDecomposition::k_total);
  m.def("k_decompose", &k_decompose, py::arg("l"), py::arg("nest"));

  py::class_<DiagonalBand>(m, "DiagonalBand")
      .def_readonly("k", &DiagonalBand::k)
      .def_readonly("lo", &DiagonalBand::lo)
      .def_readonly("hi", &DiagonalBand::hi);
  py::class_<DiagonalConstraintAlgebra>(m, "DiagonalConstraintAlgebra")
      .def_readonly("space", &DiagonalConstraintAlgebra::space)
      .def_readonly("bands", &DiagonalConstraintAlgebra::bands);
  m.def("diagonal_algebra", &diagonal_algebra, py::arg("k"), py::arg("nest"));

  py::class_<CommutatorWitness>(m, "CommutatorWitness")
      .def_readonly("ok", &CommutatorWitness::ok)
      .def_readonly("k_elem", &CommutatorWitness::k_elem)
      .def_readonly("g_elem", &CommutatorWitness::g_elem)
      .def_readonly("residual", &CommutatorWitness::residual);
  m.def("commutator_into", &commutator_into, py::arg("k"), py::arg("nest"),
        py::arg("l"));

  py::class_<ClauseResult>(m, "ClauseResult")
      .def_readonly("name", &ClauseResult::name)
      .def_readonly("passed", &ClauseResult::passed)
      .def_readonly("residual", &ClauseResult::residual)
      .def_readonly("witness", &ClauseResult::witness);
  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("all_passed", &VerificationReport::all_passed)
      .def_readonly("clauses", &VerificationReport::clauses)
      .def_readonly("dim_l", &VerificationReport::dim_l)
      .def_readonly("dim_j", &VerificationReport::dim_j)
      .def_readonly("dim_k_v", &VerificationReport::dim_k_v)
      .def_readonly("dim_k_l", &VerificationReport::dim_k_l)
      .def_readonly("dim_k_d", &VerificationReport::dim_k_d)
      .def_readonly("dim_k_delta", &VerificationReport::dim_k_delta)
      .def_readonly("dim_k", &VerificationReport::dim_k)
      .def_readonly("dim_dk", &VerificationReport::dim_dk)
      .def_readonly("j_included_in_k", &VerificationReport::j_included_in_k)
      .def_readonly("l_included_in_k", &VerificationReport::l_included_in_k);
  m.def("verify_structure_theorem", &verify_structure_theorem, py::arg("seed"),
        py::arg("nest"), py::arg("tol") = 0.0);
  m.def("band_annihilation_check", &band_annihilation_check, py::arg("l"),
        py::arg("nest"));
  m.def("lie_ideal_refinement_check", &lie_ideal_refinement_check, py::arg("l"),
        py::arg("nest"));

  py::class_<InstanceSpec>(m, "InstanceSpec")
      .def_readonly("nest", &InstanceSpec::nest)
      .def_readonly("seed_matrices", &InstanceSpec::seed_matrices)
      .def_readonly("label", &InstanceSpec::label)
      .def_readonly("rng_seed", &InstanceSpec::rng_seed);
  m.def("paper_example", &paper_example);
  m.def("random_instance", &random_instance, py::arg("n"), py::arg("m"), py::arg("g"),
        py::arg("rng_seed"));
}
