#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "yblab/lattice.hpp"
#include "yblab/specfun.hpp"
#include "yblab/verify.hpp"

namespace py = pybind11;
using namespace yblab;
using weights::AnySpin;
using weights::DualSpin;
using weights::Model;
using weights::Spin;

namespace {

// Python spins: a float for the elliptic and hyperbolic models, an (x, n) pair for the gamma model.
AnySpin to_spin(const py::handle& h) {
  if (py::isinstance<py::tuple>(h) || py::isinstance<py::list>(h)) {
    auto seq = py::reinterpret_borrow<py::sequence>(h);
    if (seq.size() != 2) throw ConfigError("dual spin must be an (x, n) pair");
    return DualSpin{seq[0].cast<double>(), seq[1].cast<long>()};
  }
  return Spin{h.cast<double>()};
}

py::object from_spin(const AnySpin& s) {
  if (const auto* d = std::get_if<DualSpin>(&s)) return py::make_tuple(d->x, d->n);
  return py::float_(std::get<Spin>(s).x);
}

verify::StarConfig to_star(const py::sequence& outer, const std::array<double, 3>& spectral) {
  if (outer.size() != 3) throw ConfigError("star configuration needs three outer spins");
  return {{to_spin(outer[0]), to_spin(outer[1]), to_spin(outer[2])}, spectral};
}

specfun::ModularParam modular(double b, double b_angle) {
  return b_angle != 0.0 ? specfun::ModularParam::unit_circle(b_angle) : specfun::ModularParam::real(b);
}

PrecisionBudget budget_with(double tol) {
  PrecisionBudget b;
  b.rel_tol = tol;
  return b;
}

}  // namespace

PYBIND11_MODULE(_yblab, m) {
  m.doc() = "Star-triangle solutions: special functions, checks and lattice sampling";

  // Translators run most-recent first, so the base class goes in before its subclasses.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());

  m.def("log_gamma", &specfun::log_gamma, py::arg("z"));
  m.def("theta1", &specfun::theta1, py::arg("z"), py::arg("q"));
  m.def(
      "elliptic_gamma", [](Complex z, double p, double q) { return specfun::elliptic_gamma(z, specfun::EllipticNomes::real(p, q)); },
      py::arg("z"), py::arg("p"), py::arg("q"));
  m.def(
      "ncqdl", [](Complex z, double b, double b_angle) { return specfun::ncqdl(z, modular(b, b_angle)); }, py::arg("z"),
      py::arg("b") = 1.0, py::arg("b_angle") = 0.0);

  py::class_<Model>(m, "Model")
      .def_static(
          "elliptic", [](double p, double q) { return Model::elliptic(p, q); }, py::arg("p"), py::arg("q"))
      .def_static(
          "hyperbolic", [](double b, double b_angle) { return Model::hyperbolic(modular(b, b_angle)); },
          py::arg("b") = 1.0, py::arg("b_angle") = 0.0)
      .def_static("gamma", &Model::gamma)
      .def_property_readonly("name", &Model::name)
      .def_property_readonly("eta", &Model::eta)
      .def("__repr__", [](const Model& md) { return "<yblab.Model " + md.name() + ">"; });

  m.def(
      "edge_weight",
      [](const Model& md, double alpha, const py::handle& a, const py::handle& b) {
        return weights::edge_weight(md, alpha, to_spin(a), to_spin(b));
      },
      py::arg("model"), py::arg("alpha"), py::arg("s1"), py::arg("s2"));
  m.def(
      "single_spin_weight", [](const Model& md, const py::handle& s) { return weights::single_spin_weight(md, to_spin(s)); },
      py::arg("model"), py::arg("s"));

  py::class_<verify::VerificationReport>(m, "VerificationReport")
      .def_readonly("lhs", &verify::VerificationReport::lhs)
      .def_readonly("rhs", &verify::VerificationReport::rhs)
      .def_readonly("abs_residual", &verify::VerificationReport::abs_residual)
      .def_readonly("rel_residual", &verify::VerificationReport::rel_residual)
      .def_readonly("r_factor", &verify::VerificationReport::r_factor)
      .def_readonly("error_estimate", &verify::VerificationReport::error_estimate)
      .def_readonly("passed", &verify::VerificationReport::passed)
      .def_readonly("note", &verify::VerificationReport::note);

  m.def(
      "str_residual",
      [](const Model& md, const py::sequence& outer, const std::array<double, 3>& spectral, double tol) {
        auto r = verify::str_residual(md, to_star(outer, spectral), budget_with(tol * 1e-2));
        verify::finalize(r, tol);
        return r;
      },
      py::arg("model"), py::arg("outer"), py::arg("spectral"), py::arg("tol") = 1e-6);
  m.def(
      "random_star",
      [](const Model& md, std::uint64_t seed, std::uint64_t index) {
        auto rng = verify::item_rng(seed, index);
        const auto c = verify::random_star_config(md, rng);
        py::list outer;
        for (const auto& s : c.outer) outer.append(from_spin(s));
        return py::make_tuple(outer, c.spectral);
      },
      py::arg("model"), py::arg("seed") = 7, py::arg("index") = 0);
  m.def(
      "run_str_campaign",
      [](const Model& md, int count, double tol, std::uint64_t seed) {
        py::gil_scoped_release release;
        return verify::run_str_campaign(md, count, tol, seed, verify::default_threads());
      },
      py::arg("model"), py::arg("count"), py::arg("tol") = 1e-6, py::arg("seed") = 7);
  m.def(
      "inversion_pointwise",
      [](const Model& md, double alpha, const py::handle& a, const py::handle& b) {
        return verify::inversion_pointwise(md, alpha, to_spin(a), to_spin(b));
      },
      py::arg("model"), py::arg("alpha"), py::arg("s1"), py::arg("s2"));

  py::class_<lattice::PartitionResult>(m, "PartitionResult")
      .def_readonly("log_z", &lattice::PartitionResult::log_z)
      .def_readonly("per_site", &lattice::PartitionResult::per_site)
      .def_readonly("error_estimate", &lattice::PartitionResult::error_estimate)
      .def_readonly("internal_sites", &lattice::PartitionResult::internal_sites);

  py::class_<lattice::Observables>(m, "Observables")
      .def_readonly("mean_log_w", &lattice::Observables::mean_log_w)
      .def_readonly("std_error", &lattice::Observables::std_error)
      .def_readonly("tau_int", &lattice::Observables::tau_int)
      .def_readonly("acceptance", &lattice::Observables::acceptance)
      .def_readonly("series", &lattice::Observables::series)
      .def_readonly("warnings", &lattice::Observables::warnings);

  auto spec_of = [](const Model& md, int rows, int cols, std::optional<double> alpha) {
    lattice::LatticeSpec s;
    s.rows = rows;
    s.cols = cols;
    s.alpha = alpha.value_or(0.5 * md.eta());
    return s;
  };

  m.def(
      "lattice_exact",
      [spec_of](const Model& md, int rows, int cols, std::optional<double> alpha, int nodes, int n_max) {
        py::gil_scoped_release release;
        const auto spec = spec_of(md, rows, cols, alpha);
        const auto g = lattice::GridDiscretization::for_graph(md, spec.to_graph(md), nodes, n_max);
        return lattice::exact_partition(spec, md, g);
      },
      py::arg("model"), py::arg("rows") = 3, py::arg("cols") = 3, py::arg("alpha") = py::none(),
      py::arg("nodes") = 64, py::arg("n_max") = 8);
  m.def(
      "lattice_mc",
      [spec_of](const Model& md, int rows, int cols, std::optional<double> alpha, int sweeps, int burn_in,
                std::uint64_t seed) {
        py::gil_scoped_release release;
        lattice::MCConfig c;
        c.sweeps = sweeps;
        c.burn_in = burn_in;
        c.seed = seed;
        return lattice::mc_run(spec_of(md, rows, cols, alpha), md, c);
      },
      py::arg("model"), py::arg("rows") = 3, py::arg("cols") = 3, py::arg("alpha") = py::none(),
      py::arg("sweeps") = 20000, py::arg("burn_in") = 2000, py::arg("seed") = 1);
}
