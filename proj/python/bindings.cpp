#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hehom/harness.hpp"

namespace py = pybind11;
using namespace hehom;

namespace {

// Dicts cross the boundary as JSON text; the Python side decodes.
struct Model {
  explicit Model(const std::string& config_json) : cfg(parse_config(json::parse(config_json))), p(cfg) {}
  RunConfig cfg;
  Pipeline p;

  std::string threshold() const { return to_json(p.point(), p.basis()).dump(); }
  std::string tensors() const { return to_json(p.tensors()).dump(); }
  std::string ledger() const { return to_json(p.ledger()).dump(); }
  std::string converge() const { return to_json(run_convergence(p), p).dump(); }

  MatR bands(const MatR& ks, int count) const {
    if (ks.cols() != p.basis().dim()) throw InvalidInput("quasimomenta must have one column per dimension");
    std::vector<VecR> pts;
    for (Eigen::Index i = 0; i < ks.rows(); ++i) pts.push_back(ks.row(i).transpose());
    return band_structure(p.coeffs(), p.basis(), pts, count).energies;
  }

  MatC symbol(const VecR& dk) const { return effective_symbol(p.tensors(), dk); }

  py::dict bound_sample(const VecR& dk, double tau) const {
    BoundSample s = verify_exponential_bound(p.model(), p.tensors(), dk, tau, p.ledger());
    py::dict d;
    d["dk"] = s.dk_norm;
    d["tau"] = s.tau;
    d["lhs"] = s.lhs;
    d["rhs"] = s.rhs;
    return d;
  }

  py::dict evolve(double eps, double tau) const {
    WavePacket packet = make_packet(cfg.packet, p.basis().dim(), cfg.profile);
    FiberField u = propagate_exact(p.model(), packet, eps, tau);
    EffectiveField v = propagate_effective(p.tensors(), packet, eps, tau);
    ErrorBound b = error_bound(p.ledger(), p.point(), packet, eps, tau, p.cell_volume());
    py::dict d;
    d["eps"] = eps;
    d["tau"] = tau;
    d["error"] = assemble_error(packet, u, v, p.point().cluster, p.cell_volume());
    d["bound"] = b.total();
    d["certified"] = b.certified;
    d["norm_exact"] = u.norm(packet);
    d["norm_effective"] = v.norm(packet);
    return d;
  }
};

}  // namespace

PYBIND11_MODULE(_hehom, m) {
  auto base = py::register_exception<Error>(m, "HehomError", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<ResolutionFailure>(m, "ResolutionFailure", base.ptr());
  py::register_exception<CertificationError>(m, "CertificationError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());

  py::class_<Model>(m, "_Model")
      .def(py::init<const std::string&>())
      .def("threshold", &Model::threshold)
      .def("tensors", &Model::tensors)
      .def("ledger", &Model::ledger)
      .def("converge", &Model::converge, py::call_guard<py::gil_scoped_release>())
      .def("bands", &Model::bands, py::arg("ks"), py::arg("count"))
      .def("symbol", &Model::symbol, py::arg("dk"))
      .def("bound_sample", &Model::bound_sample, py::arg("dk"), py::arg("tau"))
      .def("evolve", &Model::evolve, py::arg("eps"), py::arg("tau"))
      .def_property_readonly("dim", [](const Model& s) { return s.p.basis().dim(); })
      .def_property_readonly("basis_size", [](const Model& s) { return s.p.basis().size(); });
}
