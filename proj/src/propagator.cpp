#include "hehom/propagator.hpp"

#include <cmath>

#include "hehom/parallel.hpp"

namespace hehom {

namespace {

cplx global_phase(double lambda0, double eps, double tau) {
  // exp(-i τ ε⁻² λ0), argument reduced before exponentiation.
  double theta = std::fmod(tau / (eps * eps) * lambda0, 2.0 * kPi);
  return std::exp(-kI * theta);
}

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidInput("epsilon must be positive");
}

}  // namespace

WavePacket make_packet(const PacketSpec& spec, int d, int profile) {
  WavePacket w;
  w.d = d;
  w.profile = profile;
  if (spec.kind == "gaussian") {
    if (spec.nodes < 2) throw InvalidInput("packet needs at least two nodes per axis");
    if (!(spec.radius > 0.0)) throw InvalidInput("packet radius must be positive");
    if (!(spec.width > 0.0)) throw InvalidInput("packet width must be positive");
    VecR center = spec.center.size() == d ? spec.center : VecR::Zero(d);
    const int m = spec.nodes;
    const double h = 2.0 * spec.radius / (m - 1);
    long total = 1;
    for (int a = 0; a < d; ++a) total *= m;
    for (long id = 0; id < total; ++id) {
      VecR xi(d);
      double wt = 1.0;
      long rem = id;
      for (int a = d - 1; a >= 0; --a) {
        int i = static_cast<int>(rem % m);
        rem /= m;
        xi(a) = -spec.radius + h * i;
        wt *= (i == 0 || i == m - 1) ? 0.5 * h : h;
      }
      if (xi.norm() > spec.radius * (1.0 + 1e-12)) continue;
      w.nodes.push_back(xi);
      w.weights.push_back(wt);
      w.amplitudes.push_back(spec.amplitude * std::exp(-(xi - center).squaredNorm() / (spec.width * spec.width)));
    }
    w.radius = spec.radius;
  } else if (spec.kind == "single") {
    VecR xi = !spec.xi.empty() ? spec.xi.front() : (spec.center.size() == d ? spec.center : VecR::Zero(d));
    if (xi.size() != d) throw InvalidInput("packet node has wrong dimension");
    w.nodes.push_back(xi);
    w.weights.push_back(spec.weight);
    w.amplitudes.push_back(spec.amplitude);
    w.radius = xi.norm();
  } else if (spec.kind == "explicit") {
    if (spec.xi.size() != spec.values.size() || spec.xi.size() != spec.weights.size())
      throw InvalidInput("explicit packet lists differ in length");
    for (std::size_t i = 0; i < spec.xi.size(); ++i) {
      if (spec.xi[i].size() != d) throw InvalidInput("packet node has wrong dimension");
      w.nodes.push_back(spec.xi[i]);
      w.amplitudes.push_back(spec.values[i]);
      w.weights.push_back(spec.weights[i]);
      w.radius = std::max(w.radius, spec.xi[i].norm());
    }
  } else {
    throw InvalidInput("unknown packet kind: " + spec.kind);
  }
  double l2 = 0.0, h3 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w.weights[i] > 0.0)) throw InvalidInput("quadrature weights must be positive");
    double a2 = w.weights[i] * std::norm(w.amplitudes[i]);
    l2 += a2;
    h3 += a2 * std::pow(1.0 + w.nodes[i].squaredNorm(), 3);
  }
  if (w.size() == 0 || l2 == 0.0) throw InvalidInput("packet has empty support");
  w.l2_norm = std::sqrt(l2);
  w.h3_norm = std::sqrt(h3);
  return w;
}

double FiberField::norm(const WavePacket& packet) const {
  double s = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    s += packet.weights[i] * std::norm(packet.amplitudes[i]) * vectors[i].squaredNorm();
  return std::sqrt(s);
}

double EffectiveField::norm(const WavePacket& packet) const {
  double s = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) s += packet.weights[i] * coefficients[i].squaredNorm();
  return std::sqrt(s);
}

FiberField propagate_exact(const ThresholdModel& model, const WavePacket& packet, double eps, double tau,
                           const std::optional<VecC>& initial) {
  check_eps(eps);
  const ThresholdPoint& tp = model.point();
  if (packet.d != model.expansion().dim()) throw InvalidInput("packet dimension does not match the lattice");
  if (!initial && (packet.profile < 1 || packet.profile > tp.n)) throw InvalidInput("profile index outside the cluster");
  VecC init = initial ? *initial : VecC(tp.cluster.col(packet.profile - 1));
  if (init.size() != model.expansion().size()) throw InvalidInput("initial cell vector does not match the basis");
  FiberField out;
  out.eps = eps;
  out.tau = tau;
  out.vectors.resize(packet.size());
  const double inradius = model.basis().lattice().inradius();
  double reach = 0.0;
  for (const auto& xi : packet.nodes) reach = std::max(reach, eps * xi.norm());
  if (reach >= inradius) throw InvalidInput("packet support wraps around the Brillouin zone; reduce epsilon or radius");
  if (reach > tp.kappa) out.warnings.push_back("packet support exceeds the certified radius; the bound does not apply");
  const cplx g = global_phase(tp.lambda0, eps, tau);
  const double t = tau / (eps * eps);
  parallel_for(packet.size(), [&](std::size_t i) {
    EigenPairs e = eig_hermitian(model.expansion().at(eps * packet.nodes[i], tp.lambda0));
    VecC phase = (-kI * t * e.values.array()).exp();
    out.vectors[i] = g * (e.vectors * phase.cwiseProduct(e.vectors.adjoint() * init));
  });
  return out;
}

EffectiveField propagate_effective(const EffectiveTensors& tensors, const WavePacket& packet, double eps, double tau,
                                   const std::optional<VecC>& initial) {
  check_eps(eps);
  if (packet.d != tensors.d) throw InvalidInput("packet dimension does not match the tensors");
  VecC init;
  if (initial) {
    init = *initial;
  } else {
    if (packet.profile < 1 || packet.profile > tensors.n) throw InvalidInput("profile index outside the cluster");
    init = VecC::Unit(tensors.n, packet.profile - 1);
  }
  if (init.size() != tensors.n) throw InvalidInput("initial coefficient vector has wrong length");
  EffectiveField out;
  out.eps = eps;
  out.tau = tau;
  out.coefficients.resize(packet.size());
  const cplx g = global_phase(tensors.lambda0, eps, tau);
  const double t = tau / (eps * eps);
  parallel_for(packet.size(), [&](std::size_t i) {
    out.coefficients[i] = packet.amplitudes[i] * g * (symbol_exponential(tensors, eps * packet.nodes[i], t) * init);
  });
  return out;
}

double assemble_error(const WavePacket& packet, const FiberField& exact, const EffectiveField& effective,
                      const MatC& cluster, double cell_volume) {
  if (exact.vectors.size() != packet.size() || effective.coefficients.size() != packet.size())
    throw InvalidInput("fields were computed on different packet grids");
  if (exact.eps != effective.eps || exact.tau != effective.tau)
    throw InvalidInput("fields were computed at different epsilon or tau");
  double s = 0.0;
  for (std::size_t i = 0; i < packet.size(); ++i) {
    VecC diff = packet.amplitudes[i] * exact.vectors[i] - cluster * effective.coefficients[i];
    s += packet.weights[i] * diff.squaredNorm();
  }
  return std::sqrt(s / cell_volume);
}

ErrorBound error_bound(const ConstantsLedger& ledger, const ThresholdPoint& tp, const WavePacket& packet, double eps,
                       double tau, double cell_volume) {
  ErrorBound b;
  double sup_sum = tp.sup_norms.at(static_cast<std::size_t>(packet.profile - 1));
  for (double s : tp.sup_norms) sup_sum += s;
  b.kappa_term = sup_sum / tp.kappa * eps * packet.h3_norm;
  b.estimate_term = (3.0 * ledger.c7 + ledger.c11 * std::abs(tau)) * eps * packet.h3_norm / std::sqrt(cell_volume);
  double reach = 0.0;
  for (const auto& xi : packet.nodes) reach = std::max(reach, eps * xi.norm());
  b.certified = reach <= tp.kappa;
  return b;
}

Snapshot physical_snapshot(const PlaneWaveBasis& basis, const ThresholdPoint& tp, const WavePacket& packet,
                           const FiberField& exact, const EffectiveField& effective, const std::vector<VecR>& points) {
  Snapshot snap;
  snap.points = points;
  snap.exact.assign(points.size(), 0.0);
  snap.effective.assign(points.size(), 0.0);
  const double eps = exact.eps;
  const double pref = std::pow(2.0 * kPi, -0.5 * packet.d) / std::sqrt(basis.lattice().cell_volume());
  parallel_for(points.size(), [&](std::size_t ip) {
    const VecR& x = points[ip];
    VecR y = x / eps;
    VecC plane(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t m = 0; m < basis.size(); ++m)
      plane(static_cast<Eigen::Index>(m)) = std::exp(kI * basis.vectors().col(static_cast<Eigen::Index>(m)).dot(y));
    VecC cl = tp.cluster.transpose() * plane;  // ς_l(y) up to |Ω|^{-1/2}
    cplx ue = 0.0, uf = 0.0;
    for (std::size_t i = 0; i < packet.size(); ++i) {
      cplx carrier = packet.weights[i] * std::exp(kI * (tp.k0 / eps + packet.nodes[i]).dot(x));
      ue += carrier * packet.amplitudes[i] * exact.vectors[i].cwiseProduct(plane).sum();
      uf += carrier * effective.coefficients[i].cwiseProduct(cl).sum();
    }
    snap.exact[ip] = pref * ue;
    snap.effective[ip] = pref * uf;
  });
  return snap;
}

}  // namespace hehom
