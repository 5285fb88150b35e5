// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace hehom;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run(int id, const std::string& name, const std::function<void(Verdict&)>& body) {
  Verdict v;
  v.detail.precision(3);
  try {
    body(v);
  } catch (const std::exception& e) {
    v.ok = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  if (!v.ok) ++failures;
  std::printf("%s criterion %2d  %-34s%s\n", v.ok ? "PASS" : "FAIL", id, name.c_str(), v.detail.str().c_str());
  std::fflush(stdout);
}

// The Mathieu n = 1 configuration: bottom of the first band.
json mathieu_threshold() { return fixture::mathieu(0.0, 1); }

WavePacket gaussian(double radius, int nodes) {
  PacketSpec ps;
  ps.radius = radius;
  ps.nodes = nodes;
  return make_packet(ps, 1, 1);
}

void free_exactness(Verdict& v) {
  auto t0 = Clock::now();
  Lattice lat(MatR::Identity(1, 1));
  PlaneWaveBasis basis(lat, default_cutoff(lat));
  PeriodicCoefficients coeffs(free_spec(1), basis);
  std::vector<VecR> ks;
  for (int i = 0; i <= 200; ++i) ks.push_back(VecR::Constant(1, -kPi + 2 * kPi * i / 200.0));
  const Eigen::Index count = static_cast<Eigen::Index>(basis.size());
  BandStructure bs = band_structure(coeffs, basis, ks, count);
  double worst = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::vector<double> ref;
    for (int m = -8; m <= 8; ++m) ref.push_back(std::pow(ks[i](0) + 2 * kPi * m, 2));
    std::sort(ref.begin(), ref.end());
    for (Eigen::Index m = 0; m < count; ++m)
      worst = std::max(worst, std::abs(bs.energies(static_cast<Eigen::Index>(i), m) - ref[static_cast<std::size_t>(m)]));
  }
  double t = seconds_since(t0);
  v.detail << "max error " << worst << ", " << count << " bands, " << t << " s";
  v.require(basis.size() >= 17, "cutoff below 8 modes");
  v.require(worst <= 1e-10, "band error");
  v.require(t < 1.0, "runtime");
}

void free_tensors(Verdict& v) {
  double g1 = 0.0, g2 = 0.0;
  for (const json& j : {fixture::free_1d(0.0), fixture::free_2d(0.0, 0.0)}) {
    Pipeline p(fixture::config(j));
    const auto& t = p.tensors();
    v.require(t.n == 1, "cluster size");
    for (int r = 0; r < t.d; ++r) {
      g1 = std::max(g1, std::abs(t.first(0, 0, r)));
      for (int q = 0; q < t.d; ++q) g2 = std::max(g2, std::abs(t.second(0, 0, r, q) - (r == q ? 1.0 : 0.0)));
    }
  }
  v.detail << "|g1| " << g1 << ", |g2 - g| " << g2;
  v.require(g1 <= 1e-12, "g1");
  v.require(g2 <= 1e-10, "g2");
}

void dirac(Verdict& v) {
  Pipeline p(fixture::config(fixture::free_1d(kPi)));
  const auto& tp = p.point();
  const double pi2 = kPi * kPi;
  v.require(tp.n == 2, "cluster size");
  v.require(std::abs(tp.lambda0 - pi2) <= 1e-8 * pi2, "lambda0");
  v.require(std::abs(tp.d0 - 8 * pi2) <= 1e-8 * 8 * pi2, "d0");
  double sym = 0.0;
  for (double dk : {-0.3, -0.1, -0.01, 0.01, 0.1, 0.3}) {
    VecR e = eig_hermitian(effective_symbol(p.tensors(), VecR::Constant(1, dk)), 0, false).values;
    double a = 2 * kPi * std::abs(dk);
    sym = std::max({sym, std::abs(e(0) - (pi2 - a + dk * dk)), std::abs(e(1) - (pi2 + a + dk * dk))});
  }
  WavePacket w = gaussian(2.0, 64);
  double err = 0.0;
  for (double eps : {0.1, 0.05})
    for (double tau : {1.0, 10.0}) {
      FiberField u = propagate_exact(p.model(), w, eps, tau);
      EffectiveField f = propagate_effective(p.tensors(), w, eps, tau);
      err = std::max(err, assemble_error(w, u, f, tp.cluster, p.cell_volume()));
    }
  v.detail << "n " << tp.n << ", d0 " << tp.d0 << ", symbol " << sym << ", error " << err;
  v.require(sym <= 1e-10, "symbol spectrum");
  v.require(err <= 1e-12, "assembled error");
}

void mathieu_consistency(Verdict& v) {
  Pipeline p(fixture::config(fixture::mathieu(0.0, 1)));
  auto band = [&](double k) { return eig_fiber(assemble_fiber(p.coeffs(), p.basis(), VecR::Constant(1, k)), 1).values(0); };
  const double h = 1e-2;
  double e[5];
  for (int i = -2; i <= 2; ++i) e[i + 2] = band(i * h);
  double grad = (e[0] - 8 * e[1] + 8 * e[3] - e[4]) / (12 * h);
  double hess = (-e[0] + 16 * e[1] - 30 * e[2] + 16 * e[3] - e[4]) / (12 * h * h);
  double g1 = std::abs(p.tensors().first(0, 0, 0));
  double g2 = 2 * p.tensors().second(0, 0, 0, 0).real();
  double rel = std::abs(g2 - hess) / std::abs(hess);
  v.detail << "|g1| " << g1 << ", |fd grad| " << std::abs(grad) << ", hessian rel " << rel;
  v.require(g1 <= 1e-8 && std::abs(grad) <= 1e-8, "gradient at extremum");
  v.require(rel <= 1e-6, "hessian");
}

void projection_bounds(Verdict& v) {
  Pipeline p(fixture::config(mathieu_threshold()));
  const auto& m = p.model();
  const double kappa = p.point().kappa;
  std::vector<double> dks, rem;
  double worst_ratio = 0.0;
  for (double frac = 1e-3; frac <= 0.1 * (1 + 1e-12); frac *= 2) {
    VecR dk = VecR::Constant(1, frac * kappa);
    ProjectionData f = m.spectral_projection(p.point().k0 + dk);
    worst_ratio = std::max(worst_ratio, f.distance_to_p / (p.ledger().c7 * dk.norm()));
    dks.push_back(dk.norm());
    rem.push_back(spectral_norm(f.projection - m.p() - m.f1(dk)));
  }
  double order = oracle::loglog_slope(dks, rem);
  v.detail << "max |F-P|/(C7|dk|) " << worst_ratio << ", remainder order " << order;
  v.require(worst_ratio <= 1.0, "first-order bound");
  v.require(order >= 1.9, "remainder order");
}

void fiber_bound(Verdict& v) {
  auto t0 = Clock::now();
  Pipeline p(fixture::config(mathieu_threshold()));
  double min_margin = 1e300, min_order = 1e300;
  for (double tau : {1.0, 10.0, 100.0}) {
    std::vector<double> dks, lhs;
    for (double frac : {0.3, 0.1, 0.03}) {
      BoundSample s = verify_exponential_bound(p.model(), p.tensors(), VecR::Constant(1, frac * p.point().kappa), tau, p.ledger());
      min_margin = std::min(min_margin, s.margin());
      dks.push_back(s.dk_norm);
      lhs.push_back(s.lhs);
    }
    min_order = std::min(min_order, oracle::loglog_slope(dks, lhs));
  }
  double t = seconds_since(t0);
  v.detail << "min margin " << min_margin << ", min order " << min_order << ", " << t << " s";
  v.require(min_margin >= 0.0, "bound violated");
  v.require(min_order >= 1.0, "order");
  v.require(t < 60.0, "runtime");
}

void convergence(Verdict& v) {
  auto t0 = Clock::now();
  json j = mathieu_threshold();
  Pipeline probe(fixture::config(j));
  const double radius = probe.point().kappa / 0.1;
  j["packet"] = {{"radius", radius}, {"nodes", 64}};
  j["epsilons"] = {0.1, 0.05, 0.025, 0.0125};
  j["taus"] = {1.0};
  Pipeline p(fixture::config(j));
  ConvergenceReport r = run_convergence(p);
  bool certified = true;
  double worst = 0.0;
  for (const auto& e : r.entries) {
    certified = certified && e.certified;
    worst = std::max(worst, e.error / e.bound);
  }
  double t = seconds_since(t0);
  const SlopeRecord& s = r.slopes.at(0);
  double slope = s.fit ? s.fit->slope : 0.0;
  v.detail << "max error/bound " << worst << ", slope " << slope << ", " << t << " s";
  v.require(certified, "packet support exceeds kappa");
  v.require(r.all_bounds_hold(), "bound violated");
  v.require(s.status == "fitted" && slope >= 0.8 && slope <= 1.3, "slope");
  v.require(t < 300.0, "runtime");
}

void unitarity(Verdict& v) {
  Pipeline p(fixture::config(mathieu_threshold()));
  WavePacket w = gaussian(p.point().kappa / 0.1, 64);
  double drift = 0.0;
  for (double eps : {0.1, 0.05, 0.025, 0.0125})
    for (double tau : {1.0, 10.0, 100.0}) {
      FiberField u = propagate_exact(p.model(), w, eps, tau);
      EffectiveField f = propagate_effective(p.tensors(), w, eps, tau);
      drift = std::max({drift, std::abs(u.norm(w) - w.l2_norm), std::abs(f.norm(w) - w.l2_norm)});
    }
  drift /= w.l2_norm;
  const auto& c = p.coeffs();
  v.detail << "norm drift " << drift << ", |omega| error " << c.omega_norm_error() << ", residual " << c.ground_residual();
  v.require(drift <= 1e-12, "norm conservation");
  v.require(c.omega_norm_error() <= 1e-10, "omega normalisation");
  v.require(c.ground_residual() <= 1e-8, "ground-state residual");
}

void gauge(Verdict& v) {
  Pipeline p(fixture::config(fixture::free_1d(kPi)));
  WavePacket w = gaussian(2.0, 64);
  const double eps = 0.1, tau = 1.0;
  FiberField u = propagate_exact(p.model(), w, eps, tau);
  double base = assemble_error(w, u, propagate_effective(p.tensors(), w, eps, tau), p.point().cluster, p.cell_volume());
  std::mt19937 rng(2024);
  double spec_dev = 0.0, err_dev = 0.0;
  for (int t = 0; t < 20; ++t) {
    MatC q = oracle::random_unitary(2, rng);
    ThresholdPoint rotated = regauge(p.coeffs(), p.basis(), p.point(), q);
    ThresholdModel model(p.coeffs(), p.basis(), rotated);
    EffectiveTensors rt = effective_tensors(model, false);
    for (double dk : {-0.3, 0.1}) {
      VecR a = eig_hermitian(effective_symbol(p.tensors(), VecR::Constant(1, dk)), 0, false).values;
      VecR b = eig_hermitian(effective_symbol(rt, VecR::Constant(1, dk)), 0, false).values;
      spec_dev = std::max(spec_dev, (a - b).cwiseAbs().maxCoeff());
    }
    VecC init = q.adjoint() * VecC::Unit(2, 0);
    FiberField ur = propagate_exact(model, w, eps, tau, VecC(rotated.cluster * init));
    EffectiveField fr = propagate_effective(rt, w, eps, tau, init);
    err_dev = std::max(err_dev, std::abs(assemble_error(w, ur, fr, rotated.cluster, p.cell_volume()) - base));
  }
  v.detail << "spectrum deviation " << spec_dev << ", error deviation " << err_dev;
  v.require(spec_dev <= 1e-10, "symbol spectrum");
  v.require(err_dev <= 1e-10, "assembled error");
}

void ledger(Verdict& v) {
  double c1 = constants_ledger(0.0, 3.0, 0.1, 1.0, 1.0).c1;
  double c2 = constants_ledger(0.0, 24.0, 0.1, 1.0, 1.0).c2;
  double c3 = constants_ledger(0.0, 7.0, 0.1, 1.0, 1.0).c3;
  v.detail << "C1 " << c1 << ", C2 " << c2 << ", C3 " << c3;
  v.require(c1 == 2.0, "C1");
  v.require(c2 == 1.0, "C2");
  v.require(c3 == 4.0, "C3");
}

}  // namespace

int main() {
  run(1, "free-operator exactness", free_exactness);
  run(2, "free effective tensors", free_tensors);
  run(3, "Dirac-cone cluster", dirac);
  run(4, "n=1 consistency (Mathieu)", mathieu_consistency);
  run(5, "projection bounds (Mathieu)", projection_bounds);
  run(6, "fiber exponential bound", fiber_bound);
  run(7, "convergence in epsilon", convergence);
  run(8, "unitarity and normalisation", unitarity);
  run(9, "gauge covariance", gauge);
  run(10, "constants ledger", ledger);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
