#include "hehom/effective.hpp"

#include <cmath>

namespace hehom {

namespace {

struct ClusterFields {
  std::vector<VecC> phi;                // ω⁻¹ς_p
  std::vector<std::vector<VecC>> dphi;  // ∂_s(ω⁻¹ς_p)
};

ClusterFields cluster_fields(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const MatC& cluster) {
  const SamplingGrid& grid = coeffs.grid();
  ClusterFields f;
  for (Eigen::Index p = 0; p < cluster.cols(); ++p) {
    VecC phi = grid.cell_to_grid(basis, cluster.col(p)).cwiseProduct(coeffs.inv_omega().cast<cplx>());
    std::vector<VecC> d;
    for (int s = 0; s < coeffs.dim(); ++s) d.push_back(grid.derivative(phi, s));
    f.phi.push_back(std::move(phi));
    f.dphi.push_back(std::move(d));
  }
  return f;
}

VecC metric_c(const PeriodicCoefficients& c, int r, int s) { return c.metric(r, s).cast<cplx>(); }

}  // namespace

void g1_tensor(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const ThresholdPoint& tp,
               std::vector<cplx>& g1, std::vector<cplx>& g1_tilde) {
  const int n = tp.n, d = coeffs.dim();
  const SamplingGrid& grid = coeffs.grid();
  ClusterFields f = cluster_fields(coeffs, basis, tp.cluster);
  g1_tilde.assign(static_cast<std::size_t>(n * n * d), 0.0);
  g1.assign(g1_tilde.size(), 0.0);
  auto at = [&](int l, int p, int r) { return static_cast<std::size_t>((l * n + p) * d + r); };
  for (int l = 0; l < n; ++l)
    for (int p = 0; p < n; ++p)
      for (int r = 0; r < d; ++r) {
        cplx acc = 0.0;
        for (int s = 0; s < d; ++s) {
          VecC dp = f.dphi[static_cast<std::size_t>(p)][static_cast<std::size_t>(s)] + kI * tp.k0(s) * f.phi[static_cast<std::size_t>(p)];
          acc -= grid.integrate(VecC(metric_c(coeffs, r, s).cwiseProduct(f.phi[static_cast<std::size_t>(l)].conjugate()).cwiseProduct(dp)));
        }
        g1_tilde[at(l, p, r)] = acc;
      }
  for (int l = 0; l < n; ++l)
    for (int p = 0; p < n; ++p)
      for (int r = 0; r < d; ++r) g1[at(l, p, r)] = kI * (g1_tilde[at(l, p, r)] - std::conj(g1_tilde[at(p, l, r)]));
}

CellProblems solve_cell_problems(const ThresholdModel& model) {
  const PeriodicCoefficients& coeffs = model.coeffs();
  const PlaneWaveBasis& basis = model.basis();
  const ThresholdPoint& tp = model.point();
  const SamplingGrid& grid = coeffs.grid();
  const int n = tp.n, d = coeffs.dim();
  ClusterFields f = cluster_fields(coeffs, basis, tp.cluster);
  const VecC winv = coeffs.inv_omega().cast<cplx>();
  CellProblems cp;
  MatC rhs(static_cast<Eigen::Index>(basis.size()), n * d);
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < d; ++r) {
      const VecC& phi = f.phi[static_cast<std::size_t>(p)];
      VecC acc = VecC::Zero(phi.size());
      for (int s = 0; s < d; ++s) {
        VecC dp = f.dphi[static_cast<std::size_t>(p)][static_cast<std::size_t>(s)] + kI * tp.k0(s) * phi;
        acc += metric_c(coeffs, r, s).cwiseProduct(dp);
        VecC h = metric_c(coeffs, s, r).cwiseProduct(phi);
        acc += grid.derivative(h, s) + kI * tp.k0(s) * h;
      }
      acc = acc.cwiseProduct(winv);
      rhs.col(p * d + r) = grid.grid_to_cell(basis, acc);
    }
  MatC sol = model.reduced_resolvent_apply(rhs);
  MatC m0 = model.expansion().at(VecR::Zero(d), tp.lambda0);
  for (int j = 0; j < n * d; ++j) {
    cp.rhs.push_back(rhs.col(j));
    cp.solutions.push_back(sol.col(j));
    double nr = rhs.col(j).norm();
    VecC target = rhs.col(j) - model.p() * rhs.col(j);
    if (nr > 0.0) cp.residual = std::max(cp.residual, (m0 * sol.col(j) - target).norm() / nr);
  }
  return cp;
}

std::vector<cplx> g2_tensor(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const ThresholdPoint& tp,
                            const CellProblems& cells) {
  const int n = tp.n, d = coeffs.dim();
  const SamplingGrid& grid = coeffs.grid();
  ClusterFields f = cluster_fields(coeffs, basis, tp.cluster);
  const VecC winv = coeffs.inv_omega().cast<cplx>();
  std::vector<cplx> g2(static_cast<std::size_t>(n * n * d * d), 0.0);
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < d; ++r) {
      VecC lam = grid.cell_to_grid(basis, cells.solutions[static_cast<std::size_t>(p * d + r)]).cwiseProduct(winv);
      std::vector<VecC> dlam;
      for (int s = 0; s < d; ++s) dlam.push_back(grid.derivative(lam, s));
      for (int l = 0; l < n; ++l) {
        VecC phil = f.phi[static_cast<std::size_t>(l)].conjugate();
        for (int q = 0; q < d; ++q) {
          cplx acc = 0.0;
          for (int s = 0; s < d; ++s) {
            VecC dphil = f.dphi[static_cast<std::size_t>(l)][static_cast<std::size_t>(s)].conjugate();
            VecC g = metric_c(coeffs, q, s);
            acc -= grid.integrate(VecC(g.cwiseProduct(lam.cwiseProduct(dphil) - phil.cwiseProduct(dlam[static_cast<std::size_t>(s)]))));
            acc += 2.0 * kI * tp.k0(s) * grid.integrate(VecC(g.cwiseProduct(lam).cwiseProduct(phil)));
          }
          acc += grid.integrate(VecC(metric_c(coeffs, q, r).cwiseProduct(f.phi[static_cast<std::size_t>(p)]).cwiseProduct(phil)));
          g2[static_cast<std::size_t>(((l * n + p) * d + r) * d + q)] = acc;
        }
      }
    }
  return g2;
}

EffectiveTensors effective_tensors(const ThresholdModel& model, bool refine) {
  const PeriodicCoefficients& coeffs = model.coeffs();
  const PlaneWaveBasis& basis = model.basis();
  const ThresholdPoint& tp = model.point();
  EffectiveTensors t;
  t.n = tp.n;
  t.d = coeffs.dim();
  t.k0 = tp.k0;
  t.band = tp.band;
  t.lambda0 = tp.lambda0;
  t.d0 = tp.d0;
  t.kappa = tp.kappa;
  t.cluster = tp.cluster;
  t.modes = basis.indices();
  g1_tensor(coeffs, basis, tp, t.g1, t.g1_tilde);
  CellProblems cells = solve_cell_problems(model);
  t.g2 = g2_tensor(coeffs, basis, tp, cells);

  auto& pv = t.provenance;
  pv.cutoff = basis.cutoff();
  pv.basis_size = basis.size();
  pv.grid_shape = coeffs.grid().shape();
  pv.grid_factor = coeffs.grid_factor();
  pv.cluster_tol = tp.cluster_tol;
  pv.reference = tp.reference;
  pv.cell_residual = cells.residual;
  pv.lattice = basis.lattice().basis();
  pv.shift = coeffs.shift();
  if (cells.residual > 1e-10) t.warnings.push_back("cell-problem residual exceeds 1e-10");

  if (refine) {
    PeriodicCoefficients fine(coeffs.spec(), basis, 2 * coeffs.grid_factor());
    ThresholdModel fm(fine, basis, tp);
    std::vector<cplx> g1f, g1tf;
    g1_tensor(fine, basis, tp, g1f, g1tf);
    std::vector<cplx> g2f = g2_tensor(fine, basis, tp, solve_cell_problems(fm));
    double delta = 0.0;
    for (std::size_t i = 0; i < g1f.size(); ++i) delta = std::max(delta, std::abs(g1f[i] - t.g1[i]));
    for (std::size_t i = 0; i < g2f.size(); ++i) delta = std::max(delta, std::abs(g2f[i] - t.g2[i]));
    pv.refinement_delta = delta;
    if (delta > 1e-9) t.warnings.push_back("tensors change by more than 1e-9 under quadrature refinement");
  }
  return t;
}

MatC effective_symbol_shifted(const EffectiveTensors& t, const VecR& dk) {
  if (dk.size() != t.d) throw InvalidInput("quasimomentum offset has wrong dimension");
  MatC g = MatC::Zero(t.n, t.n);
  for (int l = 0; l < t.n; ++l)
    for (int p = 0; p < t.n; ++p) {
      cplx acc = 0.0;
      for (int r = 0; r < t.d; ++r) {
        acc += t.first(l, p, r) * dk(r);
        for (int q = 0; q < t.d; ++q) acc += t.second(l, p, r, q) * dk(r) * dk(q);
      }
      g(l, p) = acc;
    }
  double dev = (g - g.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-10 * (1.0 + std::abs(t.lambda0) + g.cwiseAbs().maxCoeff()))
    throw ConsistencyError("effective symbol is not Hermitian");
  return 0.5 * (g + g.adjoint());
}

MatC effective_symbol(const EffectiveTensors& t, const VecR& dk) {
  MatC g = effective_symbol_shifted(t, dk);
  g.diagonal().array() += t.lambda0;
  return g;
}

MatC symbol_exponential(const EffectiveTensors& t, const VecR& dk, double tau) {
  Eigen::SelfAdjointEigenSolver<MatC> es(effective_symbol_shifted(t, dk));
  VecC phase = (-kI * tau * es.eigenvalues().array()).exp();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

VecC reduced_evolution(const EffectiveTensors& t, const VecR& dk, double tau, int j) {
  if (j < 1 || j > t.n) throw InvalidInput("profile index outside the cluster");
  return std::exp(-kI * tau * t.lambda0) * symbol_exponential(t, dk, tau).col(j - 1);
}

}  // namespace hehom
