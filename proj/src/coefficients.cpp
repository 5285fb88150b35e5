#include "hehom/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace hehom {

namespace {

// Transform roundoff would otherwise couple every pair of plane waves.
VecC chop(VecC c) {
  const double floor = 1e-14 * c.cwiseAbs().maxCoeff();
  for (auto& z : c)
    if (std::abs(z) < floor) z = 0.0;
  return c;
}

using SeriesMap = std::map<MultiIndex, cplx>;

SeriesMap to_map(const FourierSeries& s) {
  SeriesMap m;
  for (const auto& t : s) m[t.index] += t.amplitude;
  return m;
}

cplx lookup(const SeriesMap& m, const MultiIndex& k) {
  auto it = m.find(k);
  return it == m.end() ? cplx(0.0) : it->second;
}

MultiIndex negate(MultiIndex m) {
  for (auto& c : m) c = -c;
  return m;
}

MultiIndex diff(const MultiIndex& a, const MultiIndex& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

void check_series(const FourierSeries& s, int d, const std::string& what) {
  for (const auto& t : s) {
    for (int a = d; a < 3; ++a)
      if (t.index[a] != 0) throw InvalidInput(what + ": multi-index has more components than the dimension");
    if (!std::isfinite(t.amplitude.real()) || !std::isfinite(t.amplitude.imag()))
      throw InvalidInput(what + ": non-finite amplitude");
  }
  SeriesMap m = to_map(s);
  for (const auto& [k, a] : m) {
    cplx b = lookup(m, negate(k));
    if (std::abs(a - std::conj(b)) > 1e-12 * (1.0 + std::abs(a)))
      throw InvalidInput(what + ": coefficients are not Hermitian-symmetric, the function would not be real");
  }
}

}  // namespace

void validate_spec(const CoefficientSpec& spec, int d) {
  if (spec.metric.size() != static_cast<std::size_t>(d * d))
    throw InvalidInput("metric must have d*d entries");
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) {
      check_series(spec.metric[static_cast<std::size_t>(r * d + s)], d, "metric entry");
      if (to_map(spec.metric[static_cast<std::size_t>(r * d + s)]) != to_map(spec.metric[static_cast<std::size_t>(s * d + r)]))
        throw InvalidInput("metric must be symmetric");
    }
  if (spec.potential && spec.weight) throw InvalidInput("give either a potential or a weight, not both");
  if (spec.potential) check_series(*spec.potential, d, "potential");
  if (spec.weight) {
    check_series(*spec.weight, d, "weight");
    if (spec.weight->empty()) throw InvalidInput("weight has no terms");
  }
}

CoefficientSpec free_spec(int d) {
  CoefficientSpec s;
  s.metric.resize(static_cast<std::size_t>(d * d));
  for (int r = 0; r < d; ++r) s.metric[static_cast<std::size_t>(r * d + r)] = {FourierTerm{{0, 0, 0}, 1.0}};
  return s;
}

GroundState ground_state(const CoefficientSpec& spec, const PlaneWaveBasis& basis) {
  const int d = basis.dim();
  validate_spec(spec, d);
  std::vector<SeriesMap> g;
  for (const auto& e : spec.metric) g.push_back(to_map(e));
  SeriesMap v = spec.potential ? to_map(*spec.potential) : SeriesMap{};
  const auto n = static_cast<Eigen::Index>(basis.size());
  const MatR& b = basis.vectors();
  MatC h(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      MultiIndex dm = diff(basis.index(static_cast<std::size_t>(i)), basis.index(static_cast<std::size_t>(j)));
      cplx acc = lookup(v, dm);
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s) {
          cplx c = lookup(g[static_cast<std::size_t>(r * d + s)], dm);
          if (c != 0.0) acc += b(r, i) * c * b(s, j);
        }
      h(i, j) = acc;
    }
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<MatC> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("ground-state eigensolver failed");
  VecC psi = es.eigenvectors().col(0);
  cplx p0 = psi(static_cast<Eigen::Index>(basis.zero()));
  if (std::abs(p0) < 1e-12) throw ResolutionFailure("ground state has vanishing mean");
  psi *= std::conj(p0) / std::abs(p0);
  VecC sym(n);
  for (Eigen::Index i = 0; i < n; ++i)
    sym(i) = 0.5 * (psi(i) + std::conj(psi(static_cast<Eigen::Index>(basis.negation(static_cast<std::size_t>(i))))));
  sym.normalize();
  GroundState gs;
  gs.shift = es.eigenvalues()(0);
  gs.omega_hat = sym;
  gs.residual = (h * sym - gs.shift * sym).norm();
  return gs;
}

VecR evaluate_series(const SamplingGrid& grid, const FourierSeries& series) {
  VecC c = VecC::Zero(static_cast<Eigen::Index>(grid.size()));
  for (const auto& t : series) {
    if (!grid.resolves(t.index)) throw ResolutionFailure("sampling grid too coarse for coefficient series");
    c(static_cast<Eigen::Index>(grid.slot(t.index))) += t.amplitude;
  }
  VecC x = grid.backward(c);
  double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if (x.imag().cwiseAbs().maxCoeff() > 1e-10 * scale) throw InvalidInput("coefficient series is not real-valued");
  return x.real();
}

void PeriodicCoefficients::check_basis(const PlaneWaveBasis& basis) const {
  for (int a = 0; a < dim(); ++a)
    if (basis.extent()[a] > basis_extent_[a])
      throw ResolutionFailure("basis exceeds the resolution of the coefficient grid");
}

PeriodicCoefficients::PeriodicCoefficients(const CoefficientSpec& spec, const PlaneWaveBasis& basis, int grid_factor)
    : spec_(spec), grid_factor_(grid_factor) {
  const int d = basis.dim();
  validate_spec(spec, d);
  if (grid_factor < 2) throw InvalidInput("grid factor must be at least 2");
  MultiIndex shape{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    shape[a] = grid_factor * (2 * basis.extent()[a] + 1);
    if (shape[a] % 2) ++shape[a];
  }
  grid_ = SamplingGrid(basis.lattice(), shape);
  basis_extent_ = basis.extent();
  // Only the resolution check matters; the potential enters through the ground-state matrix.
  if (spec.potential) evaluate_series(grid_, *spec.potential);

  FourierSeries omega_series;
  if (spec.weight) {
    SeriesMap m = to_map(*spec.weight);
    double norm2 = 0.0;
    for (const auto& [k, a] : m) norm2 += std::norm(a);
    if (norm2 <= 0.0) throw InvalidInput("weight vanishes");
    omega_hat_.resize(static_cast<Eigen::Index>(m.size()));
    Eigen::Index i = 0;
    for (const auto& [k, a] : m) {
      omega_modes_.push_back(k);
      omega_hat_(i++) = a / std::sqrt(norm2);
    }
    shift_ = 0.0;
  } else {
    GroundState gs = ground_state(spec, basis);
    omega_modes_ = basis.indices();
    omega_hat_ = gs.omega_hat;
    shift_ = gs.shift;
    ground_residual_ = gs.residual;
    derived_weight_ = true;
  }
  for (std::size_t i = 0; i < omega_modes_.size(); ++i)
    omega_series.push_back({omega_modes_[i], omega_hat_(static_cast<Eigen::Index>(i))});

  omega_ = evaluate_series(grid_, omega_series);
  if (omega_.minCoeff() <= 0.0)
    throw ResolutionFailure("ground state changes sign on the sampling grid; refine the cutoff");
  inv_omega_ = omega_.cwiseInverse();
  inv_omega_hat_ = chop(grid_.forward(inv_omega_.cast<cplx>()));
  inv_omega_sup_ = inv_omega_.maxCoeff();
  const double vol = grid_.lattice().cell_volume();
  omega_norm_error_ = std::abs(grid_.integrate(VecR(omega_.array().square())) - vol) / vol;

  // ω⁻¹ is not band-limited; its spectrum must have decayed at the grid edge.
  {
    double peak = inv_omega_hat_.cwiseAbs().maxCoeff(), edge = 0.0;
    for (std::size_t s = 0; s < grid_.size(); ++s) {
      MultiIndex m = grid_.frequency(s);
      for (int a = 0; a < d; ++a)
        if (4 * std::abs(m[a]) >= 3 * shape[a]/2) edge = std::max(edge, std::abs(inv_omega_hat_(static_cast<Eigen::Index>(s))));
    }
    if (edge > 1e-10 * peak) warnings_.push_back("inverse weight is not resolved by the sampling grid");
  }

  const auto np = static_cast<Eigen::Index>(grid_.size());
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) gcheck_.push_back(evaluate_series(grid_, spec.metric[static_cast<std::size_t>(r * d + s)]));
  for (int k = 0; k < d * d; ++k) {
    g_.push_back(omega_.array().square() * gcheck_[static_cast<std::size_t>(k)].array());
    g_hat_.push_back(chop(grid_.forward(g_.back().cast<cplx>())));
  }
  alpha0_ = std::numeric_limits<double>::infinity();
  alpha1_ = 0.0;
  metric_sup_ = 0.0;
  MatR gc(d, d), gf(d, d);
  for (Eigen::Index j = 0; j < np; ++j) {
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) {
        gc(r, s) = gcheck_[static_cast<std::size_t>(r * d + s)](j);
        gf(r, s) = g_[static_cast<std::size_t>(r * d + s)](j);
      }
    Eigen::SelfAdjointEigenSolver<MatR> e1(gc, Eigen::EigenvaluesOnly), e2(gf, Eigen::EigenvaluesOnly);
    alpha0_ = std::min(alpha0_, e1.eigenvalues()(0));
    alpha1_ = std::max(alpha1_, e1.eigenvalues()(d - 1));
    metric_sup_ = std::max(metric_sup_, e2.eigenvalues()(d - 1));
  }
  if (!(alpha0_ > 0.0)) throw InvalidInput("metric is not uniformly positive definite");

  // Sup norms from a doubled grid; disagreement means the grid misses extrema.
  MultiIndex fine = shape;
  for (int a = 0; a < d; ++a) fine[a] *= 2;
  SamplingGrid fg(grid_.lattice(), fine);
  VecR omega_fine = evaluate_series(fg, omega_series);
  double fine_sup = omega_fine.cwiseInverse().maxCoeff();
  if (std::abs(fine_sup - inv_omega_sup_) > 1e-6 * fine_sup)
    warnings_.push_back("sup norm of the inverse weight changes under grid refinement");
  inv_omega_sup_ = std::max(inv_omega_sup_, fine_sup);
}

}  // namespace hehom
