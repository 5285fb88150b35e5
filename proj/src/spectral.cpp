#include "hehom/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hehom/parallel.hpp"

namespace hehom {

EigenPairs eig_hermitian(const MatC& m, Eigen::Index count, bool vectors) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw InvalidInput("matrix must be square");
  if (count <= 0 || count > n) count = n;
  Eigen::SelfAdjointEigenSolver<MatC> es(m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  EigenPairs out;
  out.values = es.eigenvalues().head(count);
  if (vectors) {
    out.vectors = es.eigenvectors().leftCols(count);
    const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index j = 0; j < count; ++j) {
      double res = (m * out.vectors.col(j) - out.values(j) * out.vectors.col(j)).norm();
      if (res > 1e-10 * scale) throw NumericalError("eigenpair residual exceeds tolerance");
    }
  }
  return out;
}

EigenPairs eig_fiber(const FiberMatrix& fiber, Eigen::Index count) { return eig_hermitian(fiber.matrix, count); }

BandStructure band_structure(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis,
                             const std::vector<VecR>& ks, Eigen::Index count, bool with_vectors) {
  const auto nb = static_cast<Eigen::Index>(basis.size());
  if (count <= 0 || count > nb) throw InvalidInput("band count must lie between 1 and the basis size");
  BandStructure bs;
  bs.ks = ks;
  bs.energies.resize(static_cast<Eigen::Index>(ks.size()), count);
  if (with_vectors) bs.vectors.resize(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    FiberMatrix f = assemble_fiber(coeffs, basis, ks[i]);
    EigenPairs e = eig_hermitian(f.matrix, count, with_vectors);
    bs.energies.row(static_cast<Eigen::Index>(i)) = e.values.transpose();
    if (with_vectors) bs.vectors[i] = e.vectors;
  });
  return bs;
}

std::vector<VecR> scan_directions(int d) {
  std::vector<VecR> dirs;
  if (d == 1) {
    dirs.push_back(VecR::Constant(1, 1.0));
    dirs.push_back(VecR::Constant(1, -1.0));
  } else if (d == 2) {
    for (int i = 0; i < 32; ++i) {
      double t = 2.0 * kPi * i / 32.0;
      VecR v(2);
      v << std::cos(t), std::sin(t);
      dirs.push_back(v);
    }
  } else {
    // Fibonacci sphere
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < 32; ++i) {
      double z = 1.0 - (2.0 * i + 1.0) / 32.0;
      double r = std::sqrt(1.0 - z * z);
      VecR v(3);
      v << r * std::cos(golden * i), r * std::sin(golden * i), z;
      dirs.push_back(v);
    }
  }
  return dirs;
}

bool separated(const VecR& shifted, int n, double d0) {
  int inside = 0;
  for (Eigen::Index i = 0; i < shifted.size(); ++i) {
    double a = std::abs(shifted(i));
    if (a <= d0 / 3.0)
      ++inside;
    else if (a <= 2.0 * d0 / 3.0)
      return false;
  }
  return inside == n;
}

std::vector<double> sup_norms(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const MatC& cluster) {
  std::vector<double> out;
  for (Eigen::Index p = 0; p < cluster.cols(); ++p)
    out.push_back(coeffs.grid().cell_to_grid(basis, cluster.col(p)).cwiseAbs().maxCoeff());
  return out;
}

MatC fix_gauge(const MatC& frame, const PlaneWaveBasis& basis, const VecR& k0, std::vector<std::size_t>* reference) {
  const Eigen::Index n = frame.cols();
  // Plane waves ordered by |b + k0|, then |b|, then multi-index.
  std::vector<std::size_t> order(basis.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    VecR b = basis.vectors().col(static_cast<Eigen::Index>(i));
    return std::pair<long long, long long>(std::llround((b + k0).norm() * 1e8), std::llround(b.norm() * 1e8));
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  std::vector<std::size_t> ref;
  for (double threshold : {1e-2, 1e-6}) {
    ref.clear();
    for (std::size_t p : order) {
      if (static_cast<Eigen::Index>(ref.size()) == n) break;
      MatC g(static_cast<Eigen::Index>(ref.size() + 1), n);
      for (std::size_t i = 0; i < ref.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = frame.row(static_cast<Eigen::Index>(ref[i]));
      g.row(static_cast<Eigen::Index>(ref.size())) = frame.row(static_cast<Eigen::Index>(p));
      Eigen::JacobiSVD<MatC> svd(g);
      if (svd.singularValues().minCoeff() >= threshold) ref.push_back(p);
    }
    if (static_cast<Eigen::Index>(ref.size()) == n) break;
  }
  if (static_cast<Eigen::Index>(ref.size()) != n) throw NumericalError("could not fix the eigenvector gauge");

  MatC g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) g.row(i) = frame.row(static_cast<Eigen::Index>(ref[static_cast<std::size_t>(i)]));
  // T T* = G G* with T upper triangular: Cholesky of the index-reversed matrix.
  MatC j = MatC::Identity(n, n).rowwise().reverse();
  MatC h = j * (g * g.adjoint()) * j;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::LLT<MatC> llt(h);
  if (llt.info() != Eigen::Success) throw NumericalError("gauge Gram matrix is singular");
  MatC t = j * MatC(llt.matrixL()) * j;
  MatC u = g.partialPivLu().solve(t);
  MatC out = frame * u;
  // Re-orthonormalise without disturbing the triangular structure (Löwdin step; U is unitary to roundoff).
  Eigen::SelfAdjointEigenSolver<MatC> es(out.adjoint() * out);
  out = out * (es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint());
  if (reference) *reference = ref;
  return out;
}

ThresholdPoint regauge(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const ThresholdPoint& tp,
                       const MatC& u) {
  if (u.rows() != tp.n || u.cols() != tp.n) throw InvalidInput("gauge matrix has wrong size");
  if ((u.adjoint() * u - MatC::Identity(tp.n, tp.n)).norm() > 1e-10) throw InvalidInput("gauge matrix is not unitary");
  ThresholdPoint out = tp;
  out.cluster = tp.cluster * u;
  out.sup_norms = sup_norms(coeffs, basis, out.cluster);
  out.reference.clear();
  return out;
}

ThresholdPoint detect_threshold(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const VecR& k0_in,
                                int band, const ThresholdOptions& options) {
  const Lattice& lat = basis.lattice();
  const int d = lat.dim();
  ThresholdPoint tp;
  tp.k0 = lat.reduce(k0_in);
  tp.band = band;
  const auto nb = static_cast<Eigen::Index>(basis.size());
  if (band < 1 || band > nb) throw InvalidInput("band index outside the truncated spectrum");

  FiberExpansion ex(coeffs, basis, tp.k0);
  EigenPairs e = eig_hermitian(ex.base());
  const Eigen::Index s = band - 1;
  const double es = e.values(s);
  tp.cluster_tol = options.cluster_tol.value_or(1e-8 * (1.0 + std::abs(es)));
  Eigen::Index lo = s, hi = s;
  while (lo > 0 && std::abs(e.values(lo - 1) - es) <= tp.cluster_tol) --lo;
  while (hi + 1 < nb && std::abs(e.values(hi + 1) - es) <= tp.cluster_tol) ++hi;
  tp.n = static_cast<int>(hi - lo + 1);
  tp.lambda0 = e.values.segment(lo, tp.n).mean();
  if (tp.n == nb) throw CertificationError("cluster exhausts the truncated spectrum; no gap to measure");
  double d0 = std::numeric_limits<double>::infinity();
  for (Eigen::Index l = 0; l < nb; ++l)
    if (l < lo || l > hi) d0 = std::min(d0, std::abs(e.values(l) - tp.lambda0));
  tp.d0 = d0;
  if (d0 < options.gap_floor * (1.0 + std::abs(tp.lambda0)))
    throw CertificationError("spectral gap around the threshold is below the floor");

  tp.cluster = fix_gauge(e.vectors.middleCols(lo, tp.n), basis, tp.k0, &tp.reference);

  // Separation radius: coarse radial scan, bisection, then a full re-check.
  auto dirs = scan_directions(d);
  tp.directions = static_cast<int>(dirs.size());
  tp.radii = options.radii;
  tp.kappa_cap = 0.5 * lat.inradius();
  auto passes = [&](double r) {
    std::vector<char> ok(dirs.size(), 0);
    parallel_for(dirs.size(), [&](std::size_t i) {
      VecR vals = eig_hermitian(ex.at(r * dirs[i], tp.lambda0), 0, false).values;
      ok[i] = separated(vals, tp.n, tp.d0);
    });
    return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  };
  auto certified = [&](double kappa) {
    for (int i = 1; i <= options.radii; ++i)
      if (!passes(kappa * i / options.radii)) return false;
    return true;
  };
  double kappa = tp.kappa_cap;
  if (!certified(kappa)) {
    double lo_r = 0.0, hi_r = kappa;
    for (int i = 1; i <= options.radii; ++i) {
      double r = tp.kappa_cap * i / options.radii;
      if (!passes(r)) {
        hi_r = r;
        break;
      }
      lo_r = r;
    }
    for (int it = 0; it < options.bisection_steps; ++it) {
      double mid = 0.5 * (lo_r + hi_r);
      (passes(mid) ? lo_r : hi_r) = mid;
    }
    kappa = lo_r * (1.0 - 1e-6);
    int shrink = 0;
    while (kappa > 0.0 && !certified(kappa)) {
      kappa *= 0.9;
      if (++shrink > 60) kappa = 0.0;
    }
  }
  if (!(kappa > 1e-12 * lat.shortest_dual())) throw CertificationError("separation radius could not be certified");
  tp.kappa = kappa;
  tp.sup_norms = sup_norms(coeffs, basis, tp.cluster);
  return tp;
}

}  // namespace hehom
