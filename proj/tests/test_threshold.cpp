#include <gtest/gtest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace hehom;

namespace {

// Dense pseudo-inverse of M0 - λ0 off the cluster, from a full eigendecomposition.
MatC pseudo_inverse(const ThresholdModel& m) {
  Eigen::SelfAdjointEigenSolver<MatC> es(m.expansion().base());
  const auto& tp = m.point();
  MatC r = MatC::Zero(es.eigenvectors().rows(), es.eigenvectors().rows());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double e = es.eigenvalues()(i) - tp.lambda0;
    if (std::abs(e) < tp.d0 / 2) continue;
    r += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() / e;
  }
  return r;
}

}  // namespace

TEST(Ledger, HandValues) {
  ConstantsLedger a = constants_ledger(0.0, 3.0, 0.1, 1.0, 1.0);
  EXPECT_EQ(a.c1, 2.0);
  ConstantsLedger b = constants_ledger(0.0, 24.0, 0.1, 1.0, 1.0);
  EXPECT_EQ(b.c2, 1.0);
  for (double d0 : {0.5, 3.0, 24.0}) EXPECT_EQ(constants_ledger(0.0, d0, 0.2, 2.0, 1.5).c3, 4.0);
  EXPECT_NEAR(a.contour_length, (kPi + 4.0), 1e-15);
}

TEST(Ledger, ClosedFormsAgree) {
  for (double lam : {0.0, 1.0, 37.5})
    for (double k : {0.0, 0.1, 0.9}) {
      ConstantsLedger c = constants_ledger(lam, 2.0, k, 1.7, 1.2);
      EXPECT_NO_THROW(check_ledger(c));
      EXPECT_GT(c.c11, 0.0);
    }
  ConstantsLedger bad = constants_ledger(1.0, 2.0, 0.1, 1.0, 1.0);
  bad.c7 *= 1.0 + 1e-9;
  EXPECT_THROW(check_ledger(bad), ConsistencyError);
  EXPECT_THROW(constants_ledger(0.0, 0.0, 0.1, 1.0, 1.0), InvalidInput);
}

class MathieuModel : public ::testing::Test {
 protected:
  void SetUp() override { p = std::make_unique<Pipeline>(fixture::config(fixture::mathieu(kPi, 2))); }
  std::unique_ptr<Pipeline> p;
};

TEST_F(MathieuModel, ProjectionAtThresholdIsP) {
  ProjectionData f = p->model().spectral_projection(p->point().k0);
  EXPECT_LE(f.distance_to_p, 1e-10);
}

TEST_F(MathieuModel, ProjectionInvariants) {
  const double kappa = p->point().kappa;
  for (double s : {-0.9, 0.3, 1.0}) {
    MatC f = p->model().spectral_projection(p->point().k0 + VecR::Constant(1, s * kappa)).projection;
    EXPECT_LT((f * f - f).norm(), 1e-12);
    EXPECT_LT((f - f.adjoint()).norm(), 1e-12);
    EXPECT_NEAR(f.trace().real(), p->point().n, 1e-8);
  }
  EXPECT_THROW(p->model().spectral_projection(p->point().k0 + VecR::Constant(1, 1.5 * kappa)), InvalidInput);
}

TEST_F(MathieuModel, ReducedResolventAgainstPseudoInverse) {
  const auto& m = p->model();
  MatC r = pseudo_inverse(m);
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  const Eigen::Index n = m.expansion().size();
  for (int t = 0; t < 3; ++t) {
    VecC y(n), z(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = cplx(g(rng), g(rng)), z(i) = cplx(g(rng), g(rng));
    VecC x = m.reduced_resolvent_apply(y);
    EXPECT_LT((x - r * y).norm(), 1e-10 * y.norm());
    EXPECT_LT((m.point().cluster.adjoint() * x).norm(), 1e-10 * y.norm());
    VecC residual = (m.expansion().base() - m.point().lambda0 * MatC::Identity(n, n)) * x - (y - m.p() * y);
    EXPECT_LE(residual.norm(), 1e-10 * y.norm());
    // Self-adjoint on the complement.
    VecC y1 = y - m.p() * y, y2 = z - m.p() * z;
    EXPECT_NEAR(std::abs(m.reduced_resolvent_apply(y1).dot(y2) - y1.dot(m.reduced_resolvent_apply(y2))), 0.0,
                1e-10 * y1.norm() * y2.norm());
  }
}

TEST_F(MathieuModel, FirstOrderProjectionAgainstPerturbationTheory) {
  const auto& m = p->model();
  MatC r = pseudo_inverse(m);
  VecR dk = VecR::Constant(1, 0.01);
  MatC a = dk(0) * m.expansion().linear(0);
  MatC expect = -(r * a * m.p() + m.p() * a * r);
  EXPECT_LT((m.f1(dk) - expect).norm(), 1e-10 * std::max(1.0, expect.norm()));
  EXPECT_LT((m.f1(dk) - m.f1_cross(dk) - m.f1_cross(dk).adjoint()).norm(), 1e-14);
}

TEST_F(MathieuModel, ProjectionBoundsAndOrder) {
  const auto& m = p->model();
  const double kappa = p->point().kappa;
  std::vector<double> dks, rem;
  for (double frac = 1e-3; frac <= 0.1 + 1e-12; frac *= 2) {
    VecR dk = VecR::Constant(1, frac * kappa);
    ProjectionData f = m.spectral_projection(p->point().k0 + dk);
    EXPECT_LE(f.distance_to_p, p->ledger().c7 * dk.norm());
    dks.push_back(dk.norm());
    rem.push_back(spectral_norm(f.projection - m.p() - m.f1(dk)));
  }
  EXPECT_GE(oracle::loglog_slope(dks, rem), 1.9);
}

TEST_F(MathieuModel, ExponentialEstimateHolds) {
  for (double frac : {0.3, 0.1, 0.03})
    for (double tau : {1.0, 10.0, 100.0}) {
      BoundSample s = verify_exponential_bound(p->model(), p->tensors(), VecR::Constant(1, frac * p->point().kappa),
                                               tau, p->ledger());
      EXPECT_LE(s.lhs, s.rhs) << frac << " " << tau;
      EXPECT_GT(s.margin(), 0.0);
    }
}

TEST_F(MathieuModel, ExponentialLhsAgainstPade) {
  const auto& tp = p->point();
  const Eigen::Index n = p->model().expansion().size();
  for (double tau : {1.0, 10.0}) {
    VecR dk = VecR::Constant(1, 0.1 * tp.kappa);
    MatC a = p->model().expansion().at(dk, tp.lambda0);
    MatC exact = (MatC(-kI * tau * a)).exp();
    MatC g = effective_symbol_shifted(p->tensors(), dk);
    MatC eff = MatC::Identity(n, n) + tp.cluster * ((MatC(-kI * tau * g)).exp() - MatC::Identity(tp.n, tp.n)) * tp.cluster.adjoint();
    MatC diff = (exact - eff) * p->model().p();
    Eigen::JacobiSVD<MatC> svd(diff);
    double lhs = svd.singularValues()(0);
    BoundSample s = verify_exponential_bound(p->model(), p->tensors(), dk, tau, p->ledger());
    EXPECT_NEAR(s.lhs, lhs, 1e-9);
  }
}

TEST(FreeModel, ProjectionStaysOnPlaneWaves) {
  Pipeline p(fixture::config(fixture::free_1d(kPi)));
  ProjectionData f = p.model().spectral_projection(VecR::Constant(1, kPi + 0.1));
  EXPECT_LE(f.distance_to_p, 1e-12);
  EXPECT_LT(p.model().f1(VecR::Constant(1, 0.1)).norm(), 1e-12);
}

TEST(FreeModel, OffsetUsesMinimumImage) {
  Pipeline p(fixture::config(fixture::free_1d(kPi)));
  EXPECT_NEAR(p.model().offset(VecR::Constant(1, -kPi + 0.05))(0), 0.05, 1e-12);
}
