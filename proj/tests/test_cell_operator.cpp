#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace hehom;

namespace {

struct Mathieu {
  Lattice lat{MatR::Identity(1, 1)};
  PlaneWaveBasis basis{lat, 16 * 2 * kPi};
  PeriodicCoefficients coeffs{fixture::config(fixture::mathieu(0.0, 1)).coefficients, basis};
};

double fd_ground() {
  return oracle::fd_bloch_eigenvalues(fixture::mathieu_potential, 0.0, 400)(0);
}

}  // namespace

TEST(Coefficients, ValidationRejectsBadInput) {
  CoefficientSpec spec = free_spec(1);
  spec.potential = FourierSeries{{{1, 0, 0}, {1.0, 0.0}}};
  EXPECT_THROW(validate_spec(spec, 1), InvalidInput);
  spec.potential = FourierSeries{{{1, 0, 0}, {1.0, 0.0}}, {{-1, 0, 0}, {1.0, 0.0}}};
  spec.weight = FourierSeries{{{0, 0, 0}, {1.0, 0.0}}};
  EXPECT_THROW(validate_spec(spec, 1), InvalidInput);
  CoefficientSpec asym = free_spec(2);
  asym.metric[1] = FourierSeries{{{0, 0, 0}, {0.3, 0.0}}};
  EXPECT_THROW(validate_spec(asym, 2), InvalidInput);
}

TEST(Coefficients, MathieuShiftMatchesFiniteDifferences) {
  Mathieu m;
  EXPECT_NEAR(m.coeffs.shift(), fd_ground(), 1e-6);
}

TEST(Coefficients, GroundStateNormalisation) {
  Mathieu m;
  EXPECT_GT(m.coeffs.omega().minCoeff(), 0.0);
  EXPECT_LE(m.coeffs.omega_norm_error(), 1e-10);
  EXPECT_LE(m.coeffs.ground_residual(), 1e-8);
  EXPECT_TRUE(m.coeffs.derived_weight());
  EXPECT_NEAR(m.coeffs.omega_hat().squaredNorm(), 1.0, 1e-12);
}

TEST(Coefficients, FreeWeightIsConstant) {
  Lattice lat(MatR::Identity(2, 2));
  PlaneWaveBasis basis(lat, 4 * 2 * kPi);
  PeriodicCoefficients c(free_spec(2), basis);
  EXPECT_NEAR(c.shift(), 0.0, 1e-12);
  EXPECT_LT((c.omega().array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_NEAR(c.alpha0(), 1.0, 1e-12);
  EXPECT_NEAR(c.alpha1(), 1.0, 1e-12);
}

TEST(Coefficients, GivenWeightSkipsGroundState) {
  Lattice lat(MatR::Identity(1, 1));
  PlaneWaveBasis basis(lat, 8 * 2 * kPi);
  CoefficientSpec spec = free_spec(1);
  spec.weight = FourierSeries{{{0, 0, 0}, {2.0, 0.0}}, {{1, 0, 0}, {0.3, 0.0}}, {{-1, 0, 0}, {0.3, 0.0}}};
  PeriodicCoefficients c(spec, basis);
  EXPECT_FALSE(c.derived_weight());
  EXPECT_EQ(c.shift(), 0.0);
  EXPECT_LE(c.omega_norm_error(), 1e-12);
}

TEST(Coefficients, UnresolvedSeriesIsReported) {
  Lattice lat(MatR::Identity(1, 1));
  PlaneWaveBasis basis(lat, 2 * 2 * kPi);
  CoefficientSpec spec = free_spec(1);
  spec.potential = FourierSeries{{{200, 0, 0}, {1.0, 0.0}}, {{-200, 0, 0}, {1.0, 0.0}}};
  EXPECT_THROW(PeriodicCoefficients(spec, basis), ResolutionFailure);
}

TEST(Fiber, FreeTwoDimensionalDiagonal) {
  Lattice lat(MatR::Identity(2, 2));
  PlaneWaveBasis basis(lat, 3 * 2 * kPi);
  PeriodicCoefficients c(free_spec(2), basis);
  VecR k(2);
  k << 0.7, -1.1;
  FiberMatrix f = assemble_fiber(c, basis, k);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      double expect = i == j ? (basis.vectors().col(static_cast<Eigen::Index>(i)) + k).squaredNorm() : 0.0;
      EXPECT_NEAR(std::abs(f.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - expect), 0.0, 1e-10);
    }
}

TEST(Fiber, HermitianAndNonNegative) {
  Mathieu m;
  for (double k : {-3.0, -1.0, 0.0, 0.4, 2.5, kPi}) {
    MatC a = assemble_fiber(m.coeffs, m.basis, VecR::Constant(1, k)).matrix;
    EXPECT_LT((a - a.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * a.norm());
    Eigen::SelfAdjointEigenSolver<MatC> es(a, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues()(0), -1e-10 * (1 + a.norm()));
  }
}

TEST(Fiber, MathieuAtPiMatchesFiniteDifferences) {
  Mathieu m;
  VecR ours = eig_fiber(assemble_fiber(m.coeffs, m.basis, VecR::Constant(1, kPi)), 4).values;
  VecR fd = oracle::fd_bloch_eigenvalues(fixture::mathieu_potential, kPi, 400);
  const double g = fd_ground();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ours(i), fd(i) - g, 1e-6) << "band " << i + 1;
}

TEST(Fiber, DualLatticePeriodicity) {
  Mathieu m;
  for (double k : {-2.0, 0.3, 1.7}) {
    VecR e0 = eig_fiber(assemble_fiber(m.coeffs, m.basis, VecR::Constant(1, k)), 6).values;
    VecR e1 = eig_fiber(assemble_fiber(m.coeffs, m.basis, VecR::Constant(1, k + 2 * kPi)), 6).values;
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(e0(i), e1(i), 1e-8 * std::max(1.0, std::abs(e0(i))));
  }
}

TEST(Fiber, ExpansionIsExactQuadratic) {
  Mathieu m;
  FiberExpansion ex(m.coeffs, m.basis, VecR::Constant(1, kPi));
  for (double dk : {-0.4, 0.05, 0.3}) {
    MatC direct = fiber_matrix(m.coeffs, m.basis, VecR::Constant(1, kPi + dk));
    EXPECT_LT((ex.at(VecR::Constant(1, dk)) - direct).norm(), 1e-11 * direct.norm());
  }
  EXPECT_THROW(ex.at(VecR::Zero(2)), InvalidInput);
}
