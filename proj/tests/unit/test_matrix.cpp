#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "auxtest/error.hpp"
#include "auxtest/matrix.hpp"
#include "oracles.hpp"

using namespace auxtest;

namespace {

// Sigma_1 = 1/2 [[3/5, -sqrt(3/5)], [-sqrt(3/5), 1]]
SymMatrix raking_sigma1() {
  const double r = std::sqrt(3.0 / 5.0);
  return SymMatrix::from_rows({{0.3, -0.5 * r}, {-0.5 * r, 0.5}});
}

void expect_near(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_LE(oracle::max_abs(a - b), tol) << "a =\n" << a << "\nb =\n" << b;
}

}  // namespace

TEST(SymMatrix, SymmetrizesOnConstruction) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 2.0000001, 3.0;
  const SymMatrix s(m);
  EXPECT_EQ(s(0, 1), s(1, 0));
  EXPECT_THROW(SymMatrix(Eigen::MatrixXd(2, 3)), Error);
  EXPECT_THROW(SymMatrix(Eigen::MatrixXd(0, 0)), Error);
}

TEST(SpectralInfo, ReconstructsWithinTolerance) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + trial % 6;
    const SymMatrix m(oracle::random_psd(dim, dim, gen) - oracle::random_psd(dim, dim / 2, gen));
    const SpectralInfo s = spectral_decomposition(m);
    ASSERT_EQ(s.eigenvalues.size(), dim);
    EXPECT_LE(inf_norm(s.reconstruct() - m.matrix()), 1e-10 * std::max(1.0, inf_norm(m.matrix())));
    for (Eigen::Index i = 1; i < dim; ++i) EXPECT_GE(s.eigenvalues(i - 1), s.eigenvalues(i));
  }
}

TEST(PseudoInverse, RakingSigma1Pinv) {
  const double r15 = std::sqrt(15.0);
  Eigen::MatrixXd expected(2, 2);
  expected << 15.0, -5.0 * r15, -5.0 * r15, 25.0;
  expected /= 32.0;
  expect_near(pseudo_inverse(raking_sigma1()).matrix(), expected, 1e-12);
}

TEST(PseudoInverse, IdentityAndIdempotent) {
  expect_near(pseudo_inverse(SymMatrix::identity(2)).matrix(), Eigen::Matrix2d::Identity(), 1e-15);
  const SymMatrix s0 = SymMatrix::from_rows({{0.5, -0.5}, {-0.5, 0.5}});
  expect_near(pseudo_inverse(s0).matrix(), s0.matrix(), 1e-12);
}

TEST(PseudoInverse, RejectsNonFinite) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  m(0, 0) = std::nan("");
  EXPECT_THROW(pseudo_inverse(SymMatrix(m)), Error);
}

TEST(PseudoInverse, MoorePenroseAxiomsOnRandomPsd) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + trial % 6;
    const int rank = trial % (dim + 1);
    const SymMatrix m(oracle::random_psd(dim, rank, gen));
    const Eigen::MatrixXd p = pseudo_inverse(m).matrix();
    const Eigen::MatrixXd& a = m.matrix();
    EXPECT_LE(oracle::max_abs(a * p * a - a), 1e-9);
    EXPECT_LE(oracle::max_abs(p * a * p - p), 1e-9);
    EXPECT_LE(oracle::max_abs(a * p - (a * p).transpose()), 1e-9);
    EXPECT_LE(oracle::max_abs(p - p.transpose()), 1e-15);
  }
}

TEST(PseudoInverse, IdempotentProjectorsAreFixedPoints) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 5;
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(oracle::random_psd(dim, dim, gen)).householderQ();
    const int rank = 1 + trial % (dim - 1);
    const Eigen::MatrixXd u = q.leftCols(rank);
    const SymMatrix proj(u * u.transpose());
    expect_near(pseudo_inverse(proj).matrix(), proj.matrix(), 1e-12);
  }
}

TEST(PseudoDetRank, Examples) {
  auto id = pseudo_det_rank(SymMatrix::identity(2));
  EXPECT_NEAR(id.pseudo_det, 1.0, 1e-15);
  EXPECT_EQ(id.rank, 2);

  auto s1 = pseudo_det_rank(raking_sigma1());
  const auto ev = oracle::char_poly_eigenvalues(raking_sigma1().matrix());
  EXPECT_NEAR(s1.pseudo_det, ev[0], 1e-12);
  EXPECT_NEAR(s1.pseudo_det, 0.8, 1e-12);
  EXPECT_EQ(s1.rank, 1);

  auto s0 = pseudo_det_rank(SymMatrix::from_rows({{0.5, -0.5}, {-0.5, 0.5}}));
  EXPECT_NEAR(s0.pseudo_det, 1.0, 1e-12);
  EXPECT_EQ(s0.rank, 1);

  auto z = pseudo_det_rank(SymMatrix::zero(3));
  EXPECT_EQ(z.pseudo_det, 1.0);
  EXPECT_EQ(z.rank, 0);
}

TEST(PseudoDetRank, RejectsIndefinite) {
  try {
    pseudo_det_rank(SymMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}));
    FAIL() << "expected a not-PSD error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotPsd);
  }
}

TEST(PseudoDetRank, MatchesCharacteristicPolynomial) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = 1 + trial % 3;
    const int rank = trial % (dim + 1);
    const Eigen::MatrixXd m = oracle::random_psd(dim, rank, gen);
    const auto ev = oracle::char_poly_eigenvalues(m);
    // a double root costs the cubic formula about sqrt(eps) of accuracy;
    // nonzero eigenvalues of random_psd are >= 0.2
    const double cutoff = 1e-6 * std::max(std::abs(ev.front()), std::abs(ev.back()));
    double det = 1.0;
    int count = 0;
    for (double l : ev) {
      if (l > std::max(cutoff, 1e-9)) {
        det *= l;
        ++count;
      }
    }
    const auto got = pseudo_det_rank(SymMatrix(m));
    EXPECT_EQ(got.rank, count);
    EXPECT_NEAR(got.pseudo_det, det, 1e-8 * std::max(1.0, std::abs(det)));
  }
}

TEST(PsdSqrtProduct, HalfSigmaGivesScaledProjector) {
  const SymMatrix s1 = raking_sigma1();
  const SymMatrix pinv_half = pseudo_inverse(0.5 * s1);
  const Eigen::MatrixXd proj = pseudo_inverse(s1).matrix() * s1.matrix();
  expect_near(psd_sqrt_product(pinv_half, s1), std::sqrt(2.0) * proj, 1e-10);
}

TEST(PsdSqrtProduct, EqualCovariancesGiveProjector) {
  const SymMatrix s1 = raking_sigma1();
  const Eigen::MatrixXd s = psd_sqrt_product(pseudo_inverse(s1), s1);
  expect_near(s * s, s, 1e-10);
  expect_near(s, pseudo_inverse(s1).matrix() * s1.matrix(), 1e-10);
}

TEST(PsdSqrtProduct, DiagonalCase) {
  const SymMatrix s1 = SymMatrix::from_rows({{4.0, 0.0}, {0.0, 0.0}});
  const SymMatrix sh = SymMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
  Eigen::Matrix2d expected;
  expected << 2.0, 0.0, 0.0, 0.0;
  expect_near(psd_sqrt_product(pseudo_inverse(sh), s1), expected, 1e-12);
}

TEST(PsdSqrtProduct, SquaresBackOnRandomPairs) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 5;
    const int rank = 1 + trial % dim;
    // shared range: B = U D U^t, A = U E U^t with arbitrary (non-commuting) PSD D, E
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(oracle::random_psd(dim, dim, gen)).householderQ();
    const Eigen::MatrixXd u = q.leftCols(rank);
    const Eigen::MatrixXd d = oracle::random_psd(rank, rank, gen);
    const Eigen::MatrixXd e = trial % 2 ? oracle::random_psd(rank, rank, gen) : Eigen::MatrixXd(2.0 * d);
    const SymMatrix a(u * e * u.transpose());
    const SymMatrix b(u * d * u.transpose());
    const Eigen::MatrixXd s = psd_sqrt_product(a, b);
    const Eigen::MatrixXd ab = a.matrix() * b.matrix();
    EXPECT_LE(oracle::max_abs(s * s - ab), 1e-9 * std::max(1.0, oracle::max_abs(ab)));
  }
}

TEST(PsdSqrtProduct, IncompatibleRangesRejected) {
  const SymMatrix a = SymMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
  const SymMatrix b = SymMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
  try {
    psd_sqrt_product(a, b);
    FAIL() << "expected incompatible covariances";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIncompatibleCovariances);
  }
}

TEST(PsdOrderCheck, Examples) {
  const SymMatrix s1 = raking_sigma1();
  EXPECT_TRUE(psd_order_check(s1, s1));
  EXPECT_TRUE(psd_order_check(s1, 0.5 * s1));
  EXPECT_FALSE(psd_order_check(s1, 2.0 * s1));
  EXPECT_THROW(psd_order_check(s1, SymMatrix::identity(3)), Error);
}
