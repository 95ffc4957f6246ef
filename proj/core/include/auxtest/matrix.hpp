#pragma once

#include <initializer_list>

#include <Eigen/Dense>

namespace auxtest {

/// Relative rank cutoff: eigenvalues with |lambda| <= tol * max|lambda| are
/// treated as zero.
inline constexpr double kDefaultRankTol = 1e-10;

/// Dense symmetric real matrix. The input is symmetrized on construction, so
/// entries(i, j) == entries(j, i) holds bit-for-bit.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix zero(Eigen::Index dim);
  /// Builds from a row-major initializer, e.g. {{1, 2}, {2, 3}}.
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;
  friend SymMatrix operator*(double s, const SymMatrix& m) { return m * s; }

 private:
  Eigen::MatrixXd m_;
};

/// Eigen-decomposition M = Q diag(eigenvalues) Q^t with eigenvalues sorted
/// descending.
struct SpectralInfo {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double tol = kDefaultRankTol;

  /// Absolute cutoff tol * max|lambda|.
  double cutoff() const;
  /// Number of eigenvalues strictly above the cutoff.
  Eigen::Index rank() const;
  Eigen::MatrixXd reconstruct() const;
};

/// Throws Error(kInput) on non-finite entries.
SpectralInfo spectral_decomposition(const SymMatrix& m, double tol = kDefaultRankTol);

/// Induced infinity norm (maximum absolute row sum).
double inf_norm(const Eigen::MatrixXd& m);

/// Moore-Penrose pseudo-inverse. Eigenvalues at or below the relative cutoff
/// are dropped, whatever their sign.
SymMatrix pseudo_inverse(const SymMatrix& m, double tol = kDefaultRankTol);

struct PseudoDetRank {
  double pseudo_det = 1.0;
  Eigen::Index rank = 0;
};

/// Product and count of the eigenvalues above the cutoff. The zero matrix has
/// pseudo-determinant 1 and rank 0. Throws Error(kNotPsd) when an eigenvalue
/// lies below -cutoff.
PseudoDetRank pseudo_det_rank(const SymMatrix& m, double tol = kDefaultRankTol);

/// Principal square root of the product A * B for PSD A (typically a
/// pseudo-inverse) and PSD B sharing A's range:
///
///   S = H * sqrt(H B H) * H^+,   H = A^(1/2).
///
/// S is generally not symmetric; S * S = A * B. Throws
/// Error(kIncompatibleCovariances) if H B H has a negative eigenvalue beyond
/// the cutoff or if the ranges are not compatible (S * S misses A * B).
Eigen::MatrixXd psd_sqrt_product(const SymMatrix& a, const SymMatrix& b,
                                 double tol = kDefaultRankTol);

/// True iff the smallest eigenvalue of A - B is >= -tol * max(1, ||A - B||_inf).
bool psd_order_check(const SymMatrix& a, const SymMatrix& b, double tol = kDefaultRankTol);

/// Symmetric PSD square root (negative eigenvalues above -cutoff clamp to 0).
SymMatrix psd_sqrt(const SymMatrix& m, double tol = kDefaultRankTol);

}  // namespace auxtest
