#include "auxtest/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "auxtest/error.hpp"

namespace auxtest {

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw Error(ErrorKind::kInput, "SymMatrix needs a non-empty square matrix, got " +
                                       std::to_string(m.rows()) + "x" +
                                       std::to_string(m.cols()));
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymMatrix SymMatrix::zero(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Zero(dim, dim));
}

SymMatrix SymMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw Error(ErrorKind::kInput, "SymMatrix::from_rows: ragged rows");
    }
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return SymMatrix(m);
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (o.dim() != dim()) throw Error(ErrorKind::kInput, "SymMatrix dimension mismatch");
  return SymMatrix(m_ + o.m_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (o.dim() != dim()) throw Error(ErrorKind::kInput, "SymMatrix dimension mismatch");
  return SymMatrix(m_ - o.m_);
}

SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(m_ * s); }

double SpectralInfo::cutoff() const {
  if (eigenvalues.size() == 0) return 0.0;
  return tol * eigenvalues.cwiseAbs().maxCoeff();
}

Eigen::Index SpectralInfo::rank() const {
  const double cut = cutoff();
  return static_cast<Eigen::Index>(
      std::count_if(eigenvalues.begin(), eigenvalues.end(), [cut](double l) { return l > cut; }));
}

Eigen::MatrixXd SpectralInfo::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

SpectralInfo spectral_decomposition(const SymMatrix& m, double tol) {
  if (!m.matrix().allFinite()) {
    throw Error(ErrorKind::kInput, "matrix has non-finite entries");
  }
  if (!(tol >= 0.0)) throw Error(ErrorKind::kInput, "rank tolerance must be >= 0");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kInput, "eigendecomposition failed");
  }
  // Eigen sorts ascending; reverse to descending.
  SpectralInfo info;
  info.eigenvalues = solver.eigenvalues().reverse();
  info.eigenvectors = solver.eigenvectors().rowwise().reverse();
  info.tol = tol;
  return info;
}

double inf_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

SymMatrix pseudo_inverse(const SymMatrix& m, double tol) {
  const SpectralInfo s = spectral_decomposition(m, tol);
  const double cut = s.cutoff();
  const Eigen::Index n = m.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double l = s.eigenvalues(k);
    if (std::abs(l) <= cut || l == 0.0) continue;
    out.noalias() += (1.0 / l) * s.eigenvectors.col(k) * s.eigenvectors.col(k).transpose();
  }
  return SymMatrix(out);
}

PseudoDetRank pseudo_det_rank(const SymMatrix& m, double tol) {
  const SpectralInfo s = spectral_decomposition(m, tol);
  const double cut = s.cutoff();
  PseudoDetRank out;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    const double l = s.eigenvalues(k);
    if (l < -cut) {
      throw Error(ErrorKind::kNotPsd,
                  "matrix is not PSD: eigenvalue " + std::to_string(l) + " below -cutoff");
    }
    if (l > cut) {
      out.pseudo_det *= l;
      ++out.rank;
    }
  }
  return out;
}

SymMatrix psd_sqrt(const SymMatrix& m, double tol) {
  const SpectralInfo s = spectral_decomposition(m, tol);
  const double cut = s.cutoff();
  const Eigen::Index n = m.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double l = s.eigenvalues(k);
    if (l < -cut) {
      throw Error(ErrorKind::kNotPsd, "psd_sqrt: negative eigenvalue " + std::to_string(l));
    }
    if (l <= cut) continue;
    out.noalias() += std::sqrt(l) * s.eigenvectors.col(k) * s.eigenvectors.col(k).transpose();
  }
  return SymMatrix(out);
}

Eigen::MatrixXd psd_sqrt_product(const SymMatrix& a, const SymMatrix& b, double tol) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::kInput, "psd_sqrt_product: dimension mismatch");
  }
  SymMatrix h = SymMatrix::zero(a.dim());
  SymMatrix root = SymMatrix::zero(a.dim());
  try {
    h = psd_sqrt(a, tol);
    // H B H is symmetric PSD when B is; its root carries the spectrum of A B.
    root = psd_sqrt(SymMatrix(h.matrix() * b.matrix() * h.matrix()), tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNotPsd) throw;
    throw Error(ErrorKind::kIncompatibleCovariances,
                std::string("product spectrum has a negative part: ") + e.what());
  }
  const SymMatrix h_pinv = pseudo_inverse(h, tol);
  Eigen::MatrixXd s = h.matrix() * root.matrix() * h_pinv.matrix();

  const Eigen::MatrixXd product = a.matrix() * b.matrix();
  const double residual = inf_norm(s * s - product);
  if (residual > 1e-8 * std::max(1.0, inf_norm(product))) {
    throw Error(ErrorKind::kIncompatibleCovariances,
                "covariances do not share a range (S*S residual " + std::to_string(residual) +
                    ")");
  }
  return s;
}

bool psd_order_check(const SymMatrix& a, const SymMatrix& b, double tol) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::kInput, "psd_order_check: dimension mismatch");
  const SymMatrix diff = a - b;
  const SpectralInfo s = spectral_decomposition(diff, tol);
  const double smallest = s.eigenvalues(s.eigenvalues.size() - 1);
  return smallest >= -tol * std::max(1.0, inf_norm(diff.matrix()));
}

}  // namespace auxtest
