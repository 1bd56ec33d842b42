#pragma once

// Small dense kernels shared by the estimators. All of them accept arbitrary
// Eigen expressions and return plain matrices.

#include <Eigen/Dense>

#include "cdpanel/errors.hpp"
#include "cdpanel/types.hpp"

namespace cdpanel {

template <typename Derived>
PanelMat two_way_demean(const Eigen::MatrixBase<Derived>& z) {
  PanelMat out = z;
  const double grand = out.mean();
  const Vector row_means = out.rowwise().mean();
  const Eigen::RowVectorXd col_means = out.colwise().mean();
  out.colwise() -= row_means;
  out.rowwise() -= col_means;
  out.array() += grand;
  return out;
}

template <typename Derived>
PanelMat column_demean(const Eigen::MatrixBase<Derived>& z) {
  PanelMat out = z;
  out.rowwise() -= Eigen::RowVectorXd(out.colwise().mean());
  return out;
}

template <typename Derived>
PanelMat row_demean(const Eigen::MatrixBase<Derived>& z) {
  PanelMat out = z;
  out.colwise() -= Vector(out.rowwise().mean());
  return out;
}

// Orthonormal basis of the column space of `a`, from a rank-revealing QR.
// Returns a matrix with rank(a) columns; rank is reported through rank_out.
template <typename Derived>
Matrix orthonormal_colspace(const Eigen::MatrixBase<Derived>& a, Eigen::Index* rank_out = nullptr) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const Eigen::Index rank = qr.rank();
  if (rank_out) *rank_out = rank;
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), rank);
  return q;
}

// Applies the annihilator of span(q) to z, assuming q has orthonormal columns.
template <typename DerivedQ, typename DerivedZ>
Matrix project_out(const Eigen::MatrixBase<DerivedQ>& q, const Eigen::MatrixBase<DerivedZ>& z) {
  return z - q * (q.transpose() * z);
}

// Spectral condition number of a symmetric PSD cross-product matrix.
inline double spd_condition(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(hi > 0.0) || lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

constexpr double kSingularConditionLimit = 1e12;

inline void require_well_conditioned(const Matrix& s, const char* what) {
  if (spd_condition(s) > kSingularConditionLimit)
    fail(Errc::SingularDesign, std::string(what) + ": condition number above 1e12");
}

}  // namespace cdpanel
