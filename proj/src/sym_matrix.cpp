#include "blockprec/sym_matrix.hpp"

#include <cmath>

#include "blockprec/errors.hpp"

namespace blockprec {

SymMatrix::SymMatrix(int dim) {
  if (dim < 1) {
    throw InvalidInputError("SymMatrix: dim must be >= 1");
  }
  m_ = Eigen::MatrixXd::Zero(dim, dim);
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix out(dim);
  out.m_ = Eigen::MatrixXd::Identity(dim, dim);
  return out;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m, double sym_tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw InvalidInputError("SymMatrix::from_dense: matrix must be square");
  }
  if (!m.allFinite()) {
    throw InvalidInputError("SymMatrix::from_dense: non-finite entries");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > sym_tol * scale) {
    throw InvalidInputError("SymMatrix::from_dense: matrix is not symmetric");
  }
  return mirror_upper(m);
}

SymMatrix SymMatrix::mirror_upper(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw InvalidInputError("SymMatrix::mirror_upper: matrix must be square");
  }
  SymMatrix out(static_cast<int>(m.rows()));
  const int d = out.dim();
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      out.m_(i, j) = m(i, j);
      out.m_(j, i) = m(i, j);
    }
  }
  return out;
}

}  // namespace blockprec
