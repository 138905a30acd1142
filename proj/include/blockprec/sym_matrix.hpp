#pragma once

#include <Eigen/Dense>

namespace blockprec {

// Dense symmetric matrix. Stored mirrored; the upper triangle is the
// authoritative half and set() writes both (i,j) and (j,i), so the symmetry
// invariant holds by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim);

  static SymMatrix identity(int dim);
  static SymMatrix zero(int dim) { return SymMatrix(dim); }

  // Checks symmetry within sym_tol * max|entry| and finiteness, then mirrors
  // the upper triangle so both halves are bit-identical.
  static SymMatrix from_dense(const Eigen::MatrixXd& m, double sym_tol = 1e-9);

  // Takes the upper triangle (including diagonal) verbatim, ignores the lower.
  static SymMatrix mirror_upper(const Eigen::MatrixXd& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Eigen::MatrixXd& dense() const { return m_; }
  bool all_finite() const { return m_.allFinite(); }

 private:
  Eigen::MatrixXd m_;
};

// Sufficient statistics of a (possibly standardized) sample: the 1/N scatter
// matrix plus the column transform that produced it, so held-out rows can be
// mapped through the same centering/scaling.
struct SampleStats {
  int n = 0;
  int dim = 0;
  SymMatrix scatter;      // (1/N) X~' X~ after the transform below
  Eigen::VectorXd mean;   // per-column center
  Eigen::VectorXd scale;  // per-column scale (1.0 when not standardized)
};

}  // namespace blockprec
