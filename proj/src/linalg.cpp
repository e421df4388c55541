#include "ttsa/linalg.hpp"

#include <cmath>
#include <limits>

namespace ttsa {

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

Matrix symmetric_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double smallest_symmetric_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric_part(m),
                                            Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace ttsa
