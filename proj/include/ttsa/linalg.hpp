#pragma once

#include <Eigen/Dense>

namespace ttsa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Spectral norm for matrices, Euclidean norm for vectors.
double operator_norm(const Matrix& m);

// Ratio of largest to smallest singular value; +inf when singular.
double condition_number(const Matrix& m);

// Symmetric part (M + M^T) / 2.
Matrix symmetric_part(const Matrix& m);

double smallest_symmetric_eigenvalue(const Matrix& m);

bool all_finite(const Matrix& m);

inline constexpr double kSingularCondition = 1e12;

}  // namespace ttsa
