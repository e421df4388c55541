#pragma once

#include <cstddef>

#include "ttsa/linalg.hpp"

namespace ttsa {

// The coupled linear system
//   A11 x + A12 y = b1
//   A21 x + A22 y = b2
// with x of dimension dx (fast variable) and y of dimension dy (slow).
struct ProblemInstance {
  Matrix a11, a12, a21, a22;
  Vector b1, b2;

  ProblemInstance() = default;
  // Throws InvalidArgument on inconsistent dimensions or non-finite entries.
  ProblemInstance(Matrix a11, Matrix a12, Matrix a21, Matrix a22, Vector b1,
                  Vector b2);

  std::size_t dx() const { return static_cast<std::size_t>(b1.size()); }
  std::size_t dy() const { return static_cast<std::size_t>(b2.size()); }

  // Scalar instance (dx = dy = 1).
  static ProblemInstance scalar(double a11, double a12, double a21, double a22,
                                double b1, double b2);
};

struct ExactSolution {
  Vector x_star;
  Vector y_star;
};

// Residual norm of (x, y) substituted into the system, relative to
// 1 + ||(b1, b2)||.
double relative_residual(const ProblemInstance& p, const Vector& x,
                         const Vector& y);

// Delta = A22 - A21 A11^{-1} A12. Throws SingularMatrix when A11 is
// numerically singular.
Matrix reduced_matrix(const ProblemInstance& p);

// Y* = Delta^{-1}(b2 - A21 A11^{-1} b1), X* = A11^{-1}(b1 - A12 Y*).
ExactSolution exact_solution(const ProblemInstance& p);

}  // namespace ttsa
