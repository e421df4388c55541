#include "ttsa/problem.hpp"

#include <sstream>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

void require_square(const Matrix& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << name << " must be square and non-empty, got " << m.rows() << "x"
       << m.cols();
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << name << " has shape " << m.rows() << "x" << m.cols() << ", expected "
       << rows << "x" << cols;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

void require_nonsingular(const Matrix& m, const char* what) {
  const double cond = condition_number(m);
  if (!(cond <= kSingularCondition)) {
    std::ostringstream os;
    os << what << " is numerically singular (condition estimate " << cond
       << ")";
    throw Error(ErrorKind::SingularMatrix, os.str());
  }
}

}  // namespace

ProblemInstance::ProblemInstance(Matrix a11_, Matrix a12_, Matrix a21_,
                                 Matrix a22_, Vector b1_, Vector b2_)
    : a11(std::move(a11_)),
      a12(std::move(a12_)),
      a21(std::move(a21_)),
      a22(std::move(a22_)),
      b1(std::move(b1_)),
      b2(std::move(b2_)) {
  require_square(a11, "a11");
  require_square(a22, "a22");
  const Eigen::Index dx = a11.rows();
  const Eigen::Index dy = a22.rows();
  require_shape(a12, dx, dy, "a12");
  require_shape(a21, dy, dx, "a21");
  if (b1.size() != dx || b2.size() != dy)
    throw Error(ErrorKind::InvalidArgument,
                "b1/b2 lengths do not match a11/a22");
  if (!a11.allFinite() || !a12.allFinite() || !a21.allFinite() ||
      !a22.allFinite() || !b1.allFinite() || !b2.allFinite())
    throw Error(ErrorKind::InvalidArgument, "problem has non-finite entries");
}

ProblemInstance ProblemInstance::scalar(double a11, double a12, double a21,
                                        double a22, double b1, double b2) {
  return ProblemInstance(Matrix::Constant(1, 1, a11), Matrix::Constant(1, 1, a12),
                         Matrix::Constant(1, 1, a21), Matrix::Constant(1, 1, a22),
                         Vector::Constant(1, b1), Vector::Constant(1, b2));
}

double relative_residual(const ProblemInstance& p, const Vector& x,
                         const Vector& y) {
  const Vector r1 = p.a11 * x + p.a12 * y - p.b1;
  const Vector r2 = p.a21 * x + p.a22 * y - p.b2;
  const double rhs = std::sqrt(p.b1.squaredNorm() + p.b2.squaredNorm());
  return std::sqrt(r1.squaredNorm() + r2.squaredNorm()) / (1.0 + rhs);
}

Matrix reduced_matrix(const ProblemInstance& p) {
  require_nonsingular(p.a11, "A11");
  Eigen::PartialPivLU<Matrix> lu(p.a11);
  return p.a22 - p.a21 * lu.solve(p.a12);
}

ExactSolution exact_solution(const ProblemInstance& p) {
  require_nonsingular(p.a11, "A11");
  Eigen::PartialPivLU<Matrix> a11_lu(p.a11);
  const Matrix delta = p.a22 - p.a21 * a11_lu.solve(p.a12);
  require_nonsingular(delta, "Delta = A22 - A21 A11^-1 A12");

  ExactSolution sol;
  sol.y_star = delta.partialPivLu().solve(p.b2 - p.a21 * a11_lu.solve(p.b1));
  sol.x_star = a11_lu.solve(p.b1 - p.a12 * sol.y_star);
  return sol;
}

}  // namespace ttsa
