#include "cnp/matrix.hpp"

#include <Eigen/Dense>
#include <sstream>

namespace cnp {

double Mat::operator_norm() const {
  if (rows_ == 0 || cols_ == 0) return 0.0;
  if (is_zero()) return 0.0;
  Eigen::MatrixXcd a(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) a(i, j) = (*this)(i, j).to_complex();
  Eigen::MatrixXcd g = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().maxCoeff();
  return top > 0 ? std::sqrt(top) : 0.0;
}

std::string Mat::str() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    os << (i == 0 ? "[" : " ");
    for (int j = 0; j < cols_; ++j) os << (*this)(i, j).str() << (j + 1 < cols_ ? " " : "");
    os << (i + 1 < rows_ ? ";\n" : "]");
  }
  return os.str();
}

}  // namespace cnp
