#pragma once

// Dense matrices over Gaussian rationals.  Sizes here are desk scale
// (augmented fibres, truncated Fock windows), so no sparsity tricks.

#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "cnp/rational.hpp"

namespace cnp {

struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = GRat(1);
    return m;
  }
  static Mat zero(int rows, int cols) { return Mat(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  GRat& operator()(int r, int c) { return a_[size_t(r) * cols_ + c]; }
  const GRat& operator()(int r, int c) const { return a_[size_t(r) * cols_ + c]; }

  friend Mat operator+(const Mat& x, const Mat& y) {
    x.same_shape(y);
    Mat r(x.rows_, x.cols_);
    for (size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] + y.a_[i];
    return r;
  }
  friend Mat operator-(const Mat& x, const Mat& y) {
    x.same_shape(y);
    Mat r(x.rows_, x.cols_);
    for (size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] - y.a_[i];
    return r;
  }
  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols_ != y.rows_) throw ShapeError("matrix product shape mismatch");
    Mat r(x.rows_, y.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int k = 0; k < x.cols_; ++k) {
        const GRat& xv = x(i, k);
        if (xv.is_zero()) continue;
        for (int j = 0; j < y.cols_; ++j) {
          const GRat& yv = y(k, j);
          if (!yv.is_zero()) r(i, j) += xv * yv;
        }
      }
    return r;
  }
  friend Mat operator*(const GRat& s, const Mat& x) {
    Mat r(x.rows_, x.cols_);
    for (size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = s * x.a_[i];
    return r;
  }
  Mat& operator+=(const Mat& y) { *this = *this + y; return *this; }
  Mat& operator-=(const Mat& y) { *this = *this - y; return *this; }

  Mat adjoint() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j).conj();
    return r;
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }
  friend bool operator!=(const Mat& x, const Mat& y) { return !(x == y); }

  bool is_zero() const {
    for (const auto& v : a_)
      if (!v.is_zero()) return false;
    return true;
  }
  bool is_identity() const {
    if (rows_ != cols_) return false;
    return *this == identity(rows_);
  }

  // Largest singular value, via the Hermitian eigenproblem for A*A.
  double operator_norm() const;

  std::string str() const;

 private:
  void same_shape(const Mat& y) const {
    if (rows_ != y.rows_ || cols_ != y.cols_) throw ShapeError("matrix shape mismatch");
  }

  int rows_, cols_;
  std::vector<GRat> a_;
};

// True when u is unitary: u* u = 1 and u u* = 1.
inline bool is_unitary(const Mat& u) {
  if (u.rows() != u.cols()) return false;
  Mat ua = u.adjoint();
  return (ua * u).is_identity() && (u * ua).is_identity();
}

}  // namespace cnp
