#pragma once

// Finite-dimensional right-Hilbert bimodules over A = C^V.
//
// Every module carries an orthonormal basis that is doubly graded: each
// basis vector has a source vertex (the support of its inner products)
// and a range vertex (the left-action eigenline), with range -1 meaning
// the left action kills the vector.  Adjointable operators over C^V
// automatically preserve source blocks, so operators are stored as
// matrices validated to be source-block-diagonal.

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cnp/matrix.hpp"
#include "cnp/rational.hpp"

namespace cnp {

struct ModuleMismatch : std::runtime_error {
  explicit ModuleMismatch(const std::string& what) : std::runtime_error(what) {}
};

class VertexAlgebra;
using AlgebraPtr = std::shared_ptr<const VertexAlgebra>;

// A = C^V for a finite ordered vertex set V.
class VertexAlgebra {
 public:
  static AlgebraPtr make(std::vector<std::string> vertices);

  int dim() const { return int(verts_.size()); }
  const std::vector<std::string>& vertices() const { return verts_; }
  const std::string& vertex(int i) const { return verts_[i]; }
  int index_of(const std::string& v) const;  // -1 when absent
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  VertexAlgebra() = default;
  std::vector<std::string> verts_;
  std::string fingerprint_;
};

// Element of C^V; coefficients indexed by vertex.
struct AlgElem {
  AlgebraPtr algebra;
  std::vector<GRat> coeffs;

  static AlgElem zero(const AlgebraPtr& a);
  static AlgElem one(const AlgebraPtr& a);
  static AlgElem delta(const AlgebraPtr& a, int vertex);

  friend AlgElem operator+(const AlgElem& x, const AlgElem& y);
  friend AlgElem operator-(const AlgElem& x, const AlgElem& y);
  friend AlgElem operator*(const AlgElem& x, const AlgElem& y);  // pointwise
  friend AlgElem operator*(const GRat& s, const AlgElem& x);
  AlgElem conj() const;
  friend bool operator==(const AlgElem& x, const AlgElem& y);
  friend bool operator!=(const AlgElem& x, const AlgElem& y) { return !(x == y); }
  bool is_zero() const;

  // Sup norm max_v |a_v| (float) and its exact square (rational).
  double norm() const;
  Rat norm2_exact() const;
  std::string str() const;
};

class Bimodule;
using BimoduleRef = std::shared_ptr<const Bimodule>;

class Bimodule {
 public:
  static constexpr int kNoRange = -1;

  // source[i] must index a vertex; range[i] a vertex or kNoRange.
  static BimoduleRef make(AlgebraPtr algebra, std::vector<std::string> labels,
                          std::vector<int> source, std::vector<int> range);
  // A itself as a bimodule: one basis vector per vertex, source = range.
  static BimoduleRef algebra_module(const AlgebraPtr& algebra);

  const AlgebraPtr& algebra() const { return algebra_; }
  int dim() const { return int(labels_.size()); }
  const std::string& label(int i) const { return labels_[i]; }
  int index_of(const std::string& label) const;  // -1 when absent
  int source(int i) const { return source_[i]; }
  int range(int i) const { return range_[i]; }
  const std::vector<int>& sources() const { return source_; }
  const std::vector<int>& ranges() const { return range_; }
  // Basis indices with the given source vertex.
  const std::vector<int>& source_block(int vertex) const { return blocks_[vertex]; }
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  Bimodule() = default;
  AlgebraPtr algebra_;
  std::vector<std::string> labels_;
  std::vector<int> source_, range_;
  std::vector<std::vector<int>> blocks_;
  std::string fingerprint_;
};

// Same underlying module (by fingerprint); throws ModuleMismatch.
void require_same_module(const BimoduleRef& a, const BimoduleRef& b);

struct ModVec {
  BimoduleRef module;
  std::vector<GRat> coeffs;

  static ModVec zero(const BimoduleRef& m);
  static ModVec basis(const BimoduleRef& m, int i);

  friend ModVec operator+(const ModVec& x, const ModVec& y);
  friend ModVec operator-(const ModVec& x, const ModVec& y);
  friend ModVec operator*(const GRat& s, const ModVec& x);
  friend bool operator==(const ModVec& x, const ModVec& y);
  friend bool operator!=(const ModVec& x, const ModVec& y) { return !(x == y); }
  bool is_zero() const;
  std::string str() const;
};

// Adjointable operator; matrix is validated to vanish across source blocks.
struct ModOp {
  BimoduleRef module;
  Mat matrix;

  static ModOp zero(const BimoduleRef& m);
  static ModOp identity(const BimoduleRef& m);
  static ModOp from_matrix(const BimoduleRef& m, Mat a);

  ModVec apply(const ModVec& x) const;
  friend ModOp operator+(const ModOp& x, const ModOp& y);
  friend ModOp operator-(const ModOp& x, const ModOp& y);
  friend ModOp operator*(const ModOp& x, const ModOp& y);  // composition
  friend ModOp operator*(const GRat& s, const ModOp& x);
  ModOp adjoint() const;
  friend bool operator==(const ModOp& x, const ModOp& y);
  friend bool operator!=(const ModOp& x, const ModOp& y) { return !(x == y); }
  bool is_zero() const;
};

// <x,y>_A at vertex v is sum over basis vectors with source v of
// conj(x_i) y_i; conjugate-linear in x.
AlgElem inner(const ModVec& x, const ModVec& y);
// x.a scales each coefficient by a at the source vertex.
ModVec right_act(const ModVec& x, const AlgElem& a);
// Left action of a: diagonal with entry a_{range(i)}, zero on range -1.
ModOp phi(const BimoduleRef& m, const AlgElem& a);
// x (x) y* : z -> x.<y,z>_A.
ModOp rank_one(const ModVec& x, const ModVec& y);
// Largest singular value.
double operator_norm(const ModOp& t);
// Module norm ||x|| = sqrt(||<x,x>_A||) and its exact square.
double vec_norm(const ModVec& x);
Rat vec_norm2_exact(const ModVec& x);
// True when the matrix also preserves range blocks, i.e. commutes with
// the left action (a bimodule map).
bool is_bimodule_map(const ModOp& t);

// Balanced tensor product X (x)_A Y.  Basis: pairs (i,j) with
// source_X(i) = range_Y(j); source = source_Y(j), range = range_X(i).
struct TensorInfo {
  BimoduleRef left, right, product;
  std::vector<std::pair<int, int>> pairs;  // product index -> (left, right)

  int index_of_pair(int i, int j) const;  // -1 when the pair is not a basis vector
};
TensorInfo tensor(const BimoduleRef& x, const BimoduleRef& y);

// Bilinear expansion of x (x) y; pairs with source != range are dropped
// (they are null vectors of the tensor inner product).
ModVec elementary_tensor(const TensorInfo& t, const ModVec& x, const ModVec& y);
// S (x) 1 on the product.  Defined for every adjointable S.
ModOp op_tensor_id(const TensorInfo& t, const ModOp& s);
// 1 (x) T on the product.  Requires T to be a bimodule map.
ModOp id_tensor_op(const TensorInfo& t, const ModOp& s);
// m . op . m* for a unitary identification m : domain -> target.
ModOp conjugate_by(const Mat& m, const ModOp& op, const BimoduleRef& target);

// Direct sum with tagged copies of the parts' bases.
struct DirectSum {
  BimoduleRef space;
  std::vector<std::string> tags;
  std::vector<BimoduleRef> parts;
  std::vector<int> offsets;  // offsets[i] = first global index of part i

  int part_of_index(int global) const;
  int part_by_tag(const std::string& tag) const;  // -1 when absent
  // Embed a vector of part i into the sum.
  ModVec embed(int part, const ModVec& x) const;
  // Block-diagonal operator acting as ops[i] on part i.
  ModOp block_diagonal(const std::vector<ModOp>& ops) const;
  // Compress an operator on the sum to the (i,j) block.
  Mat block(const ModOp& op, int i, int j) const;
};
DirectSum direct_sum(const AlgebraPtr& algebra,
                     const std::vector<std::pair<std::string, BimoduleRef>>& parts);

}  // namespace cnp
