#include "cnp/hilbmod.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cnp {

namespace {

void require_same_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
  if (!a || !b || a->fingerprint() != b->fingerprint())
    throw ModuleMismatch("elements belong to different vertex algebras");
}

}  // namespace

AlgebraPtr VertexAlgebra::make(std::vector<std::string> vertices) {
  if (vertices.empty()) throw std::invalid_argument("vertex algebra needs at least one vertex");
  std::set<std::string> seen(vertices.begin(), vertices.end());
  if (seen.size() != vertices.size())
    throw std::invalid_argument("duplicate vertex name");
  auto alg = std::shared_ptr<VertexAlgebra>(new VertexAlgebra());
  alg->verts_ = std::move(vertices);
  std::string fp = "alg:";
  for (const auto& v : alg->verts_) fp += v + ",";
  alg->fingerprint_ = fp;
  return alg;
}

int VertexAlgebra::index_of(const std::string& v) const {
  for (int i = 0; i < dim(); ++i)
    if (verts_[i] == v) return i;
  return -1;
}

AlgElem AlgElem::zero(const AlgebraPtr& a) {
  return {a, std::vector<GRat>(a->dim())};
}
AlgElem AlgElem::one(const AlgebraPtr& a) {
  AlgElem e = zero(a);
  for (auto& c : e.coeffs) c = GRat(1);
  return e;
}
AlgElem AlgElem::delta(const AlgebraPtr& a, int vertex) {
  AlgElem e = zero(a);
  e.coeffs.at(vertex) = GRat(1);
  return e;
}

AlgElem operator+(const AlgElem& x, const AlgElem& y) {
  require_same_algebra(x.algebra, y.algebra);
  AlgElem r = x;
  for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += y.coeffs[i];
  return r;
}
AlgElem operator-(const AlgElem& x, const AlgElem& y) {
  require_same_algebra(x.algebra, y.algebra);
  AlgElem r = x;
  for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] -= y.coeffs[i];
  return r;
}
AlgElem operator*(const AlgElem& x, const AlgElem& y) {
  require_same_algebra(x.algebra, y.algebra);
  AlgElem r = x;
  for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] *= y.coeffs[i];
  return r;
}
AlgElem operator*(const GRat& s, const AlgElem& x) {
  AlgElem r = x;
  for (auto& c : r.coeffs) c = s * c;
  return r;
}
AlgElem AlgElem::conj() const {
  AlgElem r = *this;
  for (auto& c : r.coeffs) c = c.conj();
  return r;
}
bool operator==(const AlgElem& x, const AlgElem& y) {
  require_same_algebra(x.algebra, y.algebra);
  return x.coeffs == y.coeffs;
}
bool AlgElem::is_zero() const {
  for (const auto& c : coeffs)
    if (!c.is_zero()) return false;
  return true;
}
double AlgElem::norm() const {
  double m = 0;
  for (const auto& c : coeffs) m = std::max(m, std::abs(c.to_complex()));
  return m;
}
Rat AlgElem::norm2_exact() const {
  Rat m(0);
  for (const auto& c : coeffs) {
    Rat a = c.abs2();
    if (m < a) m = a;
  }
  return m;
}
std::string AlgElem::str() const {
  std::string s = "{";
  for (int i = 0; i < int(coeffs.size()); ++i) {
    if (i) s += ", ";
    s += algebra->vertex(i) + ": " + coeffs[i].str();
  }
  return s + "}";
}

BimoduleRef Bimodule::make(AlgebraPtr algebra, std::vector<std::string> labels,
                           std::vector<int> source, std::vector<int> range) {
  if (!algebra) throw std::invalid_argument("bimodule without algebra");
  if (labels.size() != source.size() || labels.size() != range.size())
    throw std::invalid_argument("bimodule basis arrays disagree in length");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw std::invalid_argument("duplicate basis label");
  int nv = algebra->dim();
  for (size_t i = 0; i < labels.size(); ++i) {
    if (source[i] < 0 || source[i] >= nv)
      throw std::invalid_argument("basis source out of range: " + labels[i]);
    if (range[i] != kNoRange && (range[i] < 0 || range[i] >= nv))
      throw std::invalid_argument("basis range out of range: " + labels[i]);
  }
  auto m = std::shared_ptr<Bimodule>(new Bimodule());
  m->algebra_ = std::move(algebra);
  m->labels_ = std::move(labels);
  m->source_ = std::move(source);
  m->range_ = std::move(range);
  m->blocks_.assign(nv, {});
  for (int i = 0; i < m->dim(); ++i) m->blocks_[m->source_[i]].push_back(i);
  std::string fp = m->algebra_->fingerprint() + "|";
  for (int i = 0; i < m->dim(); ++i)
    fp += m->labels_[i] + ":" + std::to_string(m->source_[i]) + ":" +
          std::to_string(m->range_[i]) + ";";
  m->fingerprint_ = fp;
  return m;
}

BimoduleRef Bimodule::algebra_module(const AlgebraPtr& algebra) {
  std::vector<std::string> labels = algebra->vertices();
  std::vector<int> idx(algebra->dim());
  for (int i = 0; i < algebra->dim(); ++i) idx[i] = i;
  return make(algebra, std::move(labels), idx, idx);
}

int Bimodule::index_of(const std::string& label) const {
  for (int i = 0; i < dim(); ++i)
    if (labels_[i] == label) return i;
  return -1;
}

void require_same_module(const BimoduleRef& a, const BimoduleRef& b) {
  if (!a || !b || a->fingerprint() != b->fingerprint())
    throw ModuleMismatch("values live over different modules");
}

ModVec ModVec::zero(const BimoduleRef& m) {
  return {m, std::vector<GRat>(m->dim())};
}
ModVec ModVec::basis(const BimoduleRef& m, int i) {
  ModVec x = zero(m);
  x.coeffs.at(i) = GRat(1);
  return x;
}
ModVec operator+(const ModVec& x, const ModVec& y) {
  require_same_module(x.module, y.module);
  ModVec r = x;
  for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += y.coeffs[i];
  return r;
}
ModVec operator-(const ModVec& x, const ModVec& y) {
  require_same_module(x.module, y.module);
  ModVec r = x;
  for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] -= y.coeffs[i];
  return r;
}
ModVec operator*(const GRat& s, const ModVec& x) {
  ModVec r = x;
  for (auto& c : r.coeffs) c = s * c;
  return r;
}
bool operator==(const ModVec& x, const ModVec& y) {
  require_same_module(x.module, y.module);
  return x.coeffs == y.coeffs;
}
bool ModVec::is_zero() const {
  for (const auto& c : coeffs)
    if (!c.is_zero()) return false;
  return true;
}
std::string ModVec::str() const {
  std::string s;
  for (int i = 0; i < int(coeffs.size()); ++i) {
    if (coeffs[i].is_zero()) continue;
    if (!s.empty()) s += " + ";
    s += "(" + coeffs[i].str() + ")" + module->label(i);
  }
  return s.empty() ? "0" : s;
}

ModOp ModOp::zero(const BimoduleRef& m) {
  return {m, Mat::zero(m->dim(), m->dim())};
}
ModOp ModOp::identity(const BimoduleRef& m) {
  return {m, Mat::identity(m->dim())};
}
ModOp ModOp::from_matrix(const BimoduleRef& m, Mat a) {
  if (a.rows() != m->dim() || a.cols() != m->dim())
    throw ShapeError("operator matrix does not match module dimension");
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!a(i, j).is_zero() && m->source(i) != m->source(j))
        throw ShapeError("operator matrix is not source-block-diagonal");
  return {m, std::move(a)};
}
ModVec ModOp::apply(const ModVec& x) const {
  require_same_module(module, x.module);
  ModVec r = ModVec::zero(module);
  for (int i = 0; i < matrix.rows(); ++i)
    for (int j = 0; j < matrix.cols(); ++j)
      if (!matrix(i, j).is_zero() && !x.coeffs[j].is_zero())
        r.coeffs[i] += matrix(i, j) * x.coeffs[j];
  return r;
}
ModOp operator+(const ModOp& x, const ModOp& y) {
  require_same_module(x.module, y.module);
  return {x.module, x.matrix + y.matrix};
}
ModOp operator-(const ModOp& x, const ModOp& y) {
  require_same_module(x.module, y.module);
  return {x.module, x.matrix - y.matrix};
}
ModOp operator*(const ModOp& x, const ModOp& y) {
  require_same_module(x.module, y.module);
  return {x.module, x.matrix * y.matrix};
}
ModOp operator*(const GRat& s, const ModOp& x) { return {x.module, s * x.matrix}; }
ModOp ModOp::adjoint() const { return {module, matrix.adjoint()}; }
bool operator==(const ModOp& x, const ModOp& y) {
  require_same_module(x.module, y.module);
  return x.matrix == y.matrix;
}
bool ModOp::is_zero() const { return matrix.is_zero(); }

AlgElem inner(const ModVec& x, const ModVec& y) {
  require_same_module(x.module, y.module);
  AlgElem a = AlgElem::zero(x.module->algebra());
  for (int i = 0; i < x.module->dim(); ++i)
    a.coeffs[x.module->source(i)] += x.coeffs[i].conj() * y.coeffs[i];
  return a;
}

ModVec right_act(const ModVec& x, const AlgElem& a) {
  require_same_algebra(x.module->algebra(), a.algebra);
  ModVec r = x;
  for (int i = 0; i < x.module->dim(); ++i)
    r.coeffs[i] = x.coeffs[i] * a.coeffs[x.module->source(i)];
  return r;
}

ModOp phi(const BimoduleRef& m, const AlgElem& a) {
  require_same_algebra(m->algebra(), a.algebra);
  ModOp t = ModOp::zero(m);
  for (int i = 0; i < m->dim(); ++i)
    if (m->range(i) != Bimodule::kNoRange) t.matrix(i, i) = a.coeffs[m->range(i)];
  return t;
}

ModOp rank_one(const ModVec& x, const ModVec& y) {
  require_same_module(x.module, y.module);
  ModOp t = ModOp::zero(x.module);
  const auto& m = x.module;
  for (int i = 0; i < m->dim(); ++i) {
    if (x.coeffs[i].is_zero()) continue;
    for (int j = 0; j < m->dim(); ++j)
      if (m->source(i) == m->source(j) && !y.coeffs[j].is_zero())
        t.matrix(i, j) = x.coeffs[i] * y.coeffs[j].conj();
  }
  return t;
}

double operator_norm(const ModOp& t) { return t.matrix.operator_norm(); }

double vec_norm(const ModVec& x) { return std::sqrt(inner(x, x).norm()); }
Rat vec_norm2_exact(const ModVec& x) { return inner(x, x).norm2_exact(); }

bool is_bimodule_map(const ModOp& t) {
  for (int i = 0; i < t.matrix.rows(); ++i)
    for (int j = 0; j < t.matrix.cols(); ++j)
      if (!t.matrix(i, j).is_zero() && t.module->range(i) != t.module->range(j))
        return false;
  return true;
}

int TensorInfo::index_of_pair(int i, int j) const {
  for (int k = 0; k < int(pairs.size()); ++k)
    if (pairs[k].first == i && pairs[k].second == j) return k;
  return -1;
}

TensorInfo tensor(const BimoduleRef& x, const BimoduleRef& y) {
  require_same_algebra(x->algebra(), y->algebra());
  TensorInfo t;
  t.left = x;
  t.right = y;
  std::vector<std::string> labels;
  std::vector<int> source, range;
  for (int i = 0; i < x->dim(); ++i)
    for (int j = 0; j < y->dim(); ++j) {
      // <xi (x) eta, xi (x) eta> = [range(eta) = source(xi)] delta_{source(eta)}
      if (y->range(j) != x->source(i)) continue;
      labels.push_back(x->label(i) + "." + y->label(j));
      source.push_back(y->source(j));
      range.push_back(x->range(i));
      t.pairs.emplace_back(i, j);
    }
  t.product = Bimodule::make(x->algebra(), std::move(labels), std::move(source),
                             std::move(range));
  return t;
}

ModVec elementary_tensor(const TensorInfo& t, const ModVec& x, const ModVec& y) {
  require_same_module(t.left, x.module);
  require_same_module(t.right, y.module);
  ModVec r = ModVec::zero(t.product);
  for (int k = 0; k < int(t.pairs.size()); ++k) {
    auto [i, j] = t.pairs[k];
    r.coeffs[k] = x.coeffs[i] * y.coeffs[j];
  }
  return r;
}

ModOp op_tensor_id(const TensorInfo& t, const ModOp& s) {
  require_same_module(t.left, s.module);
  ModOp r = ModOp::zero(t.product);
  for (int k = 0; k < int(t.pairs.size()); ++k) {
    auto [i, j] = t.pairs[k];
    for (int i2 = 0; i2 < t.left->dim(); ++i2) {
      if (s.matrix(i2, i).is_zero()) continue;
      int k2 = t.index_of_pair(i2, j);
      // source blocks are preserved, so (i2, j) is again a basis pair
      r.matrix(k2, k) = s.matrix(i2, i);
    }
  }
  return r;
}

ModOp id_tensor_op(const TensorInfo& t, const ModOp& s) {
  require_same_module(t.right, s.module);
  if (!is_bimodule_map(s))
    throw ShapeError("1 (x) T needs T to commute with the left action");
  ModOp r = ModOp::zero(t.product);
  for (int k = 0; k < int(t.pairs.size()); ++k) {
    auto [i, j] = t.pairs[k];
    for (int j2 = 0; j2 < t.right->dim(); ++j2) {
      if (s.matrix(j2, j).is_zero()) continue;
      int k2 = t.index_of_pair(i, j2);
      r.matrix(k2, k) = s.matrix(j2, j);
    }
  }
  return r;
}

ModOp conjugate_by(const Mat& m, const ModOp& op, const BimoduleRef& target) {
  if (m.rows() != target->dim() || m.cols() != op.module->dim())
    throw ShapeError("identification matrix has wrong shape");
  return ModOp::from_matrix(target, m * op.matrix * m.adjoint());
}

int DirectSum::part_of_index(int global) const {
  for (int i = int(parts.size()) - 1; i >= 0; --i)
    if (global >= offsets[i]) return i;
  return -1;
}
int DirectSum::part_by_tag(const std::string& tag) const {
  for (int i = 0; i < int(tags.size()); ++i)
    if (tags[i] == tag) return i;
  return -1;
}
ModVec DirectSum::embed(int part, const ModVec& x) const {
  require_same_module(parts.at(part), x.module);
  ModVec r = ModVec::zero(space);
  for (int i = 0; i < x.module->dim(); ++i) r.coeffs[offsets[part] + i] = x.coeffs[i];
  return r;
}
ModOp DirectSum::block_diagonal(const std::vector<ModOp>& ops) const {
  if (ops.size() != parts.size())
    throw ShapeError("block-diagonal needs one operator per summand");
  ModOp r = ModOp::zero(space);
  for (int p = 0; p < int(parts.size()); ++p) {
    require_same_module(parts[p], ops[p].module);
    int off = offsets[p];
    for (int i = 0; i < parts[p]->dim(); ++i)
      for (int j = 0; j < parts[p]->dim(); ++j)
        r.matrix(off + i, off + j) = ops[p].matrix(i, j);
  }
  return r;
}
Mat DirectSum::block(const ModOp& op, int i, int j) const {
  require_same_module(space, op.module);
  Mat b(parts.at(i)->dim(), parts.at(j)->dim());
  for (int r = 0; r < b.rows(); ++r)
    for (int c = 0; c < b.cols(); ++c)
      b(r, c) = op.matrix(offsets[i] + r, offsets[j] + c);
  return b;
}

DirectSum direct_sum(const AlgebraPtr& algebra,
                     const std::vector<std::pair<std::string, BimoduleRef>>& parts) {
  DirectSum d;
  std::vector<std::string> labels;
  std::vector<int> source, range;
  std::set<std::string> seen;
  int off = 0;
  for (const auto& [tag, part] : parts) {
    require_same_algebra(algebra, part->algebra());
    if (!seen.insert(tag).second) throw std::invalid_argument("duplicate summand tag");
    d.tags.push_back(tag);
    d.parts.push_back(part);
    d.offsets.push_back(off);
    for (int i = 0; i < part->dim(); ++i) {
      labels.push_back(tag + "|" + part->label(i));
      source.push_back(part->source(i));
      range.push_back(part->range(i));
    }
    off += part->dim();
  }
  d.space = Bimodule::make(algebra, std::move(labels), std::move(source), std::move(range));
  return d;
}

}  // namespace cnp
