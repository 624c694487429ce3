#pragma once

// Shared builders for the test suites: small k-graphs with known behavior
// and randomized product systems whose flip data is valid by construction.

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cnp/psys.hpp"

namespace cnptest {

using namespace cnp;

inline GRat grat(int re, int im = 0) { return GRat(Rat(re), Rat(im)); }

inline KGraphPtr square_graph() {
  return KGraph::make(2, {"v"}, {{"e", 0, 0, 0}, {"f", 1, 0, 0}},
                      {{"e", "f", "f", "e"}});
}

inline KGraphPtr twist_graph() {
  return KGraph::make(2, {"v"},
                      {{"e1", 0, 0, 0}, {"e2", 0, 0, 0}, {"f", 1, 0, 0}},
                      {{"e1", "f", "f", "e2"}, {"e2", "f", "f", "e1"}});
}

inline KGraphPtr source_graph() {
  return KGraph::make(2, {"v", "x"}, {{"b", 0, 0, 1}, {"r", 1, 0, 1}}, {});
}

inline KGraphPtr two_vertex_graph() {
  return KGraph::make(2, {"u", "w"},
                      {{"a", 0, 0, 1}, {"b", 0, 1, 0}, {"p", 1, 0, 1}, {"q", 1, 1, 0}},
                      {{"a", "q", "p", "b"}, {"b", "p", "q", "a"}});
}

inline KGraphPtr cycle1_graph() {
  return KGraph::make(1, {"v"}, {{"e", 0, 0, 0}}, {});
}

inline std::vector<KGraphPtr> graph_corpus() {
  return {square_graph(), twist_graph(), source_graph(), two_vertex_graph(),
          cycle1_graph()};
}

// exactly unitary over the Gaussian rationals
inline Mat random_signed_permutation(int n, std::mt19937& rng) {
  std::vector<int> perm;
  perm.resize(size_t(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Mat u = Mat::zero(n, n);
  std::uniform_int_distribution<int> phase(0, 3);
  for (int j = 0; j < n; ++j) {
    switch (phase(rng)) {
      case 0: u(perm[size_t(j)], j) = grat(1); break;
      case 1: u(perm[size_t(j)], j) = grat(-1); break;
      case 2: u(perm[size_t(j)], j) = grat(0, 1); break;
      default: u(perm[size_t(j)], j) = grat(0, -1); break;
    }
  }
  return u;
}

// generator fibres over a one-vertex algebra: flips are unconstrained
// unitaries as long as no pairwise-commuting triple exists in the monoid
inline SystemPtr random_one_vertex_system(const MonoidPtr& mon,
                                          std::mt19937& rng) {
  auto alg = VertexAlgebra::make({"pt"});
  std::uniform_int_distribution<int> dim(1, 3);
  std::vector<BimoduleRef> gens;
  for (int g = 0; g < mon->rank(); ++g) {
    int d = dim(rng);
    std::vector<std::string> labels;
    std::vector<int> src(size_t(d), 0), rngv(size_t(d), 0);
    for (int i = 0; i < d; ++i)
      labels.push_back("g" + std::to_string(g) + "_" + std::to_string(i));
    gens.push_back(Bimodule::make(alg, labels, src, rngv));
  }
  std::map<std::pair<int, int>, Mat> flips;
  for (int i = 0; i < mon->rank(); ++i)
    for (int j = i + 1; j < mon->rank(); ++j)
      if (mon->commutes(i, j))
        flips[{i, j}] =
            random_signed_permutation(gens[size_t(i)]->dim() * gens[size_t(j)]->dim(), rng);
  return flip_system(mon, gens, flips, "random1v");
}

// diagonal generator fibres (source = range, one or two basis vectors per
// vertex) over a three-vertex algebra; flips permute inside vertex blocks
inline SystemPtr random_diagonal_system(const MonoidPtr& mon,
                                        std::mt19937& rng) {
  auto alg = VertexAlgebra::make({"u", "v", "w"});
  std::uniform_int_distribution<int> extra(0, 1);
  std::vector<BimoduleRef> gens;
  for (int g = 0; g < mon->rank(); ++g) {
    std::vector<std::string> labels;
    std::vector<int> src, rngv;
    for (int v = 0; v < 3; ++v) {
      int d = 1 + extra(rng);
      for (int i = 0; i < d; ++i) {
        labels.push_back("g" + std::to_string(g) + "_" + std::to_string(v) +
                         "_" + std::to_string(i));
        src.push_back(v);
        rngv.push_back(v);
      }
    }
    gens.push_back(Bimodule::make(alg, labels, src, rngv));
  }
  std::map<std::pair<int, int>, Mat> flips;
  for (int i = 0; i < mon->rank(); ++i)
    for (int j = i + 1; j < mon->rank(); ++j) {
      if (!mon->commutes(i, j)) continue;
      TensorInfo ij = tensor(gens[size_t(i)], gens[size_t(j)]);
      TensorInfo ji = tensor(gens[size_t(j)], gens[size_t(i)]);
      Mat t = Mat::zero(int(ji.pairs.size()), int(ij.pairs.size()));
      for (int v = 0; v < 3; ++v) {
        std::vector<int> colv, rowv;
        for (int c = 0; c < int(ij.pairs.size()); ++c)
          if (gens[size_t(i)]->source(ij.pairs[size_t(c)].first) == v)
            colv.push_back(c);
        for (int r = 0; r < int(ji.pairs.size()); ++r)
          if (gens[size_t(j)]->source(ji.pairs[size_t(r)].first) == v)
            rowv.push_back(r);
        Mat u = random_signed_permutation(int(colv.size()), rng);
        for (int a = 0; a < u.rows(); ++a)
          for (int b = 0; b < u.cols(); ++b)
            if (!u(a, b).is_zero()) t(rowv[size_t(a)], colv[size_t(b)]) = u(a, b);
      }
      flips[{i, j}] = t;
    }
  return flip_system(mon, gens, flips, "randomdiag");
}

inline ModOp random_op(const BimoduleRef& m, std::mt19937& rng) {
  std::uniform_int_distribution<int> coin(-2, 2);
  Mat a = Mat::zero(m->dim(), m->dim());
  for (int i = 0; i < m->dim(); ++i)
    for (int j = 0; j < m->dim(); ++j)
      if (m->source(i) == m->source(j)) a(i, j) = grat(coin(rng), coin(rng));
  return ModOp::from_matrix(m, a);
}

inline ModVec random_vec(const BimoduleRef& m, std::mt19937& rng) {
  std::uniform_int_distribution<int> coin(-2, 2);
  ModVec x = ModVec::zero(m);
  for (auto& c : x.coeffs) c = grat(coin(rng), coin(rng));
  return x;
}

// strip the "p|" tag prefixed to direct-sum labels
inline std::string bare_label(const std::string& l) {
  auto bar = l.find('|');
  return bar == std::string::npos ? l : l.substr(bar + 1);
}

}  // namespace cnptest
