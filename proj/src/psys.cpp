#include "cnp/psys.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <set>

namespace cnp {

namespace {

std::string key_of(const Elem& p) { return format(p); }

void require_system_elem(const ProductSystem& sys, const Elem& p) {
  if (p.mon->fingerprint() != sys.monoid()->fingerprint())
    throw SystemError("element does not belong to the system's monoid");
}

}  // namespace

ProductSystem::ProductSystem(MonoidPtr m, AlgebraPtr a)
    : mon_(std::move(m)), alg_(std::move(a)) {
  if (!mon_ || !alg_) throw SystemError("system needs a monoid and an algebra");
}

BimoduleRef ProductSystem::fiber(const Elem& p) const {
  require_system_elem(*this, p);
  std::string key = key_of(p);
  {
    std::lock_guard<std::mutex> lock(memo_mu_);
    auto it = fiber_memo_.find(key);
    if (it != fiber_memo_.end()) return it->second;
  }
  BimoduleRef built = p.is_identity() ? Bimodule::algebra_module(alg_) : make_fiber(p);
  if (built->algebra()->fingerprint() != alg_->fingerprint())
    throw SystemError("fibre built over a foreign algebra");
  std::lock_guard<std::mutex> lock(memo_mu_);
  return fiber_memo_.emplace(key, std::move(built)).first->second;
}

const MultData& ProductSystem::mult(const Elem& p, const Elem& q) const {
  require_system_elem(*this, p);
  require_system_elem(*this, q);
  std::string key = key_of(p) + "|" + key_of(q);
  {
    std::lock_guard<std::mutex> lock(memo_mu_);
    auto it = mult_memo_.find(key);
    if (it != mult_memo_.end()) return it->second;
  }
  BimoduleRef xp = fiber(p), xq = fiber(q), xpq = fiber(multiply(p, q));
  TensorInfo info = tensor(xp, xq);
  Mat m;
  if (p.is_identity()) {
    // delta_v (x) x_j -> x_j on the matching range block
    m = Mat::zero(xpq->dim(), int(info.pairs.size()));
    for (int c = 0; c < int(info.pairs.size()); ++c) m(info.pairs[c].second, c) = GRat(1);
  } else if (q.is_identity()) {
    m = Mat::zero(xpq->dim(), int(info.pairs.size()));
    for (int c = 0; c < int(info.pairs.size()); ++c) m(info.pairs[c].first, c) = GRat(1);
  } else {
    m = make_mult(p, q, info);
  }
  std::string where = " for (" + format(p) + ", " + format(q) + ")";
  if (m.rows() != xpq->dim() || m.cols() != int(info.pairs.size()))
    throw ShapeError("multiplication matrix shape" + where);
  if (!is_unitary(m)) throw SystemError("multiplication is not unitary" + where);
  for (int t = 0; t < m.rows(); ++t)
    for (int c = 0; c < m.cols(); ++c) {
      if (m(t, c).is_zero()) continue;
      auto [i, j] = info.pairs[c];
      if (xpq->range(t) != xp->range(i) || xpq->source(t) != xq->source(j))
        throw SystemError("multiplication does not preserve the grading" + where);
    }
  std::lock_guard<std::mutex> lock(memo_mu_);
  return mult_memo_.emplace(key, MultData{std::move(info), std::move(m)}).first->second;
}

std::vector<int> ProductSystem::ideal_vertices(const Elem& p) const {
  int n = alg_->dim();
  std::vector<char> dead(n, 1);
  if (!p.is_identity()) {
    for (const Elem& r : interval(p)) {
      BimoduleRef xr = fiber(r);
      for (int i = 0; i < xr->dim(); ++i)
        if (xr->range(i) >= 0) dead[xr->range(i)] = 0;
    }
  }
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (dead[v]) out.push_back(v);
  return out;
}

std::vector<Elem> ProductSystem::augmentation_divisors(const Elem& q) const {
  return divisors(q);
}

// ---------------------------------------------------------------------------
// Flip systems: fibres are chain spaces along normal-form words, and
// multiplication sorts the concatenated word one adjacent flip at a time.
// ---------------------------------------------------------------------------

namespace {

class FlipSystem : public ProductSystem {
 public:
  FlipSystem(MonoidPtr m, std::vector<BimoduleRef> gens,
             std::map<std::pair<int, int>, Mat> flips, std::string name)
      : ProductSystem(std::move(m),
                      gens.empty() ? nullptr : gens.front()->algebra()),
        gens_(std::move(gens)),
        flips_(std::move(flips)),
        name_(std::move(name)) {
    validate();
  }

  std::string name() const override { return name_; }

 protected:
  BimoduleRef make_fiber(const Elem& p) const override {
    return chain_module(word_of(p));
  }

  Mat make_mult(const Elem& p, const Elem& q, const TensorInfo& info) const override {
    std::vector<int> wp = word_of(p), wq = word_of(q);
    std::vector<int> w = wp;
    w.insert(w.end(), wq.begin(), wq.end());
    std::vector<int> target = word_of(multiply(p, q));

    auto orig_chains = chains(w);
    std::map<std::vector<int>, int> orig_index;
    for (int i = 0; i < int(orig_chains.size()); ++i) orig_index[orig_chains[i]] = i;

    auto [cur, R] = sort_word(w, target, orig_chains);
    (void)cur;

    // columns follow info.pairs, rows follow the fibre of pq (same chain
    // enumeration as the sorted word)
    auto cp = chains(wp);
    auto cq = chains(wq);
    Mat out = Mat::zero(R.rows(), int(info.pairs.size()));
    for (int c = 0; c < int(info.pairs.size()); ++c) {
      auto [i, j] = info.pairs[c];
      std::vector<int> ch = cp[i];
      ch.insert(ch.end(), cq[j].begin(), cq[j].end());
      int col = orig_index.at(ch);
      for (int r = 0; r < R.rows(); ++r) out(r, c) = R(r, col);
    }
    return out;
  }

 private:
  // all composable coefficient chains along the word w
  std::vector<std::vector<int>> chains(const std::vector<int>& w) const {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(size_t)> go = [&](size_t t) {
      if (t == w.size()) {
        out.push_back(cur);
        return;
      }
      const Bimodule& x = *gens_[w[t]];
      for (int b = 0; b < x.dim(); ++b) {
        if (t > 0 && gens_[w[t - 1]]->source(cur[t - 1]) != x.range(b)) continue;
        cur.push_back(b);
        go(t + 1);
        cur.pop_back();
      }
    };
    go(0);
    return out;
  }

  BimoduleRef chain_module(const std::vector<int>& w) const {
    auto cs = chains(w);
    std::vector<std::string> labels;
    std::vector<int> src, rng;
    for (const auto& c : cs) {
      std::string l;
      for (size_t t = 0; t < w.size(); ++t) {
        if (t) l += '.';
        l += gens_[w[t]]->label(c[t]);
      }
      labels.push_back(std::move(l));
      src.push_back(gens_[w.back()]->source(c.back()));
      rng.push_back(gens_[w.front()]->range(c.front()));
    }
    return Bimodule::make(alg_, std::move(labels), std::move(src), std::move(rng));
  }

  const TensorInfo& pair_info(int a, int b) const {
    std::lock_guard<std::mutex> lock(pair_mu_);
    auto key = std::make_pair(a, b);
    auto it = pair_info_.find(key);
    if (it == pair_info_.end())
      it = pair_info_.emplace(key, tensor(gens_[a], gens_[b])).first;
    return it->second;
  }

  // X_a (x) X_b -> X_b (x) X_a; the reverse of a stored flip is its adjoint
  Mat flip_matrix(int a, int b) const {
    if (a < b) return flips_.at({a, b});
    return flips_.at({b, a}).adjoint();
  }

  // lift of the adjacent flip at position s into the chain spaces
  Mat flip_lift(const std::vector<int>& w, int s,
                const std::vector<std::vector<int>>& from_chains,
                const std::vector<std::vector<int>>& to_chains) const {
    int a = w[s], b = w[s + 1];
    Mat t = flip_matrix(a, b);
    const TensorInfo& ab = pair_info(a, b);
    const TensorInfo& ba = pair_info(b, a);
    std::map<std::vector<int>, int> to_index;
    for (int i = 0; i < int(to_chains.size()); ++i) to_index[to_chains[i]] = i;
    Mat out = Mat::zero(int(to_chains.size()), int(from_chains.size()));
    for (int c = 0; c < int(from_chains.size()); ++c) {
      const auto& ch = from_chains[c];
      int col = ab.index_of_pair(ch[s], ch[s + 1]);
      for (int r = 0; r < t.rows(); ++r) {
        const GRat& v = t(r, col);
        if (v.is_zero()) continue;
        auto [bi, ai] = ba.pairs[r];
        std::vector<int> nch = ch;
        nch[s] = bi;
        nch[s + 1] = ai;
        auto it = to_index.find(nch);
        if (it == to_index.end())
          throw SystemError("flip does not preserve chain composability");
        out(it->second, c) += v;
      }
    }
    return out;
  }

  // sort w into target by adjacent flips of commuting letters; returns the
  // final word and the accumulated chain-space operator
  std::pair<std::vector<int>, Mat> sort_word(
      std::vector<int> w, const std::vector<int>& target,
      std::vector<std::vector<int>> w_chains) const {
    Mat R = Mat::identity(int(w_chains.size()));
    for (size_t t = 0; t < target.size(); ++t) {
      size_t j = t;
      while (j < w.size() && w[j] != target[t]) ++j;
      if (j == w.size())
        throw SystemError("multiplication words are not trace equivalent");
      for (size_t m = t; m < j; ++m)
        if (!mon_->commutes(w[m], target[t]))
          throw SystemError("multiplication words are not trace equivalent");
      for (size_t s = j; s-- > t;) {
        std::vector<int> nxt = w;
        std::swap(nxt[s], nxt[s + 1]);
        auto nxt_chains = chains(nxt);
        R = flip_lift(w, int(s), w_chains, nxt_chains) * R;
        w = std::move(nxt);
        w_chains = std::move(nxt_chains);
      }
    }
    return {std::move(w), std::move(R)};
  }

  void validate() {
    int rank = mon_->rank();
    if (rank < 1) throw SystemError("flip system needs at least one generator");
    if (int(gens_.size()) != rank)
      throw SystemError("one generator fibre per monoid generator required");
    for (const auto& g : gens_) {
      if (g->algebra()->fingerprint() != alg_->fingerprint())
        throw SystemError("generator fibres live over different algebras");
      for (int i = 0; i < g->dim(); ++i)
        if (g->label(i).find('.') != std::string::npos)
          throw SystemError("generator basis labels may not contain '.'");
    }
    for (const auto& [key, mat] : flips_) {
      auto [i, j] = key;
      if (i < 0 || j < 0 || i >= rank || j >= rank || i >= j)
        throw SystemError("flip keys must be ordered generator pairs");
      if (!mon_->commutes(i, j))
        throw SystemError("flip given for a non-commuting generator pair");
      (void)mat;
    }
    for (int i = 0; i < rank; ++i)
      for (int j = i + 1; j < rank; ++j) {
        if (!mon_->commutes(i, j)) continue;
        auto it = flips_.find({i, j});
        if (it == flips_.end())
          throw SystemError("missing flip for a commuting generator pair");
        const Mat& t = it->second;
        const TensorInfo& ij = pair_info(i, j);
        const TensorInfo& ji = pair_info(j, i);
        if (t.rows() != int(ji.pairs.size()) || t.cols() != int(ij.pairs.size()))
          throw ShapeError("flip matrix shape mismatch");
        if (!is_unitary(t)) throw SystemError("flip is not unitary");
        for (int r = 0; r < t.rows(); ++r)
          for (int c = 0; c < t.cols(); ++c) {
            if (t(r, c).is_zero()) continue;
            auto [ci, cj] = ij.pairs[c];
            auto [rj, ri] = ji.pairs[r];
            if (gens_[j]->range(rj) != gens_[i]->range(ci) ||
                gens_[i]->source(ri) != gens_[j]->source(cj))
              throw SystemError("flip does not preserve the grading");
          }
      }
    // coherence on pairwise-commuting triples: sorting i.j.k down to k.j.i
    // along either route must agree
    for (int a = 0; a < rank; ++a)
      for (int b = a + 1; b < rank; ++b)
        for (int c = b + 1; c < rank; ++c) {
          if (!mon_->commutes(a, b) || !mon_->commutes(a, c) || !mon_->commutes(b, c))
            continue;
          std::vector<int> w = {a, b, c};
          auto route = [&](const std::vector<int>& positions) {
            auto cur = w;
            auto cur_chains = chains(cur);
            Mat R = Mat::identity(int(cur_chains.size()));
            for (int s : positions) {
              std::vector<int> nxt = cur;
              std::swap(nxt[s], nxt[s + 1]);
              auto nxt_chains = chains(nxt);
              R = flip_lift(cur, s, cur_chains, nxt_chains) * R;
              cur = std::move(nxt);
              cur_chains = std::move(nxt_chains);
            }
            return R;
          };
          if (route({1, 0, 1}) != route({0, 1, 0}))
            throw SystemError("flips violate the Yang-Baxter identity");
        }
  }

  std::vector<BimoduleRef> gens_;
  std::map<std::pair<int, int>, Mat> flips_;
  std::string name_;
  mutable std::map<std::pair<int, int>, TensorInfo> pair_info_;
  mutable std::mutex pair_mu_;
};

class KGraphSystem : public ProductSystem {
 public:
  explicit KGraphSystem(KGraphPtr g)
      : ProductSystem(QloMonoid::grid(g->k()), VertexAlgebra::make(g->vertices())),
        graph_(std::move(g)) {}

  std::string name() const override { return "kgraph"; }
  const KGraphPtr& graph() const { return graph_; }

 protected:
  BimoduleRef make_fiber(const Elem& p) const override {
    std::vector<std::string> labels;
    std::vector<int> src, rng;
    for (const Path& mu : graph_->paths_of_degree(p.v)) {
      labels.push_back(mu.str());
      src.push_back(mu.source_v);
      rng.push_back(mu.range_v);
    }
    return Bimodule::make(alg_, std::move(labels), std::move(src), std::move(rng));
  }

  Mat make_mult(const Elem& p, const Elem& q, const TensorInfo& info) const override {
    auto pp = graph_->paths_of_degree(p.v);
    auto qq = graph_->paths_of_degree(q.v);
    BimoduleRef target = fiber(multiply(p, q));
    Mat m = Mat::zero(target->dim(), int(info.pairs.size()));
    for (int c = 0; c < int(info.pairs.size()); ++c) {
      auto [i, j] = info.pairs[c];
      m(target->index_of(compose(pp[i], qq[j]).str()), c) = GRat(1);
    }
    return m;
  }

 private:
  KGraphPtr graph_;
};

class TrivialSystem : public ProductSystem {
 public:
  explicit TrivialSystem(MonoidPtr m)
      : ProductSystem(std::move(m), VertexAlgebra::make({"*"})) {}

  std::string name() const override { return "trivial"; }

  // every phi_r is injective, so I_p = 0 off the identity
  std::vector<int> ideal_vertices(const Elem& p) const override {
    if (p.is_identity()) return {0};
    return {};
  }
  std::vector<Elem> augmentation_divisors(const Elem& q) const override {
    return {q};
  }

 protected:
  BimoduleRef make_fiber(const Elem&) const override {
    return Bimodule::make(alg_, {"1"}, {0}, {0});
  }
  Mat make_mult(const Elem&, const Elem&, const TensorInfo& info) const override {
    Mat m = Mat::zero(1, int(info.pairs.size()));
    m(0, 0) = GRat(1);
    return m;
  }
};

// Two vertices; fibres over (0,n) are diagonal on {f1,f2}, fibres over
// (m,n) with m >= 1 have basis {e1,e2} with both ranges v1.  Left
// multiplication by delta_{v2} dies on every fibre past (1,0) even though
// delta_{v2} is nonzero; the augmented fibres collapse to single fibres
// because every nontrivial ideal I_p vanishes.
class LexSystem : public ProductSystem {
 public:
  LexSystem()
      : ProductSystem(QloMonoid::lex(), VertexAlgebra::make({"v1", "v2"})) {}

  std::string name() const override { return "lex_counterexample"; }

  std::vector<int> ideal_vertices(const Elem& p) const override {
    // (0,1) divides every nonidentity element and its fibre ranges over
    // both vertices, so all nontrivial ideals vanish
    if (p.is_identity()) return {0, 1};
    return {};
  }
  std::vector<Elem> augmentation_divisors(const Elem& q) const override {
    return {q};
  }

 protected:
  BimoduleRef make_fiber(const Elem& p) const override {
    if (p.v[0] == 0) return Bimodule::make(alg_, {"f1", "f2"}, {0, 1}, {0, 1});
    return Bimodule::make(alg_, {"e1", "e2"}, {0, 1}, {0, 0});
  }

  Mat make_mult(const Elem& p, const Elem& q, const TensorInfo& info) const override {
    bool ps = p.v[0] == 0, qs = q.v[0] == 0;
    Mat m = Mat::zero(2, int(info.pairs.size()));
    for (int c = 0; c < int(info.pairs.size()); ++c) {
      auto [i, j] = info.pairs[c];
      int t;
      if (ps && qs) t = i;        // f_i . f_i = f_i
      else if (ps && !qs) t = j;  // f_1 . e_j = e_j
      else if (!ps && qs) t = i;  // e_i . f_i = e_i
      else t = j;                 // e_1 . e_j = e_j
      m(t, c) = GRat(1);
    }
    return m;
  }
};

}  // namespace

SystemPtr flip_system(const MonoidPtr& m, std::vector<BimoduleRef> gen_fibres,
                      std::map<std::pair<int, int>, Mat> flips, std::string name) {
  return std::make_shared<FlipSystem>(m, std::move(gen_fibres), std::move(flips),
                                      std::move(name));
}

SystemPtr tensor_power_system(const BimoduleRef& x) {
  return flip_system(QloMonoid::grid(1), {x}, {}, "tensor_power");
}

SystemPtr from_kgraph(const KGraphPtr& g) {
  return std::make_shared<KGraphSystem>(g);
}

KGraphPtr graph_of(const SystemPtr& sys) {
  auto kg = std::dynamic_pointer_cast<const KGraphSystem>(sys);
  return kg ? kg->graph() : nullptr;
}

SystemPtr trivial_system(const MonoidPtr& m) {
  return std::make_shared<TrivialSystem>(m);
}

SystemPtr lex_counterexample() { return std::make_shared<LexSystem>(); }

// ---------------------------------------------------------------------------
// Ideals and augmented fibres.
// ---------------------------------------------------------------------------

std::vector<int> ideal_I(const SystemPtr& sys, const Elem& p) {
  require_system_elem(*sys, p);
  return sys->ideal_vertices(p);
}

BimoduleRef restrict_to_ideal(const BimoduleRef& x, const std::vector<int>& I) {
  std::set<int> keep(I.begin(), I.end());
  std::vector<std::string> labels;
  std::vector<int> src, rng;
  for (int i = 0; i < x->dim(); ++i) {
    if (!keep.count(x->source(i))) continue;
    labels.push_back(x->label(i));
    src.push_back(x->source(i));
    rng.push_back(x->range(i));
  }
  return Bimodule::make(x->algebra(), std::move(labels), std::move(src),
                        std::move(rng));
}

AugmentedFiber augmented_fiber(const SystemPtr& sys, const Elem& q) {
  require_system_elem(*sys, q);
  std::vector<Elem> divs = sys->augmentation_divisors(q);
  std::sort(divs.begin(), divs.end(), ElemLess{});
  divs.erase(std::unique(divs.begin(), divs.end()), divs.end());
  std::vector<std::pair<std::string, BimoduleRef>> parts;
  std::vector<Elem> idx;
  for (const Elem& p : divs) {
    if (!divides(p, q))
      throw SystemError("augmentation summand index does not divide " + format(q));
    BimoduleRef sub =
        restrict_to_ideal(sys->fiber(p), sys->ideal_vertices(quotient(p, q)));
    if (sub->dim() == 0) continue;
    parts.emplace_back(format(p), std::move(sub));
    idx.push_back(p);
  }
  return {q, direct_sum(sys->algebra(), parts), std::move(idx)};
}

ModOp phi_tilde(const SystemPtr& sys, const AugmentedFiber& xq, const AlgElem& a) {
  (void)sys;
  std::vector<ModOp> blocks;
  for (const auto& part : xq.sum.parts) blocks.push_back(phi(part, a));
  return xq.sum.block_diagonal(blocks);
}

InjectivityVerdict phi_tilde_injective(const SystemPtr& sys, const Elem& q) {
  AugmentedFiber xq = augmented_fiber(sys, q);
  std::vector<char> seen(sys->algebra()->dim(), 0);
  const Bimodule& sp = *xq.sum.space;
  for (int i = 0; i < sp.dim(); ++i)
    if (sp.range(i) >= 0) seen[sp.range(i)] = 1;
  for (int v = 0; v < int(seen.size()); ++v)
    if (!seen[v]) return {false, v};
  return {true, -1};
}

// ---------------------------------------------------------------------------
// iota and iota~.
// ---------------------------------------------------------------------------

ModOp iota(const SystemPtr& sys, const Elem& p, const ModOp& S, const Elem& q) {
  require_system_elem(*sys, p);
  require_system_elem(*sys, q);
  require_same_module(S.module, sys->fiber(p));
  if (!divides(p, q)) throw SystemError("iota needs p <= q");
  if (p.is_identity()) {
    // operators on the algebra module are diagonal; push the diagonal
    // through the left action
    AlgElem a = AlgElem::zero(sys->algebra());
    for (int v = 0; v < sys->algebra()->dim(); ++v) a.coeffs[v] = S.matrix(v, v);
    return phi(sys->fiber(q), a);
  }
  if (p == q) return ModOp::from_matrix(sys->fiber(q), S.matrix);
  const MultData& md = sys->mult(p, quotient(p, q));
  return conjugate_by(md.matrix, op_tensor_id(md.info, S), sys->fiber(q));
}

ModOp iota_tilde(const SystemPtr& sys, const Elem& p, const ModOp& S,
                 const AugmentedFiber& xq) {
  require_system_elem(*sys, p);
  require_same_module(S.module, sys->fiber(p));
  if (!divides(p, xq.index)) return ModOp::zero(xq.sum.space);
  std::vector<ModOp> blocks;
  for (size_t t = 0; t < xq.parts.size(); ++t) {
    const Elem& r = xq.parts[t];
    const BimoduleRef& part = xq.sum.parts[t];
    if (!divides(p, r)) {
      blocks.push_back(ModOp::zero(part));
      continue;
    }
    ModOp full = iota(sys, p, S, r);
    BimoduleRef fr = sys->fiber(r);
    std::vector<int> pos(fr->dim(), -1);
    std::vector<int> sel(part->dim());
    for (int i = 0; i < part->dim(); ++i) {
      sel[i] = fr->index_of(part->label(i));
      pos[sel[i]] = i;
    }
    Mat sub = Mat::zero(part->dim(), part->dim());
    for (int c = 0; c < part->dim(); ++c)
      for (int row = 0; row < fr->dim(); ++row) {
        const GRat& v = full.matrix(row, sel[c]);
        if (v.is_zero()) continue;
        // the ideal summand is invariant; anything leaking out is a bug
        if (pos[row] < 0)
          throw SystemError("iota does not preserve the ideal summand");
        sub(pos[row], c) = v;
      }
    blocks.push_back(ModOp::from_matrix(part, std::move(sub)));
  }
  return xq.sum.block_diagonal(blocks);
}

// ---------------------------------------------------------------------------
// Covariance defect.
// ---------------------------------------------------------------------------

ModOp cp_defect(const SystemPtr& sys, const CompactFamily& fam,
                const AugmentedFiber& xs) {
  ModOp acc = ModOp::zero(xs.sum.space);
  for (const auto& [p, T] : fam.entries) acc = acc + iota_tilde(sys, p, T, xs);
  return acc;
}

ModOp cp_defect(const SystemPtr& sys, const CompactFamily& fam, const Elem& s) {
  return cp_defect(sys, fam, augmented_fiber(sys, s));
}

DefectVerdict check_cp_vanishes(const SystemPtr& sys, const CompactFamily& fam,
                                const std::vector<Elem>& test_qs, int horizon) {
  DefectVerdict out;
  out.horizon = horizon;
  std::vector<Elem> extras;
  bool trivially_zero = true;
  for (const auto& [p, T] : fam.entries) {
    extras.push_back(p);
    if (!T.is_zero()) trivially_zero = false;
  }

  bool all_clean = true;
  for (const Elem& q : test_qs) {
    Frontier fr = frontier_for(q, extras, horizon);
    std::vector<char> zero(fr.window.size(), 0);
    for (size_t i = 0; i < fr.window.size(); ++i) {
      AugmentedFiber xs = augmented_fiber(sys, fr.window[i]);
      std::vector<char> seen(sys->algebra()->dim(), 0);
      for (int b = 0; b < xs.sum.space->dim(); ++b)
        if (xs.sum.space->range(b) >= 0) seen[xs.sum.space->range(b)] = 1;
      for (int v = 0; v < int(seen.size()); ++v)
        if (!seen[v] && !out.hypothesis_violated) {
          out.hypothesis_violated = true;
          out.bad_q = fr.window[i];
        }
      zero[i] = cp_defect(sys, fam, xs).is_zero();
    }
    // least window element whose upward cone inside the window is clean
    int best = -1;
    for (size_t i = 0; i < fr.window.size() && best < 0; ++i) {
      bool clean = true;
      for (size_t j = 0; j < fr.window.size(); ++j)
        if (!zero[j] && divides(fr.window[i], fr.window[j])) {
          clean = false;
          break;
        }
      if (clean) best = int(i);
    }
    if (best >= 0) {
      out.witnesses.emplace_back(q, fr.window[best]);
      continue;
    }
    all_clean = false;
    if (fam.certificate != Certificate::None) {
      for (size_t i = 0; i < fr.window.size(); ++i)
        if (!zero[i]) {
          out.kind = DefectVerdict::Kind::FailsAt;
          out.fail_s = fr.window[i];
          out.fail_norm = operator_norm(cp_defect(sys, fam, fr.window[i]));
          out.exact = true;
          return out;
        }
    }
  }
  if (all_clean) {
    out.kind = DefectVerdict::Kind::VanishesForLargeS;
    // a family of zero operators has zero defect identically, no
    // certificate needed for that
    out.exact = fam.certificate != Certificate::None || trivially_zero;
  } else {
    out.kind = DefectVerdict::Kind::InconclusiveAtHorizon;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fock spaces.
// ---------------------------------------------------------------------------

FockSpace fock_space(const SystemPtr& sys, const std::vector<Elem>& D,
                     bool augmented) {
  FockSpace f;
  f.augmented = augmented;
  f.window = D;
  std::sort(f.window.begin(), f.window.end(), ElemLess{});
  f.window.erase(std::unique(f.window.begin(), f.window.end()), f.window.end());
  std::vector<std::pair<std::string, BimoduleRef>> parts;
  for (const Elem& q : f.window) {
    if (augmented) {
      f.fibres.push_back(augmented_fiber(sys, q));
      parts.emplace_back(format(q), f.fibres.back().sum.space);
    } else {
      parts.emplace_back(format(q), sys->fiber(q));
    }
  }
  f.sum = direct_sum(sys->algebra(), parts);
  return f;
}

ModOp fock_operator(const SystemPtr& sys, const FockSpace& f, const Elem& p,
                    const ModVec& x) {
  require_system_elem(*sys, p);
  require_same_module(x.module, sys->fiber(p));
  int n = f.sum.space->dim();
  Mat m = Mat::zero(n, n);

  // the block fiber(r) -> fiber(pr) of left multiplication by x
  auto left_block = [&](const Elem& r) {
    const MultData& md = sys->mult(p, r);
    BimoduleRef xr = sys->fiber(r);
    BimoduleRef xpr = sys->fiber(multiply(p, r));
    Mat b = Mat::zero(xpr->dim(), xr->dim());
    for (int j = 0; j < xr->dim(); ++j)
      for (int i = 0; i < x.module->dim(); ++i) {
        if (x.coeffs[i].is_zero()) continue;
        int pr = md.info.index_of_pair(i, j);
        if (pr < 0) continue;
        for (int t = 0; t < xpr->dim(); ++t) {
          const GRat& v = md.matrix(t, pr);
          if (!v.is_zero()) b(t, j) += v * x.coeffs[i];
        }
      }
    return b;
  };

  for (size_t qi = 0; qi < f.window.size(); ++qi) {
    const Elem& q = f.window[qi];
    Elem pq = multiply(p, q);
    int ti = f.sum.part_by_tag(format(pq));
    if (ti < 0) continue;  // truncated away
    if (!f.augmented) {
      Mat b = left_block(q);
      for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c)
          if (!b(r, c).is_zero())
            m(f.sum.offsets[ti] + r, f.sum.offsets[qi] + c) = b(r, c);
    } else {
      const AugmentedFiber& aq = f.fibres[qi];
      const AugmentedFiber& apq = f.fibres[ti];
      for (size_t rt = 0; rt < aq.parts.size(); ++rt) {
        const Elem& r = aq.parts[rt];
        Mat b = left_block(r);
        BimoduleRef xr = sys->fiber(r);
        BimoduleRef xpr = sys->fiber(multiply(p, r));
        const BimoduleRef& dom = aq.sum.parts[rt];
        int tt = apq.sum.part_by_tag(format(multiply(p, r)));
        // x maps X_r . I into X_{pr} . I over the same ideal; rows leaking
        // outside the target summand mean the system is inconsistent
        std::vector<int> rowpos(xpr->dim(), -1);
        if (tt >= 0) {
          const BimoduleRef& cod = apq.sum.parts[tt];
          for (int i = 0; i < cod->dim(); ++i)
            rowpos[xpr->index_of(cod->label(i))] = i;
        }
        for (int c = 0; c < dom->dim(); ++c) {
          int fullcol = xr->index_of(dom->label(c));
          for (int row = 0; row < xpr->dim(); ++row) {
            const GRat& v = b(row, fullcol);
            if (v.is_zero()) continue;
            if (rowpos[row] < 0)
              throw SystemError("creation leaks out of the ideal summand");
            m(f.sum.offsets[ti] + apq.sum.offsets[tt] + rowpos[row],
              f.sum.offsets[qi] + aq.sum.offsets[int(rt)] + c) = v;
          }
        }
      }
    }
  }
  return ModOp::from_matrix(f.sum.space, std::move(m));
}

// ---------------------------------------------------------------------------
// Norm decay.
// ---------------------------------------------------------------------------

DecayResult boundary_norm_decay(const SystemPtr& sys, const CompactFamily& fam,
                                double eps, int horizon) {
  std::vector<Elem> extras;
  for (const auto& [p, T] : fam.entries) extras.push_back(p);
  Frontier fr = frontier_for(sys->monoid()->identity(), extras, horizon);
  DecayResult out;
  out.horizon = fr.horizon;
  for (const Elem& s : fr.window) {
    double n = operator_norm(cp_defect(sys, fam, s));
    out.trace.push_back({s, n});
    if (n < eps) {
      out.found = true;
      out.s = s;
      out.norm = n;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// k-graph covariance families.
// ---------------------------------------------------------------------------

CompactFamily ck_family(const SystemPtr& sys, int v, const std::vector<Path>& F) {
  KGraphPtr g = graph_of(sys);
  if (!g) throw SystemError("ck_family needs a k-graph system");
  if (v < 0 || v >= g->num_vertices()) throw SystemError("vertex out of range");
  for (const Path& mu : F) {
    if (mu.graph->fingerprint() != g->fingerprint())
      throw SystemError("family path from a different graph");
    if (mu.range_v != v) throw SystemError("family paths must have range v");
  }
  const MonoidPtr& mon = sys->monoid();
  std::map<std::string, std::pair<Elem, Mat>> acc;
  auto add = [&](const Elem& p, int index, int sign) {
    BimoduleRef xp = sys->fiber(p);
    auto it = acc.find(format(p));
    if (it == acc.end())
      it = acc.emplace(format(p), std::make_pair(p, Mat::zero(xp->dim(), xp->dim())))
               .first;
    it->second.second(index, index) += GRat(sign);
  };
  add(mon->identity(), v, 1);
  for (int mask = 1; mask < (1 << int(F.size())); ++mask) {
    std::vector<Path> G;
    for (size_t b = 0; b < F.size(); ++b)
      if (mask & (1 << b)) G.push_back(F[b]);
    auto ext = mce_set(G);
    if (ext.empty()) continue;
    Elem p = mon->from_vector(ext.front().deg);
    BimoduleRef xp = sys->fiber(p);
    int sign = (std::popcount(unsigned(mask)) % 2) ? -1 : 1;
    for (const Path& lam : ext) add(p, xp->index_of(lam.str()), sign);
  }
  CompactFamily fam;
  for (const auto& [key, pm] : acc)
    fam.entries.emplace_back(pm.first, ModOp::from_matrix(sys->fiber(pm.first),
                                                          pm.second));
  fam.certificate = Certificate::KGraphCK;
  return fam;
}

ModOp ck_defect_symbolic(const SystemPtr& sys, int v, const std::vector<Path>& F,
                         const std::vector<int>& s) {
  return cp_defect(sys, ck_family(sys, v, F), sys->monoid()->from_vector(s));
}

}  // namespace cnp
