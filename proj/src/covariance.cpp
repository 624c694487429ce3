#include "cnp/covariance.hpp"

#include <algorithm>
#include <sstream>

namespace cnp {

namespace {

std::vector<Elem> generator_elems(const MonoidPtr& mon) {
  if (mon->kind() == MonoidKind::Lex)
    return {mon->from_vector({0, 1}), mon->from_vector({1, 0})};
  std::vector<Elem> out;
  for (int i = 0; i < mon->rank(); ++i) out.push_back(mon->from_word({i}));
  return out;
}

// every pair of monoid elements has a least upper bound
bool is_directed(const MonoidPtr& mon) {
  switch (mon->kind()) {
    case MonoidKind::Grid:
    case MonoidKind::Lex:
      return true;
    case MonoidKind::Raag:
      for (int i = 0; i < mon->rank(); ++i)
        for (int j = i + 1; j < mon->rank(); ++j)
          if (!mon->commutes(i, j)) return false;
      return true;
  }
  return false;
}

// phi_p is injective iff no vertex acts as zero on fiber(p)
bool left_action_injective(const SystemPtr& sys, const Elem& p) {
  BimoduleRef xp = sys->fiber(p);
  std::vector<bool> hit(sys->algebra()->dim(), false);
  for (int i = 0; i < xp->dim(); ++i) hit[xp->range(i)] = true;
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

}  // namespace

struct Representation::Cache {
  std::map<std::string, std::vector<Mat>> maps;
  std::recursive_mutex mu;
};

Representation Representation::make(SystemPtr sys, int dim,
                                    std::map<std::string, std::vector<Mat>> maps) {
  if (!sys) throw RepError("representation needs a system");
  if (dim < 1) throw RepError("representation dimension must be positive");
  Representation rep;
  rep.sys_ = std::move(sys);
  rep.dim_ = dim;
  rep.cache_ = std::make_shared<Cache>();
  auto mon = rep.sys_->monoid();
  bool has_identity = false;
  for (auto& [key, mats] : maps) {
    Elem p = mon->parse(key);
    BimoduleRef xp = rep.sys_->fiber(p);
    if (int(mats.size()) != xp->dim())
      throw RepError("fibre " + format(p) + " needs " +
                     std::to_string(xp->dim()) + " matrices, got " +
                     std::to_string(mats.size()));
    for (const Mat& m : mats)
      if (m.rows() != dim || m.cols() != dim)
        throw RepError("matrix shape mismatch at fibre " + format(p));
    if (p.is_identity()) has_identity = true;
    rep.stored_.push_back(p);
    rep.cache_->maps[format(p)] = std::move(mats);
  }
  if (!has_identity)
    throw RepError("representation must cover the identity fibre");
  std::sort(rep.stored_.begin(), rep.stored_.end(), ElemLess{});
  return rep;
}

bool Representation::covers(const Elem& p) const {
  std::lock_guard<std::recursive_mutex> lock(cache_->mu);
  if (cache_->maps.count(format(p))) return true;
  for (const Elem& g : stored_) {
    if (g.is_identity() || !divides(g, p)) continue;
    Elem rest = quotient(g, p);
    // the guard keeps the recursion finite on monoids where lengths
    // need not add up (absorbing products)
    if (length(rest) >= length(p)) continue;
    if (covers(rest)) return true;
  }
  return false;
}

const std::vector<Mat>& Representation::psi(const Elem& p) const {
  std::lock_guard<std::recursive_mutex> lock(cache_->mu);
  auto it = cache_->maps.find(format(p));
  if (it != cache_->maps.end()) return it->second;
  for (const Elem& g : stored_) {
    if (g.is_identity() || !divides(g, p)) continue;
    Elem rest = quotient(g, p);
    if (length(rest) >= length(p)) continue;
    if (!covers(rest)) continue;
    const std::vector<Mat>& left = psi(g);
    const std::vector<Mat>& right = psi(rest);
    const MultData& md = sys_->mult(g, rest);
    BimoduleRef xp = sys_->fiber(p);
    std::vector<Mat> out(size_t(xp->dim()), Mat::zero(dim_, dim_));
    // delta_t pulled back through the unitary is sum_c conj(M(t,c)) x_i y_j
    for (int t = 0; t < xp->dim(); ++t)
      for (int c = 0; c < int(md.info.pairs.size()); ++c) {
        GRat coeff = md.matrix(t, c).conj();
        if (coeff.is_zero()) continue;
        auto [i, j] = md.info.pairs[c];
        out[size_t(t)] += coeff * (left[size_t(i)] * right[size_t(j)]);
      }
    auto ins = cache_->maps.emplace(format(p), std::move(out));
    return ins.first->second;
  }
  throw RepError("representation does not cover fibre " + format(p));
}

Mat Representation::psi_vec(const Elem& p, const ModVec& x) const {
  require_same_module(x.module, sys_->fiber(p));
  const std::vector<Mat>& mats = psi(p);
  Mat out = Mat::zero(dim_, dim_);
  for (size_t i = 0; i < x.coeffs.size(); ++i)
    if (!x.coeffs[i].is_zero()) out += x.coeffs[i] * mats[i];
  return out;
}

Mat Representation::psi_alg(const AlgElem& a) const {
  const std::vector<Mat>& mats = psi(sys_->monoid()->identity());
  Mat out = Mat::zero(dim_, dim_);
  for (size_t v = 0; v < a.coeffs.size(); ++v)
    if (!a.coeffs[v].is_zero()) out += a.coeffs[v] * mats[v];
  return out;
}

bool Representation::is_zero_rep() const {
  std::lock_guard<std::recursive_mutex> lock(cache_->mu);
  for (const Elem& p : stored_)
    for (const Mat& m : cache_->maps.at(format(p)))
      if (!m.is_zero()) return false;
  return true;
}

Mat psi_compact(const Representation& rep, const Elem& p, const ModOp& T) {
  require_same_module(T.module, rep.system()->fiber(p));
  if (!rep.covers(p))
    throw RepError("representation lacks fibre " + format(p));
  const std::vector<Mat>& mats = rep.psi(p);
  Mat out = Mat::zero(rep.dim(), rep.dim());
  for (int i = 0; i < T.matrix.rows(); ++i)
    for (int j = 0; j < T.matrix.cols(); ++j) {
      const GRat& c = T.matrix(i, j);
      if (c.is_zero()) continue;
      out += c * (mats[size_t(i)] * mats[size_t(j)].adjoint());
    }
  return out;
}

bool CovarianceReport::all_passed() const {
  for (const auto& [name, v] : axioms)
    if (v.status == VerdictStatus::Fail) return false;
  return true;
}

std::string CovarianceReport::str() const {
  std::ostringstream os;
  for (const auto& [name, v] : axioms) {
    os << name << ": ";
    switch (v.status) {
      case VerdictStatus::Pass:
        os << (v.degenerate ? "pass (degenerate)" : "pass");
        break;
      case VerdictStatus::Fail:
        os << "FAIL " << v.detail;
        break;
      case VerdictStatus::NotApplicable:
        os << "n/a (" << v.detail << ")";
        break;
      case VerdictStatus::VerifiedUpToHorizon:
        os << "verified up to horizon " << v.horizon;
        break;
    }
    if (v.status == VerdictStatus::Pass && !v.detail.empty())
      os << " (" << v.detail << ")";
    os << "\n";
  }
  return os.str();
}

CovarianceReport check_T_axioms(const Representation& rep,
                                std::vector<Elem> window) {
  const SystemPtr& sys = rep.system();
  auto mon = sys->monoid();
  if (window.empty()) {
    window = rep.stored();
    for (const Elem& p : rep.stored())
      for (const Elem& q : rep.stored()) window.push_back(multiply(p, q));
    std::sort(window.begin(), window.end(), ElemLess{});
    window.erase(std::unique(window.begin(), window.end()), window.end());
  }
  std::vector<Elem> covered;
  for (const Elem& p : window)
    if (rep.covers(p)) covered.push_back(p);

  CovarianceReport rpt;

  // T1: linearity is built in; the identity fibre must be a *-homomorphism
  AxiomVerdict t1;
  const std::vector<Mat>& pe = rep.psi(mon->identity());
  auto alg = sys->algebra();
  for (int v = 0; v < alg->dim() && t1.status == VerdictStatus::Pass; ++v) {
    if (!(pe[size_t(v)] * pe[size_t(v)] == pe[size_t(v)])) {
      t1.status = VerdictStatus::Fail;
      t1.detail = "psi_e(delta_" + alg->vertex(v) + ") is not idempotent";
      break;
    }
    if (!(pe[size_t(v)].adjoint() == pe[size_t(v)])) {
      t1.status = VerdictStatus::Fail;
      t1.detail = "psi_e(delta_" + alg->vertex(v) + ") is not self-adjoint";
      break;
    }
    for (int w = v + 1; w < alg->dim(); ++w)
      if (!(pe[size_t(v)] * pe[size_t(w)]).is_zero()) {
        t1.status = VerdictStatus::Fail;
        t1.detail = "psi_e(delta_" + alg->vertex(v) + ") psi_e(delta_" +
                    alg->vertex(w) + ") != 0";
        break;
      }
  }
  t1.degenerate = rep.is_zero_rep();
  rpt.axioms["T1"] = t1;

  // T2: psi_p(x) psi_q(y) = psi_{pq}(xy) over basis pairs, including the
  // null tensors (source/range mismatch forces the product to vanish)
  AxiomVerdict t2;
  for (const Elem& p : covered) {
    for (const Elem& q : covered) {
      if (!rep.covers(multiply(p, q))) continue;
      const MultData& md = sys->mult(p, q);
      const std::vector<Mat>& pp = rep.psi(p);
      const std::vector<Mat>& pq = rep.psi(q);
      const std::vector<Mat>& ppq = rep.psi(multiply(p, q));
      BimoduleRef xp = sys->fiber(p), xq = sys->fiber(q);
      for (int i = 0; i < xp->dim() && t2.status == VerdictStatus::Pass; ++i)
        for (int j = 0; j < xq->dim(); ++j) {
          Mat lhs = pp[size_t(i)] * pq[size_t(j)];
          Mat rhs = Mat::zero(rep.dim(), rep.dim());
          int c = md.info.index_of_pair(i, j);
          if (c >= 0)
            for (int t = 0; t < md.matrix.rows(); ++t)
              if (!md.matrix(t, c).is_zero())
                rhs += md.matrix(t, c) * ppq[size_t(t)];
          if (!(lhs == rhs)) {
            t2.status = VerdictStatus::Fail;
            t2.detail = "psi_" + format(p) + "(" + xp->label(i) + ") psi_" +
                        format(q) + "(" + xq->label(j) +
                        ") != psi of the product; lhs=" + lhs.str() +
                        " rhs=" + rhs.str();
            break;
          }
        }
      if (t2.status != VerdictStatus::Pass) break;
    }
    if (t2.status != VerdictStatus::Pass) break;
  }
  rpt.axioms["T2"] = t2;

  // T3: psi_e(<x,y>) = psi_p(x)* psi_p(y) over basis pairs
  AxiomVerdict t3;
  for (const Elem& p : covered) {
    const std::vector<Mat>& pp = rep.psi(p);
    BimoduleRef xp = sys->fiber(p);
    for (int i = 0; i < xp->dim() && t3.status == VerdictStatus::Pass; ++i)
      for (int j = 0; j < xp->dim(); ++j) {
        Mat lhs = rep.psi_alg(inner(ModVec::basis(xp, i), ModVec::basis(xp, j)));
        Mat rhs = pp[size_t(i)].adjoint() * pp[size_t(j)];
        if (!(lhs == rhs)) {
          t3.status = VerdictStatus::Fail;
          t3.detail = "inner-product axiom fails at fibre " + format(p) +
                      ", pair (" + xp->label(i) + ", " + xp->label(j) +
                      "); lhs=" + lhs.str() + " rhs=" + rhs.str();
          break;
        }
      }
    if (t3.status != VerdictStatus::Pass) break;
  }
  t3.degenerate = t1.degenerate;
  rpt.axioms["T3"] = t3;
  return rpt;
}

CovarianceReport check_nica(const Representation& rep,
                            std::vector<std::pair<Elem, Elem>> pairs) {
  const SystemPtr& sys = rep.system();
  if (pairs.empty())
    for (const Elem& p : rep.stored()) {
      if (p.is_identity()) continue;
      for (const Elem& q : rep.stored())
        if (!q.is_identity()) pairs.emplace_back(p, q);
    }

  CovarianceReport rpt;
  AxiomVerdict n;
  for (const auto& [p, q] : pairs) {
    if (n.status != VerdictStatus::Pass) break;
    BimoduleRef xp = sys->fiber(p), xq = sys->fiber(q);
    LubResult l = lub(p, q);
    if (l.finite && !rep.covers(l.value)) {
      n.status = VerdictStatus::NotApplicable;
      n.detail = "representation does not cover " + format(l.value);
      break;
    }
    const std::vector<Mat>& pp = rep.psi(p);
    const std::vector<Mat>& pq = rep.psi(q);
    for (int i = 0; i < xp->dim() && n.status == VerdictStatus::Pass; ++i)
      for (int j = 0; j < xp->dim(); ++j) {
        if (xp->source(i) != xp->source(j)) continue;
        Mat left = pp[size_t(i)] * pp[size_t(j)].adjoint();
        for (int k = 0; k < xq->dim(); ++k) {
          if (n.status != VerdictStatus::Pass) break;
          for (int al = 0; al < xq->dim(); ++al) {
            if (xq->source(k) != xq->source(al)) continue;
            Mat lhs = left * (pq[size_t(k)] * pq[size_t(al)].adjoint());
            Mat rhs = Mat::zero(rep.dim(), rep.dim());
            if (l.finite) {
              ModOp s = rank_one(ModVec::basis(xp, i), ModVec::basis(xp, j));
              ModOp t = rank_one(ModVec::basis(xq, k), ModVec::basis(xq, al));
              ModOp lifted = iota(sys, p, s, l.value) * iota(sys, q, t, l.value);
              rhs = psi_compact(rep, l.value, lifted);
            }
            if (!(lhs == rhs)) {
              n.status = VerdictStatus::Fail;
              n.detail = "Nica identity fails at p=" + format(p) +
                         ", q=" + format(q) + ", operators (" + xp->label(i) +
                         ")(" + xp->label(j) + ")* and (" + xq->label(k) +
                         ")(" + xq->label(al) + ")*" +
                         (l.finite ? "" : " with p v q infinite") +
                         "; lhs=" + lhs.str() + " rhs=" + rhs.str();
              break;
            }
          }
        }
      }
  }
  rpt.axioms["N"] = n;
  return rpt;
}

CovarianceReport check_cp(const Representation& rep,
                          const std::vector<CompactFamily>& families,
                          const std::vector<Elem>& test_qs, int horizon) {
  const SystemPtr& sys = rep.system();
  CovarianceReport rpt;
  AxiomVerdict cp;
  bool horizon_only = false;
  std::vector<std::string> notes;
  for (size_t fi = 0; fi < families.size(); ++fi) {
    DefectVerdict dv = check_cp_vanishes(sys, families[fi], test_qs, horizon);
    std::string tag = "family " + std::to_string(fi);
    if (dv.kind == DefectVerdict::Kind::FailsAt) {
      notes.push_back(tag + ": defect does not vanish (nonzero at " +
                      format(*dv.fail_s) + "), no condition imposed");
      if (cp.status == VerdictStatus::Pass)
        cp.status = VerdictStatus::NotApplicable;
      continue;
    }
    if (dv.kind == DefectVerdict::Kind::InconclusiveAtHorizon) {
      notes.push_back(tag + ": defect inconclusive at horizon " +
                      std::to_string(dv.horizon));
      if (cp.status == VerdictStatus::Pass)
        cp.status = VerdictStatus::NotApplicable;
      continue;
    }
    if (!dv.exact) horizon_only = true;
    if (dv.hypothesis_violated && dv.bad_q)
      notes.push_back(tag + ": note phi~ not injective at " + format(*dv.bad_q));
    Mat sum = Mat::zero(rep.dim(), rep.dim());
    for (const auto& [p, T] : families[fi].entries)
      sum += psi_compact(rep, p, T);
    if (!sum.is_zero()) {
      cp.status = VerdictStatus::Fail;
      cp.detail = tag + ": certified vanishing family has nonzero image, " +
                  "||sum|| = " + std::to_string(sum.operator_norm());
      break;
    }
    notes.push_back(tag + ": vanishes, image is zero");
  }
  if (cp.status == VerdictStatus::Pass && horizon_only) {
    cp.status = VerdictStatus::VerifiedUpToHorizon;
    cp.horizon = horizon;
  }
  if (cp.status != VerdictStatus::Fail) {
    std::string joined;
    for (const auto& s : notes) joined += (joined.empty() ? "" : "; ") + s;
    cp.detail = joined;
  }
  rpt.axioms["CP"] = cp;
  return rpt;
}

CovarianceReport check_fowler(const Representation& rep) {
  const SystemPtr& sys = rep.system();
  auto mon = sys->monoid();
  std::vector<Elem> ps;
  for (const Elem& p : rep.stored()) {
    if (!p.is_identity()) ps.push_back(p);
    for (const Elem& q : rep.stored()) {
      Elem pq = multiply(p, q);
      if (!pq.is_identity()) ps.push_back(pq);
    }
  }
  std::sort(ps.begin(), ps.end(), ElemLess{});
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

  bool directed = is_directed(mon);
  bool injective = true;
  Elem bad_p = mon->identity();
  for (const Elem& p : ps)
    if (!left_action_injective(sys, p)) {
      injective = false;
      bad_p = p;
      break;
    }

  std::string witness;
  auto alg = sys->algebra();
  for (const Elem& p : ps) {
    for (int v = 0; v < alg->dim(); ++v) {
      Mat lhs = psi_compact(rep, p, phi(sys->fiber(p), AlgElem::delta(alg, v)));
      Mat rhs = rep.psi_alg(AlgElem::delta(alg, v));
      if (!(lhs == rhs)) {
        witness = "psi^(" + format(p) + ")(phi(delta_" + alg->vertex(v) +
                  ")) != psi_e(delta_" + alg->vertex(v) + "); lhs=" +
                  lhs.str() + " rhs=" + rhs.str();
        break;
      }
    }
    if (!witness.empty()) break;
  }

  CovarianceReport rpt;
  AxiomVerdict f;
  if (!directed || !injective) {
    f.status = VerdictStatus::NotApplicable;
    f.detail = std::string(!directed ? "monoid is not directed"
                                     : "left action not injective on fibre " +
                                           format(bad_p)) +
               "; identity check " +
               (witness.empty() ? "held anyway" : "failed: " + witness);
  } else if (!witness.empty()) {
    f.status = VerdictStatus::Fail;
    f.detail = witness;
  }
  f.degenerate = rep.is_zero_rep();
  rpt.axioms["Fowler"] = f;
  return rpt;
}

KatsuraIdeal katsura_ideal(const SystemPtr& sys) {
  auto mon = sys->monoid();
  if (sys->name() != "tensor_power" || mon->kind() != MonoidKind::Grid ||
      mon->rank() != 1)
    throw RepError("Katsura data needs a tensor power system");
  BimoduleRef x = sys->fiber(mon->from_vector({1}));
  auto alg = sys->algebra();
  KatsuraIdeal out;
  std::vector<bool> dead(size_t(alg->dim()), true);
  for (int i = 0; i < x->dim(); ++i) dead[size_t(x->range(i))] = false;
  for (int v = 0; v < alg->dim(); ++v)
    if (dead[size_t(v)]) out.kernel.push_back(v);
  // annihilator of the kernel, computed by multiplying through the basis
  for (int v = 0; v < alg->dim(); ++v) {
    bool kills = true;
    for (int w : out.kernel) {
      AlgElem prod = AlgElem::delta(alg, v) * AlgElem::delta(alg, w);
      if (!prod.is_zero()) kills = false;
    }
    if (kills) out.orthogonal.push_back(v);
  }
  // at finite dimension every left action is by compact operators
  out.ideal = out.orthogonal;
  return out;
}

CovarianceReport check_katsura(const Representation& rep, int horizon) {
  const SystemPtr& sys = rep.system();
  KatsuraIdeal ki = katsura_ideal(sys);  // also validates the system shape
  auto mon = sys->monoid();
  Elem e = mon->identity();
  Elem one = mon->from_vector({1});
  BimoduleRef x1 = sys->fiber(one);
  auto alg = sys->algebra();

  bool ids_ok = true;
  std::string witness;
  for (int v : ki.ideal) {
    Mat lhs = psi_compact(rep, one, phi(x1, AlgElem::delta(alg, v)));
    Mat rhs = rep.psi_alg(AlgElem::delta(alg, v));
    if (!(lhs == rhs)) {
      ids_ok = false;
      witness = "psi^(1)(phi(delta_" + alg->vertex(v) + ")) != psi_e(delta_" +
                alg->vertex(v) + ")";
      break;
    }
  }

  // the defect-engine route through the same conditions
  bool cp_ok = true;
  bool certified = true;
  for (int v : ki.ideal) {
    CompactFamily fam = fowler_family(sys, v, one);
    DefectVerdict dv = check_cp_vanishes(sys, fam, {e}, horizon);
    if (dv.kind != DefectVerdict::Kind::VanishesForLargeS) {
      certified = false;
      continue;
    }
    Mat sum = Mat::zero(rep.dim(), rep.dim());
    for (const auto& [p, T] : fam.entries) sum += psi_compact(rep, p, T);
    if (!sum.is_zero()) cp_ok = false;
  }

  CovarianceReport rpt;
  AxiomVerdict k;
  std::string sets = "kernel {";
  for (size_t i = 0; i < ki.kernel.size(); ++i)
    sets += (i ? "," : "") + alg->vertex(ki.kernel[i]);
  sets += "}, ideal {";
  for (size_t i = 0; i < ki.ideal.size(); ++i)
    sets += (i ? "," : "") + alg->vertex(ki.ideal[i]);
  sets += "}";
  if (!certified) {
    k.status = VerdictStatus::NotApplicable;
    k.detail = sets + "; a Katsura family was not certified to vanish";
  } else if (ids_ok != cp_ok) {
    k.status = VerdictStatus::Fail;
    k.detail = sets + "; identity route and defect route disagree " +
               "(is psi at the identity multiplicative?)";
  } else if (!ids_ok) {
    k.status = VerdictStatus::Fail;
    k.detail = sets + "; " + witness;
  } else {
    k.detail = sets + "; cross-check agreed" +
               (ki.ideal.empty() ? " (vacuously)" : "");
    k.degenerate = ki.ideal.empty();
  }
  rpt.axioms["Katsura"] = k;
  return rpt;
}

CompactFamily fowler_family(const SystemPtr& sys, int vertex, const Elem& p) {
  auto alg = sys->algebra();
  if (vertex < 0 || vertex >= alg->dim())
    throw RepError("vertex out of range");
  if (p.is_identity())
    throw RepError("the Fowler family needs a nontrivial index");
  CompactFamily fam;
  AlgElem a = AlgElem::delta(alg, vertex);
  fam.entries.emplace_back(sys->monoid()->identity(),
                           phi(sys->fiber(sys->monoid()->identity()), a));
  BimoduleRef xp = sys->fiber(p);
  fam.entries.emplace_back(p, ModOp::zero(xp) - phi(xp, a));
  fam.certificate = Certificate::Fowler;
  return fam;
}

Representation fock_rep(const SystemPtr& sys, const std::vector<Elem>& window,
                        bool augmented) {
  FockSpace f = fock_space(sys, window, augmented);
  auto mon = sys->monoid();
  auto alg = sys->algebra();
  std::map<std::string, std::vector<Mat>> maps;

  std::vector<Mat> emats;
  for (int v = 0; v < alg->dim(); ++v) {
    std::vector<ModOp> blocks;
    for (size_t i = 0; i < f.window.size(); ++i) {
      if (augmented)
        blocks.push_back(phi_tilde(sys, f.fibres[i], AlgElem::delta(alg, v)));
      else
        blocks.push_back(phi(f.sum.parts[i], AlgElem::delta(alg, v)));
    }
    emats.push_back(f.sum.block_diagonal(blocks).matrix);
  }
  maps[format(mon->identity())] = emats;

  for (const Elem& g : generator_elems(mon)) {
    BimoduleRef xg = sys->fiber(g);
    std::vector<Mat> mats;
    for (int i = 0; i < xg->dim(); ++i)
      mats.push_back(fock_operator(sys, f, g, ModVec::basis(xg, i)).matrix);
    maps[format(g)] = mats;
  }
  return Representation::make(sys, f.sum.space->dim(), std::move(maps));
}

Representation rep_from_ck(const SystemPtr& sys, const CKFamily& fam) {
  KGraphPtr g = graph_of(sys);
  if (!g) throw RepError("path-system representation needs a k-graph system");
  if (!fam.graph || fam.graph->fingerprint() != g->fingerprint())
    throw RepError("matrix family belongs to a different graph");
  auto mon = sys->monoid();
  std::map<std::string, std::vector<Mat>> maps;
  maps[format(mon->identity())] = fam.vertex_mats;
  for (int c = 0; c < g->k(); ++c) {
    std::vector<int> unit(size_t(g->k()), 0);
    unit[size_t(c)] = 1;
    Elem gc = mon->from_vector(unit);
    BimoduleRef xc = sys->fiber(gc);
    std::vector<Mat> mats;
    for (int i = 0; i < xc->dim(); ++i)
      mats.push_back(fam.of(g->parse_path(xc->label(i))));
    maps[format(gc)] = mats;
  }
  return Representation::make(sys, fam.dim, std::move(maps));
}

}  // namespace cnp
