#pragma once

// Product systems of Hilbert bimodules over a quasi-lattice ordered monoid.
//
// A system assigns to every monoid element p a bimodule fiber(p) over the
// common vertex algebra, with fiber(e) = A, and to every pair (p,q) a
// unitary multiplication M_{p,q} : fiber(p) (x) fiber(q) -> fiber(pq).
// On top of that sit the annihilator ideals I_p, the augmented fibres
// X^{<=q} = (+)_{p<=q} X_p . I_{p^{-1}q}, the block maps phi~ and iota~,
// the covariance-defect engine, and Fock-space creation operators.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cnp/hilbmod.hpp"
#include "cnp/kgraph.hpp"
#include "cnp/qlo.hpp"

namespace cnp {

struct SystemError : std::runtime_error {
  explicit SystemError(const std::string& what) : std::runtime_error(what) {}
};

// Multiplication data for one (p,q): the tensor structure of
// fiber(p) (x) fiber(q) and the unitary onto fiber(pq), rows indexed by
// the basis of fiber(pq), columns by info.pairs.
struct MultData {
  TensorInfo info;
  Mat matrix;
};

class ProductSystem;
using SystemPtr = std::shared_ptr<const ProductSystem>;

class ProductSystem : public std::enable_shared_from_this<ProductSystem> {
 public:
  virtual ~ProductSystem() = default;

  const MonoidPtr& monoid() const { return mon_; }
  const AlgebraPtr& algebra() const { return alg_; }
  virtual std::string name() const = 0;

  // fiber(e) is always the algebra as a bimodule over itself.
  BimoduleRef fiber(const Elem& p) const;
  // Memoized; unit laws (p = e or q = e) are synthesized from the module
  // structure, other pairs are validated unitary bimodule maps.
  const MultData& mult(const Elem& p, const Elem& q) const;

  // Vertices v with phi_r(delta_v) = 0 for every e < r <= p; the whole
  // vertex set when p = e.  The default enumerates interval(p).
  virtual std::vector<int> ideal_vertices(const Elem& p) const;
  // Divisors p <= q allowed to carry a nonzero summand of the augmented
  // fibre.  The default enumerates divisors(q); subclasses with infinite
  // divisor sets override this with their exact support.
  virtual std::vector<Elem> augmentation_divisors(const Elem& q) const;

 protected:
  ProductSystem(MonoidPtr m, AlgebraPtr a);
  // Only called with p != e.
  virtual BimoduleRef make_fiber(const Elem& p) const = 0;
  // Only called with p != e and q != e.
  virtual Mat make_mult(const Elem& p, const Elem& q, const TensorInfo& info) const = 0;

  MonoidPtr mon_;
  AlgebraPtr alg_;

 private:
  mutable std::mutex memo_mu_;
  mutable std::map<std::string, BimoduleRef> fiber_memo_;
  mutable std::map<std::string, MultData> mult_memo_;
};

// ---------------------------------------------------------------------------
// Constructors.
// ---------------------------------------------------------------------------

// System over a grid or Raag monoid presented by one fibre per generator
// plus flip unitaries t_{ij} : X_i (x) X_j -> X_j (x) X_i for each
// commuting generator pair i < j (matrix rows over tensor(X_j,X_i).pairs,
// columns over tensor(X_i,X_j).pairs).  Flips must be unitary, preserve
// the (range, source) grading of the composite, and satisfy the
// Yang-Baxter identity on pairwise-commuting triples; reverse flips are
// the adjoints.  General fibres are spaces of composable chains along the
// normal form of p, and M_{p,q} sorts the concatenated word.
SystemPtr flip_system(const MonoidPtr& m, std::vector<BimoduleRef> gen_fibres,
                      std::map<std::pair<int, int>, Mat> flips,
                      std::string name = "flip");

// The system over N with fibres X^{(x)n}.
SystemPtr tensor_power_system(const BimoduleRef& x);

// Path system of a finitely aligned k-graph: fiber(n) has basis
// {delta_mu : mu in Lambda^n} and multiplication is path composition.
SystemPtr from_kgraph(const KGraphPtr& g);
// The underlying graph of a system built by from_kgraph, else null.
KGraphPtr graph_of(const SystemPtr& sys);

// One-dimensional fibres over any monoid; all multiplications scalar.
SystemPtr trivial_system(const MonoidPtr& m);

// The system over the lexicographic monoid used as the running
// counterexample: two vertices, diagonal fibres over (0,n), rank-two
// fibres with range v1 only over (m,n), m >= 1.
SystemPtr lex_counterexample();

// ---------------------------------------------------------------------------
// Ideals and augmented fibres.
// ---------------------------------------------------------------------------

std::vector<int> ideal_I(const SystemPtr& sys, const Elem& p);

// Span of the basis vectors with source in I; agrees with the
// inner-product and the annihilation descriptions of X.I.
BimoduleRef restrict_to_ideal(const BimoduleRef& x, const std::vector<int>& I);

struct AugmentedFiber {
  Elem index;
  DirectSum sum;             // only nonzero summands, tagged format(p)
  std::vector<Elem> parts;   // aligned with sum.parts, sorted (length, repr)
};
AugmentedFiber augmented_fiber(const SystemPtr& sys, const Elem& q);

// Diagonal left action of a on X^{<=q}.
ModOp phi_tilde(const SystemPtr& sys, const AugmentedFiber& xq, const AlgElem& a);

struct InjectivityVerdict {
  bool injective = true;
  int witness_vertex = -1;  // delta_{witness} acts as zero when not injective
};
InjectivityVerdict phi_tilde_injective(const SystemPtr& sys, const Elem& q);

// iota^q_p(S) = M_{p,p^{-1}q} (S (x) 1) M*; requires p <= q.  For p = e
// this is phi_q of the diagonal of S.
ModOp iota(const SystemPtr& sys, const Elem& p, const ModOp& S, const Elem& q);

// Block operator on X^{<=q} acting as iota^r_p(S) on each summand with
// p <= r and as zero elsewhere; the whole operator is zero when p is not
// below the index.
ModOp iota_tilde(const SystemPtr& sys, const Elem& p, const ModOp& S,
                 const AugmentedFiber& xq);

// ---------------------------------------------------------------------------
// The covariance-defect engine.
// ---------------------------------------------------------------------------

enum class Certificate { None, Fowler, KGraphCK, Foundation };

// Finitely many compact operators T_p, possibly several entries per index
// (they are summed).  The certificate records which structural argument,
// if any, lets a clean window verdict be promoted to an exact one.
struct CompactFamily {
  std::vector<std::pair<Elem, ModOp>> entries;
  Certificate certificate = Certificate::None;
};

ModOp cp_defect(const SystemPtr& sys, const CompactFamily& fam,
                const AugmentedFiber& xs);
ModOp cp_defect(const SystemPtr& sys, const CompactFamily& fam, const Elem& s);

struct DefectVerdict {
  enum class Kind { VanishesForLargeS, FailsAt, InconclusiveAtHorizon };
  Kind kind = Kind::InconclusiveAtHorizon;
  // One (q, r) pair per requested q: every s >= r in the window had zero
  // defect, and r is the (length, repr)-least such window element.
  std::vector<std::pair<Elem, Elem>> witnesses;
  std::optional<Elem> fail_s;   // FailsAt
  double fail_norm = 0.0;       // FailsAt
  int horizon = 0;
  bool exact = false;           // certificate-backed, not merely windowed
  bool hypothesis_violated = false;  // some tested phi~ is not injective
  std::optional<Elem> bad_q;
};

// Semi-decides "the defect vanishes for large s": for each q the frontier
// above q joined with the family indices is scanned up to the horizon and
// the least window element whose upward cone is defect-free is reported.
// Certified families (k-graph inclusion-exclusion, foundation sets,
// canonical Fowler families) make the verdict exact.
DefectVerdict check_cp_vanishes(const SystemPtr& sys, const CompactFamily& fam,
                                const std::vector<Elem>& test_qs, int horizon);

// ---------------------------------------------------------------------------
// Fock spaces.
// ---------------------------------------------------------------------------

struct FockSpace {
  bool augmented = false;
  std::vector<Elem> window;            // sorted (length, repr), deduplicated
  DirectSum sum;                       // fibre or augmented fibre per index
  std::vector<AugmentedFiber> fibres;  // populated in the augmented case
};
FockSpace fock_space(const SystemPtr& sys, const std::vector<Elem>& D,
                     bool augmented);

// Truncated creation operator by x in fiber(p): the summand at q is sent
// to the summand at pq via M_{p,q}(x (x) -); contributions leaving the
// window are dropped.
ModOp fock_operator(const SystemPtr& sys, const FockSpace& f, const Elem& p,
                    const ModVec& x);

// ---------------------------------------------------------------------------
// Norm decay along the frontier.
// ---------------------------------------------------------------------------

struct DecayStep {
  Elem s;
  double norm = 0.0;
};
struct DecayResult {
  bool found = false;
  std::optional<Elem> s;
  double norm = 0.0;
  std::vector<DecayStep> trace;
  int horizon = 0;
};
// Walks the frontier above the identity joined with the family indices
// and returns the first s with ||cp_defect(s)|| < eps.
DecayResult boundary_norm_decay(const SystemPtr& sys, const CompactFamily& fam,
                                double eps, int horizon);

// ---------------------------------------------------------------------------
// k-graph covariance families.
// ---------------------------------------------------------------------------

// The inclusion-exclusion family of (v, F): delta_v (x) delta_v* at the
// identity plus (-1)^{|G|} sum of delta_lambda (x) delta_lambda* at
// join(d(G)) over the common extensions of each nonempty G subset of F.
// Carries the KGraphCK certificate.
CompactFamily ck_family(const SystemPtr& sys, int v, const std::vector<Path>& F);

// The defect of that family on X^{<=s}; zero for all s >= q v (v d(F))
// exactly when F is exhaustive at v.
ModOp ck_defect_symbolic(const SystemPtr& sys, int v, const std::vector<Path>& F,
                         const std::vector<int>& s);

}  // namespace cnp
