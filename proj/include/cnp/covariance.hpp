#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cnp/psys.hpp"

namespace cnp {

struct RepError : std::runtime_error {
  explicit RepError(const std::string& what) : std::runtime_error(what) {}
};

// A representation of a product system by N x N matrices.  Maps are stored
// for the identity fibre (one matrix per vertex) and finitely many other
// fibres (one matrix per basis vector).  psi_p for a product of stored
// indices is synthesized through the multiplication unitaries, so the
// stored data determines psi on every product of stored elements.
class Representation {
 public:
  // keys of `maps` are monoid element strings as produced by format()
  static Representation make(SystemPtr sys, int dim,
                             std::map<std::string, std::vector<Mat>> maps);

  const SystemPtr& system() const { return sys_; }
  int dim() const { return dim_; }
  // stored indices in (length, repr) order, identity first
  const std::vector<Elem>& stored() const { return stored_; }

  bool covers(const Elem& p) const;
  // one matrix per basis vector of fiber(p); synthesized and memoized
  const std::vector<Mat>& psi(const Elem& p) const;
  Mat psi_vec(const Elem& p, const ModVec& x) const;
  Mat psi_alg(const AlgElem& a) const;
  bool is_zero_rep() const;

 private:
  struct Cache;  // synthesized maps, shared between copies
  SystemPtr sys_;
  int dim_ = 0;
  std::vector<Elem> stored_;
  std::shared_ptr<Cache> cache_;
};

// psi^{(p)}: extend x (x) y* -> psi_p(x) psi_p(y)* linearly over the
// matrix-unit decomposition of T; independent of the decomposition
// whenever the inner-product axiom holds.
Mat psi_compact(const Representation& rep, const Elem& p, const ModOp& T);

enum class VerdictStatus { Pass, Fail, NotApplicable, VerifiedUpToHorizon };

struct AxiomVerdict {
  VerdictStatus status = VerdictStatus::Pass;
  std::string detail;        // witness for Fail, reason for NotApplicable
  int horizon = 0;           // VerifiedUpToHorizon
  bool degenerate = false;   // passed, but vacuously (zero representation)
};

struct CovarianceReport {
  std::map<std::string, AxiomVerdict> axioms;  // keyed "T1".."T3","N","CP",...
  bool all_passed() const;  // no Fail among the verdicts present
  std::string str() const;  // deterministic one-line-per-axiom rendering
};

// T1: each stored or synthesized map is linear by construction; what is
// actually checked is that psi at the identity is a *-homomorphism.
// T2: psi_p(x) psi_q(y) = psi_{pq}(xy) over basis pairs, for all ordered
// pairs from the window (so reordered factorizations are covered).
// T3: psi_e(<x,y>) = psi_p(x)* psi_p(y) over basis pairs.
// An empty window defaults to the stored indices and their pairwise
// products.
CovarianceReport check_T_axioms(const Representation& rep,
                                std::vector<Elem> window = {});

// Nica covariance on compact operators: for S on fiber(p), T on fiber(q),
// psi^{(p)}(S) psi^{(q)}(T) = psi^{(p v q)}(iota(S) iota(T)), and = 0 when
// p v q is infinite.  Exact over the matrix-unit basis of each fibre.
// Empty input defaults to all ordered pairs of stored non-identity
// indices.
CovarianceReport check_nica(const Representation& rep,
                            std::vector<std::pair<Elem, Elem>> pairs = {});

// For each family certified to vanish for large s by the defect engine,
// asserts sum_p psi^{(p)}(T_p) = 0.  Families the engine cannot certify
// are reported NotApplicable; horizon-only certificates downgrade Pass to
// VerifiedUpToHorizon.
CovarianceReport check_cp(const Representation& rep,
                          const std::vector<CompactFamily>& families,
                          const std::vector<Elem>& test_qs, int horizon);

// psi^{(p)}(phi_p(a)) = psi_e(a) for a over the vertex basis and p over
// the stored indices and their pairwise products.  Reported NotApplicable
// (with the identity's outcome in the detail) when the standing
// hypotheses fail: every pair needs a least upper bound and every left
// action must be injective.
CovarianceReport check_fowler(const Representation& rep);

struct KatsuraIdeal {
  std::vector<int> kernel;      // vertices acting as zero on the bimodule
  std::vector<int> orthogonal;  // annihilator of the kernel
  std::vector<int> ideal;       // orthogonal meet preimage of compacts
};
// Requires a system built by tensor_power_system.
KatsuraIdeal katsura_ideal(const SystemPtr& sys);

// psi^{(1)}(phi(a)) = psi_e(a) for a over the vertex basis of the Katsura
// ideal, cross-checked against the defect-engine route through the
// families {(0, L_a), (1, -phi(a))}.
CovarianceReport check_katsura(const Representation& rep, int horizon = 3);

// {(e, L_{delta_v}), (p, -phi_p(delta_v))}: vanishes identically from p
// on when the left actions are injective (and, over N, when delta_v
// annihilates the kernel of the action).
CompactFamily fowler_family(const SystemPtr& sys, int vertex, const Elem& p);

// Truncated Fock representation on the window: psi_e acts diagonally,
// generator fibres act by truncated creation operators.
Representation fock_rep(const SystemPtr& sys, const std::vector<Elem>& window,
                        bool augmented);

// Representation of a path system induced by a Cuntz-Krieger matrix
// family on the same graph.
Representation rep_from_ck(const SystemPtr& sys, const CKFamily& fam);

}  // namespace cnp
