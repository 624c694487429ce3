#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cnp/covariance.hpp"
#include "cnp/psys.hpp"

namespace cnp {

struct BoundaryError : std::runtime_error {
  explicit BoundaryError(const std::string& what) : std::runtime_error(what) {}
};

// A semigroup of N x N matrices given on the monoid generators and
// extended multiplicatively along normal forms.  Well defined because
// matrices assigned to commuting generators are required to commute.
class IsometryFamily {
 public:
  static IsometryFamily make(MonoidPtr mon, int dim,
                             std::vector<Mat> generator_mats);

  const MonoidPtr& monoid() const { return mon_; }
  int dim() const { return dim_; }
  const Mat& gen(int i) const { return gens_.at(size_t(i)); }
  Mat of(const Elem& p) const;  // product along the normal form of p

 private:
  MonoidPtr mon_;
  int dim_ = 0;
  std::vector<Mat> gens_;
};

// Truncated Toeplitz matrices on l^2(D) for a finite window D containing
// the identity and closed under left divisors: V_p delta_q = delta_{pq}
// when pq lies in D, else 0.
class TruncatedToeplitz {
 public:
  const MonoidPtr& monoid() const { return mon_; }
  const std::vector<Elem>& window() const { return window_; }
  int dim() const { return int(window_.size()); }
  int index_of(const Elem& q) const;  // -1 when q is outside the window
  Mat of(const Elem& p) const;
  // columns where V_p acts without truncation: {q in D : pq in D}
  std::vector<Elem> interior(const Elem& p) const;

  friend TruncatedToeplitz truncated_toeplitz(MonoidPtr mon,
                                              std::vector<Elem> window);

 private:
  MonoidPtr mon_;
  std::vector<Elem> window_;
  std::map<std::string, int> index_;
};

TruncatedToeplitz truncated_toeplitz(MonoidPtr mon, std::vector<Elem> window);

// V_p V*_p V_q V*_q = V_{p v q} V*_{p v q}, or 0 when the join is
// infinite.  Exact matrix comparison for a plain family; for truncated
// Toeplitz matrices the comparison is restricted to the interior columns
// named in the report.  Empty input defaults to all ordered generator
// pairs.
CovarianceReport check_semigroup_nica(const IsometryFamily& fam,
                                      std::vector<std::pair<Elem, Elem>> pairs = {});
CovarianceReport check_semigroup_nica(const TruncatedToeplitz& fam,
                                      std::vector<std::pair<Elem, Elem>> pairs = {});

// prod_{p in F} (1 - iota~^s_p(1 (x) 1*)) over the one-dimensional system:
// the scalar 1 when no member of F divides s, else 0.  Also carries the
// inclusion-exclusion expansion 1 + sum_{H != {}, vH finite} (-1)^{|H|}
// iota~^s_{vH}(1 (x) 1*), which agrees with the product.
struct BoundaryDefect {
  int value = 0;
  ModOp product_form;
  ModOp inclusion_exclusion;
};
BoundaryDefect boundary_defect(const MonoidPtr& mon, const std::vector<Elem>& F,
                               const Elem& s);

enum class BoundaryVia { Symbolic, Matrix };

// prod_{p in F} (1 - W_p W*_p) = 0 for a foundation set F.  Symbolic mode
// certifies the relation through the defect engine on the one-dimensional
// system (inclusion-exclusion family); matrix mode evaluates the product
// on the given family.  A refuted foundation property is NotApplicable
// with the refuting element.
CovarianceReport check_boundary_relation(const IsometryFamily& fam,
                                         const std::vector<Elem>& F,
                                         BoundaryVia via, int horizon = 3);

// Relations for a family over a right-angled Artin monoid:
//   R1  W*_s W_s = 1 per generator;
//   R2  commuting pairs: W_s W_t = W_t W_s, and the derived second form
//       W*_s W_t = W_t W*_s (checked directly and through
//       W*_s (W_s W*_s W_t W*_t) W_t when the premises hold);
//   R3  non-commuting pairs: W*_s W_t = 0;
//   R4  per component of the complement graph: the boundary relation.
// For truncated Toeplitz matrices R1-R3 are checked on interior columns
// and R4 is certified symbolically only, never asserted of the matrices.
CovarianceReport raag_relations_report(const IsometryFamily& fam,
                                       int horizon = 3);
CovarianceReport raag_relations_report(const TruncatedToeplitz& fam,
                                       int horizon = 3);

}  // namespace cnp
