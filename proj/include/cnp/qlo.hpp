#pragma once

// Quasi-lattice ordered monoids (P, <=) with p <= q iff p^{-1}q in P.
//
// Three kinds are supported:
//   Grid  - (N^k, +), componentwise order, lubs always exist.
//   Raag  - trace monoid of a right-angled Artin monoid over a finite
//           undirected simple graph; elements are kept in Foata normal
//           form and equality is syntactic equality of normal forms.
//   Lex   - the fragment P = ((N\{0}) x Z) u ({0} x N) of Z^2 under the
//           lexicographic (total) order.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnp {

struct MixedMonoid : std::runtime_error {
  MixedMonoid() : std::runtime_error("elements belong to different monoids") {}
};
struct IntervalInfinite : std::runtime_error {
  explicit IntervalInfinite(const std::string& p)
      : std::runtime_error("interval below " + p + " is infinite") {}
};
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

enum class MonoidKind { Grid, Raag, Lex };

class QloMonoid;
using MonoidPtr = std::shared_ptr<const QloMonoid>;

// Immutable value: monoid handle plus canonical coordinates.
//   Grid: counts per generator.  Lex: {m, n}.  Raag: Foata-normal word
//   of generator indices.
struct Elem {
  MonoidPtr mon;
  std::vector<int> v;

  bool is_identity() const;
  friend bool operator==(const Elem& a, const Elem& b);
  friend bool operator!=(const Elem& a, const Elem& b) { return !(a == b); }
};

class QloMonoid : public std::enable_shared_from_this<QloMonoid> {
 public:
  static MonoidPtr grid(int k);
  static MonoidPtr raag(const std::vector<std::string>& vertices,
                        const std::vector<std::pair<std::string, std::string>>& edges);
  static MonoidPtr lex();

  MonoidKind kind() const { return kind_; }
  // Number of generators (grid rank or Raag vertex count); 0 for Lex.
  int rank() const { return int(gens_.size()); }
  const std::vector<std::string>& generators() const { return gens_; }
  bool adjacent(int i, int j) const { return adj_[i][j] != 0; }
  bool commutes(int i, int j) const {
    return kind_ == MonoidKind::Grid ? i != j : adj_[i][j] != 0;
  }
  const std::string& fingerprint() const { return fingerprint_; }

  Elem identity() const;
  Elem parse(const std::string& s) const;
  Elem from_vector(std::vector<int> coords) const;   // Grid / Lex
  Elem from_word(const std::vector<int>& word) const;  // Grid / Raag

 private:
  QloMonoid() = default;
  MonoidKind kind_ = MonoidKind::Grid;
  std::vector<std::string> gens_;
  std::vector<std::vector<char>> adj_;
  std::string fingerprint_;
};

void require_same(const Elem& a, const Elem& b);

int length(const Elem& p);  // word length / l1
std::string format(const Elem& p);
std::vector<int> word_of(const Elem& p);  // Grid / Raag letters in normal order

Elem multiply(const Elem& a, const Elem& b);
bool divides(const Elem& p, const Elem& q);          // p <= q
Elem quotient(const Elem& p, const Elem& q);         // p^{-1} q, requires p <= q

struct LubResult {
  bool finite = false;
  Elem value;  // defined iff finite
  static LubResult infinity() { return {}; }
};
LubResult lub(const Elem& p, const Elem& q);

// {r : e < r <= p}; throws IntervalInfinite when unbounded (Lex, m >= 1).
std::vector<Elem> interval(const Elem& p);
// interval(p) plus the identity, sorted by (length, repr).
std::vector<Elem> divisors(const Elem& p);

// All elements of length <= maxlen, sorted by (length, repr).
std::vector<Elem> ball(const MonoidPtr& m, int maxlen);
// {s : r <= s, length(s) <= horizon}, sorted by (length, repr).
std::vector<Elem> cone_window(const Elem& r, int horizon);

// Connected components of the complement graph, as sorted generator
// index lists; Raag only.
std::vector<std::vector<int>> opp_components(const MonoidPtr& m);

struct FoundationVerdict {
  enum class Kind { True, False, TrueUpToHorizon };
  Kind kind = Kind::False;
  bool exact = false;
  std::optional<Elem> counterexample;  // set for False
  int horizon = 0;
  std::string certificate;
  explicit operator bool() const { return kind != Kind::False; }
};

// Is F a foundation set: every q in P has lub(p, q) finite for some p in F?
// Exact for Grid and Lex; for Raag exact when a certificate is found
// (central member, or a complement-graph component contained in F) or a
// counterexample exists within the search horizon.
FoundationVerdict is_foundation_set(const MonoidPtr& m, const std::vector<Elem>& F,
                                    int horizon = 4);

struct Frontier {
  Elem base;
  std::vector<Elem> witnesses;
  int horizon = 0;
  std::vector<Elem> window;  // {s : r <= s, length(s) <= horizon} for the witness r
};

// Witness r = q joined with every extra whose lub stays finite (skipped
// extras keep lub infinity against the final r as well); the window is the
// cone above r truncated at the horizon.  The horizon is raised to
// length(r) when necessary so the window is never empty.
Frontier frontier_for(const Elem& q, const std::vector<Elem>& extras, int horizon);

// Deterministic total order: (length, repr).
struct ElemLess {
  bool operator()(const Elem& a, const Elem& b) const {
    int la = length(a), lb = length(b);
    if (la != lb) return la < lb;
    return format(a) < format(b);
  }
};

}  // namespace cnp
