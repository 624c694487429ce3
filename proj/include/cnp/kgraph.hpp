#pragma once

// Finite higher-rank graphs (k-graphs) with validated factorization
// structure.
//
// Edges carry one of k colors; commuting squares identify bicolored
// composable pairs.  A path is kept in normal form: its edge sequence is
// color-nondecreasing, which is the unique such representative once the
// square bijections are total and satisfy the cube condition (both are
// checked at construction).  Composition follows the category convention
// source(first) = range(second), i.e. paths extend on the right at the
// source.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cnp/matrix.hpp"

namespace cnp {

struct GraphError : std::runtime_error {
  explicit GraphError(const std::string& what) : std::runtime_error(what) {}
};

class KGraph;
using KGraphPtr = std::shared_ptr<const KGraph>;

struct Path {
  KGraphPtr graph;
  std::vector<int> edges;  // normal form, composition order
  int range_v = 0;         // = source_v for a vertex path
  int source_v = 0;
  std::vector<int> deg;    // edge count per color

  bool is_vertex() const { return edges.empty(); }
  std::string str() const;
  friend bool operator==(const Path& a, const Path& b);
  friend bool operator!=(const Path& a, const Path& b) { return !(a == b); }
};

// Deterministic total order: (total degree, degree vector, edge list, vertex).
struct PathLess {
  bool operator()(const Path& a, const Path& b) const;
};

class KGraph : public std::enable_shared_from_this<KGraph> {
 public:
  struct Edge {
    std::string id;
    int color = 0;  // 0-based
    int range = 0;
    int source = 0;
  };
  // left_first.left_second = right_first.right_second, where the left pair
  // is in color-ascending order and the right pair is its swap.
  struct Square {
    std::string left_first, left_second, right_first, right_second;
  };

  static KGraphPtr make(int k, std::vector<std::string> vertices,
                        std::vector<Edge> edges, std::vector<Square> squares);

  int k() const { return k_; }
  int num_vertices() const { return int(verts_.size()); }
  const std::vector<std::string>& vertices() const { return verts_; }
  int vertex_index(const std::string& v) const;  // -1 when absent
  int num_edges() const { return int(edges_.size()); }
  const Edge& edge(int i) const { return edges_[i]; }
  int edge_index(const std::string& id) const;  // -1 when absent
  const std::string& fingerprint() const { return fingerprint_; }

  Path vertex_path(int v) const;
  Path edge_path(int e) const;
  // Builds a path from an arbitrary composable edge sequence, normalizing
  // along squares; throws GraphError when the chain is not composable.
  Path path_from_edges(const std::vector<int>& seq) const;
  Path parse_path(const std::string& s) const;  // edge ids concatenated, or a vertex name

  // (a, b) with color(a) < color(b) -> the swapped pair (b', a').
  std::pair<int, int> square_fwd(int a, int b) const;
  // (f, e) with color(f) > color(e) -> the sorted pair (a, b).
  std::pair<int, int> square_bwd(int f, int e) const;

  // All paths of exactly this degree, deterministic order.  Memoized.
  std::vector<Path> paths_of_degree(const std::vector<int>& n) const;

 private:
  KGraph() = default;
  std::vector<int> normalize(std::vector<int> seq) const;

  int k_ = 1;
  std::vector<std::string> verts_;
  std::vector<Edge> edges_;
  std::map<std::pair<int, int>, std::pair<int, int>> fwd_, bwd_;
  std::string fingerprint_;

  mutable std::mutex memo_mu_;
  mutable std::map<std::vector<int>, std::vector<std::vector<int>>> memo_;
};

bool composable(const Path& a, const Path& b);  // source(a) == range(b)
Path compose(const Path& a, const Path& b);

// First color-c edge brought to the front: path = e . rest.
std::optional<std::pair<int, Path>> pull_front(const Path& p, int color);
// Unique factorization p = prefix . rest with degree(prefix) = m; throws
// GraphError when m is not componentwise between 0 and degree(p).
std::pair<Path, Path> factorize(const Path& p, const std::vector<int>& m);
Path prefix_of_degree(const Path& p, const std::vector<int>& m);
// tau = mu . rest for some rest.
bool extends(const Path& tau, const Path& mu);

// Boundary paths of degree <= n: d(p) <= n and whenever d(p)_i < n_i the
// source of p receives no color-i edge.
std::vector<Path> paths_le(const KGraphPtr& g, const std::vector<int>& n);

// Minimal common extensions: degree d(mu) v d(nu), extending both.
std::vector<Path> mce(const Path& mu, const Path& nu);
// Common extensions of degree v over the whole set.
std::vector<Path> mce_set(const std::vector<Path>& G);

struct ExhaustiveVerdict {
  bool exhaustive = false;
  std::optional<Path> witness;  // a path meeting no member, when not exhaustive
  explicit operator bool() const { return exhaustive; }
};

// Is F exhaustive at v: every path with range v has a common extension
// with some member of F?  Decided exactly by a reachability search over
// residual-extension states; no degree horizon is involved.
ExhaustiveVerdict is_exhaustive(const KGraphPtr& g, int v, const std::vector<Path>& F);
// Bounded scan over all paths of degree <= bound; used as a cross-check.
ExhaustiveVerdict is_exhaustive_scan(const KGraphPtr& g, int v,
                                     const std::vector<Path>& F,
                                     const std::vector<int>& bound);

// All minimal exhaustive subsets of the nonzero-degree paths with range v
// and degree <= bound; throws GraphError when there are more than
// max_candidates candidate paths.
std::vector<std::vector<Path>> min_exhaustive_sets(const KGraphPtr& g, int v,
                                                   const std::vector<int>& bound,
                                                   int max_candidates = 16);

// Matrix family indexed by paths, stored on vertices and edges and
// synthesized along normal forms.
struct CKFamily {
  KGraphPtr graph;
  int dim = 0;
  std::vector<Mat> vertex_mats;  // per vertex
  std::vector<Mat> edge_mats;    // per edge

  Mat of(const Path& p) const;
};

struct CkViolation {
  std::string relation;  // "CK1" .. "CK4"
  std::string witness;
};

struct CkReport {
  bool pass = false;
  bool degenerate = false;           // sum of vertex projections is zero
  std::vector<int> degree_bound;     // bound used for CK2-CK4 enumeration
  std::vector<CkViolation> violations;
};

// Verifies CK1 (orthogonal projections), CK2 (multiplicativity over
// composable pairs up to the bound), CK3 (the MCE expansion of s*_mu s_nu),
// and, when include_ck4 is set, CK4 over every vertex's minimal exhaustive
// sets within the bound.
CkReport check_ck_family(const CKFamily& fam, bool include_ck4,
                         const std::vector<int>& degree_bound);

void require_same_graph(const KGraphPtr& a, const KGraphPtr& b);

// Degree helpers.
std::vector<int> deg_join(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> deg_minus_capped(const std::vector<int>& a, const std::vector<int>& b);
bool deg_leq(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace cnp
