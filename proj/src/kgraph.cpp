#include "cnp/kgraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace cnp {

namespace {

std::vector<int> count_colors(const KGraph& g, const std::vector<int>& seq, int k) {
  std::vector<int> d(k, 0);
  for (int e : seq) d[g.edge(e).color]++;
  return d;
}

}  // namespace

std::string Path::str() const {
  if (edges.empty()) return graph->vertices()[range_v];
  std::string s;
  for (int e : edges) s += graph->edge(e).id;
  return s;
}

bool operator==(const Path& a, const Path& b) {
  require_same_graph(a.graph, b.graph);
  if (a.edges != b.edges) return false;
  if (a.edges.empty()) return a.range_v == b.range_v;
  return true;
}

bool PathLess::operator()(const Path& a, const Path& b) const {
  int ta = int(a.edges.size()), tb = int(b.edges.size());
  if (ta != tb) return ta < tb;
  if (a.deg != b.deg) return a.deg < b.deg;
  if (a.edges != b.edges) return a.edges < b.edges;
  return a.range_v < b.range_v;
}

void require_same_graph(const KGraphPtr& a, const KGraphPtr& b) {
  if (!a || !b || a->fingerprint() != b->fingerprint())
    throw GraphError("paths belong to different graphs");
}

std::vector<int> deg_join(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}
std::vector<int> deg_minus_capped(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i] - b[i], 0);
  return r;
}
bool deg_leq(const std::vector<int>& a, const std::vector<int>& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

KGraphPtr KGraph::make(int k, std::vector<std::string> vertices,
                       std::vector<Edge> edges, std::vector<Square> squares) {
  if (k < 1) throw GraphError("rank must be at least 1");
  if (vertices.empty()) throw GraphError("graph needs at least one vertex");
  auto g = std::shared_ptr<KGraph>(new KGraph());
  g->k_ = k;
  g->verts_ = std::move(vertices);
  {
    std::set<std::string> seen(g->verts_.begin(), g->verts_.end());
    if (seen.size() != g->verts_.size()) throw GraphError("duplicate vertex name");
  }
  g->edges_ = std::move(edges);
  std::set<std::string> eids;
  for (const auto& e : g->edges_) {
    if (!eids.insert(e.id).second) throw GraphError("duplicate edge id: " + e.id);
    if (e.color < 0 || e.color >= k) throw GraphError("edge color out of range: " + e.id);
    if (e.range < 0 || e.range >= g->num_vertices() || e.source < 0 ||
        e.source >= g->num_vertices())
      throw GraphError("edge endpoint out of range: " + e.id);
    if (g->vertex_index(e.id) >= 0)
      throw GraphError("edge id collides with a vertex name: " + e.id);
  }

  for (const auto& sq : squares) {
    int a = g->edge_index(sq.left_first), b = g->edge_index(sq.left_second);
    int f = g->edge_index(sq.right_first), e = g->edge_index(sq.right_second);
    if (a < 0 || b < 0 || f < 0 || e < 0)
      throw GraphError("square names an unknown edge");
    const auto &ea = g->edges_[a], &eb = g->edges_[b], &ef = g->edges_[f],
               &ee = g->edges_[e];
    if (!(ea.color < eb.color))
      throw GraphError("square left pair must be in ascending color order");
    if (ef.color != eb.color || ee.color != ea.color)
      throw GraphError("square right pair must swap the colors");
    if (ea.source != eb.range || ef.source != ee.range)
      throw GraphError("square pair is not composable");
    if (ea.range != ef.range || eb.source != ee.source)
      throw GraphError("square sides have different endpoints");
    if (!g->fwd_.emplace(std::make_pair(a, b), std::make_pair(f, e)).second)
      throw GraphError("duplicate square for pair " + ea.id + "," + eb.id);
    if (!g->bwd_.emplace(std::make_pair(f, e), std::make_pair(a, b)).second)
      throw GraphError("duplicate square for pair " + ef.id + "," + ee.id);
  }

  // factorization property: every composable bicolored pair appears
  for (int a = 0; a < g->num_edges(); ++a)
    for (int b = 0; b < g->num_edges(); ++b) {
      const auto &ea = g->edges_[a], &eb = g->edges_[b];
      if (ea.source != eb.range) continue;
      if (ea.color < eb.color && !g->fwd_.count({a, b}))
        throw GraphError("missing square for composable pair " + ea.id + "," + eb.id);
      if (ea.color > eb.color && !g->bwd_.count({a, b}))
        throw GraphError("missing square for composable pair " + ea.id + "," + eb.id);
    }

  // cube condition: both rewriting routes from (i,j,k) to (k,j,i) agree
  for (int a = 0; a < g->num_edges(); ++a)
    for (int b = 0; b < g->num_edges(); ++b)
      for (int c = 0; c < g->num_edges(); ++c) {
        const auto &ea = g->edges_[a], &eb = g->edges_[b], &ec = g->edges_[c];
        if (!(ea.color < eb.color && eb.color < ec.color)) continue;
        if (ea.source != eb.range || eb.source != ec.range) continue;
        // right first: swap (b,c), (a,.), (.,.)
        auto [c1, b1] = g->fwd_.at({b, c});
        auto [c2, a1] = g->fwd_.at({a, c1});
        auto [b2, a2] = g->fwd_.at({a1, b1});
        // left first
        auto [b1p, a1p] = g->fwd_.at({a, b});
        auto [c1p, a2p] = g->fwd_.at({a1p, c});
        auto [c2p, b2p] = g->fwd_.at({b1p, c1p});
        if (c2 != c2p || b2 != b2p || a2 != a2p)
          throw GraphError("cube condition fails on triple " + ea.id + "," + eb.id +
                           "," + ec.id);
      }

  std::string fp = "kgraph:" + std::to_string(k) + ";";
  for (const auto& v : g->verts_) fp += v + ",";
  fp += "|";
  for (const auto& e : g->edges_)
    fp += e.id + ":" + std::to_string(e.color) + ":" + std::to_string(e.range) + ":" +
          std::to_string(e.source) + ";";
  fp += "|";
  for (const auto& [l, r] : g->fwd_)
    fp += std::to_string(l.first) + "." + std::to_string(l.second) + "=" +
          std::to_string(r.first) + "." + std::to_string(r.second) + ";";
  g->fingerprint_ = fp;
  return g;
}

int KGraph::vertex_index(const std::string& v) const {
  for (int i = 0; i < num_vertices(); ++i)
    if (verts_[i] == v) return i;
  return -1;
}
int KGraph::edge_index(const std::string& id) const {
  for (int i = 0; i < num_edges(); ++i)
    if (edges_[i].id == id) return i;
  return -1;
}

std::pair<int, int> KGraph::square_fwd(int a, int b) const {
  auto it = fwd_.find({a, b});
  if (it == fwd_.end()) throw GraphError("no square for pair");
  return it->second;
}
std::pair<int, int> KGraph::square_bwd(int f, int e) const {
  auto it = bwd_.find({f, e});
  if (it == bwd_.end()) throw GraphError("no square for pair");
  return it->second;
}

std::vector<int> KGraph::normalize(std::vector<int> seq) const {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t t = 0; t + 1 < seq.size(); ++t) {
      if (edges_[seq[t]].color > edges_[seq[t + 1]].color) {
        auto [a, b] = square_bwd(seq[t], seq[t + 1]);
        seq[t] = a;
        seq[t + 1] = b;
        changed = true;
        break;
      }
    }
  }
  return seq;
}

Path KGraph::vertex_path(int v) const {
  if (v < 0 || v >= num_vertices()) throw GraphError("vertex index out of range");
  Path p;
  p.graph = shared_from_this();
  p.range_v = p.source_v = v;
  p.deg.assign(k_, 0);
  return p;
}

Path KGraph::edge_path(int e) const {
  if (e < 0 || e >= num_edges()) throw GraphError("edge index out of range");
  Path p;
  p.graph = shared_from_this();
  p.edges = {e};
  p.range_v = edges_[e].range;
  p.source_v = edges_[e].source;
  p.deg.assign(k_, 0);
  p.deg[edges_[e].color] = 1;
  return p;
}

Path KGraph::path_from_edges(const std::vector<int>& seq) const {
  if (seq.empty()) throw GraphError("empty edge sequence has no endpoints");
  for (int e : seq)
    if (e < 0 || e >= num_edges()) throw GraphError("edge index out of range");
  for (size_t i = 0; i + 1 < seq.size(); ++i)
    if (edges_[seq[i]].source != edges_[seq[i + 1]].range)
      throw GraphError("edge sequence is not composable at position " +
                       std::to_string(i));
  Path p;
  p.graph = shared_from_this();
  p.edges = normalize(seq);
  p.range_v = edges_[p.edges.front()].range;
  p.source_v = edges_[p.edges.back()].source;
  p.deg = count_colors(*this, p.edges, k_);
  return p;
}

Path KGraph::parse_path(const std::string& s) const {
  int v = vertex_index(s);
  if (v >= 0) return vertex_path(v);
  std::vector<int> seq;
  std::function<bool(size_t)> rec = [&](size_t pos) {
    if (pos == s.size()) return true;
    for (int e = 0; e < num_edges(); ++e) {
      const std::string& id = edges_[e].id;
      if (s.compare(pos, id.size(), id) == 0) {
        seq.push_back(e);
        if (rec(pos + id.size())) return true;
        seq.pop_back();
      }
    }
    return false;
  };
  if (s.empty() || !rec(0)) throw GraphError("cannot parse path: " + s);
  return path_from_edges(seq);
}

std::vector<Path> KGraph::paths_of_degree(const std::vector<int>& n) const {
  if (int(n.size()) != k_) throw GraphError("degree vector has wrong rank");
  for (int c : n)
    if (c < 0) throw GraphError("negative degree");
  bool zero = true;
  for (int c : n)
    if (c) zero = false;
  if (zero) {
    std::vector<Path> out;
    for (int v = 0; v < num_vertices(); ++v) out.push_back(vertex_path(v));
    return out;
  }
  {
    std::lock_guard<std::mutex> lk(memo_mu_);
    auto it = memo_.find(n);
    if (it != memo_.end()) {
      std::vector<Path> out;
      for (const auto& seq : it->second) out.push_back(path_from_edges(seq));
      return out;
    }
  }
  std::vector<int> colors;
  for (int c = 0; c < k_; ++c) colors.insert(colors.end(), n[c], c);
  std::vector<std::vector<int>> lists;
  std::vector<int> cur;
  std::function<void()> rec = [&]() {
    if (cur.size() == colors.size()) {
      lists.push_back(cur);
      return;
    }
    int c = colors[cur.size()];
    for (int e = 0; e < num_edges(); ++e) {
      if (edges_[e].color != c) continue;
      if (!cur.empty() && edges_[cur.back()].source != edges_[e].range) continue;
      cur.push_back(e);
      rec();
      cur.pop_back();
    }
  };
  rec();
  {
    std::lock_guard<std::mutex> lk(memo_mu_);
    memo_.emplace(n, lists);
  }
  std::vector<Path> out;
  for (const auto& seq : lists) out.push_back(path_from_edges(seq));
  return out;
}

bool composable(const Path& a, const Path& b) {
  require_same_graph(a.graph, b.graph);
  return a.source_v == b.range_v;
}

Path compose(const Path& a, const Path& b) {
  if (!composable(a, b)) throw GraphError("paths are not composable");
  if (a.is_vertex()) return b;
  if (b.is_vertex()) return a;
  std::vector<int> seq = a.edges;
  seq.insert(seq.end(), b.edges.begin(), b.edges.end());
  return a.graph->path_from_edges(seq);
}

std::optional<std::pair<int, Path>> pull_front(const Path& p, int color) {
  const auto& g = p.graph;
  int t = -1;
  for (size_t i = 0; i < p.edges.size(); ++i)
    if (g->edge(p.edges[i]).color == color) {
      t = int(i);
      break;
    }
  if (t < 0) return std::nullopt;
  std::vector<int> seq = p.edges;
  for (int i = t; i > 0; --i) {
    auto [f, e] = g->square_fwd(seq[i - 1], seq[i]);
    seq[i - 1] = f;
    seq[i] = e;
  }
  int front = seq[0];
  std::vector<int> rest(seq.begin() + 1, seq.end());
  Path r = rest.empty() ? g->vertex_path(g->edge(front).source) : g->path_from_edges(rest);
  return std::make_pair(front, r);
}

std::pair<Path, Path> factorize(const Path& p, const std::vector<int>& m) {
  const auto& g = p.graph;
  if (int(m.size()) != g->k()) throw GraphError("degree vector has wrong rank");
  for (size_t i = 0; i < m.size(); ++i)
    if (m[i] < 0 || m[i] > p.deg[i])
      throw GraphError("no factorization of degree outside [0, d(p)]");
  Path cur = p;
  std::vector<int> prefix;
  for (int c = 0; c < g->k(); ++c)
    for (int j = 0; j < m[c]; ++j) {
      auto pf = pull_front(cur, c);
      prefix.push_back(pf->first);
      cur = pf->second;
    }
  Path pre = prefix.empty() ? g->vertex_path(p.range_v) : g->path_from_edges(prefix);
  return {pre, cur};
}

Path prefix_of_degree(const Path& p, const std::vector<int>& m) {
  return factorize(p, m).first;
}

bool extends(const Path& tau, const Path& mu) {
  require_same_graph(tau.graph, mu.graph);
  if (!deg_leq(mu.deg, tau.deg)) return false;
  return prefix_of_degree(tau, mu.deg) == mu;
}

std::vector<Path> paths_le(const KGraphPtr& g, const std::vector<int>& n) {
  if (int(n.size()) != g->k()) throw GraphError("degree vector has wrong rank");
  // color-i edges received by each vertex
  std::vector<std::vector<char>> emits(g->num_vertices(),
                                       std::vector<char>(g->k(), 0));
  for (int e = 0; e < g->num_edges(); ++e)
    emits[g->edge(e).range][g->edge(e).color] = 1;
  std::vector<Path> out;
  std::vector<int> m(g->k(), 0);
  for (;;) {
    for (const Path& p : g->paths_of_degree(m)) {
      bool keep = true;
      for (int c = 0; c < g->k() && keep; ++c)
        if (m[c] < n[c] && emits[p.source_v][c]) keep = false;
      if (keep) out.push_back(p);
    }
    int c = 0;
    while (c < g->k() && m[c] == n[c]) m[c++] = 0;
    if (c == g->k()) break;
    m[c]++;
  }
  std::sort(out.begin(), out.end(), PathLess{});
  return out;
}

std::vector<Path> mce(const Path& mu, const Path& nu) {
  require_same_graph(mu.graph, nu.graph);
  std::vector<Path> out;
  if (mu.range_v != nu.range_v) return out;
  std::vector<int> top = deg_join(mu.deg, nu.deg);
  for (const Path& lam : mu.graph->paths_of_degree(top))
    if (lam.range_v == mu.range_v && extends(lam, mu) && extends(lam, nu))
      out.push_back(lam);
  return out;
}

std::vector<Path> mce_set(const std::vector<Path>& G) {
  if (G.empty()) throw GraphError("common-extension set of nothing");
  std::vector<int> top = G.front().deg;
  for (const Path& p : G) {
    require_same_graph(G.front().graph, p.graph);
    if (p.range_v != G.front().range_v) return {};
    top = deg_join(top, p.deg);
  }
  std::vector<Path> out;
  for (const Path& lam : G.front().graph->paths_of_degree(top)) {
    if (lam.range_v != G.front().range_v) continue;
    bool all = true;
    for (const Path& p : G)
      if (!extends(lam, p)) {
        all = false;
        break;
      }
    if (all) out.push_back(lam);
  }
  return out;
}

namespace {

struct NuState {
  std::vector<int> delta;                // degree still owed to nu
  std::set<std::vector<int>> residuals;  // edge lists completing mu to a common extension
};

bool all_dead(const std::vector<NuState>& st) {
  for (const auto& s : st)
    if (!s.residuals.empty()) return false;
  return true;
}

std::string encode_state(int vertex, const std::vector<NuState>& st) {
  std::string s = std::to_string(vertex) + "#";
  for (const auto& n : st) {
    for (int d : n.delta) s += std::to_string(d) + ",";
    s += ":";
    for (const auto& r : n.residuals) {
      for (int e : r) s += std::to_string(e) + ".";
      s += "/";
    }
    s += "#";
  }
  return s;
}

}  // namespace

ExhaustiveVerdict is_exhaustive(const KGraphPtr& g, int v, const std::vector<Path>& F) {
  for (const Path& nu : F) {
    require_same_graph(g, nu.graph);
    if (nu.range_v != v) throw GraphError("exhaustive-set member has a different range");
  }
  std::vector<NuState> init;
  for (const Path& nu : F) init.push_back({nu.deg, {nu.edges}});
  if (all_dead(init)) return {false, g->vertex_path(v)};

  // BFS over (source vertex, residual sets); the residual set for nu after
  // reading mu holds every alpha with mu.alpha a minimal common extension
  // of mu and nu, so mu meets nu iff the set is nonempty.  States repeat
  // because deltas and residuals live in boxes below each d(nu).
  std::set<std::string> visited{encode_state(v, init)};
  std::deque<std::tuple<int, std::vector<NuState>, std::vector<int>>> queue;
  queue.push_back({v, init, {}});
  while (!queue.empty()) {
    auto [vert, st, mu_edges] = queue.front();
    queue.pop_front();
    for (int f = 0; f < g->num_edges(); ++f) {
      if (g->edge(f).range != vert) continue;
      int c = g->edge(f).color;
      int nv = g->edge(f).source;
      std::vector<NuState> nst;
      for (const auto& s : st) {
        NuState ns;
        ns.delta = s.delta;
        if (ns.delta[c] > 0) ns.delta[c]--;
        for (const Path& beta : g->paths_of_degree(ns.delta)) {
          if (beta.range_v != nv) continue;
          Path fb = compose(g->edge_path(f), beta);
          Path pref = prefix_of_degree(fb, s.delta);
          if (s.residuals.count(pref.edges)) ns.residuals.insert(beta.edges);
        }
        nst.push_back(std::move(ns));
      }
      std::vector<int> mu2 = mu_edges;
      mu2.push_back(f);
      if (all_dead(nst)) return {false, g->path_from_edges(mu2)};
      std::string key = encode_state(nv, nst);
      if (visited.insert(key).second) queue.push_back({nv, std::move(nst), std::move(mu2)});
    }
  }
  return {true, std::nullopt};
}

ExhaustiveVerdict is_exhaustive_scan(const KGraphPtr& g, int v,
                                     const std::vector<Path>& F,
                                     const std::vector<int>& bound) {
  for (const Path& nu : F) {
    require_same_graph(g, nu.graph);
    if (nu.range_v != v) throw GraphError("exhaustive-set member has a different range");
  }
  std::vector<int> m(g->k(), 0);
  for (;;) {
    for (const Path& mu : g->paths_of_degree(m)) {
      if (mu.range_v != v) continue;
      bool meets = false;
      for (const Path& nu : F)
        if (!mce(mu, nu).empty()) {
          meets = true;
          break;
        }
      if (!meets) return {false, mu};
    }
    int c = 0;
    while (c < g->k() && m[c] == bound[c]) m[c++] = 0;
    if (c == g->k()) break;
    m[c]++;
  }
  return {true, std::nullopt};
}

std::vector<std::vector<Path>> min_exhaustive_sets(const KGraphPtr& g, int v,
                                                   const std::vector<int>& bound,
                                                   int max_candidates) {
  std::vector<Path> cands;
  std::vector<int> m(g->k(), 0);
  for (;;) {
    bool zero = true;
    for (int c : m)
      if (c) zero = false;
    if (!zero)
      for (const Path& p : g->paths_of_degree(m))
        if (p.range_v == v) cands.push_back(p);
    int c = 0;
    while (c < g->k() && m[c] == bound[c]) m[c++] = 0;
    if (c == g->k()) break;
    m[c]++;
  }
  std::sort(cands.begin(), cands.end(), PathLess{});
  if (int(cands.size()) > max_candidates)
    throw GraphError("too many candidate paths for exhaustive-set enumeration: " +
                     std::to_string(cands.size()));
  int n = int(cands.size());
  std::vector<unsigned> masks;
  for (unsigned msk = 1; msk < (1u << n); ++msk) masks.push_back(msk);
  std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    return __builtin_popcount(a) < __builtin_popcount(b);
  });
  std::vector<unsigned> minimal_masks;
  std::vector<std::vector<Path>> out;
  for (unsigned msk : masks) {
    bool super = false;
    for (unsigned mm : minimal_masks)
      if ((msk & mm) == mm) {
        super = true;
        break;
      }
    if (super) continue;
    std::vector<Path> F;
    for (int i = 0; i < n; ++i)
      if (msk & (1u << i)) F.push_back(cands[i]);
    if (is_exhaustive(g, v, F).exhaustive) {
      minimal_masks.push_back(msk);
      out.push_back(F);
    }
  }
  return out;
}

Mat CKFamily::of(const Path& p) const {
  require_same_graph(graph, p.graph);
  if (p.is_vertex()) return vertex_mats.at(p.range_v);
  Mat m = edge_mats.at(p.edges[0]);
  for (size_t i = 1; i < p.edges.size(); ++i) m = m * edge_mats.at(p.edges[i]);
  return m;
}

CkReport check_ck_family(const CKFamily& fam, bool include_ck4,
                         const std::vector<int>& degree_bound) {
  const auto& g = fam.graph;
  if (int(fam.vertex_mats.size()) != g->num_vertices() ||
      int(fam.edge_mats.size()) != g->num_edges())
    throw ShapeError("family must cover every vertex and edge");
  for (const Mat& m : fam.vertex_mats)
    if (m.rows() != fam.dim || m.cols() != fam.dim)
      throw ShapeError("family dimension mismatch");
  for (const Mat& m : fam.edge_mats)
    if (m.rows() != fam.dim || m.cols() != fam.dim)
      throw ShapeError("family dimension mismatch");

  CkReport rep;
  rep.degree_bound = degree_bound;

  // CK1: mutually orthogonal projections
  Mat sum = Mat::zero(fam.dim, fam.dim);
  for (int v = 0; v < g->num_vertices(); ++v) {
    const Mat& p = fam.vertex_mats[v];
    if (p.adjoint() != p || p * p != p)
      rep.violations.push_back({"CK1", g->vertices()[v] + " is not a projection"});
    for (int w = v + 1; w < g->num_vertices(); ++w)
      if (!(p * fam.vertex_mats[w]).is_zero())
        rep.violations.push_back(
            {"CK1", g->vertices()[v] + "," + g->vertices()[w] + " not orthogonal"});
    sum += p;
  }
  rep.degenerate = sum.is_zero();

  // collect paths up to the bound
  std::vector<Path> all;
  std::vector<int> m(g->k(), 0);
  for (;;) {
    auto ps = g->paths_of_degree(m);
    all.insert(all.end(), ps.begin(), ps.end());
    int c = 0;
    while (c < g->k() && m[c] == degree_bound[c]) m[c++] = 0;
    if (c == g->k()) break;
    m[c]++;
  }

  // CK2 over composable pairs whose product stays within the bound
  for (const Path& mu : all)
    for (const Path& nu : all) {
      if (mu.source_v != nu.range_v) continue;
      std::vector<int> d(g->k());
      bool ok = true;
      for (int c = 0; c < g->k(); ++c) {
        d[c] = mu.deg[c] + nu.deg[c];
        if (d[c] > degree_bound[c]) ok = false;
      }
      if (!ok) continue;
      if (fam.of(mu) * fam.of(nu) != fam.of(compose(mu, nu)))
        rep.violations.push_back({"CK2", mu.str() + " . " + nu.str()});
    }

  // CK3: s*_mu s_nu = sum over minimal common extensions
  for (const Path& mu : all)
    for (const Path& nu : all) {
      Mat lhs = fam.of(mu).adjoint() * fam.of(nu);
      Mat rhs = Mat::zero(fam.dim, fam.dim);
      for (const Path& lam : mce(mu, nu)) {
        Path mup = factorize(lam, mu.deg).second;
        Path nup = factorize(lam, nu.deg).second;
        rhs += fam.of(mup) * fam.of(nup).adjoint();
      }
      if (lhs != rhs)
        rep.violations.push_back({"CK3", mu.str() + " , " + nu.str()});
    }

  // CK4 over minimal exhaustive sets within the bound
  if (include_ck4) {
    for (int v = 0; v < g->num_vertices(); ++v) {
      for (const auto& F : min_exhaustive_sets(g, v, degree_bound)) {
        Mat prod = Mat::identity(fam.dim);
        for (const Path& lam : F) {
          Mat s = fam.of(lam);
          prod = prod * (fam.vertex_mats[v] - s * s.adjoint());
        }
        if (!prod.is_zero()) {
          std::string w = g->vertices()[v] + " F={";
          for (const Path& lam : F) w += lam.str() + " ";
          rep.violations.push_back({"CK4", w + "}"});
        }
      }
    }
  }

  rep.pass = rep.violations.empty();
  return rep;
}

}  // namespace cnp
