#include "cnp/qlo.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace cnp {

namespace {

// Letters x, y of a trace commute iff distinct and adjacent in the graph.
// Grid monoids behave as the complete graph.
bool letters_commute(const QloMonoid& m, int x, int y) {
  return x != y && m.commutes(x, y);
}

// Cartier-Foata normal form: insert letters block by block; each letter
// lands in the earliest block after its last dependency, blocks stay
// sorted in generator order.
std::vector<int> foata_normalize(const QloMonoid& m, const std::vector<int>& word) {
  std::vector<std::vector<int>> blocks;
  for (int x : word) {
    int place = 0;  // first admissible block index
    for (int b = int(blocks.size()) - 1; b >= 0; --b) {
      bool dependent = false;
      for (int y : blocks[b])
        if (!letters_commute(m, x, y)) { dependent = true; break; }
      if (dependent) { place = b + 1; break; }
    }
    if (place == int(blocks.size())) blocks.emplace_back();
    auto& blk = blocks[place];
    blk.insert(std::upper_bound(blk.begin(), blk.end(), x), x);
  }
  std::vector<int> out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Remove one front-pullable occurrence of x from w (the first occurrence,
// provided everything before it commutes with x).  Returns false if x is
// absent or blocked.
bool pull_front(const QloMonoid& m, std::vector<int>& w, int x) {
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] == x) {
      w.erase(w.begin() + long(i));
      return true;
    }
    if (!letters_commute(m, w[i], x)) return false;
  }
  return false;
}

bool lex_member(long long mm, long long nn) { return mm > 0 || (mm == 0 && nn >= 0); }

}  // namespace

bool Elem::is_identity() const {
  if (mon->kind() == MonoidKind::Raag) return v.empty();
  for (int c : v)
    if (c != 0) return false;
  return true;
}

bool operator==(const Elem& a, const Elem& b) {
  return a.mon->fingerprint() == b.mon->fingerprint() && a.v == b.v;
}

MonoidPtr QloMonoid::grid(int k) {
  if (k < 1) throw std::domain_error("grid rank must be positive");
  auto m = std::shared_ptr<QloMonoid>(new QloMonoid());
  m->kind_ = MonoidKind::Grid;
  for (int i = 0; i < k; ++i) m->gens_.push_back("g" + std::to_string(i + 1));
  m->fingerprint_ = "grid:" + std::to_string(k);
  return m;
}

MonoidPtr QloMonoid::raag(const std::vector<std::string>& vertices,
                          const std::vector<std::pair<std::string, std::string>>& edges) {
  auto m = std::shared_ptr<QloMonoid>(new QloMonoid());
  m->kind_ = MonoidKind::Raag;
  m->gens_ = vertices;
  std::sort(m->gens_.begin(), m->gens_.end());
  if (std::adjacent_find(m->gens_.begin(), m->gens_.end()) != m->gens_.end())
    throw std::domain_error("duplicate generator label");
  if (m->gens_.empty()) throw std::domain_error("empty generator set");
  int n = int(m->gens_.size());
  m->adj_.assign(n, std::vector<char>(n, 0));
  auto index = [&](const std::string& s) {
    auto it = std::lower_bound(m->gens_.begin(), m->gens_.end(), s);
    if (it == m->gens_.end() || *it != s)
      throw std::domain_error("edge endpoint '" + s + "' is not a vertex");
    return int(it - m->gens_.begin());
  };
  std::ostringstream fp;
  fp << "raag:";
  for (const auto& g : m->gens_) fp << g << ",";
  fp << ";";
  std::set<std::pair<int, int>> es;
  for (const auto& [a, b] : edges) {
    int i = index(a), j = index(b);
    if (i == j) throw std::domain_error("self-loop in commutation graph");
    m->adj_[i][j] = m->adj_[j][i] = 1;
    es.insert({std::min(i, j), std::max(i, j)});
  }
  for (auto [i, j] : es) fp << i << "-" << j << ",";
  m->fingerprint_ = fp.str();
  return m;
}

MonoidPtr QloMonoid::lex() {
  auto m = std::shared_ptr<QloMonoid>(new QloMonoid());
  m->kind_ = MonoidKind::Lex;
  m->fingerprint_ = "lex";
  return m;
}

Elem QloMonoid::identity() const {
  Elem e{shared_from_this(), {}};
  if (kind_ == MonoidKind::Grid) e.v.assign(gens_.size(), 0);
  if (kind_ == MonoidKind::Lex) e.v = {0, 0};
  return e;
}

Elem QloMonoid::from_vector(std::vector<int> coords) const {
  if (kind_ == MonoidKind::Grid) {
    if (int(coords.size()) != rank()) throw std::domain_error("grid coordinate arity");
    for (int c : coords)
      if (c < 0) throw std::domain_error("grid coordinates must be nonnegative");
  } else if (kind_ == MonoidKind::Lex) {
    if (coords.size() != 2 || !lex_member(coords[0], coords[1]))
      throw std::domain_error("not a member of the lex monoid");
  } else {
    throw std::domain_error("from_vector needs a grid or lex monoid");
  }
  return Elem{shared_from_this(), std::move(coords)};
}

Elem QloMonoid::from_word(const std::vector<int>& word) const {
  for (int x : word)
    if (x < 0 || x >= rank()) throw std::domain_error("letter out of range");
  if (kind_ == MonoidKind::Grid) {
    std::vector<int> c(rank(), 0);
    for (int x : word) ++c[x];
    return Elem{shared_from_this(), std::move(c)};
  }
  if (kind_ != MonoidKind::Raag) throw std::domain_error("from_word needs a grid or raag monoid");
  return Elem{shared_from_this(), foata_normalize(*this, word)};
}

Elem QloMonoid::parse(const std::string& s) const {
  if (kind_ == MonoidKind::Grid || kind_ == MonoidKind::Lex) {
    std::string t = s;
    if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    std::vector<int> coords;
    std::istringstream is(t);
    std::string part;
    while (std::getline(is, part, ',')) {
      size_t pos = 0;
      int val;
      try {
        val = std::stoi(part, &pos);
      } catch (const std::exception&) {
        throw ParseError("bad coordinate '" + part + "' in '" + s + "'");
      }
      while (pos < part.size() && std::isspace((unsigned char)part[pos])) ++pos;
      if (pos != part.size()) throw ParseError("bad coordinate '" + part + "' in '" + s + "'");
      coords.push_back(val);
    }
    try {
      return from_vector(std::move(coords));
    } catch (const std::domain_error& e) {
      throw ParseError(std::string(e.what()) + ": '" + s + "'");
    }
  }
  // Raag: greedy longest-match over generator labels; "e" or "" is the
  // identity unless "e" is itself a generator.
  std::vector<int> word;
  if (s == "e") {
    bool e_is_gen = std::find(gens_.begin(), gens_.end(), "e") != gens_.end();
    if (!e_is_gen) return identity();
  }
  size_t pos = 0;
  while (pos < s.size()) {
    int best = -1;
    size_t best_len = 0;
    for (int i = 0; i < rank(); ++i) {
      const auto& g = gens_[i];
      if (g.size() > best_len && s.compare(pos, g.size(), g) == 0) {
        best = i;
        best_len = g.size();
      }
    }
    if (best < 0) throw ParseError("cannot read generator at '" + s.substr(pos) + "'");
    word.push_back(best);
    pos += best_len;
  }
  return from_word(word);
}

void require_same(const Elem& a, const Elem& b) {
  if (a.mon->fingerprint() != b.mon->fingerprint()) throw MixedMonoid();
}

int length(const Elem& p) {
  switch (p.mon->kind()) {
    case MonoidKind::Raag:
      return int(p.v.size());
    case MonoidKind::Grid: {
      int s = 0;
      for (int c : p.v) s += c;
      return s;
    }
    case MonoidKind::Lex:
      return p.v[0] + std::abs(p.v[1]);
  }
  return 0;
}

std::string format(const Elem& p) {
  if (p.mon->kind() == MonoidKind::Raag) {
    if (p.v.empty()) return "e";
    std::string s;
    for (int x : p.v) s += p.mon->generators()[x];
    return s;
  }
  std::string s = "(";
  for (size_t i = 0; i < p.v.size(); ++i) s += std::to_string(p.v[i]) + (i + 1 < p.v.size() ? "," : "");
  return s + ")";
}

std::vector<int> word_of(const Elem& p) {
  if (p.mon->kind() == MonoidKind::Raag) return p.v;
  if (p.mon->kind() == MonoidKind::Grid) {
    std::vector<int> w;
    for (int i = 0; i < int(p.v.size()); ++i) w.insert(w.end(), size_t(p.v[i]), i);
    return w;
  }
  throw std::domain_error("lex elements have no word form");
}

Elem multiply(const Elem& a, const Elem& b) {
  require_same(a, b);
  switch (a.mon->kind()) {
    case MonoidKind::Grid:
    case MonoidKind::Lex: {
      std::vector<int> c(a.v.size());
      for (size_t i = 0; i < c.size(); ++i) c[i] = a.v[i] + b.v[i];
      return Elem{a.mon, std::move(c)};
    }
    case MonoidKind::Raag: {
      std::vector<int> w = a.v;
      w.insert(w.end(), b.v.begin(), b.v.end());
      return a.mon->from_word(w);
    }
  }
  throw std::logic_error("unreachable");
}

bool divides(const Elem& p, const Elem& q) {
  require_same(p, q);
  switch (p.mon->kind()) {
    case MonoidKind::Grid: {
      for (size_t i = 0; i < p.v.size(); ++i)
        if (p.v[i] > q.v[i]) return false;
      return true;
    }
    case MonoidKind::Lex:
      return lex_member((long long)q.v[0] - p.v[0], (long long)q.v[1] - p.v[1]);
    case MonoidKind::Raag: {
      std::vector<int> w = q.v;
      for (int x : p.v)
        if (!pull_front(*p.mon, w, x)) return false;
      return true;
    }
  }
  return false;
}

Elem quotient(const Elem& p, const Elem& q) {
  require_same(p, q);
  switch (p.mon->kind()) {
    case MonoidKind::Grid:
    case MonoidKind::Lex: {
      std::vector<int> c(p.v.size());
      for (size_t i = 0; i < c.size(); ++i) c[i] = q.v[i] - p.v[i];
      if (p.mon->kind() == MonoidKind::Grid) {
        for (int x : c)
          if (x < 0) throw std::domain_error("quotient: p does not divide q");
      } else if (!lex_member(c[0], c[1])) {
        throw std::domain_error("quotient: p does not divide q");
      }
      return Elem{p.mon, std::move(c)};
    }
    case MonoidKind::Raag: {
      std::vector<int> w = q.v;
      for (int x : p.v)
        if (!pull_front(*p.mon, w, x)) throw std::domain_error("quotient: p does not divide q");
      return p.mon->from_word(w);
    }
  }
  throw std::logic_error("unreachable");
}

// Least upper bound by left-divisor completion.  Each appended letter is
// forced (it divides every common upper bound), so the loop either stops
// at the least upper bound or certifies that none exists.
LubResult lub(const Elem& p, const Elem& q) {
  require_same(p, q);
  switch (p.mon->kind()) {
    case MonoidKind::Grid: {
      std::vector<int> c(p.v.size());
      for (size_t i = 0; i < c.size(); ++i) c[i] = std::max(p.v[i], q.v[i]);
      return {true, Elem{p.mon, std::move(c)}};
    }
    case MonoidKind::Lex:
      return {true, divides(p, q) ? q : p};
    case MonoidKind::Raag: {
      const QloMonoid& m = *p.mon;
      std::vector<int> u = p.v;
      int guard = int(p.v.size() + q.v.size()) + 1;
      while (guard-- > 0) {
        std::vector<int> w = u;
        int stuck = -1;
        for (int x : q.v) {
          if (pull_front(m, w, x)) continue;
          stuck = x;
          break;
        }
        if (stuck < 0) return {true, m.from_word(u)};
        // x is absent from the residual w or blocked inside it; blocked
        // either way means no common upper bound exists.
        bool absent = std::find(w.begin(), w.end(), stuck) == w.end();
        if (!absent) return LubResult::infinity();
        for (int y : w)
          if (!letters_commute(m, y, stuck)) return LubResult::infinity();
        u.push_back(stuck);
        u = foata_normalize(m, u);
      }
      throw std::logic_error("lub completion exceeded its termination bound");
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<Elem> divisors(const Elem& p) {
  std::vector<Elem> out;
  switch (p.mon->kind()) {
    case MonoidKind::Grid: {
      std::vector<int> c(p.v.size(), 0);
      while (true) {
        out.push_back(Elem{p.mon, c});
        int i = 0;
        while (i < int(c.size())) {
          if (c[i] < p.v[i]) { ++c[i]; break; }
          c[i] = 0;
          ++i;
        }
        if (i == int(c.size())) break;
      }
      break;
    }
    case MonoidKind::Lex: {
      if (p.v[0] >= 1) throw IntervalInfinite(format(p));
      for (int n = 0; n <= p.v[1]; ++n) out.push_back(Elem{p.mon, {0, n}});
      break;
    }
    case MonoidKind::Raag: {
      // BFS over left divisors; trace divisor sets are finite.
      std::set<std::vector<int>> seen;
      std::vector<std::vector<int>> queue{{}};
      seen.insert(std::vector<int>{});
      size_t head = 0;
      while (head < queue.size()) {
        std::vector<int> d = queue[head++];
        for (int x = 0; x < p.mon->rank(); ++x) {
          std::vector<int> dx = d;
          dx.push_back(x);
          dx = foata_normalize(*p.mon, dx);
          if (seen.count(dx)) continue;
          Elem cand{p.mon, dx};
          if (divides(cand, p)) {
            seen.insert(dx);
            queue.push_back(dx);
          }
        }
      }
      for (auto& w : seen) out.push_back(Elem{p.mon, w});
      break;
    }
  }
  std::sort(out.begin(), out.end(), ElemLess{});
  return out;
}

std::vector<Elem> interval(const Elem& p) {
  std::vector<Elem> d = divisors(p);
  d.erase(std::remove_if(d.begin(), d.end(), [](const Elem& e) { return e.is_identity(); }),
          d.end());
  return d;
}

std::vector<Elem> ball(const MonoidPtr& m, int maxlen) {
  std::vector<Elem> out;
  switch (m->kind()) {
    case MonoidKind::Grid: {
      std::vector<int> c(m->rank(), 0);
      // enumerate the simplex sum <= maxlen
      while (true) {
        int s = 0;
        for (int x : c) s += x;
        if (s <= maxlen) out.push_back(Elem{m, c});
        int i = 0;
        while (i < int(c.size())) {
          if (c[i] < maxlen) { ++c[i]; break; }
          c[i] = 0;
          ++i;
        }
        if (i == int(c.size())) break;
      }
      break;
    }
    case MonoidKind::Lex: {
      for (int mm = 0; mm <= maxlen; ++mm)
        for (int nn = -maxlen; nn <= maxlen; ++nn)
          if (lex_member(mm, nn) && mm + std::abs(nn) <= maxlen)
            out.push_back(Elem{m, {mm, nn}});
      break;
    }
    case MonoidKind::Raag: {
      std::set<std::vector<int>> seen;
      std::vector<std::vector<int>> queue{{}};
      seen.insert(std::vector<int>{});
      size_t head = 0;
      while (head < queue.size()) {
        std::vector<int> w = queue[head++];
        if (int(w.size()) >= maxlen) continue;
        for (int x = 0; x < m->rank(); ++x) {
          std::vector<int> wx = w;
          wx.push_back(x);
          wx = foata_normalize(*m, wx);
          if (seen.insert(wx).second) queue.push_back(wx);
        }
      }
      for (auto& w : seen) out.push_back(Elem{m, w});
      break;
    }
  }
  std::sort(out.begin(), out.end(), ElemLess{});
  return out;
}

std::vector<Elem> cone_window(const Elem& r, int horizon) {
  const MonoidPtr& m = r.mon;
  std::vector<Elem> out;
  switch (m->kind()) {
    case MonoidKind::Grid:
    case MonoidKind::Raag: {
      int budget = horizon - length(r);
      if (budget < 0) return {};
      for (const Elem& t : ball(m, budget)) out.push_back(multiply(r, t));
      if (m->kind() == MonoidKind::Raag) {
        // distinct t can land on the same product; dedupe
        std::sort(out.begin(), out.end(), ElemLess{});
        out.erase(std::unique(out.begin(), out.end()), out.end());
      }
      break;
    }
    case MonoidKind::Lex: {
      for (int mm = r.v[0]; mm <= horizon; ++mm)
        for (int nn = -horizon; nn <= horizon; ++nn) {
          if (mm + std::abs(nn) > horizon) continue;
          Elem s{m, {mm, nn}};
          if (lex_member(mm, nn) && divides(r, s)) out.push_back(s);
        }
      break;
    }
  }
  std::sort(out.begin(), out.end(), ElemLess{});
  return out;
}

std::vector<std::vector<int>> opp_components(const MonoidPtr& m) {
  if (m->kind() != MonoidKind::Raag)
    throw std::domain_error("opp_components needs a Raag monoid");
  int n = m->rank();
  std::vector<int> comp(n, -1);
  int nc = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = nc;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y = 0; y < n; ++y)
        if (comp[y] < 0 && x != y && !m->adjacent(x, y)) {
          comp[y] = nc;
          stack.push_back(y);
        }
    }
    ++nc;
  }
  std::vector<std::vector<int>> out(nc);
  for (int i = 0; i < n; ++i) out[comp[i]].push_back(i);
  std::sort(out.begin(), out.end());
  return out;
}

FoundationVerdict is_foundation_set(const MonoidPtr& m, const std::vector<Elem>& F,
                                    int horizon) {
  FoundationVerdict v;
  v.horizon = horizon;
  if (F.empty()) {
    v.kind = FoundationVerdict::Kind::False;
    v.exact = true;
    v.counterexample = m->identity();
    v.certificate = "empty family";
    return v;
  }
  for (const Elem& p : F)
    if (p.mon->fingerprint() != m->fingerprint()) throw MixedMonoid();
  if (m->kind() == MonoidKind::Grid || m->kind() == MonoidKind::Lex) {
    v.kind = FoundationVerdict::Kind::True;
    v.exact = true;
    v.certificate = "lubs always exist";
    return v;
  }
  // Raag.  A member whose letters all commute with every other generator
  // absorbs everything.
  int n = m->rank();
  std::vector<char> central(n, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !m->adjacent(i, j)) central[i] = 0;
  for (const Elem& p : F) {
    bool all_central = true;
    for (int x : p.v)
      if (!central[x]) { all_central = false; break; }
    if (all_central) {
      v.kind = FoundationVerdict::Kind::True;
      v.exact = true;
      v.certificate = "central member " + format(p);
      return v;
    }
  }
  // A complement-graph component contained in F (as generators) is a
  // foundation set, hence so is F.
  std::set<std::vector<int>> fwords;
  for (const Elem& p : F) fwords.insert(p.v);
  for (const auto& comp : opp_components(m)) {
    bool covered = true;
    for (int x : comp)
      if (!fwords.count(std::vector<int>{x})) { covered = false; break; }
    if (covered) {
      std::string cs;
      for (int x : comp) cs += (cs.empty() ? "" : ",") + m->generators()[x];
      v.kind = FoundationVerdict::Kind::True;
      v.exact = true;
      v.certificate = "complement component {" + cs + "} in F";
      return v;
    }
  }
  // Bounded refutation search; a found q is an exact counterexample.
  for (const Elem& q : ball(m, horizon)) {
    bool absorbed = false;
    for (const Elem& p : F)
      if (lub(p, q).finite) { absorbed = true; break; }
    if (!absorbed) {
      v.kind = FoundationVerdict::Kind::False;
      v.exact = true;
      v.counterexample = q;
      v.certificate = "no member absorbs " + format(q);
      return v;
    }
  }
  v.kind = FoundationVerdict::Kind::TrueUpToHorizon;
  v.exact = false;
  v.certificate = "no counterexample of length <= " + std::to_string(horizon);
  return v;
}

Frontier frontier_for(const Elem& q, const std::vector<Elem>& extras, int horizon) {
  Frontier f;
  f.base = q;
  Elem r = q;
  for (const Elem& x : extras) {
    LubResult l = lub(r, x);
    if (l.finite) r = l.value;
  }
  f.horizon = std::max(horizon, length(r));
  f.witnesses = {r};
  f.window = cone_window(r, f.horizon);
  return f;
}

}  // namespace cnp
