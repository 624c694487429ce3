// cnp: command-line front end for the verification library.  Loads
// monoids, graphs, product systems, and representations from JSON, runs
// the requested checks, and prints deterministic reports.
//
// Exit codes: 0 all checks passed (or verified up to the horizon),
// 1 a check failed, 2 malformed input (with its location), 3 a check
// could not run because its hypotheses do not hold.

#include <cstdio>
#include <iostream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cnp/boundary.hpp"
#include "cnp/json_io.hpp"

using namespace cnp;

namespace {

struct Ctx {
  std::string format = "json";
  int horizon = 3;
  double tolerance = 1e-9;
  int rc = 0;
};

// text rendering: one "key: value" line per top-level entry
void emit(const Ctx& ctx, const Json& j) {
  if (ctx.format == "json") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  if (!j.is_object()) {
    std::cout << j.dump() << "\n";
    return;
  }
  for (const auto& [key, val] : j.items()) {
    if (val.is_string())
      std::cout << key << ": " << val.get<std::string>() << "\n";
    else
      std::cout << key << ": " << val.dump() << "\n";
  }
}

void emit_report(Ctx& ctx, const CovarianceReport& rep) {
  if (ctx.format == "text")
    std::cout << rep.str() << "\n";
  else
    std::cout << report_to_json(rep).dump(2) << "\n";
  ctx.rc = report_exit_code(rep);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "(1,1)" or "1,1" -> {1, 1}
std::vector<int> parse_degree(const std::string& s) {
  std::string body = s;
  if (!body.empty() && body.front() == '(') body = body.substr(1);
  if (!body.empty() && body.back() == ')') body.pop_back();
  std::vector<int> out;
  for (const std::string& tok : split_list(body)) out.push_back(std::stoi(tok));
  if (out.empty()) throw JsonError(s, "cannot read a degree");
  return out;
}

std::vector<Elem> generator_elems(const MonoidPtr& m) {
  if (m->kind() == MonoidKind::Lex)
    return {m->from_vector({0, 1}), m->from_vector({1, 0})};
  std::vector<Elem> out;
  for (int i = 0; i < m->rank(); ++i) out.push_back(m->from_word({i}));
  return out;
}

std::vector<std::string> vertex_names(const AlgebraPtr& alg,
                                      const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int v : idx) out.push_back(alg->vertex(v));
  return out;
}

// inclusion-exclusion family of a foundation set over the trivial system
CompactFamily foundation_family(const SystemPtr& sys, const std::vector<Elem>& F) {
  const MonoidPtr& m = sys->monoid();
  CompactFamily fam;
  fam.entries.emplace_back(m->identity(),
                           ModOp::identity(sys->fiber(m->identity())));
  for (unsigned mask = 1; mask < (1u << F.size()); ++mask) {
    Elem j = m->identity();
    bool finite = true, odd = false;
    for (size_t b = 0; b < F.size(); ++b) {
      if (!(mask & (1u << b))) continue;
      odd = !odd;
      LubResult l = lub(j, F[b]);
      if (!l.finite) {
        finite = false;
        break;
      }
      j = l.value;
    }
    if (!finite) continue;
    BimoduleRef xj = sys->fiber(j);
    ModOp th = rank_one(ModVec::basis(xj, 0), ModVec::basis(xj, 0));
    fam.entries.emplace_back(j, odd ? ModOp::zero(xj) - th : th);
  }
  fam.certificate = Certificate::Foundation;
  return fam;
}

const char* defect_kind(DefectVerdict::Kind k) {
  switch (k) {
    case DefectVerdict::Kind::VanishesForLargeS: return "vanishes-for-large-s";
    case DefectVerdict::Kind::FailsAt: return "fails";
    default: return "inconclusive-at-horizon";
  }
}

Json injectivity_table(const SystemPtr& sys, const std::vector<Elem>& window,
                       bool* all) {
  Json table;
  *all = true;
  for (const Elem& q : window) {
    InjectivityVerdict v = phi_tilde_injective(sys, q);
    if (v.injective) {
      table[format(q)] = true;
    } else {
      Json bad;
      bad["injective"] = false;
      bad["kernel_vertex"] = sys->algebra()->vertex(v.witness_vertex);
      table[format(q)] = std::move(bad);
      *all = false;
    }
  }
  return table;
}

void scenario_counterexample(Ctx& ctx) {
  SystemPtr sys = lex_counterexample();
  const MonoidPtr& m = sys->monoid();
  Elem e = m->identity();
  Elem s01 = m->from_vector({0, 1});
  Elem s10 = m->from_vector({1, 0});
  bool pass = true;

  Json checks;
  bool ideals_zero = ideal_I(sys, e).size() == 2;
  for (const Elem& p : {s01, s10, m->from_vector({1, 1}), m->from_vector({0, 2}),
                        m->from_vector({2, -3})})
    ideals_zero = ideals_zero && ideal_I(sys, p).empty();
  checks["ideals_zero_off_identity"] = ideals_zero;
  pass = pass && ideals_zero;

  bool plain = true;
  for (const Elem& q : {s01, s10, m->from_vector({1, 1}), m->from_vector({0, 2})}) {
    AugmentedFiber xq = augmented_fiber(sys, q);
    plain = plain && xq.parts.size() == 1 && xq.parts[0] == q;
  }
  checks["augmented_fibre_equals_fibre"] = plain;
  pass = pass && plain;

  InjectivityVerdict inj = phi_tilde_injective(sys, s10);
  checks["q"] = format(s10);
  checks["phi_tilde_injective"] = inj.injective;
  if (!inj.injective)
    checks["kernel_vertex"] = sys->algebra()->vertex(inj.witness_vertex);
  pass = pass && !inj.injective && phi_tilde_injective(sys, s01).injective &&
         phi_tilde_injective(sys, e).injective;

  CompactFamily fam;
  fam.entries.emplace_back(e, phi(sys->fiber(e), AlgElem::delta(sys->algebra(), 1)));
  DefectVerdict dv = check_cp_vanishes(sys, fam, {e}, ctx.horizon);
  Json cf;
  cf["kind"] = defect_kind(dv.kind);
  if (!dv.witnesses.empty()) cf["witness_r"] = format(dv.witnesses[0].second);
  cf["hypothesis_violated"] = dv.hypothesis_violated;
  if (dv.bad_q) cf["bad_q"] = format(*dv.bad_q);
  checks["collapse_family"] = std::move(cf);
  pass = pass && dv.kind == DefectVerdict::Kind::VanishesForLargeS &&
         dv.witnesses.size() == 1 && dv.witnesses[0].second == s10;

  Json out;
  out["scenario"] = "counterexample";
  out["monoid"] = monoid_to_json(m);
  out["checks"] = std::move(checks);
  out["pass"] = pass;
  emit(ctx, out);
  ctx.rc = pass ? 0 : 1;
}

void scenario_kgraph(Ctx& ctx, const std::string& file) {
  KGraphPtr g = kgraph_from_json(load_json_file(file), file);
  SystemPtr sys = from_kgraph(g);
  bool pass = true;

  Json checks;
  bool all_inj = false;
  checks["phi_tilde_injective"] =
      injectivity_table(sys, ball(sys->monoid(), ctx.horizon), &all_inj);
  pass = pass && all_inj;

  std::vector<int> bound(size_t(g->k()), 1);
  Json defects;
  std::vector<Elem> qs = generator_elems(sys->monoid());
  qs.insert(qs.begin(), sys->monoid()->identity());
  for (int v = 0; v < g->num_vertices(); ++v) {
    auto sets = min_exhaustive_sets(g, v, bound);
    if (sets.empty()) {
      defects[g->vertices()[size_t(v)]] = "no exhaustive set within the bound";
      pass = false;
      continue;
    }
    CompactFamily fam = ck_family(sys, v, sets[0]);
    DefectVerdict dv = check_cp_vanishes(sys, fam, qs, ctx.horizon);
    Json d;
    Json members = Json::array();
    for (const Path& p : sets[0]) members.push_back(p.str());
    d["family"] = std::move(members);
    d["kind"] = defect_kind(dv.kind);
    d["exact"] = dv.exact;
    defects[g->vertices()[size_t(v)]] = std::move(d);
    pass = pass && dv.kind == DefectVerdict::Kind::VanishesForLargeS && dv.exact;
  }
  checks["ck_defects"] = std::move(defects);

  Json out;
  out["scenario"] = "kgraph";
  out["graph"] = kgraph_to_json(g);
  out["checks"] = std::move(checks);
  out["pass"] = pass;
  emit(ctx, out);
  ctx.rc = pass ? 0 : 1;
}

void scenario_raag(Ctx& ctx, const std::string& file) {
  MonoidPtr m = monoid_from_json(load_json_file(file), file);
  if (m->kind() != MonoidKind::Raag)
    throw JsonError(file, "scenario raag needs a right-angled Artin monoid");
  SystemPtr sys = trivial_system(m);
  bool pass = true;

  Json comps = Json::array();
  std::vector<Elem> qs = ball(m, 2);
  for (const auto& comp : opp_components(m)) {
    std::vector<Elem> F;
    Json members = Json::array();
    for (int i : comp) {
      F.push_back(m->from_word({i}));
      members.push_back(m->generators()[size_t(i)]);
    }
    Json c;
    c["members"] = std::move(members);
    FoundationVerdict fv = is_foundation_set(m, F, std::max(ctx.horizon, 4));
    c["foundation"] = bool(fv);
    c["exact"] = fv.exact;
    if (!fv.certificate.empty()) c["certificate"] = fv.certificate;
    DefectVerdict dv = check_cp_vanishes(sys, foundation_family(sys, F), qs,
                                         std::max(ctx.horizon, 4));
    c["defect"] = defect_kind(dv.kind);
    if (!dv.witnesses.empty()) c["witness_r"] = format(dv.witnesses[0].second);
    comps.push_back(std::move(c));
    pass = pass && bool(fv) && fv.exact &&
           dv.kind == DefectVerdict::Kind::VanishesForLargeS && dv.exact;
  }

  Json out;
  out["scenario"] = "raag";
  out["monoid"] = monoid_to_json(m);
  out["checks"]["components"] = std::move(comps);
  out["pass"] = pass;
  emit(ctx, out);
  ctx.rc = pass ? 0 : 1;
}

void scenario_tensor_power(Ctx& ctx, const std::string& file) {
  BimoduleRef x = bimodule_from_json(load_json_file(file), file);
  SystemPtr sys = tensor_power_system(x);
  KatsuraIdeal ki = katsura_ideal(sys);

  Json checks;
  checks["kernel"] = vertex_names(sys->algebra(), ki.kernel);
  checks["orthogonal"] = vertex_names(sys->algebra(), ki.orthogonal);
  checks["ideal"] = vertex_names(sys->algebra(), ki.ideal);
  bool all_inj = false;
  checks["phi_tilde_injective"] =
      injectivity_table(sys, ball(sys->monoid(), ctx.horizon), &all_inj);

  Json out;
  out["scenario"] = "tensor_power";
  out["bimodule"] = bimodule_to_json(x);
  out["checks"] = std::move(checks);
  out["pass"] = all_inj;
  emit(ctx, out);
  ctx.rc = all_inj ? 0 : 1;
}

void scenario_trivial(Ctx& ctx, const std::string& spec) {
  MonoidPtr m = monoid_from_spec(spec);
  SystemPtr sys = trivial_system(m);
  std::vector<Elem> window = ball(m, ctx.horizon);

  Json checks;
  bool all_inj = false;
  checks["phi_tilde_injective"] = injectivity_table(sys, window, &all_inj);

  // the zero family vanishes identically, so (CP) imposes no condition
  CompactFamily zero;
  zero.entries.emplace_back(m->identity(),
                            ModOp::zero(sys->fiber(m->identity())));
  DefectVerdict dv = check_cp_vanishes(sys, zero, {m->identity()}, ctx.horizon);
  checks["zero_family_defect"] = defect_kind(dv.kind);
  checks["exact"] = dv.exact;

  bool pass = all_inj && dv.kind == DefectVerdict::Kind::VanishesForLargeS &&
              dv.exact;
  Json out;
  out["scenario"] = "trivial";
  out["monoid"] = monoid_to_json(m);
  out["checks"] = std::move(checks);
  out["pass"] = pass;
  emit(ctx, out);
  ctx.rc = pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Ctx ctx;
  CLI::App app{"verification toolkit for product systems over quasi-lattice orders"};
  app.require_subcommand(1);
  app.add_option("--format", ctx.format, "output format")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--horizon", ctx.horizon, "search horizon for windowed checks");
  app.add_option("--tolerance", ctx.tolerance, "tolerance for floating comparisons");

  // ----- qlo -------------------------------------------------------------
  auto* qlo = app.add_subcommand("qlo", "quasi-lattice order computations");
  qlo->require_subcommand(1);
  struct {
    std::string monoid, x, y, set;
  } q;

  auto* qlub = qlo->add_subcommand("lub", "least upper bound of two elements");
  qlub->add_option("--monoid", q.monoid)->required();
  qlub->add_option("--x", q.x)->required();
  qlub->add_option("--y", q.y)->required();
  qlub->callback([&] {
    MonoidPtr m = monoid_from_spec(q.monoid);
    LubResult l = lub(m->parse(q.x), m->parse(q.y));
    Json out;
    out["lub"] = l.finite ? format(l.value) : "infinity";
    emit(ctx, out);
  });

  auto* qdiv = qlo->add_subcommand("divides", "left divisibility");
  qdiv->add_option("--monoid", q.monoid)->required();
  qdiv->add_option("--x", q.x)->required();
  qdiv->add_option("--y", q.y)->required();
  qdiv->callback([&] {
    MonoidPtr m = monoid_from_spec(q.monoid);
    Elem x = m->parse(q.x), y = m->parse(q.y);
    Json out;
    out["divides"] = divides(x, y);
    if (divides(x, y)) out["quotient"] = format(quotient(x, y));
    emit(ctx, out);
  });

  auto* qint = qlo->add_subcommand("interval", "the elements strictly between e and x");
  qint->add_option("--monoid", q.monoid)->required();
  qint->add_option("--x", q.x)->required();
  qint->callback([&] {
    MonoidPtr m = monoid_from_spec(q.monoid);
    Json list = Json::array();
    for (const Elem& t : interval(m->parse(q.x))) list.push_back(format(t));
    Json out;
    out["interval"] = std::move(list);
    emit(ctx, out);
  });

  auto* qfnd = qlo->add_subcommand("foundation", "is the set a foundation set");
  qfnd->add_option("--monoid", q.monoid)->required();
  qfnd->add_option("--set", q.set, "comma-separated elements")->required();
  qfnd->callback([&] {
    MonoidPtr m = monoid_from_spec(q.monoid);
    std::vector<Elem> F;
    for (const std::string& s : split_list(q.set)) F.push_back(m->parse(s));
    FoundationVerdict fv = is_foundation_set(m, F, ctx.horizon);
    Json out;
    out["foundation"] = bool(fv);
    out["exact"] = fv.exact;
    if (!fv.exact) out["horizon"] = fv.horizon;
    if (!fv.certificate.empty()) out["certificate"] = fv.certificate;
    if (fv.counterexample) out["counterexample"] = format(*fv.counterexample);
    emit(ctx, out);
    ctx.rc = bool(fv) ? 0 : 1;
  });

  auto* qcmp = qlo->add_subcommand("components",
                                   "components of the complement graph");
  qcmp->add_option("--monoid", q.monoid)->required();
  qcmp->callback([&] {
    MonoidPtr m = monoid_from_spec(q.monoid);
    Json list = Json::array();
    for (const auto& comp : opp_components(m)) {
      Json c = Json::array();
      for (int i : comp) c.push_back(m->generators()[size_t(i)]);
      list.push_back(std::move(c));
    }
    Json out;
    out["components"] = std::move(list);
    emit(ctx, out);
  });

  // ----- kgraph ----------------------------------------------------------
  auto* kg = app.add_subcommand("kgraph", "higher-rank graph computations");
  kg->require_subcommand(1);
  struct {
    std::string file, mu, nu, degree, le, vertex, set, family, bound;
    bool ck4 = false;
  } kga;

  auto* kmce = kg->add_subcommand("mce", "minimal common extensions");
  kmce->add_option("file", kga.file)->required();
  kmce->add_option("--mu", kga.mu)->required();
  kmce->add_option("--nu", kga.nu)->required();
  kmce->callback([&] {
    KGraphPtr g = kgraph_from_json(load_json_file(kga.file), kga.file);
    Json out = Json::array();
    for (const Path& p : mce(g->parse_path(kga.mu), g->parse_path(kga.nu)))
      out.push_back(p.str());
    std::cout << out.dump() << "\n";
  });

  auto* kpaths = kg->add_subcommand("paths", "paths of a degree, or boundary paths");
  kpaths->add_option("file", kga.file)->required();
  kpaths->add_option("--degree", kga.degree, "exact degree, e.g. (1,1)");
  kpaths->add_option("--le", kga.le, "boundary paths of degree at most this");
  kpaths->callback([&] {
    KGraphPtr g = kgraph_from_json(load_json_file(kga.file), kga.file);
    std::vector<Path> ps;
    if (!kga.degree.empty())
      ps = g->paths_of_degree(parse_degree(kga.degree));
    else if (!kga.le.empty())
      ps = paths_le(g, parse_degree(kga.le));
    else
      throw JsonError("kgraph paths", "need --degree or --le");
    Json out = Json::array();
    for (const Path& p : ps) out.push_back(p.str());
    std::cout << out.dump() << "\n";
  });

  auto* kexh = kg->add_subcommand("exhaustive",
                                  "exhaustive sets at a vertex");
  kexh->add_option("file", kga.file)->required();
  kexh->add_option("--vertex", kga.vertex)->required();
  kexh->add_option("--set", kga.set, "paths to test; omit to enumerate minimal sets");
  kexh->add_option("--bound", kga.bound, "degree bound, default all ones");
  kexh->callback([&] {
    KGraphPtr g = kgraph_from_json(load_json_file(kga.file), kga.file);
    int v = g->vertex_index(kga.vertex);
    if (v < 0) throw JsonError(kga.file, "unknown vertex \"" + kga.vertex + "\"");
    Json out;
    if (!kga.set.empty()) {
      std::vector<Path> F;
      for (const std::string& s : split_list(kga.set))
        F.push_back(g->parse_path(s));
      ExhaustiveVerdict ev = is_exhaustive(g, v, F);
      out["exhaustive"] = ev.exhaustive;
      if (ev.witness) out["witness"] = ev.witness->str();
      ctx.rc = ev.exhaustive ? 0 : 1;
    } else {
      std::vector<int> bound(size_t(g->k()), 1);
      if (!kga.bound.empty()) bound = parse_degree(kga.bound);
      Json sets = Json::array();
      for (const auto& F : min_exhaustive_sets(g, v, bound)) {
        Json one = Json::array();
        for (const Path& p : F) one.push_back(p.str());
        sets.push_back(std::move(one));
      }
      out["minimal_exhaustive_sets"] = std::move(sets);
    }
    emit(ctx, out);
  });

  auto* kck = kg->add_subcommand("ck", "Cuntz-Krieger relations of a matrix family");
  kck->add_option("file", kga.file)->required();
  kck->add_option("--family", kga.family, "JSON with dim, vertices, edges matrices")
      ->required();
  kck->add_flag("--ck4", kga.ck4, "also check the exhaustive-set relation");
  kck->add_option("--bound", kga.bound, "degree bound, default all ones");
  kck->callback([&] {
    KGraphPtr g = kgraph_from_json(load_json_file(kga.file), kga.file);
    Json fj = load_json_file(kga.family);
    if (!fj.contains("dim") || !fj.at("dim").is_number_integer() ||
        !fj.contains("vertices") || !fj.at("vertices").is_array() ||
        !fj.contains("edges") || !fj.at("edges").is_array())
      throw JsonError(kga.family, "need integer dim and matrix lists vertices, edges");
    CKFamily fam;
    fam.graph = g;
    fam.dim = fj.at("dim").get<int>();
    for (const Json& m : fj.at("vertices"))
      fam.vertex_mats.push_back(mat_from_json(m, kga.family));
    for (const Json& m : fj.at("edges"))
      fam.edge_mats.push_back(mat_from_json(m, kga.family));
    std::vector<int> bound(size_t(g->k()), 1);
    if (!kga.bound.empty()) bound = parse_degree(kga.bound);
    CkReport rep = check_ck_family(fam, kga.ck4, bound);
    Json out;
    out["pass"] = rep.pass;
    out["degenerate"] = rep.degenerate;
    out["degree_bound"] = rep.degree_bound;
    Json viol = Json::array();
    for (const CkViolation& v : rep.violations) {
      Json one;
      one["relation"] = v.relation;
      one["witness"] = v.witness;
      viol.push_back(std::move(one));
    }
    out["violations"] = std::move(viol);
    emit(ctx, out);
    ctx.rc = rep.pass ? 0 : 1;
  });

  // ----- psys ------------------------------------------------------------
  auto* ps = app.add_subcommand("psys", "product-system computations");
  ps->require_subcommand(1);
  struct {
    std::string system;
  } psa;

  auto* pinfo = ps->add_subcommand("info", "fibre dimensions over the horizon window");
  pinfo->add_option("--system", psa.system)->required();
  pinfo->callback([&] {
    SystemPtr sys = load_system(psa.system);
    Json fibres;
    for (const Elem& p : ball(sys->monoid(), ctx.horizon))
      fibres[format(p)] = sys->fiber(p)->dim();
    Json out;
    out["name"] = sys->name();
    out["monoid"] = monoid_to_json(sys->monoid());
    out["vertices"] = sys->algebra()->vertices();
    out["fibres"] = std::move(fibres);
    emit(ctx, out);
  });

  auto* pinj = ps->add_subcommand("injectivity",
                                  "injectivity of the augmented left actions");
  pinj->add_option("--system", psa.system)->required();
  pinj->callback([&] {
    SystemPtr sys = load_system(psa.system);
    bool all = false;
    Json table = injectivity_table(sys, ball(sys->monoid(), ctx.horizon), &all);
    Json out;
    out["phi_tilde_injective"] = std::move(table);
    out["all_injective"] = all;
    emit(ctx, out);
    ctx.rc = all ? 0 : 1;
  });

  // ----- rep -------------------------------------------------------------
  auto* rp = app.add_subcommand("rep", "representation checks");
  rp->require_subcommand(1);
  struct {
    std::string system, rep, axioms = "T,N";
  } ra;

  auto* rcheck = rp->add_subcommand("check", "axiom checks for a matrix family");
  rcheck->add_option("--system", ra.system)->required();
  rcheck->add_option("--rep", ra.rep)->required();
  rcheck->add_option("--axioms", ra.axioms, "subset of T,N,CP,F,K (default T,N)");
  rcheck->callback([&] {
    SystemPtr sys = load_system(ra.system);
    Representation rep = rep_from_json(sys, load_json_file(ra.rep), ra.rep);
    CovarianceReport merged;
    for (const std::string& ax : split_list(ra.axioms)) {
      CovarianceReport part;
      if (ax == "T") {
        part = check_T_axioms(rep);
      } else if (ax == "N") {
        part = check_nica(rep);
      } else if (ax == "CP") {
        std::vector<Elem> gens = generator_elems(sys->monoid());
        std::vector<CompactFamily> fams;
        for (int v = 0; v < sys->algebra()->dim(); ++v)
          for (const Elem& g : gens) fams.push_back(fowler_family(sys, v, g));
        std::vector<Elem> qs = gens;
        qs.insert(qs.begin(), sys->monoid()->identity());
        part = check_cp(rep, fams, qs, ctx.horizon);
      } else if (ax == "F") {
        part = check_fowler(rep);
      } else if (ax == "K") {
        part = check_katsura(rep, ctx.horizon);
      } else {
        throw JsonError("--axioms", "unknown axiom \"" + ax + "\"");
      }
      for (auto& [name, v] : part.axioms) merged.axioms[name] = v;
    }
    emit_report(ctx, merged);
  });

  // ----- boundary --------------------------------------------------------
  auto* bd = app.add_subcommand("boundary", "boundary-relation computations");
  bd->require_subcommand(1);
  struct {
    std::string raag, foundation, s, family, relations = "1,2,3,4";
  } ba;

  auto* bdef = bd->add_subcommand("defect", "0/1 boundary defect of a foundation set");
  bdef->add_option("--raag", ba.raag, "monoid spec or graph file")->required();
  bdef->add_option("--foundation", ba.foundation)->required();
  bdef->add_option("--s", ba.s)->required();
  bdef->callback([&] {
    MonoidPtr m = monoid_from_spec(ba.raag);
    std::vector<Elem> F;
    Json members = Json::array();
    for (const std::string& s : split_list(ba.foundation)) {
      F.push_back(m->parse(s));
      members.push_back(format(F.back()));
    }
    BoundaryDefect d = boundary_defect(m, F, m->parse(ba.s));
    Json out;
    out["foundation"] = std::move(members);
    out["s"] = format(m->parse(ba.s));
    out["defect"] = d.value;
    emit(ctx, out);
  });

  auto* bchk = bd->add_subcommand("check", "generator relations of a matrix family");
  bchk->add_option("--family", ba.family,
                   "JSON: monoid + dim + generators, or monoid + window_radius")
      ->required();
  bchk->add_option("--relations", ba.relations, "subset of 1,2,3,4");
  bchk->callback([&] {
    Json fj = load_json_file(ba.family);
    const Json& mj = fj.contains("monoid")
                         ? fj.at("monoid")
                         : throw JsonError(ba.family, "missing field \"monoid\"");
    MonoidPtr m = mj.is_string() ? monoid_from_spec(mj.get<std::string>())
                                 : monoid_from_json(mj, ba.family);
    CovarianceReport rep;
    if (fj.contains("window_radius")) {
      TruncatedToeplitz t =
          truncated_toeplitz(m, ball(m, fj.at("window_radius").get<int>()));
      rep = raag_relations_report(t, ctx.horizon);
    } else {
      if (!fj.contains("dim") || !fj.contains("generators"))
        throw JsonError(ba.family, "need dim and generators, or window_radius");
      std::vector<Mat> gens;
      for (const Json& g : fj.at("generators"))
        gens.push_back(mat_from_json(g, ba.family));
      IsometryFamily fam =
          IsometryFamily::make(m, fj.at("dim").get<int>(), gens);
      rep = raag_relations_report(fam, ctx.horizon);
    }
    CovarianceReport filtered;
    for (const std::string& r : split_list(ba.relations)) {
      std::string key = "R" + r;
      auto it = rep.axioms.find(key);
      if (it == rep.axioms.end())
        throw JsonError("--relations", "unknown relation \"" + r + "\"");
      filtered.axioms[key] = it->second;
    }
    emit_report(ctx, filtered);
  });

  // ----- scenario --------------------------------------------------------
  auto* sc = app.add_subcommand("scenario", "named worked examples");
  sc->require_subcommand(1);
  struct {
    std::string file, monoid;
  } sa;

  sc->add_subcommand("counterexample",
                     "the lexicographic system with a collapsing action")
      ->callback([&] { scenario_counterexample(ctx); });

  auto* skg = sc->add_subcommand("kgraph", "path system of a higher-rank graph");
  skg->add_option("--file", sa.file)->required();
  skg->callback([&] { scenario_kgraph(ctx, sa.file); });

  auto* srg = sc->add_subcommand("raag", "foundation sets of an Artin monoid");
  srg->add_option("--file", sa.file)->required();
  srg->callback([&] { scenario_raag(ctx, sa.file); });

  auto* stp = sc->add_subcommand("tensor_power", "powers of a single bimodule");
  stp->add_option("--file", sa.file)->required();
  stp->callback([&] { scenario_tensor_power(ctx, sa.file); });

  auto* str = sc->add_subcommand("trivial", "one-dimensional fibres, vanishing defects");
  str->add_option("--monoid", sa.monoid)->required();
  str->callback([&] { scenario_trivial(ctx, sa.monoid); });

  // global flags may follow the subcommand, as in "cnp rep check ... --horizon 4"
  std::function<void(CLI::App*)> allow_globals = [&](CLI::App* a) {
    a->fallthrough();
    for (CLI::App* s : a->get_subcommands([](CLI::App*) { return true; }))
      allow_globals(s);
  };
  allow_globals(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const JsonError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cnp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hypothesis violated: " << e.what() << "\n";
    return 3;
  }
  return ctx.rc;
}
