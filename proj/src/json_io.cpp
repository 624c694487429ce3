#include "cnp/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <utility>
#include <vector>

namespace cnp {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
  throw JsonError(where, msg);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    bad(where, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int int_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer())
    bad(where, std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

std::string str_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_string())
    bad(where, std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of strings");
  std::vector<std::string> out;
  for (const Json& v : j) {
    if (!v.is_string()) bad(where, "expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Rat rat_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_number_float()) return Rat::from_double(j.get<double>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    try {
      size_t pos = 0;
      long long num = std::stoll(s, &pos);
      if (pos == s.size()) return Rat(num);
      if (s[pos] == '/') {
        size_t pos2 = 0;
        long long den = std::stoll(s.substr(pos + 1), &pos2);
        if (pos + 1 + pos2 == s.size() && den != 0) return Rat(num, den);
      }
    } catch (const std::exception&) {
    }
    bad(where, "cannot read \"" + s + "\" as a rational (want \"p\" or \"p/q\")");
  }
  bad(where, "expected a rational scalar component");
}

Json rat_to_json(const Rat& r) {
  if (r.den == 1) return Json(r.num);
  return Json(std::to_string(r.num) + "/" + std::to_string(r.den));
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad(path + ":byte " + std::to_string(e.byte), e.what());
  }
}

GRat scalar_from_json(const Json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != 2) bad(where, "complex scalar must be [re, im]");
    return GRat(rat_from_json(j[0], where), rat_from_json(j[1], where));
  }
  return GRat(rat_from_json(j, where));
}

Json scalar_to_json(const GRat& v) {
  if (v.im.num == 0) return rat_to_json(v.re);
  return Json::array({rat_to_json(v.re), rat_to_json(v.im)});
}

Mat mat_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "matrix must be a nonempty array of rows");
  int rows = int(j.size());
  if (!j[0].is_array() || j[0].empty())
    bad(where, "matrix rows must be nonempty arrays");
  int cols = int(j[0].size());
  Mat m = Mat::zero(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Json& row = j[size_t(r)];
    if (!row.is_array() || int(row.size()) != cols)
      bad(where, "matrix rows have unequal widths");
    for (int c = 0; c < cols; ++c)
      m(r, c) = scalar_from_json(row[size_t(c)], where);
  }
  return m;
}

Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

MonoidPtr monoid_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "monoid must be an object");
  std::string kind = j.contains("kind") ? str_field(j, "kind", where) : "raag";
  try {
    if (kind == "grid") {
      int k = int_field(j, "k", where);
      if (k < 1) bad(where, "grid rank must be at least 1");
      return QloMonoid::grid(k);
    }
    if (kind == "lex") return QloMonoid::lex();
    if (kind == "raag") {
      std::vector<std::string> verts =
          string_list(field(j, "vertices", where), where);
      std::vector<std::pair<std::string, std::string>> edges;
      if (j.contains("edges"))
        for (const Json& e : j.at("edges")) {
          if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
            bad(where, "each edge must be a pair of vertex names");
          edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
        }
      return QloMonoid::raag(verts, edges);
    }
  } catch (const JsonError&) {
    throw;
  } catch (const std::exception& e) {
    bad(where, e.what());
  }
  bad(where, "unknown monoid kind \"" + kind + "\"");
}

MonoidPtr monoid_from_spec(const std::string& spec) {
  if (spec == "lex") return QloMonoid::lex();
  if (spec.size() >= 2 && spec[0] == 'n' &&
      spec.find_first_not_of("0123456789", 1) == std::string::npos)
    return QloMonoid::grid(std::stoi(spec.substr(1)));
  return monoid_from_json(load_json_file(spec), spec);
}

Json monoid_to_json(const MonoidPtr& m) {
  Json j;
  switch (m->kind()) {
    case MonoidKind::Grid:
      j["kind"] = "grid";
      j["k"] = m->rank();
      break;
    case MonoidKind::Lex:
      j["kind"] = "lex";
      break;
    case MonoidKind::Raag: {
      j["kind"] = "raag";
      j["vertices"] = m->generators();
      Json edges = Json::array();
      for (int i = 0; i < m->rank(); ++i)
        for (int k = i + 1; k < m->rank(); ++k)
          if (m->commutes(i, k))
            edges.push_back(
                Json::array({m->generators()[i], m->generators()[k]}));
      j["edges"] = std::move(edges);
      break;
    }
  }
  return j;
}

KGraphPtr kgraph_from_json(const Json& j, const std::string& where) {
  int k = int_field(j, "k", where);
  std::vector<std::string> verts = string_list(field(j, "vertices", where), where);
  std::map<std::string, int> vid;
  for (int i = 0; i < int(verts.size()); ++i) vid[verts[size_t(i)]] = i;
  auto vertex = [&](const std::string& name) {
    auto it = vid.find(name);
    if (it == vid.end()) bad(where, "unknown vertex \"" + name + "\"");
    return it->second;
  };

  std::vector<KGraph::Edge> edges;
  for (const Json& e : field(j, "edges", where)) {
    KGraph::Edge ed;
    ed.id = str_field(e, "id", where);
    ed.color = int_field(e, "color", where) - 1;  // 1-based on the wire
    if (ed.color < 0 || ed.color >= k)
      bad(where, "edge \"" + ed.id + "\" color out of range 1.." + std::to_string(k));
    ed.range = vertex(str_field(e, "range", where));
    ed.source = vertex(str_field(e, "source", where));
    edges.push_back(std::move(ed));
  }

  std::vector<KGraph::Square> squares;
  if (j.contains("squares"))
    for (const Json& s : j.at("squares")) {
      std::vector<std::string> l = string_list(field(s, "left", where), where);
      std::vector<std::string> r = string_list(field(s, "right", where), where);
      if (l.size() != 2 || r.size() != 2)
        bad(where, "square sides must list exactly two edge ids");
      squares.push_back({l[0], l[1], r[0], r[1]});
    }

  try {
    return KGraph::make(k, std::move(verts), std::move(edges), std::move(squares));
  } catch (const std::exception& e) {
    bad(where, e.what());
  }
}

Json kgraph_to_json(const KGraphPtr& g) {
  Json j;
  j["k"] = g->k();
  j["vertices"] = g->vertices();
  Json edges = Json::array();
  for (int i = 0; i < g->num_edges(); ++i) {
    const KGraph::Edge& e = g->edge(i);
    Json je;
    je["id"] = e.id;
    je["color"] = e.color + 1;
    je["range"] = g->vertices()[size_t(e.range)];
    je["source"] = g->vertices()[size_t(e.source)];
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  return j;
}

BimoduleRef bimodule_from_json(const Json& j, const std::string& where) {
  AlgebraPtr alg;
  try {
    alg = VertexAlgebra::make(string_list(field(j, "vertices", where), where));
  } catch (const JsonError&) {
    throw;
  } catch (const std::exception& e) {
    bad(where, e.what());
  }
  return bimodule_from_json(alg, j, where);
}

BimoduleRef bimodule_from_json(const AlgebraPtr& alg, const Json& j,
                               const std::string& where) {
  std::vector<std::string> labels;
  std::vector<int> source, range;
  for (const Json& b : field(j, "basis", where)) {
    labels.push_back(str_field(b, "id", where));
    int s = alg->index_of(str_field(b, "source", where));
    if (s < 0) bad(where, "basis vector \"" + labels.back() + "\" has an unknown source");
    source.push_back(s);
    if (!b.contains("range") || b.at("range").is_null()) {
      range.push_back(Bimodule::kNoRange);
    } else {
      int r = alg->index_of(str_field(b, "range", where));
      if (r < 0) bad(where, "basis vector \"" + labels.back() + "\" has an unknown range");
      range.push_back(r);
    }
  }
  try {
    return Bimodule::make(alg, std::move(labels), std::move(source), std::move(range));
  } catch (const std::exception& e) {
    bad(where, e.what());
  }
}

Json bimodule_to_json(const BimoduleRef& x) {
  Json j;
  j["vertices"] = x->algebra()->vertices();
  Json basis = Json::array();
  for (int i = 0; i < x->dim(); ++i) {
    Json b;
    b["id"] = x->label(i);
    b["source"] = x->algebra()->vertex(x->source(i));
    if (x->range(i) == Bimodule::kNoRange)
      b["range"] = nullptr;
    else
      b["range"] = x->algebra()->vertex(x->range(i));
    basis.push_back(std::move(b));
  }
  j["basis"] = std::move(basis);
  return j;
}

namespace {

// nested values may be written inline or as a path to another file
Json resolve(const Json& j, std::string* where) {
  if (j.is_string()) {
    *where = j.get<std::string>();
    return load_json_file(*where);
  }
  return j;
}

}  // namespace

SystemPtr system_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "product system must be an object");
  std::string builder =
      j.contains("builder") ? str_field(j, "builder", where) : "flip";

  try {
    if (builder == "lex_counterexample") return lex_counterexample();
    if (builder == "trivial") {
      const Json& m = field(j, "monoid", where);
      return trivial_system(m.is_string() ? monoid_from_spec(m.get<std::string>())
                                          : monoid_from_json(m, where));
    }
    if (builder == "kgraph") {
      std::string sub = where;
      Json g = resolve(field(j, "graph", where), &sub);
      return from_kgraph(kgraph_from_json(g, sub));
    }
    if (builder == "tensor_power") {
      std::string sub = where;
      Json b = resolve(field(j, "bimodule", where), &sub);
      return tensor_power_system(bimodule_from_json(b, sub));
    }
    if (builder != "flip") bad(where, "unknown builder \"" + builder + "\"");

    const Json& mj = field(j, "monoid", where);
    MonoidPtr m = mj.is_string() ? monoid_from_spec(mj.get<std::string>())
                                 : monoid_from_json(mj, where);
    AlgebraPtr alg =
        VertexAlgebra::make(string_list(field(j, "vertices", where), where));

    const Json& fj = field(j, "fibres", where);
    if (!fj.is_array() || int(fj.size()) != m->rank())
      bad(where, "need exactly one fibre per monoid generator (" +
                     std::to_string(m->rank()) + ")");
    std::vector<BimoduleRef> fibres;
    for (const Json& f : fj) {
      std::string sub = where;
      Json body = resolve(f, &sub);
      fibres.push_back(bimodule_from_json(alg, body, sub));
    }

    std::map<std::pair<int, int>, Mat> flips;
    if (j.contains("flips"))
      for (const auto& [key, val] : j.at("flips").items()) {
        int a = -1, b = -1;
        if (std::sscanf(key.c_str(), "%d,%d", &a, &b) != 2 || a < 0 || b <= a ||
            b >= m->rank())
          bad(where, "flip key \"" + key + "\" must be \"i,j\" with i < j");
        flips[{a, b}] = mat_from_json(val, where + " flip " + key);
      }
    return flip_system(m, std::move(fibres), std::move(flips));
  } catch (const JsonError&) {
    throw;
  } catch (const std::exception& e) {
    bad(where, e.what());
  }
}

SystemPtr load_system(const std::string& path) {
  return system_from_json(load_json_file(path), path);
}

Representation rep_from_json(const SystemPtr& sys, const Json& j,
                             const std::string& where) {
  int dim = int_field(j, "dim", where);
  std::map<std::string, std::vector<Mat>> maps;
  for (const auto& [key, val] : field(j, "maps", where).items()) {
    if (!val.is_array()) bad(where, "maps entries must be arrays of matrices");
    std::vector<Mat> mats;
    int i = 0;
    for (const Json& m : val)
      mats.push_back(mat_from_json(m, where + " " + key + "[" + std::to_string(i++) + "]"));
    maps[key] = std::move(mats);
  }
  try {
    return Representation::make(sys, dim, std::move(maps));
  } catch (const std::exception& e) {
    bad(where, e.what());
  }
}

Json verdict_to_json(const AxiomVerdict& v) {
  Json j;
  switch (v.status) {
    case VerdictStatus::Pass: j["status"] = "pass"; break;
    case VerdictStatus::Fail: j["status"] = "fail"; break;
    case VerdictStatus::NotApplicable: j["status"] = "n/a"; break;
    case VerdictStatus::VerifiedUpToHorizon:
      j["status"] = "verified-up-to-horizon";
      j["horizon"] = v.horizon;
      break;
  }
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (v.degenerate) j["degenerate"] = true;
  return j;
}

Json report_to_json(const CovarianceReport& r) {
  Json axioms;
  for (const auto& [name, v] : r.axioms) axioms[name] = verdict_to_json(v);
  Json j;
  j["axioms"] = std::move(axioms);
  j["all_passed"] = r.all_passed();
  return j;
}

int report_exit_code(const CovarianceReport& r) {
  bool hypothesis = false;
  for (const auto& [name, v] : r.axioms) {
    if (v.status == VerdictStatus::Fail) return 1;
    if (v.status == VerdictStatus::NotApplicable) hypothesis = true;
  }
  return hypothesis ? 3 : 0;
}

}  // namespace cnp
