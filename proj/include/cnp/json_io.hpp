#pragma once
// JSON wire formats for every value the CLI moves around: monoids,
// k-graphs, bimodules, product systems, representations, and verdict
// reports.  Readers throw ParseError carrying a location string; writers
// produce deterministic key order (ordered_json, sorted containers).

#include <stdexcept>
#include <string>

#include "json.hpp"

#include "cnp/covariance.hpp"
#include "cnp/hilbmod.hpp"
#include "cnp/kgraph.hpp"
#include "cnp/psys.hpp"
#include "cnp/qlo.hpp"

namespace cnp {

using Json = nlohmann::ordered_json;

// Malformed or invalid input, with the file or flag it came from.
struct JsonError : std::runtime_error {
  std::string location;
  JsonError(const std::string& loc, const std::string& msg)
      : std::runtime_error(loc + ": " + msg), location(loc) {}
};

// Parses the file, rethrowing malformed input as JsonError with the
// file name and byte position.
Json load_json_file(const std::string& path);

// Scalars: integer, "p/q" string, or [re, im] with rational components.
GRat scalar_from_json(const Json& j, const std::string& where);
Json scalar_to_json(const GRat& v);

// Matrices: array of rows of scalars; all rows the same width.
Mat mat_from_json(const Json& j, const std::string& where);
Json mat_to_json(const Mat& m);

// Monoids: {"kind":"grid","k":2}, {"kind":"lex"}, or a graph
// {"vertices":[...],"edges":[["a","b"],...]} for the right-angled Artin
// case.  monoid_from_spec also accepts the shorthand "n<k>", "lex", or a
// path to a JSON file.
MonoidPtr monoid_from_json(const Json& j, const std::string& where);
MonoidPtr monoid_from_spec(const std::string& spec);
Json monoid_to_json(const MonoidPtr& m);

// Higher-rank graphs.  Colors are 1-based on the wire, 0-based in
// memory; ranges and sources are vertex names.
KGraphPtr kgraph_from_json(const Json& j, const std::string& where);
Json kgraph_to_json(const KGraphPtr& g);

// Bimodules: {"vertices":[...],"basis":[{"id","source","range"},...]};
// a missing or null range means the basis vector is annihilated by every
// left action.  The two-argument form reuses an existing coefficient
// algebra and reads only the basis.
BimoduleRef bimodule_from_json(const Json& j, const std::string& where);
BimoduleRef bimodule_from_json(const AlgebraPtr& alg, const Json& j,
                               const std::string& where);
Json bimodule_to_json(const BimoduleRef& x);

// Product systems.  Either a builder form
//   {"builder":"lex_counterexample"}
//   {"builder":"trivial","monoid":...}
//   {"builder":"kgraph","graph":<graph or file path>}
//   {"builder":"tensor_power","bimodule":<bimodule or file path>}
// or the explicit generator-fibre form
//   {"monoid":..., "vertices":[...], "fibres":[<basis or file path>,...],
//    "flips":{"i,j":<matrix>}}
// with one fibre per monoid generator and one flip per commuting pair.
SystemPtr system_from_json(const Json& j, const std::string& where);
SystemPtr load_system(const std::string& path);

// Representations: {"dim":n, "maps":{"<fibre>":[<matrix>,...]}} where
// fibre keys are element format strings and each list has one matrix per
// basis vector of that fibre.
Representation rep_from_json(const SystemPtr& sys, const Json& j,
                             const std::string& where);

Json verdict_to_json(const AxiomVerdict& v);
Json report_to_json(const CovarianceReport& r);

// 0 when every verdict passed or was verified up to a horizon, 1 on any
// failure, 3 when a check could not run because its hypotheses do not
// hold.
int report_exit_code(const CovarianceReport& r);

}  // namespace cnp
