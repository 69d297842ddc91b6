#include "losscape/cli/report.h"

#include <chrono>

#include "losscape/cubical.h"
#include "losscape/distributions.h"
#include "losscape/homology.h"
#include "losscape/implicants.h"

namespace losscape::cli {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double MillisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json Cubes(const Formula& f, const PrimeImplicantSet& pis) {
  json out = json::array();
  for (const auto& pa : pis.items) out.push_back(cube_of(pa, f.n()).to_string());
  return out;
}

// Partial-assignment form: '0', '1', '-' per variable.
json Assignments(const Formula& f, const PrimeImplicantSet& pis) {
  json out = json::array();
  for (const auto& pa : pis.items) out.push_back(pa.to_string(f.n()));
  return out;
}

json Literals(const Formula& f, const PrimeImplicantSet& pis) {
  json out = json::array();
  for (const auto& pa : pis.items) out.push_back(literal_string(f, pa));
  return out;
}

}  // namespace

std::string literal_string(const Formula& f, const PartialAssignment& pa) {
  std::string out;
  for (int i = 0; i < f.n(); ++i) {
    if (!pa.assigns(i)) continue;
    if (!out.empty()) out += " & ";
    if (!pa.value(i)) out += '!';
    out += f.vars()[static_cast<std::size_t>(i)];
  }
  return out.empty() ? "1" : out;
}

json analysis_report(const Formula& f, const AnalyzeOptions& opts,
                     double parse_ms) {
  json elapsed;
  elapsed["parse"] = parse_ms;
  json r;
  r["schema"] = kSchemaVersion;
  r["formula"] = f.to_string();
  r["vars"] = f.vars();
  r["n"] = f.n();

  auto t = Clock::now();
  const TruthTable table(f, opts.limits);
  r["num_possible_worlds"] = table.count();
  elapsed["truth_table"] = MillisSince(t);
  if (table.count() == 0) throw Unsatisfiable("formula has no possible worlds");

  t = Clock::now();
  const PrimeImplicantSet pis = prime_implicants(f, table, opts.limits);
  elapsed["prime_implicants"] = MillisSince(t);
  r["prime_implicants"] = Cubes(f, pis);
  r["prime_implicant_terms"] = Literals(f, pis);
  r["prime_implicant_assignments"] = Assignments(f, pis);

  t = Clock::now();
  PrimeImplicantSet cover;
  cover.n = pis.n;
  for (std::size_t i : minimal_cover_indices(pis, table)) cover.items.push_back(pis.items[i]);
  elapsed["minimal_cover"] = MillisSince(t);
  r["minimal_cover"] = Cubes(f, cover);
  r["minimal_cover_terms"] = Literals(f, cover);

  t = Clock::now();
  const CubicalSet cs = cubical_set(pis);
  const auto witness = find_convexity_witness(cs);
  r["is_convex"] = !witness.has_value();
  if (witness) {
    r["convexity_witness"] = {{"a", witness->a},
                              {"b", witness->b},
                              {"lambda", witness->lambda},
                              {"mix", witness->mix}};
  } else {
    r["convexity_witness"] = nullptr;
  }
  elapsed["convexity"] = MillisSince(t);

  t = Clock::now();
  const ImplicantGraph g = implicant_graph(f, pis, opts.limits);
  const auto comps = connected_components(g);
  json members = json::array();
  for (const auto& comp : comps) {
    json worlds = json::array();
    for (std::size_t v : comp) worlds.push_back(f.world_string(g.vertices[v]));
    members.push_back(std::move(worlds));
  }
  r["implicant_graph"] = {{"vertices", g.vertices.size()}, {"edges", g.edges.size()}};
  r["connected_components"] = {{"count", comps.size()}, {"members", members}};
  elapsed["components"] = MillisSince(t);

  if (!opts.skip_homology) {
    t = Clock::now();
    HomologyOptions ho;
    ho.verify_smith = opts.verify_smith;
    const HomologyResult h = homology(cs, ho, opts.limits);
    r["betti"] = h.betti;
    r["torsion"] = h.torsion;
    r["cube_counts"] = h.cube_counts;
    elapsed["homology"] = MillisSince(t);
  }

  t = Clock::now();
  const std::size_t min_components = cover.items.size();
  const std::size_t upper = static_cast<std::size_t>(table.count());
  const std::size_t slots = static_cast<std::size_t>(f.n()) + 1;
  r["mixture_bounds"] = {{"min_components", min_components},
                         {"upper", upper},
                         {"simplex_lower", (upper + slots - 1) / slots}};
  elapsed["mixture_bounds"] = MillisSince(t);
  r["elapsed_ms"] = elapsed;
  return r;
}

json experiment_report_json(const ExperimentReport& report) {
  const RunConfig& c = report.config;
  json j;
  j["schema"] = kSchemaVersion;
  j["formula"] = report.formula;
  j["vars"] = report.vars;
  j["seed"] = c.seed;
  j["config"] = {{"loss", c.loss.name()},
                 {"alpha", c.loss.alpha},
                 {"entropy_variant", to_string(c.loss.variant)},
                 {"lr", c.lr},
                 {"iters", c.iters},
                 {"runs", c.num_runs},
                 {"impossible_mass", c.init.impossible_mass},
                 {"possible_distance", kPossibleDistance},
                 {"near_vertex_threshold", kNearVertex}};
  if (c.loss.kind == LossKind::kFuzzy) {
    j["config"]["logic"] = to_string(c.loss.logic);
    j["config"]["form"] = to_string(c.loss.form);
  }
  j["models"] = json::array();
  for (const auto& mr : report.models) {
    const ModelSummary& s = mr.summary;
    int halvings = 0, stalled = 0;
    for (const auto& r : mr.runs) {
      halvings += r.halvings;
      stalled += r.stalled ? 1 : 0;
    }
    j["models"].push_back({{"model", s.model.name()},
                           {"runs", s.runs},
                           {"failures", s.failures},
                           {"fraction_possible", s.fraction_possible},
                           {"fraction_impossible_mass_below",
                            s.fraction_impossible_below},
                           {"near_vertex_fraction", s.near_vertex_fraction},
                           {"mean_impossible_mass", s.mean_impossible_mass},
                           {"endpoint_counts", s.facet_counts},
                           {"guard_halvings", halvings},
                           {"stalled_runs", stalled}});
  }
  return j;
}

json error_json(const std::exception& e) {
  json j;
  if (const auto* se = dynamic_cast<const SyntaxError*>(&e)) {
    j["error"] = se->kind();
    j["offset"] = se->offset();
    j["expected"] = se->expected();
  } else if (const auto* le = dynamic_cast<const Error*>(&e)) {
    j["error"] = le->kind();
  } else {
    j["error"] = "InternalError";
  }
  j["message"] = e.what();
  return j;
}

}  // namespace losscape::cli
