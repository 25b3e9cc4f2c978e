#pragma once
// The built-in example corpus.  Each runner loads its fixture data file,
// recomputes the full pipeline, and diffs every expected value; the report
// lists one check row per comparison.  Expected values in the data files
// carry a "source" string describing how they were obtained.

#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "lamina/json_io.hpp"

namespace lamina {

// Resolved at run time so relocated binaries keep working: the environment
// variable wins, then the configure-time default.
inline std::string fixture_dir() {
  if (const char* env = std::getenv("LAMINA_FIXTURE_DIR")) return env;
#ifdef LAMINA_FIXTURE_DIR
  return LAMINA_FIXTURE_DIR;
#else
  return "fixtures";
#endif
}

inline json load_fixture(const std::string& name) {
  return load_json_file(fixture_dir() + "/" + name + ".json");
}

struct CheckRow {
  std::string name, expected, actual;
  bool pass = false;
};

struct ExampleReport {
  std::string example;
  std::vector<CheckRow> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
  int passed() const {
    int k = 0;
    for (const auto& c : checks) k += c.pass ? 1 : 0;
    return k;
  }
};

namespace detail {

inline void push_check(ExampleReport& r, std::string name,
                       std::string expected, std::string actual) {
  const bool ok = expected == actual;
  r.checks.push_back(
      {std::move(name), std::move(expected), std::move(actual), ok});
}

inline std::vector<long long> ll_vec(const json& j) {
  return j.get<std::vector<long long>>();
}

}  // namespace detail

// -------------------------------------------------------------- digon-ex --
// (also used for annulus-shear: both are plain shear-table fixtures)
inline ExampleReport shear_table_example(const std::string& name) {
  const json f = load_fixture(name);
  ExampleReport rep{name, {}};
  TaggedTriangulation TT = triangulation_from_json(f["surface"]);
  const json& exp = f["expected"];
  detail::push_check(rep, "arc order",
                     join(exp["arcs"].get<std::vector<std::string>>()),
                     join(TT.arc_id));
  size_t entries = 0, entries_ok = 0;
  for (const auto& lj : f["laminates"]) {
    const std::string label = lj["label"].get<std::string>();
    const Laminate l = laminate_from_json(TT.base, lj);
    const std::vector<long long> want = detail::ll_vec(exp["shear"][label]);
    const std::vector<long long> got = shear(TT, l);
    for (size_t i = 0; i < want.size(); ++i) {
      ++entries;
      if (i < got.size() && got[i] == want[i]) ++entries_ok;
    }
    detail::push_check(rep, "shear(" + label + ")", gvector_str(want),
                       gvector_str(got));
  }
  const std::string all = std::to_string(entries);
  detail::push_check(rep, "shear table entries matched", all + "/" + all,
                     std::to_string(entries_ok) + "/" + all);
  return rep;
}

// ------------------------------------------------------ kronecker-cluster --
inline ExampleReport kronecker_cluster_example() {
  const json f = load_fixture("kronecker-cluster");
  ExampleReport rep{"kronecker-cluster", {}};
  const Quiver q = quiver_from_json(f["quiver"]);
  const int n = q.n_mutable;

  std::set<std::string> poly_all, poly_ok, g_all, g_ok;
  for (const auto& br : f["expected"]["branches"]) {
    const std::string label = br["label"].get<std::string>();
    const json& paths = br["paths"];
    const json& clusters = br["clusters"];
    for (size_t ci = 0; ci < paths.size(); ++ci) {
      std::vector<int> path;
      for (const auto& v : paths[ci]) path.push_back(v.get<int>() - 1);
      Seed s = initial_seed(q);
      for (int k : path) s = mutate_seed(s, k);
      const std::vector<GVector> trop = g_vector_tropical(path, q);
      const json& cl = clusters[ci];
      for (int slot = 0; slot < n; ++slot) {
        const std::string where =
            label + " cluster " + std::to_string(ci + 1) + " slot " +
            std::to_string(slot + 1);
        const std::string text = cl["variables"][slot].get<std::string>();
        const LaurentPoly want = parse_laurent(text, n);
        const bool poly_match = want == s.cluster[slot];
        detail::push_check(rep, "variable " + where, want.to_string(),
                           s.cluster[slot].to_string());
        const GVector gw = cl["g"][slot].get<GVector>();
        const GVector gg = g_vector_grading(s.cluster[slot], q);
        std::string actual = gvector_str(gg);
        if (trop[slot] != gg) actual += " [tropical " + gvector_str(trop[slot]) + "]";
        detail::push_check(rep, "g-vector " + where, gvector_str(gw), actual);
        if (text != "x1") {
          poly_all.insert(text);
          if (poly_match) poly_ok.insert(text);
        }
        if (gvector_str(gw) != "(1,0)") {
          g_all.insert(gvector_str(gw));
          if (gg == gw && trop[slot] == gw) g_ok.insert(gvector_str(gw));
        }
      }
    }
  }
  detail::push_check(rep, "distinct non-initial polynomials matched", "6/6",
                     std::to_string(poly_ok.size()) + "/" +
                         std::to_string(poly_all.size()));
  detail::push_check(rep, "distinct non-initial g-vector entries matched",
                     "12/12",
                     std::to_string(2 * g_ok.size()) + "/" +
                         std::to_string(2 * g_all.size()));
  return rep;
}

// -------------------------------------------------------- torus-halfspace --
inline ExampleReport torus_halfspace_example() {
  const json f = load_fixture("torus-halfspace");
  ExampleReport rep{"torus-halfspace", {}};
  TaggedTriangulation TT = triangulation_from_json(f["surface"]);
  const json& exp = f["expected"];
  const Quiver q = quiver_of(TT);

  std::string want_b, got_b;
  for (const auto& row : exp["b_matrix"]) want_b += gvector_str(detail::ll_vec(row));
  for (const auto& row : q.b) got_b += gvector_str(row);
  detail::push_check(rep, "exchange matrix of the triangulation", want_b,
                     got_b);

  const int depth = exp["depth"].get<int>();
  const auto nodes = exchange_bfs(q, depth, Engine::tropical);
  detail::push_check(rep, "clusters within depth " + std::to_string(depth),
                     std::to_string(exp["nodes"].get<long long>()),
                     std::to_string(nodes.size()));

  std::set<long long> sums;
  std::vector<RationalCone> fan;
  for (const auto& nd : nodes) {
    for (const auto& g : nd.g) {
      long long s = 0;
      for (long long x : g) s += x;
      sums.insert(s);
    }
    fan.push_back(make_cone(q.n_mutable, nd.g));
  }
  detail::push_check(rep, "set of g-vector coordinate sums",
                     join(detail::ll_vec(exp["coordinate_sums"])),
                     join(sums));
  const IVec w = detail::ll_vec(exp["halfspace_w"]);
  detail::push_check(rep, "halfspace residual at w=" + gvector_str(w),
                     std::to_string(exp["halfspace_residual"].get<long long>()),
                     std::to_string(halfspace_residual(fan, w)));
  return rep;
}

// ------------------------------------------------------------- dehn-orbit --
inline ExampleReport dehn_orbit_example() {
  const json f = load_fixture("dehn-orbit");
  ExampleReport rep{"dehn-orbit", {}};
  TaggedTriangulation TT = triangulation_from_json(f["surface"]);
  const Laminate core = laminate_from_json(TT.base, f["core"]);
  const Laminate l0 = laminate_from_json(TT.base, f["laminate"]);
  const json& exp = f["expected"];
  for (const auto& row : exp["rows"]) {
    const int m = row[0].get<int>();
    std::vector<long long> want;
    for (size_t i = 1; i < row.size(); ++i) want.push_back(row[i].get<long long>());
    const Laminate lm = dehn_twist(TT.base, core, l0, m);
    detail::push_check(rep, "shear of twist iterate m=" + std::to_string(m),
                       gvector_str(want), gvector_str(shear(TT, lm)));
  }
  const json& st = exp["stabilization"];
  const Stabilization got = twist_stabilization(TT, core, l0, 8);
  const int m_max = st["m_stable_max"].get<int>();
  detail::push_check(rep, "stabilization onset <= " + std::to_string(m_max),
                     "true", got.m_stable <= m_max ? "true" : "false");
  detail::push_check(rep, "stabilization slope",
                     gvector_str(detail::ll_vec(st["slope"])),
                     gvector_str(got.slope));
  return rep;
}

// --------------------------------------------------------------- coverage --
inline ExampleReport coverage_example(int jobs) {
  const json f = load_fixture("coverage");
  ExampleReport rep{"coverage", {}};
  const Quiver q = quiver_from_json(f["quiver"]);
  const int radius = f["radius"].get<int>();
  const int depth = f["depth"].get<int>();
  const json& exp = f["expected"];

  auto fan_at = [&](int d) {
    std::vector<RationalCone> fan;
    for (const auto& nd : exchange_bfs(q, d, Engine::tropical))
      fan.push_back(make_cone(q.n_mutable, nd.g));
    return fan;
  };
  const CoverageReport scan = coverage_scan(fan_at(depth), radius, jobs);
  detail::push_check(rep, "covered points at depth " + std::to_string(depth),
                     std::to_string(exp["covered"].get<long long>()) + "/" +
                         std::to_string(exp["total"].get<long long>()),
                     std::to_string(scan.covered) + "/" +
                         std::to_string(scan.total));
  std::string want_unc, got_unc;
  for (const auto& p : exp["uncovered_points"])
    want_unc += gvector_str(detail::ll_vec(p));
  for (const auto& row : scan.rows)
    if (row.witness < 0) got_unc += gvector_str(row.p);
  detail::push_check(rep, "uncovered points", want_unc, got_unc);

  const CoverageReport scan0 = coverage_scan(fan_at(0), radius, jobs);
  detail::push_check(rep, "covered points at depth 0",
                     std::to_string(exp["depth0_covered"].get<long long>()),
                     std::to_string(scan0.covered));
  detail::push_check(rep, "depth-0 coverage below depth-" +
                              std::to_string(depth) + " coverage",
                     "true", scan0.covered < scan.covered ? "true" : "false");
  return rep;
}

// ------------------------------------------------------------ dispatcher --
inline const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names = {
      "digon-ex",        "annulus-shear", "kronecker-cluster",
      "torus-halfspace", "dehn-orbit",    "coverage"};
  return names;
}

inline ExampleReport run_example(const std::string& name, int jobs = 1) {
  if (name == "digon-ex" || name == "annulus-shear")
    return shear_table_example(name);
  if (name == "kronecker-cluster") return kronecker_cluster_example();
  if (name == "torus-halfspace") return torus_halfspace_example();
  if (name == "dehn-orbit") return dehn_orbit_example();
  if (name == "coverage") return coverage_example(jobs);
  fail(errc::UnknownExample,
       "unknown example \"" + name + "\"; known: " + join(example_names()));
}

// ---------------------------------------------------------------- output --
inline std::string emit_example(const ExampleReport& rep, Format fmt) {
  switch (fmt) {
    case Format::json: {
      ojson j;
      j["example"] = rep.example;
      j["pass"] = rep.pass();
      ojson rows = ojson::array();
      for (const auto& c : rep.checks) {
        ojson r;
        r["name"] = c.name;
        r["expected"] = c.expected;
        r["actual"] = c.actual;
        r["pass"] = c.pass;
        rows.push_back(std::move(r));
      }
      j["checks"] = rows;
      return dump_json(j);
    }
    case Format::csv: {
      std::string out = csv_row({"check", "expected", "actual", "pass"});
      for (const auto& c : rep.checks)
        out += csv_row(
            {c.name, c.expected, c.actual, c.pass ? "true" : "false"});
      return out;
    }
    case Format::text: {
      std::string out = "example " + rep.example + "\n";
      for (const auto& c : rep.checks) {
        out += c.pass ? "[PASS] " : "[FAIL] ";
        out += c.name + ": expected " + c.expected;
        if (!c.pass) out += ", got " + c.actual;
        out += "\n";
      }
      out += (rep.pass() ? "PASS " : "FAIL ") +
             std::to_string(rep.passed()) + "/" +
             std::to_string(rep.checks.size()) + " checks\n";
      return out;
    }
  }
  return {};
}

}  // namespace lamina
