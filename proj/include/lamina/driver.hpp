#pragma once
// Experiment drivers: the constructive-density driver (twist a completion
// of a lamination's non-closed part and watch its shear cone approach the
// lamination's shear vector) and the g-vector-cone density scan run by the
// coverage experiments.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "lamina/cluster.hpp"
#include "lamina/cones.hpp"
#include "lamina/lamination.hpp"

namespace lamina {

// One power of the composite twist: the spanning shear vectors of the cone
// of the twisted completion, and the exact squared distance (plus a float
// angle diagnostic) from the lamination's shear vector to that cone.
struct TwistConeRow {
  long long m = 0;
  std::vector<IVec> generators;
  mpq_class dist2;
  double angle = 0.0;
};

struct AllcaseReport {
  bool degenerate = false;  // no closed part: the twist is the identity
  std::vector<long long> b_L;
  std::vector<TwistConeRow> rows;
};

// Constructive-density driver.  `L` is the lamination (a multiset of
// laminates); `eU` are the elementary laminates of the completion arcs U,
// chosen by the caller so that the non-closed part's arcs together with U
// form a tagged triangulation.  For m = 0..m_max the report row carries the
// generators of the shear cone of the m-th composite twist of that
// triangulation: the non-closed part's shear vectors stay fixed (closed
// laminates do not cross them) and only the completion arcs get twisted.
// Each distinct closed laminate l_i of multiplicity n_i acts with exponent
// (N_1...N_t / N_i) * n_i per step, where N_i counts the crossings of l_i
// with all of eU; this makes the twisted completion's shear vectors grow
// along b(L_cl), so the distances in the report shrink toward zero.
inline AllcaseReport allcase_driver(const TaggedTriangulation& TT,
                                    const std::vector<Laminate>& L,
                                    const std::vector<Laminate>& eU,
                                    int m_max) {
  const IdealTriangulation& T = TT.base;
  const int n = TT.n_arcs();
  AllcaseReport rep;

  rep.b_L.assign(n, 0);
  for (const Laminate& l : L) {
    const auto b = shear(TT, l);
    for (int i = 0; i < n; ++i)
      rep.b_L[i] = detail::checked_add(rep.b_L[i], b[i]);
  }

  Decomposition d = decompose(T, L);
  std::vector<IVec> fixed;
  for (const Laminate& l : d.split_open()) fixed.push_back(shear(TT, l));

  // distinct closed laminates with multiplicities
  std::vector<Laminate> closed;
  std::vector<long long> mult;
  {
    std::map<std::string, size_t> pos;
    for (const Laminate& l : d.closed_part) {
      const std::string key = laminate_key(T, l);
      auto it = pos.find(key);
      if (it == pos.end()) {
        pos.emplace(key, closed.size());
        closed.push_back(l);
        mult.push_back(1);
      } else {
        ++mult[it->second];
      }
    }
  }
  const int t = static_cast<int>(closed.size());

  std::vector<long long> exponent(t, 0);
  if (t > 0) {
    std::vector<long long> N(t, 0);
    for (int i = 0; i < t; ++i) {
      for (const Laminate& e : eU)
        N[i] = detail::checked_add(N[i], intersection_count(T, closed[i], e));
      require(N[i] > 0, errc::NotATraversal,
              "a closed laminate crosses no completion arc");
    }
    long long prod = 1;
    for (int i = 0; i < t; ++i) prod = detail::checked_mul(prod, N[i]);
    for (int i = 0; i < t; ++i)
      exponent[i] = detail::checked_mul(prod / N[i], mult[i]);
  } else {
    rep.degenerate = true;
  }

  auto emit = [&](long long m) {
    TwistConeRow row;
    row.m = m;
    row.generators = fixed;
    for (const Laminate& e : eU) {
      Laminate cur = e;
      for (int i = 0; i < t; ++i)
        cur = dehn_twist(T, closed[i], cur,
                         detail::checked_mul(m, exponent[i]));
      row.generators.push_back(shear(TT, cur));
    }
    row.dist2 = cone_distance_sq(make_cone(n, row.generators), rep.b_L);
    bool bzero = true;
    for (long long v : rep.b_L) bzero &= v == 0;
    if (!bzero) {
      double best = std::acos(-1.0);
      for (const auto& g : row.generators) {
        bool gzero = true;
        for (long long v : g) gzero &= v == 0;
        if (!gzero) best = std::min(best, vector_angle(rep.b_L, g));
      }
      row.angle = best;
    }
    rep.rows.push_back(std::move(row));
  };

  if (rep.degenerate) {
    emit(0);
  } else {
    for (long long m = 0; m <= m_max; ++m) emit(m);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// g-vector cone density scan
// ---------------------------------------------------------------------------

// Coverage of the radius-`radius` lattice ball by the cluster cones within
// BFS depth `depth_coverage`, then the exact squared distance from each
// uncovered point to the union of cones as the BFS deepens to `depth_max`
// (a running minimum, with a per-point strict-decrease verdict) and the
// final angle from the point to the nearest cone generator (diagnostic).
struct DensityReport {
  int radius = 0, depth_coverage = 0, depth_max = 0;
  std::vector<RationalCone> cones;  // within depth_coverage, BFS order
  CoverageReport scan;
  std::vector<IVec> uncovered;
  std::vector<std::vector<mpq_class>> dist2;  // [point][d - depth_coverage]
  std::vector<bool> strictly_decreasing;      // per point
  std::vector<double> final_angle;            // per point
};

inline DensityReport density_report(const Quiver& q, int depth_coverage,
                                    int radius, int depth_max) {
  require(depth_max >= depth_coverage && depth_coverage >= 1,
          errc::DimensionMismatch, "density scan needs increasing depths");
  const int n = q.n_mutable;
  DensityReport rep;
  rep.radius = radius;
  rep.depth_coverage = depth_coverage;
  rep.depth_max = depth_max;

  const auto nodes = exchange_bfs(q, depth_max, Engine::tropical);
  std::map<int, std::vector<RationalCone>> by_depth;
  for (const auto& nd : nodes)
    by_depth[nd.depth].push_back(make_cone(n, nd.g));
  for (int d = 0; d <= depth_coverage; ++d)
    for (const auto& c : by_depth[d]) rep.cones.push_back(c);

  rep.scan = coverage_scan(rep.cones, radius);
  for (const auto& row : rep.scan.rows)
    if (row.witness < 0) rep.uncovered.push_back(row.p);

  const size_t u = rep.uncovered.size();
  rep.dist2.assign(u, {});
  rep.strictly_decreasing.assign(u, true);
  std::vector<mpq_class> running(u);
  for (size_t i = 0; i < u; ++i) {
    bool first = true;
    for (const auto& c : rep.cones) {
      const mpq_class d2 = cone_distance_sq(c, rep.uncovered[i]);
      if (first || d2 < running[i]) running[i] = d2;
      first = false;
    }
    rep.dist2[i].push_back(running[i]);
  }
  for (int d = depth_coverage + 1; d <= depth_max; ++d) {
    for (size_t i = 0; i < u; ++i) {
      mpq_class next = running[i];
      for (const auto& c : by_depth[d]) {
        const mpq_class d2 = cone_distance_sq(c, rep.uncovered[i]);
        if (d2 < next) next = d2;
      }
      if (!(next < running[i])) rep.strictly_decreasing[i] = false;
      running[i] = next;
      rep.dist2[i].push_back(next);
    }
  }

  rep.final_angle.assign(u, 0.0);
  for (size_t i = 0; i < u; ++i) {
    double best = std::acos(-1.0);
    for (const auto& [d, cs] : by_depth)
      for (const auto& c : cs)
        for (const auto& g : c.generators)
          best = std::min(best, vector_angle(rep.uncovered[i], g));
    rep.final_angle[i] = best;
  }
  return rep;
}

}  // namespace lamina
