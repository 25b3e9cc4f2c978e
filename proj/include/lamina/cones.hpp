#pragma once
// Exact rational polyhedral cones: membership, lattice-ball coverage,
// half-space residuals, exact point-to-cone distances, and the pairwise
// common-face check.  All verdicts use exact rational arithmetic; floating
// point appears only in the angle diagnostic, which never decides anything.

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "lamina/common.hpp"

namespace lamina {

using IVec = std::vector<long long>;
using QVec = std::vector<mpq_class>;

// A finitely generated cone over the rationals: all nonnegative rational
// combinations of the generators.  Generators are deduplicated and zero
// vectors removed on construction.
struct RationalCone {
  int dim = 0;
  std::vector<IVec> generators;
};

inline RationalCone make_cone(int dim, std::vector<IVec> gens) {
  require(dim >= 1, errc::DimensionMismatch, "cone dimension must be >= 1");
  RationalCone c;
  c.dim = dim;
  for (auto& g : gens) {
    require(static_cast<int>(g.size()) == dim, errc::DimensionMismatch,
            "generator length differs from the cone dimension");
    if (std::all_of(g.begin(), g.end(), [](long long x) { return x == 0; }))
      continue;
    if (std::find(c.generators.begin(), c.generators.end(), g) ==
        c.generators.end())
      c.generators.push_back(std::move(g));
  }
  return c;
}

namespace detail {

// gmpxx has no long long overloads; long is 64-bit on every platform this
// library targets.
static_assert(sizeof(long) == sizeof(long long),
              "exact arithmetic needs 64-bit long");
inline mpz_class z_of(long long x) { return mpz_class(static_cast<long>(x)); }
inline mpq_class q_of(long long x) { return mpq_class(static_cast<long>(x)); }

// Feasibility of { x >= 0 : sum_j x_j * col_j = b } over exact rationals:
// Gaussian elimination to parametrize the solution space, then
// Fourier-Motzkin elimination of the free parameters.
inline bool nonneg_combination(const std::vector<QVec>& cols, const QVec& b) {
  const int k = static_cast<int>(cols.size());
  const int n = static_cast<int>(b.size());
  if (k == 0)
    return std::all_of(b.begin(), b.end(),
                       [](const mpq_class& q) { return q == 0; });

  std::vector<QVec> M(n, QVec(k + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) M[i][j] = cols[j][i];
    M[i][k] = b[i];
  }

  std::vector<int> pivcol;
  int rank = 0;
  for (int c = 0; c < k && rank < n; ++c) {
    int pr = -1;
    for (int r = rank; r < n; ++r)
      if (M[r][c] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(M[rank], M[pr]);
    const mpq_class inv = mpq_class(1) / M[rank][c];
    for (int j = c; j <= k; ++j) M[rank][j] *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == rank || M[r][c] == 0) continue;
      const mpq_class f = M[r][c];
      for (int j = c; j <= k; ++j) M[r][j] -= f * M[rank][j];
    }
    pivcol.push_back(c);
    ++rank;
  }
  for (int r = rank; r < n; ++r)
    if (M[r][k] != 0) return false;  // inconsistent system

  std::vector<bool> is_pivot(k, false);
  for (int c : pivcol) is_pivot[c] = true;
  std::vector<int> freecol;
  for (int c = 0; c < k; ++c)
    if (!is_pivot[c]) freecol.push_back(c);
  const int m = static_cast<int>(freecol.size());

  // Inequalities "const + coefs . t >= 0" over the free parameters t.
  struct Ineq {
    mpq_class c;
    QVec a;
  };
  std::vector<Ineq> sys;
  for (int j = 0; j < m; ++j) {  // t_j >= 0
    Ineq q{0, QVec(m, 0)};
    q.a[j] = 1;
    sys.push_back(std::move(q));
  }
  for (int r = 0; r < rank; ++r) {  // pivot variables >= 0
    Ineq q{M[r][k], QVec(m, 0)};
    for (int j = 0; j < m; ++j) q.a[j] = -M[r][freecol[j]];
    sys.push_back(std::move(q));
  }

  for (int v = 0; v < m; ++v) {
    std::vector<Ineq> pos, neg, nxt;
    for (auto& q : sys) {
      if (q.a[v] > 0)
        pos.push_back(std::move(q));
      else if (q.a[v] < 0)
        neg.push_back(std::move(q));
      else
        nxt.push_back(std::move(q));
    }
    for (const auto& p : pos)
      for (const auto& g : neg) {
        Ineq q{p.c * (-g.a[v]) + g.c * p.a[v], QVec(m, 0)};
        for (int j = v + 1; j < m; ++j)
          q.a[j] = p.a[j] * (-g.a[v]) + g.a[j] * p.a[v];
        nxt.push_back(std::move(q));
      }
    sys = std::move(nxt);
  }
  return std::all_of(sys.begin(), sys.end(),
                     [](const Ineq& q) { return q.c >= 0; });
}

inline QVec to_q(const IVec& v) {
  QVec q(v.size());
  for (size_t i = 0; i < v.size(); ++i) q[i] = q_of(v[i]);
  return q;
}

inline bool cone_contains_q(const RationalCone& C, const QVec& v) {
  std::vector<QVec> cols;
  for (const auto& g : C.generators) cols.push_back(to_q(g));
  return nonneg_combination(cols, v);
}

}  // namespace detail

// True iff v is a nonnegative rational combination of the generators.
inline bool cone_contains(const RationalCone& C, const IVec& v) {
  require(static_cast<int>(v.size()) == C.dim, errc::DimensionMismatch,
          "point length differs from the cone dimension");
  return detail::cone_contains_q(C, detail::to_q(v));
}

// Exact squared Euclidean distance from the integer point v to the cone.
// The nearest point of a convex cone lies on a face, and equals the
// orthogonal projection of v onto that face's linear span; the span of any
// face is spanned by at most dim independent generators, so projecting onto
// the span of every independent generator subset and keeping the
// projections that land inside the cone finds the minimum exactly.
inline mpq_class cone_distance_sq(const RationalCone& C, const IVec& v) {
  require(static_cast<int>(v.size()) == C.dim, errc::DimensionMismatch,
          "point length differs from the cone dimension");
  using namespace detail;
  const int n = C.dim;
  const int k = static_cast<int>(C.generators.size());
  const QVec vq = to_q(v);

  auto norm2 = [&](const QVec& x) {
    mpq_class s = 0;
    for (const auto& e : x) s += e * e;
    return s;
  };
  mpq_class best = norm2(vq);  // S = {} : projection onto {0}

  auto rank_of = [&](const std::vector<int>& idx) {
    std::vector<QVec> rows;
    for (int j : idx) rows.push_back(to_q(C.generators[j]));
    int r = 0;
    for (int c = 0; c < n && r < static_cast<int>(rows.size()); ++c) {
      int pr = -1;
      for (int i = r; i < static_cast<int>(rows.size()); ++i)
        if (rows[i][c] != 0) {
          pr = i;
          break;
        }
      if (pr < 0) continue;
      std::swap(rows[r], rows[pr]);
      for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        if (i == r || rows[i][c] == 0) continue;
        const mpq_class f = rows[i][c] / rows[r][c];
        for (int j = c; j < n; ++j) rows[i][j] -= f * rows[r][j];
      }
      ++r;
    }
    return r;
  };

  std::vector<int> subset;
  auto consider = [&]() {
    const int s = static_cast<int>(subset.size());
    if (s == 0) return;
    if (rank_of(subset) != s) return;  // dependent: span already covered
    // Solve the normal equations  Gram * alpha = G^T v  (s x s).
    std::vector<QVec> A(s, QVec(s + 1));
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        mpq_class d = 0;
        for (int t = 0; t < n; ++t)
          d += q_of(C.generators[subset[i]][t]) *
               q_of(C.generators[subset[j]][t]);
        A[i][j] = d;
      }
      mpq_class d = 0;
      for (int t = 0; t < n; ++t)
        d += q_of(C.generators[subset[i]][t]) * vq[t];
      A[i][s] = d;
    }
    for (int c = 0; c < s; ++c) {
      int pr = -1;
      for (int r = c; r < s; ++r)
        if (A[r][c] != 0) {
          pr = r;
          break;
        }
      if (pr < 0) return;  // Gram singular: cannot happen for independent S
      std::swap(A[c], A[pr]);
      const mpq_class inv = mpq_class(1) / A[c][c];
      for (int j = c; j <= s; ++j) A[c][j] *= inv;
      for (int r = 0; r < s; ++r) {
        if (r == c || A[r][c] == 0) continue;
        const mpq_class f = A[r][c];
        for (int j = c; j <= s; ++j) A[r][j] -= f * A[c][j];
      }
    }
    QVec p(n, 0);
    for (int i = 0; i < s; ++i)
      for (int t = 0; t < n; ++t)
        p[t] += A[i][s] * q_of(C.generators[subset[i]][t]);
    if (!cone_contains_q(C, p)) return;
    QVec diff(n);
    for (int t = 0; t < n; ++t) diff[t] = vq[t] - p[t];
    const mpq_class d2 = norm2(diff);
    if (d2 < best) best = d2;
  };

  // Enumerate independent subsets of size 1..n (n <= 3 at desk scale).
  std::vector<int> stack;
  auto rec = [&](auto&& self, int from) -> void {
    if (static_cast<int>(subset.size()) >= std::min(n, 3)) return;
    for (int j = from; j < k; ++j) {
      subset.push_back(j);
      consider();
      self(self, j + 1);
      subset.pop_back();
    }
  };
  rec(rec, 0);
  best.canonicalize();
  return best;
}

// Fraction of integer points with max-norm <= R lying in at least one cone.
// Empty cone list: 0 by convention (no cone contains anything, not even the
// origin, when there is nothing to contain it).
inline mpq_class coverage_fraction(const std::vector<RationalCone>& cones,
                                   int R) {
  if (cones.empty()) return 0;
  const int n = cones[0].dim;
  for (const auto& c : cones)
    require(c.dim == n, errc::DimensionMismatch,
            "coverage needs a common cone dimension");
  require(n <= 3 && R <= 8 && R >= 0, errc::UnsupportedDimension,
          "coverage is desk-scale: dimension <= 3, radius <= 8");
  long long covered = 0, total = 0;
  IVec p(n, -R);
  for (;;) {
    ++total;
    for (const auto& c : cones)
      if (cone_contains(c, p)) {
        ++covered;
        break;
      }
    int i = 0;
    while (i < n && p[i] == R) p[i++] = -R;
    if (i == n) break;
    ++p[i];
  }
  mpq_class f(detail::z_of(covered), detail::z_of(total));
  f.canonicalize();
  return f;
}

// One row per lattice point of the max-norm ball: the first containing cone
// (by list index), or -1 together with the exact squared distance to the
// nearest cone.
struct CoveragePoint {
  IVec p;
  int witness = -1;
  mpq_class dist2 = 0;
};

struct CoverageReport {
  int radius = 0;
  long long covered = 0, total = 0;
  std::vector<CoveragePoint> rows;  // lexicographic point order
};

namespace detail {

// Membership/distance verdict for one lattice point against every cone.
inline CoveragePoint scan_point(const std::vector<RationalCone>& cones,
                                const IVec& p) {
  CoveragePoint row;
  row.p = p;
  for (size_t ci = 0; ci < cones.size(); ++ci)
    if (cone_contains(cones[ci], row.p)) {
      row.witness = static_cast<int>(ci);
      break;
    }
  if (row.witness < 0) {
    bool first = true;
    for (const auto& c : cones) {
      const mpq_class d2 = cone_distance_sq(c, row.p);
      if (first || d2 < row.dist2) row.dist2 = d2;
      first = false;
    }
  }
  return row;
}

// Lexicographic enumeration of the radius-R lattice ball (sup norm).
inline std::vector<IVec> lattice_ball(int n, int R) {
  std::vector<IVec> pts;
  std::vector<long long> idx(n, -R);
  for (;;) {
    pts.push_back(idx);
    int i = n - 1;
    while (i >= 0 && idx[i] == R) idx[i--] = -R;
    if (i < 0) break;
    ++idx[i];
  }
  return pts;
}

inline void check_scan_args(const std::vector<RationalCone>& cones, int R) {
  require(!cones.empty(), errc::DimensionMismatch,
          "coverage scan needs at least one cone");
  const int n = cones[0].dim;
  for (const auto& c : cones)
    require(c.dim == n, errc::DimensionMismatch,
            "coverage needs a common cone dimension");
  require(n <= 3 && R <= 8 && R >= 0, errc::UnsupportedDimension,
          "coverage is desk-scale: dimension <= 3, radius <= 8");
}

}  // namespace detail

inline CoverageReport coverage_scan(const std::vector<RationalCone>& cones,
                                    int R) {
  detail::check_scan_args(cones, R);
  CoverageReport rep;
  rep.radius = R;
  for (const IVec& p : detail::lattice_ball(cones[0].dim, R)) {
    CoveragePoint row = detail::scan_point(cones, p);
    if (row.witness >= 0) ++rep.covered;
    ++rep.total;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// Same scan fanned out over `jobs` worker threads.  Rows are stored by
// point index, so the report is byte-identical to the sequential scan for
// every job count.
inline CoverageReport coverage_scan(const std::vector<RationalCone>& cones,
                                    int R, int jobs) {
  if (jobs <= 1) return coverage_scan(cones, R);
  detail::check_scan_args(cones, R);
  const std::vector<IVec> pts = detail::lattice_ball(cones[0].dim, R);
  std::vector<CoveragePoint> rows(pts.size());
  std::atomic<size_t> cursor{0};
  auto work = [&] {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= pts.size()) return;
      rows[i] = detail::scan_point(cones, pts[i]);
    }
  };
  std::vector<std::thread> pool;
  const int J = static_cast<int>(
      std::min<size_t>(static_cast<size_t>(jobs), pts.size()));
  for (int t = 0; t < J; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  CoverageReport rep;
  rep.radius = R;
  rep.total = static_cast<long long>(rows.size());
  for (const auto& r : rows)
    if (r.witness >= 0) ++rep.covered;
  rep.rows = std::move(rows);
  return rep;
}

// Exact minimum of <w, g> over every generator of every cone; >= 0
// certifies that all cones lie in the half-space { <w, x> >= 0 }.  Empty
// input: 0 (the empty union lies in every half-space).
inline long long halfspace_residual(const std::vector<RationalCone>& cones,
                                    const IVec& w) {
  bool any = false;
  long long best = 0;
  for (const auto& c : cones) {
    require(static_cast<int>(w.size()) == c.dim, errc::DimensionMismatch,
            "weight length differs from the cone dimension");
    for (const auto& g : c.generators) {
      long long dot = 0;
      for (int i = 0; i < c.dim; ++i) {
        long long t;
        if (__builtin_mul_overflow(w[i], g[i], &t) ||
            __builtin_add_overflow(dot, t, &dot))
          throw std::overflow_error("halfspace residual overflow");
        (void)t;
      }
      if (!any || dot < best) best = dot;
      any = true;
    }
  }
  return best;
}

namespace detail {

using ZVec = std::vector<mpz_class>;

inline ZVec to_z(const IVec& v) {
  ZVec z(v.size());
  for (size_t i = 0; i < v.size(); ++i) z[i] = z_of(v[i]);
  return z;
}

inline bool is_zero(const ZVec& v) {
  return std::all_of(v.begin(), v.end(),
                     [](const mpz_class& x) { return x == 0; });
}

inline void make_primitive(ZVec& v) {
  mpz_class g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g > 1)
    for (auto& x : v) x /= g;
}

inline mpz_class zdot(const ZVec& a, const ZVec& b) {
  mpz_class s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline ZVec cross3(const ZVec& a, const ZVec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline ZVec rot2(const ZVec& a) { return {-a[1], a[0]}; }

// All supporting normals of the cone drawn from a brute-force candidate
// pool (generator crosses, generator/axis crosses, axes); the pool contains
// every facet normal of a cone in dimension <= 3, so the kept set is a
// valid H-representation.
inline std::vector<ZVec> supports_of(const std::vector<ZVec>& gens, int n) {
  std::vector<ZVec> cand;
  auto push = [&](ZVec u) {
    if (is_zero(u)) return;
    make_primitive(u);
    cand.push_back(std::move(u));
  };
  if (n == 2) {
    for (const auto& g : gens) {
      push(rot2(g));
      ZVec m = rot2(g);
      for (auto& x : m) x = -x;
      push(std::move(m));
    }
    push({1, 0});
    push({-1, 0});
    push({0, 1});
    push({0, -1});
  } else {
    std::vector<ZVec> axes = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (size_t i = 0; i < gens.size(); ++i) {
      for (size_t j = i + 1; j < gens.size(); ++j) {
        ZVec u = cross3(gens[i], gens[j]);
        push(u);
        for (auto& x : u) x = -x;
        push(std::move(u));
      }
      for (const auto& e : axes) {
        ZVec u = cross3(gens[i], e);
        push(u);
        for (auto& x : u) x = -x;
        push(std::move(u));
      }
    }
    for (const auto& e : axes) {
      push(ZVec(e));
      ZVec m = e;
      for (auto& x : m) x = -x;
      push(std::move(m));
    }
  }
  std::vector<ZVec> kept;
  for (auto& u : cand) {
    bool ok = true;
    for (const auto& g : gens)
      if (zdot(u, g) < 0) {
        ok = false;
        break;
      }
    if (ok && std::find(kept.begin(), kept.end(), u) == kept.end())
      kept.push_back(std::move(u));
  }
  return kept;
}

inline bool zcone_contains(const std::vector<ZVec>& gens, const ZVec& v) {
  std::vector<QVec> cols;
  for (const auto& g : gens) {
    QVec q(g.size());
    for (size_t i = 0; i < g.size(); ++i) q[i] = mpq_class(g[i]);
    cols.push_back(std::move(q));
  }
  QVec b(v.size());
  for (size_t i = 0; i < v.size(); ++i) b[i] = mpq_class(v[i]);
  return nonneg_combination(cols, b);
}

// F (by generators) is a face of C iff F equals the exposed face of C cut
// out by every supporting normal of C that vanishes on all of F.  A face of
// a finitely generated cone is always the cone of the generators lying in
// it, so the comparison reduces to generator containments.
inline bool is_face_of(const std::vector<ZVec>& fgens,
                       const std::vector<ZVec>& cgens,
                       const std::vector<ZVec>& csupports) {
  std::vector<const ZVec*> tightU;
  for (const auto& u : csupports) {
    bool tight = true;
    for (const auto& f : fgens)
      if (zdot(u, f) != 0) {
        tight = false;
        break;
      }
    if (tight) tightU.push_back(&u);
  }
  for (const auto& g : cgens) {
    bool tight = true;
    for (const auto* u : tightU)
      if (zdot(*u, g) != 0) {
        tight = false;
        break;
      }
    if (tight && !zcone_contains(fgens, g)) return false;
  }
  return true;
}

}  // namespace detail

// True iff every pair of cones intersects in a common face (exact).
// Desk-scale restriction: dimension 2 or 3.
inline bool pairwise_face_check(const std::vector<RationalCone>& cones) {
  using namespace detail;
  if (cones.size() < 2) return true;
  const int n = cones[0].dim;
  require(n == 2 || n == 3, errc::UnsupportedDimension,
          "face check is desk-scale: dimension 2 or 3 only");
  for (const auto& c : cones)
    require(c.dim == n, errc::DimensionMismatch,
            "face check needs a common cone dimension");

  std::vector<std::vector<ZVec>> gens(cones.size());
  std::vector<std::vector<ZVec>> sups(cones.size());
  for (size_t i = 0; i < cones.size(); ++i) {
    for (const auto& g : cones[i].generators) gens[i].push_back(to_z(g));
    sups[i] = supports_of(gens[i], n);
  }

  for (size_t i = 0; i < cones.size(); ++i)
    for (size_t j = i + 1; j < cones.size(); ++j) {
      // V-representation of the intersection: generators of one cone inside
      // the other, plus every boundary-line direction (from active support
      // pairs) satisfying all constraints of both.
      std::vector<ZVec> all_sup = sups[i];
      all_sup.insert(all_sup.end(), sups[j].begin(), sups[j].end());
      auto feasible = [&](const ZVec& d) {
        for (const auto& u : all_sup)
          if (zdot(u, d) < 0) return false;
        return true;
      };
      std::vector<ZVec> fgens;
      auto push = [&](ZVec d) {
        if (is_zero(d)) return;
        make_primitive(d);
        if (std::find(fgens.begin(), fgens.end(), d) == fgens.end())
          fgens.push_back(std::move(d));
      };
      for (const auto& g : gens[i])
        if (zcone_contains(gens[j], g)) push(ZVec(g));
      for (const auto& g : gens[j])
        if (zcone_contains(gens[i], g)) push(ZVec(g));
      if (n == 2) {
        for (const auto& u : all_sup) {
          ZVec d = rot2(u);
          if (feasible(d)) push(ZVec(d));
          for (auto& x : d) x = -x;
          if (feasible(d)) push(std::move(d));
        }
      } else {
        for (size_t a = 0; a < all_sup.size(); ++a)
          for (size_t b = a + 1; b < all_sup.size(); ++b) {
            ZVec d = cross3(all_sup[a], all_sup[b]);
            if (is_zero(d)) continue;
            if (feasible(d)) push(ZVec(d));
            for (auto& x : d) x = -x;
            if (feasible(d)) push(std::move(d));
          }
      }
      if (!is_face_of(fgens, gens[i], sups[i]) ||
          !is_face_of(fgens, gens[j], sups[j]))
        return false;
    }
  return true;
}

// Float angle between two integer vectors, for convergence diagnostics
// only; never used in a verdict.
inline double vector_angle(const IVec& a, const IVec& b) {
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  double c = dot / std::sqrt(na * nb);
  c = std::max(-1.0, std::min(1.0, c));
  return std::acos(c);
}

}  // namespace lamina
