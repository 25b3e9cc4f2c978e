#pragma once
// Quivers as antisymmetric net-arrow matrices, framing, and matrix mutation.

#include <string>
#include <vector>

#include "lamina/common.hpp"

namespace lamina {

// A quiver without loops or 2-cycles, stored as the antisymmetric matrix
// b[u][v] = (#arrows u->v) - (#arrows v->u).  Vertices 0..n_mutable-1 are
// mutable; any further vertices are frozen (framing vertices i').
struct Quiver {
  int n_mutable = 0;
  std::vector<std::vector<long long>> b;  // square, size n_total x n_total
  std::vector<std::string> labels;        // one per vertex

  int n_total() const { return static_cast<int>(b.size()); }

  static Quiver empty(int n, std::vector<std::string> labels = {}) {
    Quiver q;
    q.n_mutable = n;
    q.b.assign(n, std::vector<long long>(n, 0));
    if (labels.empty())
      for (int i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i + 1));
    require(static_cast<int>(labels.size()) == n, errc::DimensionMismatch,
            "quiver label count");
    q.labels = std::move(labels);
    return q;
  }

  // Adds `mult` arrows u->v (net).
  void add_arrow(int u, int v, long long mult = 1) {
    require(u != v, errc::DimensionMismatch, "loop arrow");
    b[u][v] += mult;
    b[v][u] -= mult;
  }

  bool operator==(const Quiver& o) const {
    return n_mutable == o.n_mutable && b == o.b;
  }
};

namespace detail {
inline long long checked_mul(long long a, long long c) {
  long long r;
  if (__builtin_mul_overflow(a, c, &r))
    throw std::overflow_error("quiver mutation: arrow multiplicity overflow");
  return r;
}
inline long long checked_add(long long a, long long c) {
  long long r;
  if (__builtin_add_overflow(a, c, &r))
    throw std::overflow_error("quiver mutation: arrow multiplicity overflow");
  return r;
}
}  // namespace detail

// Adds framing vertices 1',...,n' with one arrow i -> i' each.
inline Quiver framed_quiver(const Quiver& q) {
  const int n = q.n_mutable;
  Quiver f;
  f.n_mutable = n;
  f.b.assign(2 * n, std::vector<long long>(2 * n, 0));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) f.b[u][v] = q.b[u][v];
  f.labels = q.labels;
  for (int i = 0; i < n; ++i) {
    f.labels.push_back(q.labels[i] + "'");
    f.b[i][n + i] = 1;
    f.b[n + i][i] = -1;
  }
  return f;
}

// Matrix mutation at mutable vertex k: compose paths through k, reverse
// arrows at k, cancel 2-cycles (automatic in the net-matrix encoding).
// Entries between two frozen vertices are kept fixed (they are never read).
inline Quiver mutate_quiver(const Quiver& q, int k) {
  require(k >= 0 && k < q.n_total(), errc::DimensionMismatch,
          "mutation vertex out of range");
  require(k < q.n_mutable, errc::FrozenVertex,
          "cannot mutate frozen vertex " + std::to_string(k + 1));
  const int m = q.n_total();
  Quiver r = q;
  for (int u = 0; u < m; ++u) {
    for (int v = 0; v < m; ++v) {
      if (u >= q.n_mutable && v >= q.n_mutable) continue;
      if (u == k || v == k) {
        r.b[u][v] = -q.b[u][v];
      } else if (q.b[u][k] > 0 && q.b[k][v] > 0) {
        r.b[u][v] = detail::checked_add(q.b[u][v],
                                        detail::checked_mul(q.b[u][k], q.b[k][v]));
      } else if (q.b[u][k] < 0 && q.b[k][v] < 0) {
        r.b[u][v] = detail::checked_add(q.b[u][v],
                                        -detail::checked_mul(-q.b[u][k], -q.b[k][v]));
      }
    }
  }
  return r;
}

}  // namespace lamina
