#pragma once
// Seeds with principal coefficients, seed mutation with exact exchange
// division, g-vectors via the grading and via a fast tropical recursion,
// and exchange-graph BFS with g-vector deduplication.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lamina/laurent.hpp"
#include "lamina/quiver.hpp"

namespace lamina {

using GVector = std::vector<long long>;

inline std::string gvector_str(const GVector& g) {
  std::vector<std::string> p;
  for (long long v : g) p.push_back(std::to_string(v));
  return "(" + join(p, ",") + ")";
}

// ---------------------------------------------------------------------------
// Seeds and mutation (Laurent engine)
// ---------------------------------------------------------------------------

struct Seed {
  Quiver quiver;                    // framed, 2n vertices
  std::vector<LaurentPoly> cluster;  // n cluster variables
  std::vector<int> mutation_path;

  int n() const { return quiver.n_mutable; }
};

inline Seed initial_seed(const Quiver& q) {
  require(q.n_total() == q.n_mutable, errc::DimensionMismatch,
          "initial_seed expects an unframed quiver");
  Seed s;
  s.quiver = framed_quiver(q);
  for (int i = 0; i < q.n_mutable; ++i)
    s.cluster.push_back(LaurentPoly::x(q.n_mutable, i));
  return s;
}

// Weight of vertex j in the exchange monomials: the j-th cluster variable
// for mutable j, the coefficient variable y_{j-n} for frozen j.
inline LaurentPoly exchange_weight(const Seed& s, int j) {
  const int n = s.n();
  return j < n ? s.cluster[j] : LaurentPoly::y(n, j - n);
}

inline Seed mutate_seed(const Seed& s, int k) {
  const int n = s.n();
  require(k >= 0 && k < s.quiver.n_total(), errc::DimensionMismatch,
          "mutation index out of range");
  require(k < n, errc::FrozenVertex,
          "cannot mutate frozen vertex " + std::to_string(k + 1));
  LaurentPoly m_in = LaurentPoly::constant(n, 1);
  LaurentPoly m_out = LaurentPoly::constant(n, 1);
  for (int j = 0; j < s.quiver.n_total(); ++j) {
    long long b = s.quiver.b[j][k];
    if (b > 0)
      m_in *= exchange_weight(s, j).pow(static_cast<int>(b));
    else if (b < 0)
      m_out *= exchange_weight(s, j).pow(static_cast<int>(-b));
  }
  Seed r = s;
  r.cluster[k] = divide_exact(m_in + m_out, s.cluster[k]);
  require(r.cluster[k].n_terms() <= kMaxMonomials, errc::SizeGuardExceeded,
          "cluster variable exceeds the monomial guard");
  r.quiver = mutate_quiver(s.quiver, k);
  r.mutation_path.push_back(k);
  return r;
}

// ---------------------------------------------------------------------------
// g-vectors
// ---------------------------------------------------------------------------

// Degree columns of the coefficient variables: deg(y_j) = column j of the
// initial exchange matrix.  `q_initial` may be framed or unframed; only
// the mutable block is read.
inline std::vector<GVector> y_degrees(const Quiver& q_initial) {
  const int n = q_initial.n_mutable;
  std::vector<GVector> d(n, GVector(n, 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) d[j][i] = q_initial.b[i][j];
  return d;
}

// The common g-degree of all monomials of x, with deg(x_i) = e_i and
// deg(y_j) given by the initial quiver.  Distinct degrees mean the input
// is not a cluster variable (or there is a bug): NotHomogeneous.
inline GVector g_vector_grading(const LaurentPoly& x, const Quiver& q_initial) {
  const int n = q_initial.n_mutable;
  require(x.nvars() == n, errc::DimensionMismatch, "variable count mismatch");
  require(!x.is_zero(), errc::NotHomogeneous, "zero polynomial");
  const auto d = y_degrees(q_initial);
  std::optional<GVector> deg;
  for (const auto& [e, c] : x.terms()) {
    GVector g(n, 0);
    for (int i = 0; i < n; ++i) g[i] = e[i];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) g[i] += static_cast<long long>(e[n + j]) * d[j][i];
    if (!deg) {
      deg = std::move(g);
    } else {
      require(*deg == g, errc::NotHomogeneous,
              "monomials of distinct g-degree");
    }
  }
  return *deg;
}

// ---------------------------------------------------------------------------
// Tropical engine
// ---------------------------------------------------------------------------

// Tracks the framed quiver and the current g-vectors along a mutation
// path without any polynomial arithmetic.  The recursion
//   g'_k = deg(M_in) - g_k,
//   deg(M_in) = sum_j [b_jk]+ g_j + sum_i [c_ik]+ d_i
// is validated against deg(M_out) at every step (they must agree for a
// homogeneous exchange relation) and, in tests, against the grading.
class TropicalState {
 public:
  explicit TropicalState(const Quiver& q_initial)
      : n_(q_initial.n_mutable),
        bhat_(framed_quiver(q_initial)),
        d_(y_degrees(q_initial)) {
    for (int i = 0; i < n_; ++i) {
      GVector e(n_, 0);
      e[i] = 1;
      g_.push_back(std::move(e));
    }
  }

  const std::vector<GVector>& g() const { return g_; }
  const Quiver& bhat() const { return bhat_; }

  void mutate(int k) {
    require(k >= 0 && k < bhat_.n_total(), errc::DimensionMismatch,
            "mutation index out of range");
    require(k < n_, errc::FrozenVertex,
            "cannot mutate frozen vertex " + std::to_string(k + 1));
    GVector din(n_, 0), dout(n_, 0);
    auto add = [this](GVector& acc, const GVector& v, long long m) {
      for (int i = 0; i < n_; ++i)
        acc[i] = detail::checked_add(acc[i], detail::checked_mul(m, v[i]));
    };
    for (int j = 0; j < n_; ++j) {
      long long b = bhat_.b[j][k];
      if (b > 0)
        add(din, g_[j], b);
      else if (b < 0)
        add(dout, g_[j], -b);
    }
    for (int i = 0; i < n_; ++i) {
      long long c = bhat_.b[n_ + i][k];
      if (c > 0)
        add(din, d_[i], c);
      else if (c < 0)
        add(dout, d_[i], -c);
    }
    if (din != dout)
      throw std::logic_error(
          "tropical recursion: exchange monomial degrees disagree");
    for (int i = 0; i < n_; ++i) g_[k][i] = din[i] - g_[k][i];
    bhat_ = mutate_quiver(bhat_, k);
  }

 private:
  int n_;
  Quiver bhat_;
  std::vector<GVector> d_;
  std::vector<GVector> g_;
};

// The n g-vectors of the cluster reached from the initial seed of
// `q_initial` along `path`.
inline std::vector<GVector> g_vector_tropical(const std::vector<int>& path,
                                              const Quiver& q_initial) {
  TropicalState st(q_initial);
  for (int k : path) st.mutate(k);
  return st.g();
}

// ---------------------------------------------------------------------------
// Exchange-graph BFS
// ---------------------------------------------------------------------------

enum class Engine { laurent, tropical };

struct ClusterNode {
  std::string id;             // canonical sorted g-vector list
  std::vector<GVector> g;     // in cluster-position order
  std::vector<int> path;      // a shortest mutation path from the root
  int depth = 0;
  std::vector<LaurentPoly> cluster;  // laurent engine only
};

inline std::string cluster_key(std::vector<GVector> g) {
  std::sort(g.begin(), g.end());
  std::vector<std::string> p;
  for (const auto& v : g) p.push_back(gvector_str(v));
  return join(p, " ");
}

// Breadth-first search of the exchange graph up to `depth`, deduplicating
// clusters by their (unordered) g-vector sets.  The laurent engine carries
// cluster variables and aborts branches whose polynomials exceed the
// monomial guard; the tropical engine has no guard.  Result is ordered by
// (depth, id).
inline std::vector<ClusterNode> exchange_bfs(const Quiver& q, int depth,
                                             Engine engine) {
  require(q.n_total() == q.n_mutable, errc::DimensionMismatch,
          "exchange_bfs expects an unframed quiver");
  const int n = q.n_mutable;

  struct Item {
    TropicalState trop;
    std::optional<Seed> seed;
    std::vector<int> path;
    int depth;
  };
  std::vector<ClusterNode> out;
  std::vector<Item> queue;
  std::set<std::string> seen;

  Item root{TropicalState(q),
            engine == Engine::laurent ? std::optional<Seed>(initial_seed(q))
                                      : std::nullopt,
            {},
            0};
  auto emit = [&](const Item& it) {
    std::string key = cluster_key(it.trop.g());
    if (!seen.insert(key).second) return false;
    ClusterNode node;
    node.id = std::move(key);
    node.g = it.trop.g();
    node.path = it.path;
    node.depth = it.depth;
    if (it.seed) node.cluster = it.seed->cluster;
    out.push_back(std::move(node));
    return true;
  };
  emit(root);
  queue.push_back(std::move(root));

  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    if (queue[qi].depth >= depth) continue;
    for (int k = 0; k < n; ++k) {
      Item next{queue[qi].trop, std::nullopt, queue[qi].path, queue[qi].depth + 1};
      next.path.push_back(k);
      next.trop.mutate(k);
      if (queue[qi].seed) {
        try {
          next.seed = mutate_seed(*queue[qi].seed, k);
        } catch (const error& e) {
          if (e.code() == errc::SizeGuardExceeded) continue;  // abort branch
          throw;
        }
      }
      if (emit(next)) queue.push_back(std::move(next));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ClusterNode& a, const ClusterNode& b) {
                     if (a.depth != b.depth) return a.depth < b.depth;
                     return a.id < b.id;
                   });
  return out;
}

}  // namespace lamina
