#pragma once
// Integral laminates on a triangulated marked surface: taut crossing words
// in normal form, spiral materialization, shear coordinates with respect to
// ideal and tagged triangulations, elementary laminates of tagged arcs,
// classification of curves (with splitting of puncture-enclosing ones), and
// Dehn twists along closed laminates.
//
// Conventions.  A curve is stored as the ordered list of interior arcs it
// crosses.  Open curves also store their two ends: an attachment to a
// boundary side, or a spiral into a puncture whose winding sense (cw/ccw)
// describes how the curve wraps as it approaches the puncture, independently
// of traversal orientation.  A double-spiral curve crossing nothing runs
// alongside an arc, recorded as `via`.  Triangle interiors lie to the left
// of their halfedges, so a curve turning right inside a triangle cuts the
// corner at the head of its entry slot.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lamina/common.hpp"
#include "lamina/surface.hpp"

namespace lamina {

// ===========================================================================
// Laminate data model
// ===========================================================================

enum class SpiralDir : std::uint8_t { cw, ccw };

inline SpiralDir flip_dir(SpiralDir d) {
  return d == SpiralDir::cw ? SpiralDir::ccw : SpiralDir::cw;
}
inline const char* spiral_dir_name(SpiralDir d) {
  return d == SpiralDir::cw ? "cw" : "ccw";
}
inline SpiralDir parse_spiral_dir(const std::string& s) {
  require(s == "cw" || s == "ccw", errc::NotATraversal,
          "spiral direction must be 'cw' or 'ccw', got '" + s + "'");
  return s == "cw" ? SpiralDir::cw : SpiralDir::ccw;
}

// One end of an open laminate.
struct EndPoint {
  bool spiral = false;
  int at = -1;                    // boundary side id, or puncture vertex id
  SpiralDir dir = SpiralDir::cw;  // meaningful for spirals only

  friend bool operator==(const EndPoint& a, const EndPoint& b) {
    if (a.spiral != b.spiral || a.at != b.at) return false;
    return !a.spiral || a.dir == b.dir;
  }
};

inline EndPoint boundary_end(int side) { return {false, side, SpiralDir::cw}; }
inline EndPoint spiral_end(int p, SpiralDir d) { return {true, p, d}; }

// A single laminate curve.  Only forms produced by make_laminate (and the
// functions built on it) are normal; comparing two normal forms with ==
// decides whether they are the same curve.
struct Laminate {
  bool closed = false;
  std::vector<int> word;          // interior arc ids crossed, in order
  std::array<EndPoint, 2> ends{}; // open curves only
  int via = -1;                   // open, empty word, double spiral: hugged arc

  friend bool operator==(const Laminate& a, const Laminate& b) {
    if (a.closed != b.closed || a.word != b.word) return false;
    if (a.closed) return true;
    return a.ends[0] == b.ends[0] && a.ends[1] == b.ends[1] && a.via == b.via;
  }
};

inline Laminate reversed(const Laminate& l) {
  Laminate r = l;
  std::reverse(r.word.begin(), r.word.end());
  if (!l.closed) std::swap(r.ends[0], r.ends[1]);
  return r;
}

inline std::string end_key(const IdealTriangulation& T, const EndPoint& e) {
  if (e.spiral)
    return "s:" + T.vertex_name_[e.at] + ":" + spiral_dir_name(e.dir);
  return "b:" + T.side_name[e.at];
}

// Deterministic serialization of a laminate (names, not ids).
inline std::string laminate_key(const IdealTriangulation& T, const Laminate& l) {
  std::string w;
  for (size_t i = 0; i < l.word.size(); ++i) {
    if (i) w += ",";
    w += T.side_name[l.word[i]];
  }
  if (l.closed) return "closed|" + w;
  return "open|" + end_key(T, l.ends[0]) + "|" + w + "|" +
         end_key(T, l.ends[1]) +
         "|via:" + (l.via < 0 ? std::string("-") : T.side_name[l.via]);
}

// ===========================================================================
// Hop calculus (detail)
// ===========================================================================

namespace detail {

using Tri = IdealTriangulation;

// Passage through one triangle: enter through slot `in`, leave through `out`
// (distinct halfedges of the same triangle).
struct Hop {
  Half in = -1, out = -1;
};

enum class Turn : std::uint8_t { L, R };

inline Turn turn_of(const Hop& h) {
  if (h.out == Tri::next(h.in)) return Turn::R;  // cuts the corner at head(in)
  if (h.out == Tri::prev(h.in)) return Turn::L;  // cuts the corner at head(out)
  throw std::logic_error("malformed hop");
}

// Corner at puncture p into which a curve tucks after arriving in a triangle
// through slot e; prefers e's own corner, then its two neighbours.
inline Half wedge_corner(const Tri& T, Half e, int p) {
  for (Half h : {e, Tri::next(e), Tri::prev(e)})
    if (T.head(h) == p) return h;
  return -1;
}

// Exit slots of a spiral winding inward around p = head(w), starting from
// the wedge corner w.  cw spirals always turn right; ccw always left.
inline std::vector<Half> winding_slots(const Tri& T, Half w, SpiralDir d,
                                       int count) {
  std::vector<Half> out;
  out.reserve(static_cast<size_t>(count));
  Half x = d == SpiralDir::cw ? Tri::next(w) : w;
  for (int i = 0; i < count; ++i) {
    out.push_back(x);
    Half t = T.twin(x);
    if (t < 0) throw std::logic_error("spiral winding reached a boundary side");
    x = d == SpiralDir::cw ? Tri::next(t) : Tri::prev(t);
  }
  return out;
}

// Winding exits at a junction where the curve occupies slot `adj` of a
// triangle and then spirals into p.  On triangles with several corners at p
// (self-gluings) the wedge is the first candidate, in preference order,
// whose opening exit does not double straight back through `adj` — such a
// backtrack would bound a bigon, so that crossing belongs to the stored word,
// not the implicit tail.  Empty result: no corner admits a taut winding, so
// the adjoining stored crossing is reducible.
inline std::vector<Half> junction_windings(const Tri& T, Half adj, int p,
                                           SpiralDir d, int count) {
  for (Half w : {adj, Tri::next(adj), Tri::prev(adj)}) {
    if (T.head(w) != p) continue;
    auto xs = winding_slots(T, w, d, count);
    if (xs[0] == adj) continue;
    return xs;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Resolution: crossing word -> taut hop path
// ---------------------------------------------------------------------------

// Open laminates with k crossings resolve into k+1 segments (segment i ends
// by crossing word[i]; the boundary/spiral anchors occupy the outer slots,
// with -1 standing in at spiral ends).  Closed words resolve into k segments
// linked cyclically.  Candidate exits are tried in slot order; leaving
// through the entry slot never happens on a taut curve (the excursion would
// bound a vertex-free bigon), so such exits are skipped.
struct Resolution {
  std::vector<Hop> seg;
};

inline bool resolve_open_rec(const Tri& T, const std::vector<int>& w,
                             const std::array<EndPoint, 2>& ends, size_t i,
                             std::vector<Hop>& seg) {
  const size_t k = w.size();
  if (i == k) {
    Half in = T.twin(seg[k - 1].out);
    if (in < 0) return false;
    if (!ends[1].spiral) {
      Half out = T.slots(ends[1].at)[0];
      if (T.tri_of(out) != T.tri_of(in) || out == in) return false;
      seg[k] = {in, out};
      return true;
    }
    if (wedge_corner(T, in, ends[1].at) < 0) return false;
    seg[k] = {in, -1};
    return true;
  }
  Half in = -1;
  if (i == 0) {
    if (!ends[0].spiral) in = T.slots(ends[0].at)[0];
  } else {
    in = T.twin(seg[i - 1].out);
    if (in < 0) return false;
  }
  for (Half g : T.slots(w[i])) {
    if (g < 0 || g == in) continue;
    if (in >= 0 && T.tri_of(g) != T.tri_of(in)) continue;
    if (i == 0 && ends[0].spiral) {
      bool anchored = false;
      for (Half h : {g, Tri::next(g), Tri::prev(g)})
        if (T.head(h) == ends[0].at) anchored = true;
      if (!anchored) continue;
    }
    seg[i] = {in, g};
    if (resolve_open_rec(T, w, ends, i + 1, seg)) return true;
  }
  return false;
}

inline bool resolve_closed_rec(const Tri& T, const std::vector<int>& w,
                               size_t i, std::vector<Hop>& seg) {
  const size_t k = w.size();
  if (i == k) {
    Half in0 = T.twin(seg[k - 1].out);
    if (in0 < 0) return false;
    if (T.tri_of(in0) != T.tri_of(seg[0].out) || in0 == seg[0].out)
      return false;
    seg[0].in = in0;
    return true;
  }
  Half in = -1;
  if (i > 0) {
    in = T.twin(seg[i - 1].out);
    if (in < 0) return false;
  }
  for (Half g : T.slots(w[i])) {
    if (g < 0) continue;
    if (i > 0 && (T.tri_of(g) != T.tri_of(in) || g == in)) continue;
    seg[i] = {in, g};
    if (resolve_closed_rec(T, w, i + 1, seg)) return true;
  }
  return false;
}

inline std::optional<Resolution> try_resolve(const Tri& T, const Laminate& l) {
  const size_t k = l.word.size();
  if (k == 0) return std::nullopt;  // empty words are materialized directly
  Resolution r;
  if (l.closed) {
    r.seg.assign(k, {});
    if (!resolve_closed_rec(T, l.word, 0, r.seg)) return std::nullopt;
  } else {
    r.seg.assign(k + 1, {});
    if (!resolve_open_rec(T, l.word, l.ends, 0, r.seg)) return std::nullopt;
  }
  return r;
}

// All taut resolutions (the radius of a self-folded triangle offers two exit
// slots, so a word can resolve in more than one way).
inline std::vector<Resolution> resolve_all(const Tri& T, const Laminate& l) {
  std::vector<Resolution> out;
  const size_t k = l.word.size();
  if (k == 0) return out;
  std::vector<Hop> seg(l.closed ? k : k + 1);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (out.size() >= 64) return;
    if (i == k) {
      if (l.closed) {
        Half in0 = T.twin(seg[k - 1].out);
        if (in0 < 0 || T.tri_of(in0) != T.tri_of(seg[0].out) ||
            in0 == seg[0].out)
          return;
        seg[0].in = in0;
        out.push_back({seg});
        return;
      }
      Half in = T.twin(seg[k - 1].out);
      if (in < 0) return;
      if (!l.ends[1].spiral) {
        Half o = T.slots(l.ends[1].at)[0];
        if (T.tri_of(o) != T.tri_of(in) || o == in) return;
        seg[k] = {in, o};
      } else {
        if (wedge_corner(T, in, l.ends[1].at) < 0) return;
        seg[k] = {in, -1};
      }
      out.push_back({seg});
      return;
    }
    Half in = -1;
    if (i == 0) {
      if (!l.closed && !l.ends[0].spiral) in = T.slots(l.ends[0].at)[0];
    } else {
      in = T.twin(seg[i - 1].out);
      if (in < 0) return;
    }
    for (Half g : T.slots(l.word[i])) {
      if (g < 0) continue;
      if (in >= 0 && (T.tri_of(g) != T.tri_of(in) || g == in)) continue;
      if (i == 0 && !l.closed && l.ends[0].spiral) {
        bool anchored = false;
        for (Half h : {g, Tri::next(g), Tri::prev(g)})
          if (T.head(h) == l.ends[0].at) anchored = true;
        if (!anchored) continue;
      }
      seg[i] = {in, g};
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Materialization: laminate -> explicit hop path with unrolled spirals
// ---------------------------------------------------------------------------

struct PathM {
  std::vector<Hop> hops;
  bool cyclic = false;
  int lead = 0, tail = 0;  // pure winding hops at the two ends (open curves)
};

// Crossings between consecutive hops; cyclic paths close up.
inline std::vector<int> crossings_of(const Tri& T, const PathM& p) {
  std::vector<int> out;
  const size_t n = p.hops.size();
  if (n == 0) return out;
  const size_t last = p.cyclic ? n : n - 1;
  out.reserve(last);
  for (size_t i = 0; i < last; ++i) out.push_back(T.side(p.hops[i].out));
  return out;
}

// Materialize a laminate, unrolling each spiral end into `wraps` full turns
// around its puncture.  Returns nullopt when the stored form does not trace
// a taut curve (e.g. a spiral junction that would immediately re-cross its
// arrival side; normalization removes such crossings).
inline std::optional<PathM> materialize(const Tri& T, const Laminate& l,
                                        int wraps) {
  PathM p;
  if (l.closed) {
    auto r = try_resolve(T, l);
    if (!r) return std::nullopt;
    p.hops = std::move(r->seg);
    p.cyclic = true;
    return p;
  }
  const size_t k = l.word.size();
  const EndPoint &e0 = l.ends[0], &e1 = l.ends[1];
  auto fan_count = [&](int v) { return static_cast<int>(T.fan(v).size()); };

  if (k == 0) {
    if (!e0.spiral && !e1.spiral) return std::nullopt;
    if (e0.spiral != e1.spiral) {
      // boundary--spiral segment winding around the puncture
      const EndPoint& b = e0.spiral ? e1 : e0;
      const EndPoint& sp = e0.spiral ? e0 : e1;
      Half bs = T.slots(b.at)[0];
      const int cnt = wraps * fan_count(sp.at);
      auto xs = junction_windings(T, bs, sp.at, sp.dir, cnt);
      if (xs.empty()) return std::nullopt;
      std::vector<Hop> hops;
      hops.push_back({bs, xs[0]});
      for (int i = 1; i < cnt; ++i) hops.push_back({T.twin(xs[i - 1]), xs[i]});
      if (e0.spiral) {
        std::reverse(hops.begin(), hops.end());
        for (auto& h : hops) std::swap(h.in, h.out);
        p.lead = cnt - 1;
      } else {
        p.tail = cnt - 1;
      }
      p.hops = std::move(hops);
      return p;
    }
    // Double spiral running alongside the arc `via`.  The hug segment sits
    // in the triangle on one side of the arc; audition both sides (the slots
    // of the arc), since mixed winding senses close off one of them.
    if (l.via < 0) return std::nullopt;
    const Half sa = T.slots(l.via)[0];
    for (Half s0 : {sa, T.twin(sa)}) {
      const int p0 = T.head(Tri::prev(s0));  // tail vertex of the arc
      const int p1 = T.head(s0);             // head vertex
      if (p0 != e0.at || p1 != e1.at) continue;
      Half x0 = e0.dir == SpiralDir::cw ? s0 : Tri::prev(s0);
      Half x1 = e1.dir == SpiralDir::cw ? Tri::next(s0) : s0;
      if (x0 == x1) continue;  // winding senses pinch off this side
      const int c0 = wraps * fan_count(p0), c1 = wraps * fan_count(p1);
      auto xs0 = winding_slots(T, Tri::prev(s0), e0.dir, c0);
      auto xs1 = winding_slots(T, s0, e1.dir, c1);
      if (xs0[0] != x0 || xs1[0] != x1)
        throw std::logic_error("via hug mismatch");
      std::vector<Hop> hops;
      for (int i = c0 - 1; i >= 1; --i)
        hops.push_back({xs0[i], T.twin(xs0[i - 1])});
      hops.push_back({x0, x1});
      for (int i = 1; i < c1; ++i) hops.push_back({T.twin(xs1[i - 1]), xs1[i]});
      p.lead = c0 - 1;
      p.tail = c1 - 1;
      p.hops = std::move(hops);
      return p;
    }
    return std::nullopt;
  }

  auto r = try_resolve(T, l);
  if (!r) return std::nullopt;
  const std::vector<Hop>& seg = r->seg;
  std::vector<Hop> hops;
  if (e0.spiral) {
    // unroll in the reversed frame (arrival slot = first exit), flip back
    Half arr = seg[0].out;
    const int cnt = wraps * fan_count(e0.at);
    auto xs = junction_windings(T, arr, e0.at, e0.dir, cnt);
    if (xs.empty()) return std::nullopt;
    for (int i = cnt - 1; i >= 1; --i)
      hops.push_back({xs[i], T.twin(xs[i - 1])});
    hops.push_back({xs[0], arr});
    p.lead = cnt - 1;
  } else {
    hops.push_back(seg[0]);
  }
  for (size_t i = 1; i < k; ++i) hops.push_back(seg[i]);
  if (e1.spiral) {
    Half in = seg[k].in;
    const int cnt = wraps * fan_count(e1.at);
    auto xs = junction_windings(T, in, e1.at, e1.dir, cnt);
    if (xs.empty()) return std::nullopt;
    hops.push_back({in, xs[0]});
    for (int i = 1; i < cnt; ++i) hops.push_back({T.twin(xs[i - 1]), xs[i]});
    p.tail = cnt - 1;
  } else {
    hops.push_back(seg[k]);
  }
  p.hops = std::move(hops);
  return p;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

// Turn-pair contributions along the materialized path: a crossing where the
// curve turns right then left contributes +1 to the crossed arc; left then
// right contributes -1.
inline std::map<int, long long> raw_shear_at(const Tri& T, const Laminate& l,
                                             int wraps) {
  auto pm = materialize(T, l, wraps);
  if (!pm) throw std::logic_error("raw_shear: laminate not in normal form");
  std::map<int, long long> out;
  const auto& h = pm->hops;
  const size_t n = h.size();
  if (n == 0) return out;
  const size_t pairs = pm->cyclic ? n : n - 1;
  for (size_t i = 0; i < pairs; ++i) {
    Turn a = turn_of(h[i]), b = turn_of(h[(i + 1) % n]);
    if (a == b) continue;
    out[T.side(h[i].out)] += a == Turn::R ? +1 : -1;
  }
  return out;
}

inline void drop_zeros(std::map<int, long long>& m) {
  for (auto it = m.begin(); it != m.end();)
    it = it->second == 0 ? m.erase(it) : std::next(it);
}

// Shear profile of a stored form, guarded against unrolling artifacts: the
// turn-pair sums must agree between two- and three-fold spiral unrollings.
inline std::optional<std::map<int, long long>> stable_raw(const Tri& T,
                                                          const Laminate& l) {
  if (!materialize(T, l, 2)) return std::nullopt;
  auto a = raw_shear_at(T, l, 2);
  drop_zeros(a);
  if (!l.closed && (l.ends[0].spiral || l.ends[1].spiral)) {
    auto b = raw_shear_at(T, l, 3);
    drop_zeros(b);
    if (a != b) return std::nullopt;
  }
  return a;
}

// One reduction at the tail: drop the last stored crossing when the
// shortened form traces the same laminate.  Shear coordinates separate
// laminations, so sameness is certified by equality of the stable shear
// profiles.  A form whose own junction is degenerate (it does not
// materialize) forces the reduction.  Dropping the only crossing of a
// double-spiral curve requires recovering the hugged arc (`via`); every
// interior arc is auditioned.
inline std::optional<Laminate> absorb_back_once(const Tri& T,
                                                const Laminate& l) {
  if (l.closed || l.word.empty() || !l.ends[1].spiral) return std::nullopt;
  const bool forced = !materialize(T, l, 2).has_value();
  std::optional<std::map<int, long long>> ref;
  if (!forced) ref = stable_raw(T, l);
  Laminate cand = l;
  cand.word.pop_back();
  cand.via = -1;

  // The popped form matches when one of its frames carries the same stable
  // shear profile (shear does not depend on the traversal direction).
  auto accept = [&](const Laminate& c) -> std::optional<Laminate> {
    if (!ref) return std::nullopt;
    if (auto rc = stable_raw(T, c); rc && *rc == *ref) return c;
    Laminate r = reversed(c);
    if (auto rr = stable_raw(T, r); rr && *rr == *ref) return r;
    return std::nullopt;
  };

  if (!cand.word.empty() || cand.ends[0].spiral != cand.ends[1].spiral) {
    if (forced) {
      if (materialize(T, cand, 2)) return cand;
      return std::nullopt;
    }
    return accept(cand);
  }
  if (!cand.ends[0].spiral) return std::nullopt;  // boundary-boundary: never

  if (forced) {
    // Degenerate long form: accept an empty hug only when unambiguous.
    std::optional<Laminate> found;
    int hits = 0;
    for (int v : T.internal_sides()) {
      std::optional<Laminate> got;
      for (int o = 0; o < 2 && !got; ++o) {
        Laminate c = o ? reversed(cand) : cand;
        c.via = v;
        if (materialize(T, c, 2)) got = c;
      }
      if (got) {
        ++hits;
        if (!found) found = got;
      }
    }
    if (hits == 1) return found;
    return std::nullopt;
  }
  for (int v : T.internal_sides()) {
    Laminate c2 = cand;
    c2.via = v;
    if (auto got = accept(c2)) return got;
  }
  return std::nullopt;
}

// Remove spiral-absorbed crossings at both ends until stable.
inline Laminate absorb(const Tri& T, Laminate l) {
  for (;;) {
    if (auto r = absorb_back_once(T, l)) {
      l = *r;
      continue;
    }
    Laminate rev = reversed(l);
    if (auto r = absorb_back_once(T, rev)) {
      l = reversed(*r);
      continue;
    }
    break;
  }
  return l;
}

inline Laminate canonical_orientation(const Tri& T, const Laminate& l) {
  Laminate r = reversed(l);
  const bool lm = materialize(T, l, 2).has_value();
  const bool rm = materialize(T, r, 2).has_value();
  require(lm || rm, errc::NotATraversal, "laminate has no taut realization");
  if (!lm) return r;
  if (!rm) return l;
  return laminate_key(T, l) <= laminate_key(T, r) ? l : r;
}

inline Laminate canonical_closed_word(Laminate l) {
  const size_t k = l.word.size();
  std::vector<int> best = l.word;
  std::vector<int> w = l.word;
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t t = 0; t < k; ++t) {
      std::rotate(w.begin(), w.begin() + 1, w.end());
      if (w < best) best = w;
    }
    std::reverse(w.begin(), w.end());
    if (w < best) best = w;
  }
  l.word = std::move(best);
  return l;
}

// Resolution with bigon cancellation: when a word fails to resolve, delete
// an adjacent equal pair (the two crossings of an empty bigon) and retry.
inline bool reduce_resolve(const Tri& T, const Laminate& shape,
                           std::vector<int>& w,
                           std::set<std::vector<int>>& seen) {
  if (w.empty()) return true;  // fully cancelled
  Laminate probe = shape;
  probe.word = w;
  if (try_resolve(T, probe)) return true;
  const size_t k = w.size();
  auto attempt = [&](std::vector<int> w2) {
    if (!seen.insert(w2).second) return false;
    if (!reduce_resolve(T, shape, w2, seen)) return false;
    w = std::move(w2);
    return true;
  };
  for (size_t j = 0; j + 1 < k; ++j) {
    if (w[j] != w[j + 1]) continue;
    std::vector<int> w2;
    w2.reserve(k - 2);
    for (size_t t = 0; t < k; ++t)
      if (t != j && t != j + 1) w2.push_back(w[t]);
    if (attempt(std::move(w2))) return true;
  }
  if (shape.closed && k >= 2 && w[k - 1] == w[0]) {
    if (attempt(std::vector<int>(w.begin() + 1, w.end() - 1))) return true;
  }
  return false;
}

}  // namespace detail

// ===========================================================================
// Construction and normalization
// ===========================================================================

// Build and normalize a laminate over T.  Throws NotATraversal for words
// that do not trace a taut curve and ForbiddenCurve for curves a lamination
// may not contain (contractible loops, loops around one puncture,
// boundary-parallel segments, and double spirals encircling only their own
// puncture).
inline Laminate make_laminate(const IdealTriangulation& T, Laminate l) {
  using namespace detail;
  for (int s : l.word)
    require(s >= 0 && s < T.n_sides() && T.is_internal(s), errc::NotATraversal,
            "crossing words may only cross interior arcs");
  if (l.closed) {
    require(l.via < 0, errc::NotATraversal, "closed laminates take no via");
    require(!l.word.empty(), errc::ForbiddenCurve,
            "a closed curve crossing nothing is contractible");
  } else {
    for (const EndPoint& e : l.ends) {
      if (e.spiral)
        require(e.at >= 0 && e.at < T.n_vertices_ && T.is_puncture(e.at),
                errc::NotATraversal, "spiral ends must sit at punctures");
      else
        require(e.at >= 0 && e.at < T.n_sides() && T.is_boundary(e.at),
                errc::NotATraversal, "boundary ends must sit on boundary sides");
    }
    if (l.via >= 0) {
      require(l.word.empty() && l.ends[0].spiral && l.ends[1].spiral,
              errc::NotATraversal,
              "via applies only to double-spiral laminates with no crossings");
      require(T.is_internal(l.via), errc::NotATraversal,
              "via must be an interior arc");
    }
    if (l.ends[0].spiral && l.ends[1].spiral && l.ends[0].at == l.ends[1].at)
      require(l.ends[0].dir == l.ends[1].dir, errc::NotATraversal,
              "two spirals of opposite sense around one puncture cross each "
              "other, so no such laminate exists");
  }

  std::set<std::vector<int>> seen;
  if (!reduce_resolve(T, l, l.word, seen))
    fail(errc::NotATraversal, "crossing word does not resolve to a taut curve");

  if (l.closed) {
    require(!l.word.empty(), errc::ForbiddenCurve,
            "closed curve cancels to a contractible loop");
    Laminate c = canonical_closed_word(l);
    auto r = try_resolve(T, c);
    if (!r) throw std::logic_error("canonical rotation lost resolvability");
    bool allL = true, allR = true;
    for (const Hop& h : r->seg)
      (turn_of(h) == Turn::L ? allR : allL) = false;
    require(!allL && !allR, errc::ForbiddenCurve,
            "closed curve bounds a disk or encircles a single puncture");
    return c;
  }

  if (l.word.empty()) {
    const bool s0 = l.ends[0].spiral, s1 = l.ends[1].spiral;
    if (!s0 && !s1)
      fail(errc::ForbiddenCurve,
           "a boundary-to-boundary curve crossing nothing is isotopic into "
           "the boundary");
    if (s0 && s1 && l.via < 0) {
      if (l.ends[0].at == l.ends[1].at && l.ends[0].dir == l.ends[1].dir)
        fail(errc::ForbiddenCurve,
             "a double spiral with no crossings encircles its own puncture");
      fail(errc::NotATraversal,
           "a double-spiral laminate with no crossings must name the arc it "
           "runs along (via)");
    }
    if (materialize(T, l, 2)) return canonical_orientation(T, l);
    Laminate r = reversed(l);
    if (materialize(T, r, 2)) return canonical_orientation(T, r);
    fail(errc::NotATraversal, "no taut curve matches the given ends");
  }

  l = absorb(T, l);
  return canonical_orientation(T, l);
}

// Name-based conveniences.
inline EndPoint boundary_end_named(const IdealTriangulation& T,
                                   const std::string& side) {
  return boundary_end(T.side_id(side));
}
inline EndPoint spiral_end_named(const IdealTriangulation& T,
                                 const std::string& p, SpiralDir d) {
  return spiral_end(T.vertex_id(p), d);
}
inline Laminate make_closed(const IdealTriangulation& T,
                            const std::vector<std::string>& word) {
  Laminate l;
  l.closed = true;
  for (const auto& nm : word) l.word.push_back(T.side_id(nm));
  return make_laminate(T, l);
}
inline Laminate make_open(const IdealTriangulation& T,
                          const std::vector<std::string>& word, EndPoint e0,
                          EndPoint e1, const std::string& via = "") {
  Laminate l;
  for (const auto& nm : word) l.word.push_back(T.side_id(nm));
  l.ends = {e0, e1};
  if (!via.empty()) l.via = T.side_id(via);
  return make_laminate(T, l);
}

// ===========================================================================
// Shear coordinates
// ===========================================================================

// Shear coordinates with respect to the bare ideal triangulation, indexed by
// arc id.  Spirals are unrolled both two and three full turns; disagreement
// means the stored form is not spiral-stable.
inline std::map<int, long long> raw_shear(const IdealTriangulation& T,
                                          const Laminate& l) {
  auto a = detail::raw_shear_at(T, l, 2);
  if (!l.closed && (l.ends[0].spiral || l.ends[1].spiral)) {
    auto b = detail::raw_shear_at(T, l, 3);
    detail::drop_zeros(a);
    detail::drop_zeros(b);
    require(a == b, errc::UnstableSpiral,
            "shear coordinates depend on the spiral unrolling depth");
  } else {
    detail::drop_zeros(a);
  }
  return a;
}

// Reverse the spiral sense of every end of `l` at puncture p, renormalizing.
inline Laminate spiral_flip(const IdealTriangulation& T, const Laminate& l,
                            int p) {
  if (l.closed) return l;
  Laminate f = l;
  bool touched = false;
  for (EndPoint& e : f.ends)
    if (e.spiral && e.at == p) {
      e.dir = flip_dir(e.dir);
      touched = true;
    }
  if (!touched) return l;
  if (f.word.empty() && f.via >= 0) {
    // A flipped hug may acquire incompatible winding senses; the curve then
    // crosses its arc once instead of running alongside it.
    Half s0 = T.slots(f.via)[0];
    bool any_frame = false, all_deg = true;
    auto probe = [&](const EndPoint& a, const EndPoint& b) {
      if (T.head(IdealTriangulation::prev(s0)) != a.at || T.head(s0) != b.at)
        return;
      Half x0 = a.dir == SpiralDir::cw ? s0 : IdealTriangulation::prev(s0);
      Half x1 = b.dir == SpiralDir::cw ? IdealTriangulation::next(s0) : s0;
      any_frame = true;
      if (x0 != x1) all_deg = false;
    };
    probe(f.ends[0], f.ends[1]);
    probe(f.ends[1], f.ends[0]);
    if (any_frame && all_deg) {
      f.word = {f.via};
      f.via = -1;
    }
  }
  return make_laminate(T, f);
}

// Tagged triangulation with every arc plain (no conjugate pairs).
inline TaggedTriangulation plain_tagged(const IdealTriangulation& T) {
  TaggedTriangulation TT;
  TT.base = T;
  for (int s : T.internal_sides()) {
    TT.arc_id.push_back(T.side_name[s]);
    TT.arc_base.push_back(s);
  }
  return TT;
}

// Shear vector of a laminate with respect to a tagged triangulation,
// indexed by arc position.  Arcs tagged notched at a puncture read the
// laminate with its spirals at that puncture reversed; the plain member of
// a conjugate pair reads the loop coordinate of the laminate reversed at
// the enclosed puncture, while the notched member reads the loop coordinate
// directly.  The radius of a self-folded triangle never contributes its own
// raw coordinate.
inline std::vector<long long> shear(const TaggedTriangulation& TT,
                                    const Laminate& lam) {
  const IdealTriangulation& B = TT.base;
  Laminate lp = lam;
  for (int p : TT.flipped) lp = spiral_flip(B, lp, p);
  auto raw = raw_shear(B, lp);
  std::map<int, std::map<int, long long>> flip_cache;
  std::vector<long long> out(TT.n_arcs(), 0);
  for (int j = 0; j < TT.n_arcs(); ++j) {
    const int s = TT.arc_base[j];
    if (B.self_folded_radius(s)) {
      const int loop = B.radius_to_loop.at(s);
      const int pe = enclosed_puncture(B, loop);
      auto it = flip_cache.find(pe);
      if (it == flip_cache.end())
        it = flip_cache.emplace(pe, raw_shear(B, spiral_flip(B, lp, pe)))
                 .first;
      auto f = it->second.find(loop);
      out[j] = f == it->second.end() ? 0 : f->second;
    } else {
      auto f = raw.find(s);
      out[j] = f == raw.end() ? 0 : f->second;
    }
  }
  return out;
}

// Sum of all shear coordinates over a triangulation without self-folded
// triangles.  Always one of -1, 0, +1; for the elementary laminate of an
// arc joining two punctures it is exactly -1 (plain-plain), +1
// (notched-notched) or 0 (mixed tags).
inline long long sum_shear(const IdealTriangulation& T, const Laminate& lam) {
  require(T.loop_to_radius.empty(), errc::SelfFoldedPresent,
          "sum_shear requires a triangulation without self-folded triangles");
  auto b = shear(plain_tagged(T), lam);
  long long s = 0;
  for (long long x : b) s += x;
  if (s < -1 || s > 1) throw std::logic_error("sum_shear out of range");
  return s;
}

// ===========================================================================
// Elementary laminates of tagged arcs
// ===========================================================================

namespace detail {

// Arcs a boundary end sweeps while displaced from its marked point to the
// outgoing boundary side: the spokes strictly between the curve's corner and
// that side, ordered from the boundary inward.
inline std::vector<int> boundary_shift(const Tri& T, Half corner) {
  const int v = T.head(corner);
  const auto& f = T.fan(v);
  size_t j = 0;
  while (j < f.size() && f[j] != corner) ++j;
  if (j == f.size()) throw std::logic_error("corner not in fan");
  auto F = T.fan_edges(v);  // [incoming boundary, spokes..., outgoing boundary]
  std::vector<int> out;
  for (size_t t = F.size() - 2; t > j; --t) out.push_back(F[t]);
  return out;
}

}  // namespace detail

// Elementary laminate of a tagged arc of T: the arc displaced off itself,
// its puncture ends spiralling cw when plain and ccw when notched, its
// boundary ends attached to the boundary side past their marked point.
inline Laminate elementary(const IdealTriangulation& T, const TaggedArc& a) {
  using namespace detail;
  auto it = T.side_index.find(a.underlying_arc);
  if (it == T.side_index.end())
    fail(errc::WordRequired, "arc '" + a.underlying_arc +
                                 "' is not an arc of this triangulation; "
                                 "supply its crossing word instead");
  const int d = it->second;
  require(T.is_internal(d), errc::NotATraversal,
          "boundary sides have no elementary laminate");
  require(!T.self_folded_loop(d), errc::IllegalTag,
          "the loop of a self-folded triangle is presented by tagging its "
          "radius");
  const auto ve = T.side_ends(d);
  const Half g0 = T.slots(d)[0];
  const std::array<Half, 2> u = {g0, T.twin(g0)};  // outgoing halfedges

  require(ve[0] != ve[1] || a.tag_at_end[0] == a.tag_at_end[1],
          errc::IllegalTag, "the two ends of a loop carry the same tag");

  Laminate l;
  std::array<std::vector<int>, 2> block{};
  for (int e = 0; e < 2; ++e) {
    const int v = ve[e];
    if (T.is_puncture(v)) {
      l.ends[e] = spiral_end(
          v, a.tag_at_end[e] == Tag::plain ? SpiralDir::cw : SpiralDir::ccw);
    } else {
      require(a.tag_at_end[e] == Tag::plain, errc::IllegalTag,
              "arcs may be notched only at punctures");
      l.ends[e] = boundary_end(T.side(T.outgoing_boundary_slot(v)));
      block[e] = boundary_shift(T, T.twin(u[e]));
    }
  }
  l.word = block[0];  // boundary-inward order for the starting end
  const bool sp0 = l.ends[0].spiral, sp1 = l.ends[1].spiral;
  if (!sp0 && !sp1)
    l.word.push_back(d);  // opposite flanks force one crossing
  else if (sp0 && sp1)
    l.via = d;  // spiral-to-spiral copies run alongside the arc
  for (auto rit = block[1].rbegin(); rit != block[1].rend(); ++rit)
    l.word.push_back(*rit);
  return make_laminate(T, l);
}

// An arc given by its own taut crossing word (for arcs outside T).
struct ArcWord {
  std::array<std::string, 2> endpoints;  // marked point names (start, finish)
  std::vector<std::string> word;         // arcs of T crossed, in order
  std::array<Tag, 2> tags{Tag::plain, Tag::plain};
};

inline Laminate elementary(const IdealTriangulation& T, const ArcWord& aw) {
  using namespace detail;
  const int v0 = T.vertex_id(aw.endpoints[0]);
  const int v1 = T.vertex_id(aw.endpoints[1]);
  require(v0 != v1 || aw.tags[0] == aw.tags[1], errc::IllegalTag,
          "the two ends of a loop carry the same tag");
  require(!aw.word.empty(), errc::WordRequired,
          "an arc outside the triangulation needs a non-empty crossing word");
  std::vector<int> w;
  for (const auto& nm : aw.word) {
    const int s = T.side_id(nm);
    require(T.is_internal(s), errc::NotATraversal,
            "arcs cross only interior arcs");
    w.push_back(s);
  }
  // corner-anchored resolution of the arc itself (inputs must be reduced)
  const size_t k = w.size();
  std::vector<Hop> seg(k);
  Half fin = -1;
  std::function<bool(size_t)> rec = [&](size_t i) -> bool {
    if (i == k) {
      Half in = T.twin(seg[k - 1].out);
      if (in < 0 || T.head(Tri::next(in)) != v1) return false;
      fin = in;
      return true;
    }
    Half in = -1;
    if (i > 0) {
      in = T.twin(seg[i - 1].out);
      if (in < 0) return false;
    }
    for (Half g : T.slots(w[i])) {
      if (g < 0) continue;
      if (i > 0 && (T.tri_of(g) != T.tri_of(in) || g == in)) continue;
      if (i == 0 && T.head(Tri::next(g)) != v0) continue;
      seg[i] = {in, g};
      if (rec(i + 1)) return true;
    }
    return false;
  };
  require(rec(0), errc::NotATraversal,
          "arc word does not resolve to a taut arc between its endpoints");

  Laminate l;
  std::array<std::vector<int>, 2> block{};
  const std::array<Half, 2> corner = {Tri::next(seg[0].out), Tri::next(fin)};
  for (int e = 0; e < 2; ++e) {
    const int v = e == 0 ? v0 : v1;
    if (T.is_puncture(v)) {
      l.ends[e] = spiral_end(
          v, aw.tags[e] == Tag::plain ? SpiralDir::cw : SpiralDir::ccw);
    } else {
      require(aw.tags[e] == Tag::plain, errc::IllegalTag,
              "arcs may be notched only at punctures");
      l.ends[e] = boundary_end(T.side(T.outgoing_boundary_slot(v)));
      block[e] = boundary_shift(T, corner[e]);
    }
  }
  l.word = block[0];
  l.word.insert(l.word.end(), w.begin(), w.end());
  for (auto rit = block[1].rbegin(); rit != block[1].rend(); ++rit)
    l.word.push_back(*rit);
  return make_laminate(T, l);
}

// ===========================================================================
// Classification
// ===========================================================================

enum class CurveClass { Elementary, Exceptional, Closed };

struct Classification {
  CurveClass kind = CurveClass::Elementary;
  std::optional<TaggedArc> arc;  // elementary curves recognized as e(arc)
  std::optional<std::pair<Laminate, Laminate>> split;  // (cw piece, ccw piece)
  int enclosed = -1;             // exceptional: the puncture enclosed
};

namespace detail {

// Certify that `cur` (oriented with q on its left) encircles puncture q:
// after a minimal prefix it enters a triangle with a q-corner, the middle
// crossings are exactly a ccw winding walk around q, and symmetrically on
// the reversed curve.  The split replaces the curve by two pieces, each
// keeping one original end and spiralling into q (ccw for the piece keeping
// end 0, cw for the one keeping end 1); the split is accepted only when
// shear coordinates are additive across it.
inline std::optional<std::pair<Laminate, Laminate>> verify_exceptional(
    const Tri& T, const Laminate& cur, int q) {
  const size_t k = cur.word.size();
  const Laminate rev = reversed(cur);
  auto rs_f = resolve_all(T, cur);
  auto rs_r = resolve_all(T, rev);

  auto prefix_of = [&](const Laminate& L, const std::vector<Hop>& sg)
      -> std::optional<std::pair<size_t, std::vector<Half>>> {
    for (size_t t = 0; t <= L.word.size(); ++t) {
      if (t == 0) {
        const int tri = T.tri_of(sg[0].out);
        std::vector<Half> seeds;
        for (Half h = 3 * tri; h < 3 * tri + 3; ++h)
          if (T.head(h) == q) seeds.push_back(h);
        if (!seeds.empty()) return std::make_pair(t, seeds);
      } else {
        const Half entry = T.twin(sg[t - 1].out);
        if (entry < 0) return std::nullopt;
        const Half w = wedge_corner(T, entry, q);
        if (w >= 0) return std::make_pair(t, std::vector<Half>{w});
      }
    }
    return std::nullopt;
  };

  auto middle_matches = [&](const std::vector<Hop>& sg, size_t j, size_t mid,
                            const std::vector<Half>& seeds, SpiralDir d) {
    if (mid == 0) return true;
    for (Half w : seeds) {
      auto xs = winding_slots(T, w, d, static_cast<int>(mid));
      bool all = true;
      for (size_t t = 0; t < mid; ++t)
        if (sg[j + t].out != xs[t]) {
          all = false;
          break;
        }
      if (all) return true;
    }
    return false;
  };

  // Build one split piece: the prefix of L's word plus a spiral into q.
  auto build_piece = [&](const Laminate& L, size_t j, SpiralDir qd,
                         const std::vector<Half>& seeds)
      -> std::optional<Laminate> {
    Laminate piece;
    piece.word.assign(L.word.begin(), L.word.begin() + j);
    piece.ends = {L.ends[0], spiral_end(q, qd)};
    if (j == 0 && L.ends[0].spiral) {
      // no crossings: the piece hugs the arc between its two punctures
      const int p = L.ends[0].at;
      int via = -1;
      for (Half seed : seeds) {
        if (T.head(Tri::prev(seed)) == p)
          via = T.side(seed);
        else if (T.head(Tri::next(seed)) == p)
          via = T.side(Tri::next(seed));
        if (via >= 0) break;
      }
      if (via < 0 || !T.is_internal(via)) return std::nullopt;
      piece.via = via;
    }
    try {
      return make_laminate(T, piece);
    } catch (const error&) {
      return std::nullopt;
    }
  };

  for (const auto& rf : rs_f) {
    auto pf = prefix_of(cur, rf.seg);
    if (!pf) continue;
    const auto& [j, seeds_f] = *pf;
    for (const auto& rr : rs_r) {
      auto pr = prefix_of(rev, rr.seg);
      if (!pr) continue;
      const auto& [j2, seeds_r] = *pr;
      if (j + j2 > k) continue;
      const size_t mid = k - j - j2;
      if (!middle_matches(rf.seg, j, mid, seeds_f, SpiralDir::ccw)) continue;
      if (!middle_matches(rr.seg, j2, mid, seeds_r, SpiralDir::cw)) continue;
      auto piece_q = build_piece(cur, j, SpiralDir::ccw, seeds_f);
      auto piece_p = build_piece(rev, j2, SpiralDir::cw, seeds_r);
      if (!piece_q || !piece_p) continue;
      // additivity of shear coordinates certifies the split
      auto whole = raw_shear(T, cur);
      auto sum = raw_shear(T, *piece_q);
      for (auto [s, v] : raw_shear(T, *piece_p)) sum[s] += v;
      drop_zeros(sum);
      if (whole != sum) continue;
      return std::make_pair(*piece_p, *piece_q);
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Try to recognize a laminate as the elementary laminate of a tagged arc
// over T (including conjugate-pair radii with either tag at the enclosed
// puncture).
inline std::optional<TaggedArc> match_elementary(const IdealTriangulation& T,
                                                 const Laminate& lam) {
  for (int s : T.internal_sides()) {
    if (T.self_folded_loop(s)) continue;
    const auto ends = T.side_ends(s);
    for (int t0 = 0; t0 < 2; ++t0) {
      if (t0 && !T.is_puncture(ends[0])) continue;
      for (int t1 = 0; t1 < 2; ++t1) {
        if (t1 && !T.is_puncture(ends[1])) continue;
        TaggedArc a{T.side_name[s],
                    {t0 ? Tag::notched : Tag::plain,
                     t1 ? Tag::notched : Tag::plain}};
        try {
          if (elementary(T, a) == lam) return a;
        } catch (const error&) {
        }
      }
    }
  }
  return std::nullopt;
}

inline Classification classify(const IdealTriangulation& T,
                               const Laminate& lam) {
  using namespace detail;
  Classification out;
  if (lam.closed) {
    out.kind = CurveClass::Closed;
    return out;
  }
  const EndPoint &e0 = lam.ends[0], &e1 = lam.ends[1];
  const bool gate =
      (!e0.spiral && !e1.spiral && e0.at == e1.at) ||
      (e0.spiral && e1.spiral && e0.at == e1.at && e0.dir == e1.dir);
  if (!gate) {
    out.arc = match_elementary(T, lam);
    return out;
  }

  if (lam.word.empty()) {
    // the gate forces a double spiral here (boundary-boundary hugs are
    // forbidden); a hug of a self-folded loop encircles the enclosed
    // puncture, and its split hugs the radius from both sides
    if (lam.via >= 0 && T.self_folded_loop(lam.via)) {
      const int q = enclosed_puncture(T, lam.via);
      const int r = T.loop_to_radius.at(lam.via);
      std::optional<Laminate> a, b;
      try {
        Laminate t;
        t.ends = {e0, spiral_end(q, SpiralDir::cw)};
        t.via = r;
        a = make_laminate(T, t);
        t.ends[1].dir = SpiralDir::ccw;
        b = make_laminate(T, t);
      } catch (const error&) {
      }
      if (a && b) {
        auto whole = raw_shear(T, lam);
        auto sum = raw_shear(T, *a);
        for (auto [s, v] : raw_shear(T, *b)) sum[s] += v;
        drop_zeros(sum);
        if (whole == sum) {
          out.kind = CurveClass::Exceptional;
          out.enclosed = q;
          out.split = std::make_pair(*a, *b);
          return out;
        }
      }
    }
    out.arc = match_elementary(T, lam);
    return out;
  }

  // one-sidedness votes: a crossing whose exit slot has q at its head keeps
  // q on the left; at its tail, on the right
  auto res = try_resolve(T, lam);
  if (!res) throw std::logic_error("classify: normal form does not resolve");
  std::map<int, int> votes;  // puncture -> +1 left / -1 right / 0 mixed
  auto add = [&](int v, int sgn) {
    if (!T.is_puncture(v)) return;
    auto [it, fresh] = votes.try_emplace(v, sgn);
    if (!fresh && it->second != sgn) it->second = 0;
  };
  for (size_t i = 0; i < lam.word.size(); ++i) {
    const Half g = res->seg[i].out;
    const int hq = T.head(g), tq = T.tail(g);
    if (hq == tq) {
      add(hq, 0);
    } else {
      add(hq, +1);
      add(tq, -1);
    }
  }
  for (auto [q, sgn] : votes) {
    if (sgn == 0) continue;
    const Laminate oriented = sgn > 0 ? lam : reversed(lam);
    if (auto sp = verify_exceptional(T, oriented, q)) {
      out.kind = CurveClass::Exceptional;
      out.enclosed = q;
      out.split = sp;
      return out;
    }
  }
  out.arc = match_elementary(T, lam);
  return out;
}

// Classified multiset of laminate curves.
struct Decomposition {
  std::vector<Laminate> elementary_part, exceptional_part, closed_part;
  std::vector<std::array<Laminate, 2>> splits;  // per exceptional curve
  std::vector<std::optional<TaggedArc>> arcs;   // per elementary curve

  // the open curves with every exceptional one replaced by its split pair
  std::vector<Laminate> split_open() const {
    std::vector<Laminate> out = elementary_part;
    for (const auto& s : splits) {
      out.push_back(s[0]);
      out.push_back(s[1]);
    }
    return out;
  }
};

inline Decomposition decompose(const IdealTriangulation& T,
                               const std::vector<Laminate>& ls) {
  Decomposition d;
  for (const Laminate& l : ls) {
    auto c = classify(T, l);
    switch (c.kind) {
      case CurveClass::Closed:
        d.closed_part.push_back(l);
        break;
      case CurveClass::Exceptional:
        d.exceptional_part.push_back(l);
        d.splits.push_back({c.split->first, c.split->second});
        break;
      case CurveClass::Elementary:
        d.elementary_part.push_back(l);
        d.arcs.push_back(c.arc);
        break;
    }
  }
  return d;
}

// ===========================================================================
// Dehn twists along closed laminates
// ===========================================================================

namespace detail {

// The twisting corridor: an annular strip around the core, one cell per
// core hop.  Each cell has two wall slots (enter/exit, crossed by the core)
// and one door slot; the door lies left of the core's travel exactly when
// the core turns right there.  twin(exit_i) = enter_{i+1} cyclically.
struct Cell {
  int tri;
  Half enter, exit, door;
  bool left;
};

inline std::vector<Cell> corridor(const Tri& T, const Laminate& core) {
  auto res = try_resolve(T, core);
  if (!res) throw std::logic_error("corridor: core does not resolve");
  std::vector<Cell> cells;
  for (const Hop& h : res->seg) {
    const Half door = 3 * T.tri_of(h.in) + (3 - h.in % 3 - h.out % 3);
    cells.push_back(
        {T.tri_of(h.in), h.in, h.out, door, turn_of(h) == Turn::R});
  }
  return cells;
}

// A maximal stretch of the path inside the corridor, entered and left
// through doors.  dP is the unrolled cell displacement between entry and
// exit; `left` flags name the door sides.
struct Run {
  size_t a = 0, b = 0;  // hop index range [a, b], inclusive
  int cell_in = -1;
  long long dP = 0;
  bool in_left = false, out_left = false;

  friend bool operator==(const Run& x, const Run& y) {
    return x.a == y.a && x.b == y.b && x.cell_in == y.cell_in &&
           x.dP == y.dP && x.in_left == y.in_left && x.out_left == y.out_left;
  }
};

struct CorridorScan {
  std::vector<Run> runs;
  PathM path;              // possibly rotated (closed curves)
  bool all_inside = false; // closed curve parallel to the core: unchanged
};

// Track the path through the corridor.  Entries through a door are
// anchored; entries through a wall are consistent only inside the unrolled
// spiral zones (the deepest wraps may begin inside the corridor) and such
// truncated excursions must stay inside their zone.  When several cells
// share a door slot, all interpretations are followed; they must agree on
// the resulting runs.
inline CorridorScan corridor_scan(const Tri& T, const std::vector<Cell>& cells,
                                  PathM pm) {
  const int r = static_cast<int>(cells.size());
  std::map<Half, std::vector<int>> door_of;
  std::map<Half, std::vector<std::pair<int, bool>>> wall_of;  // (cell, fwd)
  for (int i = 0; i < r; ++i) {
    door_of[cells[i].door].push_back(i);
    wall_of[cells[i].enter].push_back({i, true});
    wall_of[cells[i].exit].push_back({i, false});
  }
  auto is_role = [&](Half h) {
    return door_of.count(h) > 0 || wall_of.count(h) > 0;
  };

  if (pm.cyclic) {
    size_t anchor = pm.hops.size();
    for (size_t i = 0; i < pm.hops.size(); ++i)
      if (!is_role(pm.hops[i].in)) {
        anchor = i;
        break;
      }
    if (anchor == pm.hops.size()) {
      // no hop demonstrably outside: accept only a curve that stays inside
      // (a parallel copy of the core), anything else is ambiguous
      for (int c0 = 0; c0 < r; ++c0) {
        if (cells[c0].tri != T.tri_of(pm.hops[0].in)) continue;
        int c = c0;
        bool ok = true;
        for (const Hop& h : pm.hops) {
          if (h.out == cells[c].exit) {
            c = (c + 1) % r;
          } else if (h.out == cells[c].enter) {
            c = (c - 1 + r) % r;
          } else {
            ok = false;
            break;
          }
        }
        if (ok) {
          CorridorScan cs;
          cs.path = std::move(pm);
          cs.all_inside = true;
          return cs;
        }
      }
      fail(errc::CorridorAmbiguous,
           "closed curve weaves through the corridor without leaving it");
    }
    std::rotate(pm.hops.begin(), pm.hops.begin() + anchor, pm.hops.end());
  }

  const size_t N = pm.hops.size();
  auto in_zone = [&](size_t i) {
    return !pm.cyclic && (i < static_cast<size_t>(pm.lead) ||
                          i + static_cast<size_t>(pm.tail) >= N);
  };

  struct Branch {
    int cell = -1;       // -1 = outside
    long long pos = 0;   // unrolled position within the current run
    size_t rstart = 0;
    int rcell = -1;
    bool rleft = false, rtrunc = false;
    std::vector<Run> runs;
  };
  std::vector<Branch> states{Branch{}};

  auto step_out = [&](Branch& s, size_t i, const Hop& h) -> bool {
    const Cell& C = cells[s.cell];
    if (h.out == C.exit) {
      ++s.pos;
      s.cell = (s.cell + 1) % r;
      return true;
    }
    if (h.out == C.enter) {
      --s.pos;
      s.cell = (s.cell - 1 + r) % r;
      return true;
    }
    if (h.out == C.door) {
      if (s.rtrunc) {
        if (!in_zone(i)) return false;  // truncated run escaped its zone
      } else {
        s.runs.push_back(
            {s.rstart, i, s.rcell, s.pos, s.rleft, C.left});
      }
      s.cell = -1;
      return true;
    }
    throw std::logic_error("corridor transition outside the cell");
  };

  for (size_t i = 0; i < N; ++i) {
    const Hop& h = pm.hops[i];
    std::vector<Branch> next;
    for (Branch& s : states) {
      if (s.cell >= 0) {
        if (step_out(s, i, h)) next.push_back(std::move(s));
        continue;
      }
      auto di = door_of.find(h.in);
      auto wi = wall_of.find(h.in);
      if (di == door_of.end() && wi == wall_of.end()) {
        next.push_back(std::move(s));  // stays outside
        continue;
      }
      if (di != door_of.end()) {
        for (int c : di->second) {
          Branch nb = s;
          nb.cell = c;
          nb.pos = 0;
          nb.rstart = i;
          nb.rcell = c;
          nb.rleft = cells[c].left;
          nb.rtrunc = false;
          if (step_out(nb, i, h)) next.push_back(std::move(nb));
        }
      }
      if (wi != wall_of.end() && in_zone(i)) {
        for (auto [c, fwd] : wi->second) {
          (void)fwd;
          Branch nb = s;
          nb.cell = c;
          nb.pos = 0;
          nb.rstart = i;
          nb.rcell = c;
          nb.rleft = false;
          nb.rtrunc = true;
          if (step_out(nb, i, h)) next.push_back(std::move(nb));
        }
      }
      // a wall crossing from outside with no zone excuse: branch dies
    }
    states = std::move(next);
    if (states.empty())
      fail(errc::CorridorAmbiguous,
           "curve crosses a corridor wall without a matching corridor state");
    if (states.size() > 4096)
      fail(errc::CorridorAmbiguous, "corridor interpretation explosion");
  }

  std::vector<const Branch*> good;
  for (const Branch& s : states) {
    if (s.cell < 0) {
      good.push_back(&s);
      continue;
    }
    if (pm.cyclic) continue;  // must return to the outside anchor
    // terminal in-corridor stretch: fine only inside the tail spiral zone
    if (s.rstart + static_cast<size_t>(pm.tail) >= N && !s.rtrunc)
      good.push_back(&s);
    else if (s.rtrunc && in_zone(s.rstart) && in_zone(N - 1))
      good.push_back(&s);
  }
  if (good.empty())
    fail(errc::CorridorAmbiguous, "no consistent corridor interpretation");
  for (size_t i = 1; i < good.size(); ++i)
    if (good[i]->runs != good[0]->runs)
      fail(errc::CorridorAmbiguous,
           "corridor interpretations disagree on the crossing runs");

  CorridorScan cs;
  cs.runs = good[0]->runs;
  cs.path = std::move(pm);
  return cs;
}

}  // namespace detail

// Geometric intersection number of a laminate with a closed core, counted
// as the number of side-to-side passes through the twisting corridor.
inline long long intersection_count(const IdealTriangulation& T,
                                    const Laminate& core,
                                    const Laminate& lam) {
  using namespace detail;
  require(core.closed, errc::NotClosed,
          "intersection counts are taken against closed laminates");
  auto cells = corridor(T, core);
  auto pm = materialize(T, lam, 2);
  if (!pm) throw std::logic_error("intersection_count: not a normal form");
  auto cs = corridor_scan(T, cells, std::move(*pm));
  long long n = 0;
  for (const auto& run : cs.runs)
    if (run.in_left != run.out_left) ++n;
  return n;
}

// m-fold Dehn twist of `lam` along the closed laminate `core` (negative m
// twists the other way).  Every side-to-side pass through the corridor is
// rerouted to exit m·(corridor length) cells further around the annular
// corridor.  The twist fixes the wall a pass enters through and displaces
// its exit, so the displacement sign depends on the entry side: only then
// does the surgery describe one fixed twist of the surface no matter which
// direction a stored path happens to traverse the corridor.  Same-side
// excursions are isotoped off the core and kept unchanged.
inline Laminate dehn_twist(const IdealTriangulation& T, const Laminate& core,
                           const Laminate& lam, long long m) {
  using namespace detail;
  require(core.closed, errc::NotClosed,
          "Dehn twists run along closed laminates");
  if (m == 0) return lam;
  auto cells = corridor(T, core);
  const int r = static_cast<int>(cells.size());
  auto pm = materialize(T, lam, 2);
  if (!pm) throw std::logic_error("dehn_twist: laminate not in normal form");
  auto cs = corridor_scan(T, cells, std::move(*pm));
  if (cs.all_inside) return lam;

  std::vector<const Run*> surg;
  for (const auto& run : cs.runs)
    if (run.in_left != run.out_left) surg.push_back(&run);
  if (surg.empty()) return lam;

  std::vector<Hop> nh;
  size_t at = 0, si = 0;
  const auto& hops = cs.path.hops;
  while (at < hops.size()) {
    if (si < surg.size() && surg[si]->a == at) {
      const Run& run = *surg[si];
      const long long target = run.dP + (run.in_left ? m : -m) * r;
      Half cur_in = cells[run.cell_in].door;
      long long pos = 0;
      int ci = run.cell_in;
      while (pos != target) {
        if (target > pos) {
          nh.push_back({cur_in, cells[ci].exit});
          ci = (ci + 1) % r;
          cur_in = cells[ci].enter;
          ++pos;
        } else {
          nh.push_back({cur_in, cells[ci].enter});
          ci = (ci - 1 + r) % r;
          cur_in = cells[ci].exit;
          --pos;
        }
      }
      nh.push_back({cur_in, cells[ci].door});
      at = run.b + 1;
      ++si;
    } else {
      nh.push_back(hops[at]);
      ++at;
    }
  }

  PathM np;
  np.hops = std::move(nh);
  np.cyclic = cs.path.cyclic;
  Laminate nl;
  nl.closed = lam.closed;
  nl.word = crossings_of(T, np);
  if (!lam.closed) nl.ends = lam.ends;
  return make_laminate(T, nl);
}

// Least twist power from which the shear coordinates of T^m(lam) grow
// linearly, together with the stable growth (which must equal the
// intersection count times the core's shear vector).
struct Stabilization {
  int m_stable = 0;
  std::vector<long long> slope;
};

inline Stabilization twist_stabilization(const TaggedTriangulation& TT,
                                         const Laminate& core,
                                         const Laminate& lam, int m_max) {
  require(m_max >= 2, errc::NoStabilization,
          "stabilization needs at least two twist steps");
  const IdealTriangulation& B = TT.base;
  std::vector<std::vector<long long>> b;
  Laminate cur = lam;
  b.push_back(shear(TT, cur));
  for (int m = 1; m <= m_max; ++m) {
    cur = dehn_twist(B, core, cur, 1);
    b.push_back(shear(TT, cur));
  }
  const int n = static_cast<int>(b[0].size());
  auto diff = [&](int m) {
    std::vector<long long> d(n);
    for (int i = 0; i < n; ++i) d[i] = b[m + 1][i] - b[m][i];
    return d;
  };
  const std::vector<long long> last = diff(m_max - 1);
  int mp = m_max - 1;
  while (mp > 0 && diff(mp - 1) == last) --mp;
  require(mp <= m_max - 2, errc::NoStabilization,
          "shear differences do not stabilize within the twist budget");
  const long long cnt = intersection_count(B, core, lam);
  const auto bc = shear(TT, core);
  for (int i = 0; i < n; ++i)
    if (last[i] != cnt * bc[i])
      throw std::logic_error("twist stabilization: wrong stable slope");
  return {mp, last};
}

}  // namespace lamina
