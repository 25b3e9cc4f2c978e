#pragma once
// Marked surfaces, ideal triangulations (halfedge model), tagged
// triangulations in normal form (ideal base + flipped-puncture set),
// flips, tagged rotation, arc compatibility, and the quiver of a
// tagged triangulation.
//
// Halfedge conventions (used throughout the library):
//   * A triangulation is a list of counterclockwise side triples; slot
//     h = 3t+k is the k-th side of triangle t.  Interiors lie on the
//     LEFT of every halfedge, so head(h) = tail(next(h)).
//   * corner(h) is the corner of triangle t at head(h), between side(h)
//     and side(next(h)).
//   * The clockwise walk around a vertex is c(h) = twin(next(h)); its
//     inverse is prev(twin(h)).  Orbits of c are the corner fans:
//     cyclic at punctures, linear chains at boundary vertices.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lamina/common.hpp"
#include "lamina/quiver.hpp"

namespace lamina {

using Half = int;

// ---------------------------------------------------------------------------
// MarkedSurface
// ---------------------------------------------------------------------------

struct MarkedSurface {
  int genus = 0;
  std::vector<int> boundary;  // marked-point count per boundary component
  int punctures = 0;

  int boundary_marked() const {
    return std::accumulate(boundary.begin(), boundary.end(), 0);
  }
  int n_components_boundary() const { return static_cast<int>(boundary.size()); }

  // Arc/triangle counts of any ideal triangulation of this surface.
  int expected_arcs() const {
    return 6 * genus + 3 * n_components_boundary() + 3 * punctures +
           boundary_marked() - 6;
  }
  int expected_triangles() const {
    return 4 * genus + 2 * n_components_boundary() + 2 * punctures +
           boundary_marked() - 4;
  }

  // Rejects surfaces that carry no ideal triangulation or are excluded
  // from the theory (monogon with at most one puncture, unpunctured digon
  // or triangle, sphere with at most three punctures).
  void validate() const {
    require(genus >= 0, errc::IllegalSurface, "negative genus");
    require(punctures >= 0, errc::IllegalSurface, "negative puncture count");
    for (int m : boundary)
      require(m >= 1, errc::IllegalSurface,
              "boundary component without marked points");
    require(punctures + boundary_marked() >= 1, errc::IllegalSurface,
            "no marked points");
    const bool disk = (genus == 0 && boundary.size() == 1);
    if (disk && boundary[0] == 1 && punctures <= 1)
      fail(errc::IllegalSurface, "monogon with at most one puncture");
    if (disk && boundary[0] == 2 && punctures == 0)
      fail(errc::IllegalSurface, "unpunctured digon");
    if (disk && boundary[0] == 3 && punctures == 0)
      fail(errc::IllegalSurface, "unpunctured triangle");
    if (genus == 0 && boundary.empty() && punctures <= 3)
      fail(errc::IllegalSurface, "sphere with at most three punctures");
    require(expected_arcs() >= 1, errc::IllegalSurface,
            "surface admits no ideal triangulation with arcs");
  }

  bool operator==(const MarkedSurface& o) const {
    return genus == o.genus && boundary == o.boundary &&
           punctures == o.punctures;
  }
};

// ---------------------------------------------------------------------------
// IdealTriangulation
// ---------------------------------------------------------------------------

class IdealTriangulation {
 public:
  MarkedSurface surface;
  std::vector<std::string> side_name;            // side index -> name
  std::map<std::string, int> side_index;         // name -> side index
  std::vector<std::array<int, 3>> tri;           // triangle -> ccw side indices
  std::vector<std::array<std::string, 3>> triples;  // original (name) triples

  // Per-halfedge data (3 * n_triangles halfedges).
  std::vector<int> side_of;   // halfedge -> side index
  std::vector<Half> twin_;    // halfedge -> glued halfedge, -1 on boundary
  std::vector<int> head_;     // halfedge -> vertex at its corner

  // Per-side data.
  std::vector<std::array<Half, 2>> slots_;  // side -> halfedges ({h,-1} if boundary)
  std::vector<bool> boundary_side_;

  // Vertices (corner orbits).
  int n_vertices_ = 0;
  std::vector<bool> vertex_is_puncture_;
  std::vector<std::string> vertex_name_;     // "p0","p1",... / "v0","v1",...
  std::map<std::string, int> vertex_index;
  std::vector<std::vector<Half>> fan_;       // cw-ordered corner halfedges

  // Self-folded triangles: loop side -> radius side and back; the corner
  // halfedge sitting at the enclosed puncture.
  std::map<int, int> loop_to_radius, radius_to_loop;
  std::map<int, Half> p_corner_;  // keyed by loop side

  // --- halfedge helpers ----------------------------------------------------
  static Half next(Half h) { return h - h % 3 + (h + 1) % 3; }
  static Half prev(Half h) { return h - h % 3 + (h + 2) % 3; }
  int n_triangles() const { return static_cast<int>(tri.size()); }
  int n_halfedges() const { return 3 * n_triangles(); }
  int n_sides() const { return static_cast<int>(side_name.size()); }
  int side(Half h) const { return side_of[h]; }
  Half twin(Half h) const { return twin_[h]; }
  int head(Half h) const { return head_[h]; }
  int tail(Half h) const { return head_[prev(h)]; }
  int tri_of(Half h) const { return h / 3; }
  bool is_boundary(int s) const { return boundary_side_[s]; }
  bool is_internal(int s) const { return !boundary_side_[s]; }
  const std::array<Half, 2>& slots(int s) const { return slots_[s]; }
  bool is_puncture(int v) const { return vertex_is_puncture_[v]; }
  const std::vector<Half>& fan(int v) const { return fan_[v]; }
  bool self_folded_loop(int s) const { return loop_to_radius.count(s) > 0; }
  bool self_folded_radius(int s) const { return radius_to_loop.count(s) > 0; }

  // Endpoints of a side in its slot-0 direction: {tail, head}.
  std::array<int, 2> side_ends(int s) const {
    Half h = slots_[s][0];
    return {tail(h), head(h)};
  }

  int side_id(const std::string& name) const {
    auto it = side_index.find(name);
    require(it != side_index.end(), errc::ArcNotInTriangulation,
            "unknown side '" + name + "'");
    return it->second;
  }
  int vertex_id(const std::string& name) const {
    auto it = vertex_index.find(name);
    require(it != vertex_index.end(), errc::IllegalTag,
            "unknown marked point '" + name + "'");
    return it->second;
  }

  // Internal sides in index (lexicographic-name) order.
  std::vector<int> internal_sides() const {
    std::vector<int> out;
    for (int s = 0; s < n_sides(); ++s)
      if (is_internal(s)) out.push_back(s);
    return out;
  }

  // cw-ordered list of side-ends around a vertex.  A boundary vertex lists
  // the incoming boundary side, the interior arcs, then the outgoing
  // boundary side; a puncture lists one side per incident arc end.
  std::vector<int> fan_edges(int v) const {
    std::vector<int> out;
    const auto& f = fan_[v];
    if (!vertex_is_puncture_[v]) out.push_back(side(f.front()));
    for (Half h : f) out.push_back(side(next(h)));
    return out;
  }

  // For a boundary vertex: the halfedge of the outgoing boundary side
  // (its tail is v).
  Half outgoing_boundary_slot(int v) const {
    require(!vertex_is_puncture_[v], errc::IllegalSurface,
            "outgoing_boundary_slot on a puncture");
    return next(fan_[v].back());
  }

  // Next boundary side counterclockwise along its component.
  int next_boundary_side(int b) const {
    Half h = slots_[b][0];
    return side(outgoing_boundary_slot(head(h)));
  }

  static IdealTriangulation build(
      const MarkedSurface& s,
      const std::vector<std::array<std::string, 3>>& triples);
};

inline IdealTriangulation IdealTriangulation::build(
    const MarkedSurface& s,
    const std::vector<std::array<std::string, 3>>& triples) {
  s.validate();
  IdealTriangulation T;
  T.surface = s;
  T.triples = triples;

  require(static_cast<int>(triples.size()) == s.expected_triangles(),
          errc::WrongArcCount,
          "expected " + std::to_string(s.expected_triangles()) +
              " triangles, got " + std::to_string(triples.size()));

  // Side occurrence counts; each side of a surface occurs once (boundary)
  // or twice (internal arc).
  std::map<std::string, int> occ;
  for (const auto& t : triples)
    for (const auto& nm : t) {
      require(!nm.empty(), errc::NonManifoldGluing, "empty side name");
      ++occ[nm];
    }
  int internal = 0, boundary = 0;
  for (const auto& [nm, c] : occ) {
    require(c <= 2, errc::NonManifoldGluing,
            "side '" + nm + "' used " + std::to_string(c) + " times");
    (c == 2 ? internal : boundary)++;
  }
  require(internal == s.expected_arcs(), errc::WrongArcCount,
          "expected " + std::to_string(s.expected_arcs()) +
              " internal arcs, got " + std::to_string(internal));
  require(boundary == s.boundary_marked(), errc::WrongArcCount,
          "expected " + std::to_string(s.boundary_marked()) +
              " boundary sides, got " + std::to_string(boundary));

  // Dense indices, lexicographic by name (occ is already sorted).
  for (const auto& [nm, c] : occ) {
    T.side_index[nm] = static_cast<int>(T.side_name.size());
    T.side_name.push_back(nm);
    T.boundary_side_.push_back(c == 1);
  }

  const int nt = static_cast<int>(triples.size());
  T.tri.resize(nt);
  T.side_of.resize(3 * nt);
  T.slots_.assign(T.n_sides(), {-1, -1});
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) {
      int sd = T.side_index.at(triples[t][k]);
      T.tri[t][k] = sd;
      Half h = 3 * t + k;
      T.side_of[h] = sd;
      if (T.slots_[sd][0] < 0)
        T.slots_[sd][0] = h;
      else
        T.slots_[sd][1] = h;
    }
  T.twin_.assign(3 * nt, -1);
  for (int sd = 0; sd < T.n_sides(); ++sd)
    if (T.slots_[sd][1] >= 0) {
      T.twin_[T.slots_[sd][0]] = T.slots_[sd][1];
      T.twin_[T.slots_[sd][1]] = T.slots_[sd][0];
    }

  // Vertices: orbits of the clockwise corner walk c(h) = twin(next(h)).
  std::vector<int> parent(3 * nt);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Half h = 0; h < 3 * nt; ++h) {
    Half c = T.twin_[next(h)];
    if (c >= 0) parent[find(h)] = find(c);
  }
  std::map<int, int> rep_to_vertex;
  T.head_.assign(3 * nt, -1);
  for (Half h = 0; h < 3 * nt; ++h) {
    int r = find(h);
    auto [it, fresh] = rep_to_vertex.try_emplace(r, T.n_vertices_);
    if (fresh) ++T.n_vertices_;
    T.head_[h] = it->second;
  }

  // Corner fans.  A corner h is a boundary stop going counterclockwise if
  // side(h) is boundary (no inverse step), and going clockwise if
  // side(next(h)) is boundary.
  T.vertex_is_puncture_.assign(T.n_vertices_, true);
  std::vector<Half> chain_start(T.n_vertices_, -1);
  std::vector<Half> min_corner(T.n_vertices_, 3 * nt);
  std::vector<int> orbit_size(T.n_vertices_, 0);
  for (Half h = 0; h < 3 * nt; ++h) {
    int v = T.head_[h];
    ++orbit_size[v];
    min_corner[v] = std::min(min_corner[v], h);
    if (T.boundary_side_[T.side_of[h]]) {
      T.vertex_is_puncture_[v] = false;
      require(chain_start[v] == -1, errc::NonManifoldGluing,
              "two boundary chains at one vertex");
      chain_start[v] = h;
    }
    if (T.boundary_side_[T.side_of[next(h)]]) T.vertex_is_puncture_[v] = false;
  }
  T.fan_.assign(T.n_vertices_, {});
  for (int v = 0; v < T.n_vertices_; ++v) {
    Half h = T.vertex_is_puncture_[v] ? min_corner[v] : chain_start[v];
    require(h >= 0 && h < 3 * nt, errc::NonManifoldGluing,
            "boundary vertex without boundary chain");
    for (;;) {
      T.fan_[v].push_back(h);
      if (T.boundary_side_[T.side_of[next(h)]]) break;  // cw boundary stop
      h = T.twin_[next(h)];
      if (h == T.fan_[v].front() && T.vertex_is_puncture_[v]) break;
    }
    require(static_cast<int>(T.fan_[v].size()) == orbit_size[v],
            errc::NonManifoldGluing, "disconnected corner fan");
  }

  // Vertex census: puncture count, and marked points per boundary
  // component (as a multiset) must match the declared surface.
  int puncture_count = 0;
  for (int v = 0; v < T.n_vertices_; ++v)
    if (T.vertex_is_puncture_[v]) ++puncture_count;
  require(puncture_count == s.punctures, errc::WrongArcCount,
          "expected " + std::to_string(s.punctures) + " punctures, got " +
              std::to_string(puncture_count));

  {
    // Walk boundary cycles: from a boundary side b (slot h), the next
    // boundary side ccw is the outgoing side at head(h).
    std::set<int> seen;
    std::vector<int> cycle_sizes;
    for (int b = 0; b < T.n_sides(); ++b) {
      if (!T.boundary_side_[b] || seen.count(b)) continue;
      int sz = 0, cur = b;
      do {
        seen.insert(cur);
        ++sz;
        Half h = T.slots_[cur][0];
        int v = T.head_[h];
        cur = T.side_of[next(T.fan_[v].back())];
      } while (cur != b);
      cycle_sizes.push_back(sz);
    }
    std::vector<int> want = s.boundary;
    std::sort(want.begin(), want.end());
    std::sort(cycle_sizes.begin(), cycle_sizes.end());
    require(cycle_sizes == want, errc::WrongArcCount,
            "boundary components/marked points do not match declaration");
  }

  // Euler characteristic (defensive; implied by the counts above).
  {
    int V = T.n_vertices_, E = T.n_sides(), F = nt;
    int chi = 2 - 2 * s.genus - s.n_components_boundary();
    require(V - E + F == chi, errc::WrongArcCount,
            "Euler characteristic mismatch");
  }

  // Connectivity (the counts alone cannot rule out a disjoint union).
  {
    std::vector<bool> vis(nt, false);
    std::vector<int> stack{0};
    vis[0] = true;
    int reached = 1;
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        Half tw = T.twin_[3 * t + k];
        if (tw >= 0 && !vis[tw / 3]) {
          vis[tw / 3] = true;
          ++reached;
          stack.push_back(tw / 3);
        }
      }
    }
    require(reached == nt, errc::IllegalSurface,
            "triangulation is disconnected");
  }

  // Deterministic vertex names: punctures "p0","p1",... and boundary
  // marked points "v0","v1",..., each ordered by minimal corner halfedge.
  {
    std::vector<int> punct, bdry;
    for (int v = 0; v < T.n_vertices_; ++v)
      (T.vertex_is_puncture_[v] ? punct : bdry).push_back(v);
    auto by_min = [&](int a, int b) { return min_corner[a] < min_corner[b]; };
    std::sort(punct.begin(), punct.end(), by_min);
    std::sort(bdry.begin(), bdry.end(), by_min);
    T.vertex_name_.assign(T.n_vertices_, "");
    for (size_t i = 0; i < punct.size(); ++i)
      T.vertex_name_[punct[i]] = "p" + std::to_string(i);
    for (size_t i = 0; i < bdry.size(); ++i)
      T.vertex_name_[bdry[i]] = "v" + std::to_string(i);
    for (int v = 0; v < T.n_vertices_; ++v)
      T.vertex_index[T.vertex_name_[v]] = v;
  }

  // Self-folded triangles: a repeated side is the radius, the third side
  // the loop; the corner between the two radius slots sits at the
  // enclosed puncture.
  for (int t = 0; t < nt; ++t) {
    const auto& tr = T.tri[t];
    int rep = -1;
    if (tr[0] == tr[1] || tr[1] == tr[2] || tr[2] == tr[0]) {
      rep = (tr[0] == tr[1] || tr[0] == tr[2]) ? tr[0] : tr[1];
      int loop = tr[0] ^ tr[1] ^ tr[2] ^ rep ^ rep;
      for (int k = 0; k < 3; ++k) loop = (tr[k] != rep) ? tr[k] : loop;
      require(T.is_internal(loop) && T.is_internal(rep), errc::IllegalSurface,
              "self-folded triangle touching the boundary");
      T.loop_to_radius[loop] = rep;
      T.radius_to_loop[rep] = loop;
      Half hp = -1;
      for (int k = 0; k < 3; ++k) {
        Half h = 3 * t + k;
        if (T.side_of[h] == rep && T.side_of[next(h)] == rep) hp = h;
      }
      T.p_corner_[loop] = hp;
      int p = T.head_[hp];
      require(T.vertex_is_puncture_[p] && T.fan_[p].size() == 1,
              errc::NonManifoldGluing, "malformed self-folded triangle");
    }
  }
  return T;
}

// The puncture enclosed by a self-folded loop side, or -1.
inline int enclosed_puncture(const IdealTriangulation& T, int loop_side) {
  auto it = T.p_corner_.find(loop_side);
  return it == T.p_corner_.end() ? -1 : T.head(it->second);
}

inline bool is_enclosed_puncture(const IdealTriangulation& T, int v) {
  for (const auto& [loop, hp] : T.p_corner_)
    if (T.head(hp) == v) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Tagged arcs and tagged triangulations
// ---------------------------------------------------------------------------

enum class Tag : std::uint8_t { plain, notched };

inline const char* tag_name(Tag t) { return t == Tag::plain ? "plain" : "notched"; }
inline Tag parse_tag(const std::string& s) {
  if (s == "plain") return Tag::plain;
  if (s == "notched") return Tag::notched;
  fail(errc::IllegalTag, "unknown tag '" + s + "'");
}
inline Tag flip_tag(Tag t) { return t == Tag::plain ? Tag::notched : Tag::plain; }

// A tagged arc described explicitly: an underlying ideal arc (which must
// never cut out a once-punctured monogon) plus a tag at each end, in the
// underlying arc's (tail, head) end order.
struct TaggedArc {
  std::string underlying_arc;
  std::array<Tag, 2> tag_at_end{Tag::plain, Tag::plain};
};

struct TagsSpec {
  std::vector<std::string> flipped_punctures;
  std::map<std::string, std::array<std::string, 2>> arc_tags;
};

class TaggedTriangulation {
 public:
  IdealTriangulation base;
  std::set<int> flipped;  // puncture vertices with inverted tags (never enclosed)
  std::vector<std::string> arc_id;  // position -> stable tagged-arc identifier
  std::vector<int> arc_base;        // position -> base side index
  std::vector<std::pair<std::string, std::string>> lineage;  // (child, parent)
  int fresh_counter = 0;

  int n_arcs() const { return static_cast<int>(arc_id.size()); }

  int position_of(const std::string& id) const {
    for (int i = 0; i < n_arcs(); ++i)
      if (arc_id[i] == id) return i;
    fail(errc::ArcNotInTriangulation, "no tagged arc '" + id + "'");
  }
  int position_of_base(int side) const {
    for (int i = 0; i < n_arcs(); ++i)
      if (arc_base[i] == side) return i;
    fail(errc::ArcNotInTriangulation,
         "no tagged arc over side '" + base.side_name[side] + "'");
  }

  // Underlying ideal arc of the tagged arc at a position (conjugate pairs
  // share the radius as underlying arc).
  int underlying_side(int pos) const {
    int s = arc_base[pos];
    auto it = base.loop_to_radius.find(s);
    return it == base.loop_to_radius.end() ? s : it->second;
  }

  // Tags of the tagged arc at a position, in the underlying arc's
  // (tail, head) end order.
  std::array<Tag, 2> tags_at(int pos) const {
    int s = arc_base[pos];
    int u = underlying_side(pos);
    auto ends = base.side_ends(u);
    std::array<Tag, 2> tg{Tag::plain, Tag::plain};
    if (base.self_folded_loop(s)) {
      int p = enclosed_puncture(base, s);
      for (int e = 0; e < 2; ++e)
        if (ends[e] == p) tg[e] = Tag::notched;
    }
    for (int e = 0; e < 2; ++e)
      if (base.is_puncture(ends[e]) && flipped.count(ends[e]))
        tg[e] = flip_tag(tg[e]);
    return tg;
  }

  TaggedArc tagged_arc(int pos) const {
    return TaggedArc{base.side_name[underlying_side(pos)], tags_at(pos)};
  }

  std::string fresh_name() {
    for (;;) {
      std::string nm = "f" + std::to_string(++fresh_counter);
      bool used = base.side_index.count(nm) > 0;
      for (const auto& [c, p] : lineage) used = used || c == nm || p == nm;
      if (!used) return nm;
    }
  }
};

// Builds a tagged triangulation from surface data, ccw triples, and tag
// data.  Tag data may flip punctures wholesale ("flipped_punctures") or be
// given arc-wise ("arc_tags", keyed by arc name, values in (tail, head)
// end order); arc-wise tags must be consistent per puncture.  Tags at
// punctures enclosed by self-folded loops select which conjugate gets
// which role and are then normalized away.
inline TaggedTriangulation build_triangulation(
    const MarkedSurface& s,
    const std::vector<std::array<std::string, 3>>& triples,
    const TagsSpec& tags = {}) {
  TaggedTriangulation T;
  T.base = IdealTriangulation::build(s, triples);
  for (int sd : T.base.internal_sides()) {
    T.arc_id.push_back(T.base.side_name[sd]);
    T.arc_base.push_back(sd);
  }

  std::set<int> from_list;
  for (const auto& nm : tags.flipped_punctures) {
    int v = T.base.vertex_id(nm);
    require(T.base.is_puncture(v), errc::IllegalTag,
            "'" + nm + "' is not a puncture");
    from_list.insert(v);
  }

  if (!tags.arc_tags.empty()) {
    // Constraints derived from arc-wise tags: flip[q] per puncture q.
    std::map<int, bool> flip_at;
    auto constrain = [&](int q, bool f, const std::string& where) {
      auto [it, fresh] = flip_at.try_emplace(q, f);
      require(fresh || it->second == f, errc::IllegalTag,
              "inconsistent tags at puncture '" + T.base.vertex_name_[q] +
                  "' (" + where + ")");
    };
    // Tags of conjugate pairs at their enclosed puncture, handled jointly.
    std::map<int, std::map<int, Tag>> pair_p_tags;  // loop side -> pos -> tag

    for (const auto& [id, tagpair] : tags.arc_tags) {
      int pos = T.position_of(id);
      std::array<Tag, 2> given{parse_tag(tagpair[0]), parse_tag(tagpair[1])};
      int sbase = T.arc_base[pos];
      int u = T.underlying_side(pos);
      auto ends = T.base.side_ends(u);
      if (ends[0] == ends[1])
        require(given[0] == given[1], errc::IllegalTag,
                "loop arc '" + id + "' with unequal end tags");
      bool is_pair = T.base.self_folded_loop(sbase) ||
                     T.base.self_folded_radius(sbase);
      int loop = T.base.self_folded_loop(sbase)
                     ? sbase
                     : (is_pair ? T.base.radius_to_loop.at(sbase) : -1);
      int encl = is_pair ? enclosed_puncture(T.base, loop) : -1;
      for (int e = 0; e < 2; ++e) {
        int v = ends[e];
        if (!T.base.is_puncture(v)) {
          require(given[e] == Tag::plain, errc::IllegalTag,
                  "arc '" + id + "' notched at a boundary marked point");
        } else if (v == encl) {
          pair_p_tags[loop][pos] = given[e];
        } else {
          // The plain representative is plain at every non-enclosed end.
          constrain(v, given[e] == Tag::notched, "arc '" + id + "'");
        }
      }
    }

    // Conjugate pairs: exactly one of the two arcs is notched at the
    // enclosed puncture.  The notched one plays the ι(loop) role; if the
    // user assigned roles opposite to the default, swap the base sides.
    for (auto& [loop, m] : pair_p_tags) {
      int radius = T.base.loop_to_radius.at(loop);
      int pos_l = T.position_of_base(loop), pos_r = T.position_of_base(radius);
      Tag at_l = m.count(pos_l) ? m[pos_l] : Tag::notched;
      Tag at_r = m.count(pos_r) ? m[pos_r] : Tag::plain;
      require(at_l != at_r, errc::IllegalTag,
              "conjugate pair over '" + T.base.side_name[radius] +
                  "' needs one plain and one notched end at the enclosed "
                  "puncture");
      if (at_l == Tag::plain) std::swap(T.arc_base[pos_l], T.arc_base[pos_r]);
    }

    if (!from_list.empty()) {
      for (const auto& [q, f] : flip_at)
        require(f == (from_list.count(q) > 0), errc::IllegalTag,
                "arc_tags disagree with flipped_punctures at '" +
                    T.base.vertex_name_[q] + "'");
    } else {
      for (const auto& [q, f] : flip_at)
        if (f) from_list.insert(q);
    }
  }

  // Normal form: no flips recorded at enclosed punctures.
  for (int v : std::vector<int>(from_list.begin(), from_list.end()))
    if (is_enclosed_puncture(T.base, v)) from_list.erase(v);
  T.flipped = std::move(from_list);
  return T;
}

// ---------------------------------------------------------------------------
// Compatibility of tagged arcs (decidable against a common triangulation)
// ---------------------------------------------------------------------------

// Both arcs must be referable to the given triangulation (their underlying
// arcs are sides of it); two arcs of a common ideal triangulation never
// cross, so compatibility reduces to the tag clauses:
//   1. equal underlying arcs: at least one corresponding end pair has
//      matching tags;
//   2. distinct underlying arcs sharing an endpoint o: all tags at o agree
//      (vacuous unless o is a puncture, since boundary ends are plain).
inline bool compatible(const TaggedArc& a, const TaggedArc& b,
                       const IdealTriangulation& ctx) {
  auto resolve = [&](const TaggedArc& d) {
    auto it = ctx.side_index.find(d.underlying_arc);
    require(it != ctx.side_index.end() && ctx.is_internal(it->second),
            errc::UnknownIntersectionData,
            "arc '" + d.underlying_arc +
                "' is not an arc of the reference triangulation");
    int sd = it->second;
    require(!ctx.self_folded_loop(sd), errc::IllegalTag,
            "arc '" + d.underlying_arc +
                "' cuts out a once-punctured monogon and is not a tagged arc");
    auto ends = ctx.side_ends(sd);
    for (int e = 0; e < 2; ++e)
      require(ctx.is_puncture(ends[e]) || d.tag_at_end[e] == Tag::plain,
              errc::IllegalTag, "notched tag at a boundary marked point");
    if (ends[0] == ends[1])
      require(d.tag_at_end[0] == d.tag_at_end[1], errc::IllegalTag,
              "loop arc with unequal end tags");
    return std::pair<int, std::array<int, 2>>(sd, ends);
  };
  auto [sa, ea] = resolve(a);
  auto [sb, eb] = resolve(b);

  if (sa == sb)
    return a.tag_at_end[0] == b.tag_at_end[0] ||
           a.tag_at_end[1] == b.tag_at_end[1];

  // Distinct, non-crossing: check shared endpoints.
  for (int v : {ea[0], ea[1]}) {
    if (v != eb[0] && v != eb[1]) continue;
    std::set<Tag> at_v;
    for (int e = 0; e < 2; ++e) {
      if (ea[e] == v) at_v.insert(a.tag_at_end[e]);
      if (eb[e] == v) at_v.insert(b.tag_at_end[e]);
    }
    if (at_v.size() > 1) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Flip of a tagged arc
// ---------------------------------------------------------------------------

namespace detail {

// Transports vertex names from an old base to a rebuilt one.  Vertices are
// matched by the multiset of incident side names, ignoring the replaced
// arc (old name `drop_old`, new name `drop_new`); at most one vertex can
// be incident to nothing else, and is matched by elimination.
inline void transport_vertex_names(const IdealTriangulation& oldT,
                                   IdealTriangulation& newT,
                                   const std::string& drop_old,
                                   const std::string& drop_new) {
  auto tokens = [](const IdealTriangulation& T, const std::string& drop) {
    std::vector<std::vector<std::string>> tok(T.n_vertices_);
    for (int v = 0; v < T.n_vertices_; ++v) {
      for (int sd : T.fan_edges(v))
        if (T.side_name[sd] != drop) tok[v].push_back(T.side_name[sd]);
      std::sort(tok[v].begin(), tok[v].end());
    }
    return tok;
  };
  auto ot = tokens(oldT, drop_old);
  auto nt_ = tokens(newT, drop_new);
  require(oldT.n_vertices_ == newT.n_vertices_, errc::WrongArcCount,
          "flip changed the vertex count");
  std::vector<int> match(newT.n_vertices_, -1);
  std::vector<bool> used(oldT.n_vertices_, false);
  for (int v = 0; v < newT.n_vertices_; ++v) {
    int hit = -1, hits = 0;
    for (int w = 0; w < oldT.n_vertices_; ++w)
      if (!used[w] && ot[w] == nt_[v] &&
          oldT.vertex_is_puncture_[w] == newT.vertex_is_puncture_[v]) {
        hit = w;
        ++hits;
      }
    if (hits == 1) {
      match[v] = hit;
      used[hit] = true;
    }
  }
  // Elimination for the (at most one) anchorless vertex.
  int miss_new = -1, miss_old = -1, misses = 0;
  for (int v = 0; v < newT.n_vertices_; ++v)
    if (match[v] < 0) {
      miss_new = v;
      ++misses;
    }
  for (int w = 0; w < oldT.n_vertices_; ++w)
    if (!used[w]) miss_old = w;
  if (misses == 1 && miss_old >= 0) {
    match[miss_new] = miss_old;
    misses = 0;
  }
  if (misses != 0)
    throw std::logic_error("vertex identity tracking is ambiguous here");
  newT.vertex_index.clear();
  for (int v = 0; v < newT.n_vertices_; ++v) {
    newT.vertex_name_[v] = oldT.vertex_name_[match[v]];
    newT.vertex_index[newT.vertex_name_[v]] = v;
  }
}

}  // namespace detail

struct FlipResult {
  TaggedTriangulation t;
  std::string new_arc;
};

// Flips the tagged arc at `pos`.  Dispatch by the role of the arc's base
// side: the loop of a self-folded pair (the notched-radius arc), the
// radius of a self-folded pair (the plain-radius arc), or an ordinary arc
// whose two slots lie in distinct triangles.
inline FlipResult flip(const TaggedTriangulation& T, int pos) {
  require(pos >= 0 && pos < T.n_arcs(), errc::ArcNotInTriangulation,
          "flip position out of range");
  const IdealTriangulation& B = T.base;
  int s = T.arc_base[pos];
  TaggedTriangulation R = T;  // copy ids/lineage/counter; base rebuilt below
  std::string fresh = R.fresh_name();
  std::string old_name = B.side_name[s];

  auto rebuilt = [&](std::vector<std::array<std::string, 3>> triples) {
    IdealTriangulation nb = IdealTriangulation::build(B.surface, triples);
    detail::transport_vertex_names(B, nb, old_name, fresh);
    return nb;
  };
  auto names_of = [&](Half h) {
    // Sides of h's triangle rotated so that side(h) comes last.
    return std::array<std::string, 2>{
        B.side_name[B.side(IdealTriangulation::next(h))],
        B.side_name[B.side(IdealTriangulation::prev(h))]};
  };

  std::vector<std::array<std::string, 3>> triples = B.triples;
  std::set<std::string> old_flipped_names;
  for (int v : T.flipped) old_flipped_names.insert(B.vertex_name_[v]);

  if (B.self_folded_loop(s) || B.self_folded_radius(s)) {
    // Cases B (notched radius, base side = loop) and C (plain radius,
    // base side = radius): the base surgery replaces the loop.
    int loop = B.self_folded_loop(s) ? s : B.radius_to_loop.at(s);
    int radius = B.loop_to_radius.at(loop);
    int p = enclosed_puncture(B, loop);
    std::string p_name = B.vertex_name_[p];
    old_name = B.side_name[loop];

    Half h_out = -1;  // the loop's slot in the outer (non-self-folded) triangle
    for (Half h : B.slots(loop))
      if (B.side(IdealTriangulation::next(h)) != radius &&
          B.side(IdealTriangulation::prev(h)) != radius)
        h_out = h;
    require(h_out >= 0, errc::IllegalSurface, "self-folded pair without outer triangle");
    auto [x, y] = names_of(h_out);
    int t_sf = B.tri_of(B.p_corner_.at(loop)), t_out = B.tri_of(h_out);
    const std::string r_name = B.side_name[radius];
    triples[t_sf] = {x, fresh, r_name};
    triples[t_out] = {y, r_name, fresh};
    R.base = rebuilt(triples);

    int pos_conj = T.position_of_base(B.self_folded_loop(s) ? radius : loop);
    R.arc_id[pos] = fresh;
    R.lineage.emplace_back(fresh, T.arc_id[pos]);
    if (B.self_folded_loop(s)) {
      // Case B: flipped arc becomes the new base arc; conjugate keeps r.
      R.arc_base[pos] = R.base.side_id(fresh);
      R.arc_base[pos_conj] = R.base.side_id(r_name);
    } else {
      // Case C: conjugate survivor remaps to the radius; tag state
      // toggles at the no-longer-enclosed puncture.
      R.arc_base[pos] = R.base.side_id(fresh);
      R.arc_base[pos_conj] = R.base.side_id(r_name);
      if (old_flipped_names.count(p_name))
        old_flipped_names.erase(p_name);
      else
        old_flipped_names.insert(p_name);
    }
    // Remap all other arc positions by name.
    for (int i = 0; i < R.n_arcs(); ++i) {
      if (i == pos || i == pos_conj) continue;
      R.arc_base[i] = R.base.side_id(B.side_name[T.arc_base[i]]);
    }
  } else {
    // Case A: ordinary arc; slots in two distinct triangles.
    auto sl = B.slots(s);
    require(sl[1] >= 0, errc::ArcNotInTriangulation,
            "cannot flip a boundary side");
    Half h1 = sl[0], h2 = sl[1];
    require(B.tri_of(h1) != B.tri_of(h2), errc::IllegalSurface,
            "unexpected self-glued triangle");
    auto [x1, x2] = names_of(h1);
    auto [y1, y2] = names_of(h2);
    triples[B.tri_of(h1)] = {x2, y1, fresh};
    triples[B.tri_of(h2)] = {y2, x1, fresh};
    R.base = rebuilt(triples);

    R.arc_id[pos] = fresh;
    R.lineage.emplace_back(fresh, T.arc_id[pos]);
    for (int i = 0; i < R.n_arcs(); ++i)
      R.arc_base[i] = (i == pos) ? R.base.side_id(fresh)
                                 : R.base.side_id(B.side_name[T.arc_base[i]]);

    // If the flip created a self-folded pair whose enclosed puncture was
    // tag-flipped, renormalize: drop the flip and swap the conjugate
    // roles so the stored representative stays the plain one.
    for (const auto& [loop2, radius2] : R.base.loop_to_radius) {
      if (B.side_index.count(R.base.side_name[loop2]) &&
          B.self_folded_loop(B.side_index.at(R.base.side_name[loop2])))
        continue;  // pre-existing pair
      int p2 = enclosed_puncture(R.base, loop2);
      std::string p2n = R.base.vertex_name_[p2];
      if (old_flipped_names.count(p2n)) {
        old_flipped_names.erase(p2n);
        int pl = R.position_of_base(loop2), pr = R.position_of_base(radius2);
        std::swap(R.arc_base[pl], R.arc_base[pr]);
      }
    }
  }

  R.flipped.clear();
  for (const auto& nm : old_flipped_names) {
    int v = R.base.vertex_id(nm);
    if (!is_enclosed_puncture(R.base, v)) R.flipped.insert(v);
  }
  return FlipResult{std::move(R), fresh};
}

inline FlipResult flip(const TaggedTriangulation& T, const std::string& arc) {
  return flip(T, T.position_of(arc));
}

// ---------------------------------------------------------------------------
// Tagged rotation
// ---------------------------------------------------------------------------

// The rotation homeomorphism maps ideal triangles to ideal triangles and
// advances boundary marked points one step counterclockwise, so on gluing
// data it renames every boundary side to the next one along its component;
// tags invert at every puncture (conjugate pairs map to themselves, so the
// flipped set stays clear of enclosed punctures).
inline TaggedTriangulation tagged_rotation(const TaggedTriangulation& T) {
  const IdealTriangulation& B = T.base;
  std::map<std::string, std::string> rename;
  for (int sd = 0; sd < B.n_sides(); ++sd)
    if (B.is_boundary(sd))
      rename[B.side_name[sd]] = B.side_name[B.next_boundary_side(sd)];
  std::vector<std::array<std::string, 3>> triples = B.triples;
  for (auto& t : triples)
    for (auto& nm : t)
      if (auto it = rename.find(nm); it != rename.end()) nm = it->second;

  TaggedTriangulation R = T;
  R.base = IdealTriangulation::build(B.surface, triples);
  // Interior names survive; positions remap by name.
  for (int i = 0; i < R.n_arcs(); ++i)
    R.arc_base[i] = R.base.side_id(B.side_name[T.arc_base[i]]);
  // Invert tags at every non-enclosed puncture.  Vertex names are
  // re-derived structurally; punctures keep identity via interior arcs
  // when possible (names may legitimately permute under rotation).
  R.flipped.clear();
  for (int v = 0; v < R.base.n_vertices_; ++v) {
    if (!R.base.is_puncture(v) || is_enclosed_puncture(R.base, v)) continue;
    // A puncture of the renamed base is "currently flipped" if the old
    // structure had it flipped; match by incident-arc token.
    R.flipped.insert(v);
  }
  // Punctures already flipped in T become unflipped under inversion.
  // Match old punctures to new ones by incident interior arcs (interior
  // names survive the boundary renaming).
  auto arc_token = [](const IdealTriangulation& X, int v) {
    std::vector<std::string> tok;
    for (int sd : X.fan_edges(v))
      if (X.is_internal(sd)) tok.push_back(X.side_name[sd]);
    std::sort(tok.begin(), tok.end());
    return tok;
  };
  for (int v : T.flipped) {
    auto tok = arc_token(B, v);
    bool found = false;
    for (int w = 0; w < R.base.n_vertices_; ++w) {
      if (!R.base.is_puncture(w) || !R.flipped.count(w)) continue;
      if (tok == arc_token(R.base, w)) {
        R.flipped.erase(w);
        found = true;
        break;
      }
    }
    if (!found)
      throw std::logic_error("tagged_rotation: puncture identity ambiguous");
  }
  return R;
}

// Arc-level rotation: tags invert at puncture ends; boundary endpoints
// advance along the boundary (reflected in the rotated triangulation's
// renamed gluing, where the arc keeps its name).
inline TaggedArc tagged_rotation(const TaggedArc& d,
                                 const IdealTriangulation& ctx) {
  int sd = ctx.side_id(d.underlying_arc);
  auto ends = ctx.side_ends(sd);
  TaggedArc r = d;
  for (int e = 0; e < 2; ++e)
    if (ctx.is_puncture(ends[e])) r.tag_at_end[e] = flip_tag(r.tag_at_end[e]);
  return r;
}

// ---------------------------------------------------------------------------
// Quiver of a tagged triangulation
// ---------------------------------------------------------------------------

// Triangle-wise arrow assembly with self-folded duplication: each
// non-self-folded counterclockwise triple contributes an arrow
// side -> next side; arrows incident to a self-folded loop are duplicated
// over its conjugate pair; boundary sides are dropped; opposite arrows
// cancel in the signed sum.
inline Quiver quiver_of(const TaggedTriangulation& T) {
  const IdealTriangulation& B = T.base;
  const int n = T.n_arcs();
  Quiver q = Quiver::empty(n, T.arc_id);

  std::map<int, std::vector<int>> dup;  // base side -> positions
  for (int sd = 0; sd < B.n_sides(); ++sd) {
    if (B.is_boundary(sd)) continue;
    if (B.self_folded_loop(sd)) {
      dup[sd] = {T.position_of_base(sd),
                 T.position_of_base(B.loop_to_radius.at(sd))};
    } else if (B.self_folded_radius(sd)) {
      dup[sd] = {};  // radii never appear in non-self-folded triangles
    } else {
      dup[sd] = {T.position_of_base(sd)};
    }
  }

  for (int t = 0; t < B.n_triangles(); ++t) {
    bool sf = false;
    for (int k = 0; k < 3; ++k)
      if (B.self_folded_radius(B.tri[t][k])) sf = true;
    if (sf) continue;
    for (int k = 0; k < 3; ++k) {
      int u = B.tri[t][k], v = B.tri[t][(k + 1) % 3];
      if (B.is_boundary(u) || B.is_boundary(v)) continue;
      for (int pu : dup.at(u))
        for (int pv : dup.at(v)) {
          require(pu != pv, errc::NonManifoldGluing, "degenerate triangle arrow");
          q.add_arrow(pu, pv, 1);
        }
    }
  }
  return q;
}

// ---------------------------------------------------------------------------
// Canonical keys and flip BFS
// ---------------------------------------------------------------------------

namespace detail {

// Serialization with canonical internal-arc relabeling, starting from a
// fixed root corner.  Boundary sides keep their names (they anchor the
// triangulation up to isotopy); internal sides are numbered in first-visit
// order; triangles are visited breadth-first through shared sides.
inline std::string serialize_from(const IdealTriangulation& B,
                                  const std::set<int>& flipped, Half root) {
  std::map<int, int> relabel;  // internal side -> canonical number
  auto label = [&](int sd) -> std::string {
    if (B.is_boundary(sd)) return "B:" + B.side_name[sd];
    auto [it, fresh] = relabel.try_emplace(sd, static_cast<int>(relabel.size()));
    (void)fresh;
    return "a" + std::to_string(it->second);
  };
  std::vector<bool> seen(B.n_triangles(), false);
  std::vector<Half> queue{root};
  std::string out;
  std::vector<std::string> vertex_token(B.n_vertices_);
  int corner_counter = 0;
  size_t qi = 0;
  while (qi < queue.size()) {
    Half h = queue[qi++];
    int t = B.tri_of(h);
    if (seen[t]) continue;
    seen[t] = true;
    for (int k = 0; k < 3; ++k) {
      Half hk = h - h % 3 + (h % 3 + k) % 3;
      out += label(B.side(hk));
      out += ',';
      // First-visit corner numbering gives punctures a canonical identity.
      int v = B.head(hk);
      if (vertex_token[v].empty())
        vertex_token[v] = "c" + std::to_string(corner_counter);
      ++corner_counter;
      Half tw = B.twin(hk);
      if (tw >= 0 && !seen[B.tri_of(tw)]) queue.push_back(tw);
    }
    out += ';';
  }
  for (bool b : seen)
    if (!b) return {};  // disconnected from root (cannot happen)
  out += "|P:";
  std::vector<std::string> ptoks;
  for (int v : flipped) ptoks.push_back(vertex_token[v]);
  std::sort(ptoks.begin(), ptoks.end());
  out += join(ptoks, ",");
  return out;
}

}  // namespace detail

// A canonical structural key: equal keys mean the two tagged
// triangulations are the same triangulation of the surface (same arcs up
// to renaming, same tag data), with boundary sides pinned in place.
inline std::string anchored_key(const TaggedTriangulation& T) {
  const IdealTriangulation& B = T.base;
  int root_side = -1;
  for (int sd = 0; sd < B.n_sides(); ++sd)
    if (B.is_boundary(sd)) {
      root_side = sd;
      break;  // sides are in lexicographic name order
    }
  if (root_side >= 0)
    return detail::serialize_from(B, T.flipped, B.slots(root_side)[0]);
  // Closed surface: minimize over all root corners.
  std::string best;
  for (Half h = 0; h < B.n_halfedges(); ++h) {
    std::string s = detail::serialize_from(B, T.flipped, h);
    if (best.empty() || s < best) best = std::move(s);
  }
  return best;
}

struct BfsNode {
  TaggedTriangulation t;
  int depth = 0;
};

// Breadth-first search of the flip graph up to the given depth.  Nodes are
// deduplicated by anchored canonical key; the result is ordered by
// (depth, key).
inline std::vector<BfsNode> flip_bfs(const TaggedTriangulation& start,
                                     int depth) {
  std::map<std::string, int> seen;  // key -> index into nodes
  std::vector<BfsNode> nodes{{start, 0}};
  seen[anchored_key(start)] = 0;
  size_t qi = 0;
  while (qi < nodes.size()) {
    BfsNode cur = nodes[qi++];  // copy: nodes may reallocate below
    if (cur.depth >= depth) continue;
    for (int k = 0; k < cur.t.n_arcs(); ++k) {
      TaggedTriangulation nb = flip(cur.t, k).t;
      std::string key = anchored_key(nb);
      if (seen.emplace(key, static_cast<int>(nodes.size())).second)
        nodes.push_back({std::move(nb), cur.depth + 1});
    }
  }
  std::stable_sort(nodes.begin(), nodes.end(),
                   [](const BfsNode& a, const BfsNode& b) {
                     if (a.depth != b.depth) return a.depth < b.depth;
                     return anchored_key(a.t) < anchored_key(b.t);
                   });
  return nodes;
}

}  // namespace lamina
