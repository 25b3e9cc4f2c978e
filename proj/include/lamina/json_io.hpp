#pragma once
// JSON file formats and deterministic emission primitives for the CLI.
//
// Input formats
// -------------
// Surface / triangulation (one file, or split across --surface and --tri
// and merged key-by-key):
//   { "genus": 0, "boundary": [1, 1], "punctures": 0,
//     "triangles": [["2","1","bout"], ["2","1","bin"]],
//     "tags": { "flipped_punctures": ["p0"],
//               "arc_tags": { "r": ["plain", "notched"] } } }
//
// Laminate (a file may hold one object, an array, or {"laminates":[...]}):
//   { "kind": "closed" | "open", "word": ["a3", "a1"],
//     "ends": [ {"boundary": "b2"} |
//               {"spiral": {"puncture": "p0", "dir": "cw"}} ],
//     "via": "arc" }                      // open only; "via"/"ends" optional
//
// Quiver (vertices are 1-based positions or label strings):
//   { "vertices": 2 | ["a", "b"], "arrows": [[2, 1, 2]] }   // m arrows u->v
//
// Cone set:
//   { "dim": 2, "depth": 14, "cones": [ [[1,0],[0,1]], ... ] }
//
// Emission is deterministic: objects are built with explicit key order
// (nlohmann::ordered_json), rows are sorted by construction, and no
// timestamps or machine identifiers appear in any payload.

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <string>
#include <vector>

#include "lamina/driver.hpp"

namespace lamina {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::IoFailure, "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  require(!j.is_discarded(), errc::IoFailure, "invalid JSON in " + path);
  return j;
}

// Shallow merge; later parts override earlier keys.
inline json merged_objects(const std::vector<json>& parts) {
  json out = json::object();
  for (const auto& p : parts) {
    require(p.is_object(), errc::IoFailure, "expected a JSON object");
    for (auto it = p.begin(); it != p.end(); ++it) out[it.key()] = it.value();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Surface and triangulation
// ---------------------------------------------------------------------------

struct TriSpec {
  MarkedSurface surface;
  std::vector<std::array<std::string, 3>> triangles;
  TagsSpec tags;
};

inline TriSpec tri_spec_from_json(const json& j) {
  require(j.is_object(), errc::IoFailure,
          "surface/triangulation data must be a JSON object");
  TriSpec s;
  s.surface.genus = j.value("genus", 0);
  s.surface.punctures = j.value("punctures", 0);
  if (j.contains("boundary")) {
    require(j["boundary"].is_array(), errc::IoFailure,
            "\"boundary\" must list marked-point counts");
    for (const auto& v : j["boundary"])
      s.surface.boundary.push_back(v.get<int>());
  }
  require(j.contains("triangles") && j["triangles"].is_array(),
          errc::IoFailure, "missing \"triangles\" array");
  for (const auto& t : j["triangles"]) {
    require(t.is_array() && t.size() == 3, errc::IoFailure,
            "each triangle lists exactly three side names");
    s.triangles.push_back({t[0].get<std::string>(), t[1].get<std::string>(),
                           t[2].get<std::string>()});
  }
  if (j.contains("tags")) {
    const json& g = j["tags"];
    require(g.is_object(), errc::IoFailure, "\"tags\" must be an object");
    if (g.contains("flipped_punctures"))
      for (const auto& p : g["flipped_punctures"])
        s.tags.flipped_punctures.push_back(p.get<std::string>());
    if (g.contains("arc_tags"))
      for (auto it = g["arc_tags"].begin(); it != g["arc_tags"].end(); ++it) {
        const json& a = it.value();
        require(a.is_array() && a.size() == 2, errc::IoFailure,
                "arc_tags entries hold one tag per arc end");
        s.tags.arc_tags[it.key()] = {a[0].get<std::string>(),
                                     a[1].get<std::string>()};
      }
  }
  return s;
}

inline TaggedTriangulation triangulation_from_json(const json& j) {
  TriSpec s = tri_spec_from_json(j);
  return build_triangulation(s.surface, s.triangles, s.tags);
}

inline TaggedTriangulation load_triangulation(
    const std::vector<std::string>& paths) {
  require(!paths.empty(), errc::IoFailure,
          "a surface/triangulation file is required");
  std::vector<json> parts;
  for (const auto& p : paths) parts.push_back(load_json_file(p));
  return triangulation_from_json(merged_objects(parts));
}

// ---------------------------------------------------------------------------
// Laminates
// ---------------------------------------------------------------------------

inline SpiralDir spiral_dir_from(const std::string& s) {
  if (s == "cw") return SpiralDir::cw;
  require(s == "ccw", errc::IoFailure,
          "spiral dir must be \"cw\" or \"ccw\", got \"" + s + "\"");
  return SpiralDir::ccw;
}

inline EndPoint end_from_json(const IdealTriangulation& T, const json& j) {
  require(j.is_object(), errc::IoFailure, "laminate end must be an object");
  if (j.contains("boundary"))
    return boundary_end_named(T, j["boundary"].get<std::string>());
  require(j.contains("spiral"), errc::IoFailure,
          "laminate end needs \"boundary\" or \"spiral\"");
  const json& s = j["spiral"];
  require(s.is_object() && s.contains("puncture") && s.contains("dir"),
          errc::IoFailure, "\"spiral\" needs \"puncture\" and \"dir\"");
  return spiral_end_named(T, s["puncture"].get<std::string>(),
                          spiral_dir_from(s["dir"].get<std::string>()));
}

inline Laminate laminate_from_json(const IdealTriangulation& T,
                                   const json& j) {
  require(j.is_object() && j.contains("kind"), errc::IoFailure,
          "laminate needs a \"kind\"");
  std::vector<std::string> word;
  if (j.contains("word"))
    for (const auto& w : j["word"]) word.push_back(w.get<std::string>());
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "elementary") {
    // {"kind":"elementary","arc":"1","tags":["plain","notched"]}
    require(j.contains("arc"), errc::IoFailure,
            "elementary laminate needs an \"arc\"");
    TaggedArc a{j["arc"].get<std::string>(), {Tag::plain, Tag::plain}};
    if (j.contains("tags")) {
      const json& t = j["tags"];
      require(t.is_array() && t.size() == 2, errc::IoFailure,
              "\"tags\" holds one tag per arc end");
      a.tag_at_end = {parse_tag(t[0].get<std::string>()),
                      parse_tag(t[1].get<std::string>())};
    }
    return elementary(T, a);
  }
  if (kind == "closed") return make_closed(T, word);
  require(kind == "open", errc::IoFailure,
          "laminate kind must be \"closed\" or \"open\"");
  require(j.contains("ends") && j["ends"].is_array() && j["ends"].size() == 2,
          errc::IoFailure, "an open laminate needs exactly two ends");
  const EndPoint e0 = end_from_json(T, j["ends"][0]);
  const EndPoint e1 = end_from_json(T, j["ends"][1]);
  return make_open(T, word, e0, e1, j.value("via", std::string()));
}

// A laminate file may hold one object, an array, or {"laminates": [...]};
// this flattens all three shapes to the list of per-laminate objects.
inline std::vector<json> laminate_entries(const json& j) {
  const json* arr = nullptr;
  if (j.is_array()) arr = &j;
  else if (j.is_object() && j.contains("laminates")) arr = &j["laminates"];
  if (!arr) return {j};
  std::vector<json> out;
  for (const auto& e : *arr) out.push_back(e);
  return out;
}

inline std::vector<Laminate> laminates_from_json(const IdealTriangulation& T,
                                                 const json& j) {
  std::vector<Laminate> out;
  for (const auto& e : laminate_entries(j))
    out.push_back(laminate_from_json(T, e));
  return out;
}

// ---------------------------------------------------------------------------
// Quivers
// ---------------------------------------------------------------------------

inline Quiver quiver_from_json(const json& j) {
  require(j.is_object() && j.contains("vertices"), errc::IoFailure,
          "quiver data needs \"vertices\"");
  std::vector<std::string> labels;
  int n = 0;
  if (j["vertices"].is_number_integer()) {
    n = j["vertices"].get<int>();
  } else {
    require(j["vertices"].is_array(), errc::IoFailure,
            "\"vertices\" is a count or a list of labels");
    for (const auto& v : j["vertices"]) labels.push_back(v.get<std::string>());
    n = static_cast<int>(labels.size());
  }
  require(n >= 1, errc::IoFailure, "a quiver needs at least one vertex");
  Quiver q = Quiver::empty(n, labels);
  auto vertex_of = [&](const json& v) -> int {
    if (v.is_number_integer()) {
      const int k = v.get<int>();
      require(k >= 1 && k <= n, errc::IoFailure,
              "vertex index out of range: " + std::to_string(k));
      return k - 1;
    }
    const std::string name = v.get<std::string>();
    for (int i = 0; i < n; ++i)
      if (q.labels[i] == name) return i;
    fail(errc::IoFailure, "unknown quiver vertex \"" + name + "\"");
  };
  if (j.contains("arrows"))
    for (const auto& a : j["arrows"]) {
      require(a.is_array() && (a.size() == 2 || a.size() == 3),
              errc::IoFailure, "arrows are [from, to] or [from, to, mult]");
      const long long mult = a.size() == 3 ? a[2].get<long long>() : 1;
      q.add_arrow(vertex_of(a[0]), vertex_of(a[1]), mult);
    }
  return q;
}

inline ojson quiver_to_json(const Quiver& q) {
  ojson j;
  j["vertices"] = q.labels;
  ojson arrows = ojson::array();
  for (int u = 0; u < q.n_total(); ++u)
    for (int v = 0; v < q.n_total(); ++v)
      if (q.b[u][v] > 0)
        arrows.push_back(ojson::array({u + 1, v + 1, q.b[u][v]}));
  j["arrows"] = arrows;
  return j;
}

// ---------------------------------------------------------------------------
// Cone sets
// ---------------------------------------------------------------------------

inline std::vector<RationalCone> cones_from_json(const json& j,
                                                 int* depth = nullptr) {
  require(j.is_object() && j.contains("dim") && j.contains("cones"),
          errc::IoFailure, "cone data needs \"dim\" and \"cones\"");
  const int dim = j["dim"].get<int>();
  if (depth) *depth = j.value("depth", -1);
  std::vector<RationalCone> out;
  for (const auto& c : j["cones"]) {
    require(c.is_array(), errc::IoFailure, "each cone lists its generators");
    std::vector<IVec> gens;
    for (const auto& g : c) {
      IVec v;
      for (const auto& x : g) v.push_back(x.get<long long>());
      gens.push_back(std::move(v));
    }
    out.push_back(make_cone(dim, gens));
  }
  return out;
}

inline ojson cones_to_json(int dim, const std::vector<RationalCone>& cones,
                           int depth = -1) {
  ojson j;
  j["dim"] = dim;
  if (depth >= 0) j["depth"] = depth;
  ojson cs = ojson::array();
  for (const auto& c : cones) {
    ojson gens = ojson::array();
    for (const auto& g : c.generators) gens.push_back(g);
    cs.push_back(std::move(gens));
  }
  j["cones"] = cs;
  return j;
}

// ---------------------------------------------------------------------------
// Small parsers for CLI arguments
// ---------------------------------------------------------------------------

// "1,2,1" (1-based vertex list) -> {0, 1, 0}.
inline std::vector<int> parse_path(const std::string& s) {
  std::vector<int> out;
  if (s.empty()) return out;
  size_t i = 0;
  while (i <= s.size()) {
    size_t j = s.find(',', i);
    if (j == std::string::npos) j = s.size();
    const std::string tok = s.substr(i, j - i);
    require(!tok.empty(), errc::IoFailure, "empty entry in path \"" + s + "\"");
    size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos == tok.size() && v >= 1, errc::IoFailure,
            "path entries are 1-based vertex numbers, got \"" + tok + "\"");
    out.push_back(v - 1);
    if (j == s.size()) break;
    i = j + 1;
  }
  return out;
}

// "0..50", "-20..20", or a single integer.
inline std::pair<long long, long long> parse_range(const std::string& s) {
  const size_t dots = s.find("..");
  auto as_int = [&](const std::string& tok) -> long long {
    size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos == tok.size() && !tok.empty(), errc::IoFailure,
            "expected an integer, got \"" + tok + "\"");
    return v;
  };
  if (dots == std::string::npos) {
    const long long v = as_int(s);
    return {v, v};
  }
  const long long lo = as_int(s.substr(0, dots));
  const long long hi = as_int(s.substr(dots + 2));
  require(lo <= hi, errc::IoFailure, "empty range \"" + s + "\"");
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Laurent expression parser ("(x2^2+y1)/x1" and friends)
// ---------------------------------------------------------------------------

namespace detail {

class LaurentParser {
 public:
  LaurentParser(const std::string& s, int n) : s_(s), n_(n) {}

  LaurentPoly parse() {
    LaurentPoly p = expr();
    skip();
    require(i_ == s_.size(), errc::IoFailure,
            "trailing characters in polynomial: \"" + s_.substr(i_) + "\"");
    return p;
  }

 private:
  const std::string& s_;
  size_t i_ = 0;
  int n_;

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  LaurentPoly expr() {
    LaurentPoly acc = term();
    for (;;) {
      if (eat('+')) acc += term();
      else if (eat('-')) acc -= term();
      else return acc;
    }
  }

  LaurentPoly term() {
    LaurentPoly acc = factor();
    for (;;) {
      if (eat('*')) acc = acc * factor();
      else if (eat('/')) acc = divide_exact(acc, factor());
      else return acc;
    }
  }

  LaurentPoly factor() {
    if (eat('-')) return LaurentPoly::constant(n_, -1) * factor();
    LaurentPoly base = atom();
    if (eat('^')) return power(base, integer());
    return base;
  }

  long long integer() {
    const bool neg = eat('-');
    skip();
    require(i_ < s_.size() &&
                std::isdigit(static_cast<unsigned char>(s_[i_])),
            errc::IoFailure, "expected an integer exponent");
    long long v = 0;
    while (i_ < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[i_])))
      v = v * 10 + (s_[i_++] - '0');
    return neg ? -v : v;
  }

  LaurentPoly power(const LaurentPoly& b, long long e) {
    if (e < 0) return divide_exact(LaurentPoly::constant(n_, 1), power(b, -e));
    LaurentPoly r = LaurentPoly::constant(n_, 1);
    for (long long k = 0; k < e; ++k) r = r * b;
    return r;
  }

  LaurentPoly atom() {
    skip();
    require(i_ < s_.size(), errc::IoFailure, "unexpected end of polynomial");
    const char c = s_[i_];
    if (c == '(') {
      ++i_;
      LaurentPoly p = expr();
      require(eat(')'), errc::IoFailure, "missing ')' in polynomial");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string d;
      while (i_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[i_])))
        d += s_[i_++];
      return LaurentPoly::constant(n_, mpz_class(d));
    }
    if (c == 'x' || c == 'y') {
      ++i_;
      int k = 0;
      size_t digits = 0;
      while (i_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        k = k * 10 + (s_[i_++] - '0');
        ++digits;
      }
      require(digits > 0 && k >= 1 && k <= n_, errc::IoFailure,
              std::string("variable ") + c + std::to_string(k) +
                  " is out of range");
      return c == 'x' ? LaurentPoly::x(n_, k - 1) : LaurentPoly::y(n_, k - 1);
    }
    fail(errc::IoFailure,
         std::string("unexpected character '") + c + "' in polynomial");
  }
};

}  // namespace detail

// Parses an expression in x1..xn, y1..yn with integer coefficients,
// parentheses, "+ - * / ^"; division must be exact in the Laurent ring.
inline LaurentPoly parse_laurent(const std::string& text, int n) {
  return detail::LaurentParser(text, n).parse();
}

// ---------------------------------------------------------------------------
// Deterministic emission primitives
// ---------------------------------------------------------------------------

enum class Format { json, csv, text };

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  require(s == "text", errc::IoFailure,
          "--emit must be json, csv, or text; got \"" + s + "\"");
  return Format::text;
}

inline std::string dump_json(const ojson& j) { return j.dump(2) + "\n"; }

inline std::string q_str(const mpq_class& v) { return v.get_str(); }

// RFC-4180 quoting for cells that contain commas or quotes.
inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(cells[i]);
  }
  out += '\n';
  return out;
}

}  // namespace lamina
