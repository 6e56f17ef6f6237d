#pragma once
// Parametric stand-in shapes, similarity scaling and the JSON shape file format.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "meanarc/geometry.hpp"
#include "meanarc/rng.hpp"

namespace meanarc {

struct InvalidSpec : Error {
  using Error::Error;
};
struct InvalidScale : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

enum class ShapeKind { Circle, Ellipse, Rectangle, RegularPolygon, Star, LShape, Keyhole, Comb, RandomConvex, FromFile };

/**
 * Kind plus named parameters. Recognised parameters per kind (defaults in
 * brackets):
 *   circle        r, res [256]
 *   ellipse       a, b, res [256]
 *   rect          w, h
 *   regular       n, r | side
 *   star          outer, inner, points [5], sy [1]   (sy stretches vertically)
 *   lshape        size [2], arm [size/2]
 *   keyhole       r, slot_w, slot_h, res [128]
 *   comb          teeth [3], tooth_w [1], tooth_h [2], gap [1], base_h [1]
 *   randomconvex  k [12], r [1], seed [1]
 *   file          path (string)
 * Everything except lshape and comb is centred on the origin.
 */
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Circle;
  std::map<std::string, double> params;
  std::string path;  ///< FromFile only

  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  double require(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw InvalidSpec("shape parameter '" + key + "' is required");
    return it->second;
  }
};

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidSpec(std::string("shape parameter '") + name + "' must be > 0");
}

inline int resolution(const ShapeSpec& s, double fallback) {
  const double res = s.get("res", fallback);
  if (res < 16 || res != std::floor(res)) throw InvalidSpec("resolution must be an integer >= 16 for curved shapes");
  return static_cast<int>(res);
}

inline std::vector<Point> ellipse_loop(double a, double b, int res) {
  std::vector<Point> v(res);
  for (int i = 0; i < res; ++i) {
    const double t = 2.0 * std::numbers::pi * i / res;
    v[i] = {a * std::cos(t), b * std::sin(t)};
  }
  return v;
}

}  // namespace detail

SimplePolygon load_shape(const std::filesystem::path& path);

inline SimplePolygon build(const ShapeSpec& s) {
  using detail::require_positive;
  constexpr double pi = std::numbers::pi;
  switch (s.kind) {
    case ShapeKind::Circle: {
      const double r = s.require("r");
      require_positive(r, "r");
      return SimplePolygon(detail::ellipse_loop(r, r, detail::resolution(s, 256)));
    }
    case ShapeKind::Ellipse: {
      const double a = s.require("a"), b = s.require("b");
      require_positive(a, "a");
      require_positive(b, "b");
      return SimplePolygon(detail::ellipse_loop(a, b, detail::resolution(s, 256)));
    }
    case ShapeKind::Rectangle: {
      const double w = s.require("w"), h = s.require("h");
      require_positive(w, "w");
      require_positive(h, "h");
      return SimplePolygon({{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}});
    }
    case ShapeKind::RegularPolygon: {
      const double n = s.require("n");
      if (n < 3 || n != std::floor(n)) throw InvalidSpec("regular polygon needs an integer n >= 3");
      double r = s.get("r", 0.0);
      if (s.params.count("side")) r = s.params.at("side") / (2.0 * std::sin(pi / n));
      require_positive(r, "r");
      const int k = static_cast<int>(n);
      std::vector<Point> v(k);
      for (int i = 0; i < k; ++i) v[i] = {r * std::cos(2 * pi * i / k), r * std::sin(2 * pi * i / k)};
      return SimplePolygon(std::move(v));
    }
    case ShapeKind::Star: {
      const double outer = s.require("outer"), inner = s.require("inner");
      const double points = s.get("points", 5), sy = s.get("sy", 1.0);
      require_positive(outer, "outer");
      require_positive(inner, "inner");
      require_positive(sy, "sy");
      if (inner >= outer) throw InvalidSpec("star needs inner < outer");
      if (points < 3 || points != std::floor(points)) throw InvalidSpec("star needs an integer points >= 3");
      const int k = static_cast<int>(points);
      std::vector<Point> v(2 * k);
      for (int i = 0; i < 2 * k; ++i) {
        const double rad = (i % 2 == 0) ? outer : inner;
        const double t = pi / 2 + pi * i / k;
        v[i] = {rad * std::cos(t), sy * rad * std::sin(t)};
      }
      return SimplePolygon(std::move(v));
    }
    case ShapeKind::LShape: {
      const double size = s.get("size", 2.0);
      const double arm = s.get("arm", size / 2);
      require_positive(size, "size");
      require_positive(arm, "arm");
      if (arm >= size) throw InvalidSpec("lshape needs arm < size");
      return SimplePolygon({{0, 0}, {size, 0}, {size, arm}, {arm, arm}, {arm, size}, {0, size}});
    }
    case ShapeKind::Keyhole: {
      const double r = s.require("r"), w = s.require("slot_w"), h = s.require("slot_h");
      require_positive(r, "r");
      require_positive(w, "slot_w");
      require_positive(h, "slot_h");
      if (w >= 2 * r) throw InvalidSpec("keyhole needs slot_w < 2r");
      const int res = detail::resolution(s, 128);
      const double phi = std::asin(w / (2 * r));
      const double junction_y = -r * std::cos(phi);
      std::vector<Point> v;
      v.push_back({w / 2, junction_y - h});
      const double start = -pi / 2 + phi, stop = 3 * pi / 2 - phi;
      for (int i = 0; i <= res; ++i) {
        const double t = start + (stop - start) * i / res;
        v.push_back({r * std::cos(t), r * std::sin(t)});
      }
      v.push_back({-w / 2, junction_y - h});
      return SimplePolygon(std::move(v));
    }
    case ShapeKind::Comb: {
      const double teeth = s.get("teeth", 3), tw = s.get("tooth_w", 1), th = s.get("tooth_h", 2);
      const double gap = s.get("gap", 1), base = s.get("base_h", 1);
      if (teeth < 2 || teeth != std::floor(teeth)) throw InvalidSpec("comb needs an integer teeth >= 2");
      require_positive(tw, "tooth_w");
      require_positive(th, "tooth_h");
      require_positive(gap, "gap");
      require_positive(base, "base_h");
      const int k = static_cast<int>(teeth);
      const double width = k * tw + (k - 1) * gap;
      std::vector<Point> v{{0, 0}, {width, 0}};
      for (int i = k - 1; i >= 0; --i) {
        const double left = i * (tw + gap);
        if (i != k - 1) v.push_back({left + tw, base});
        v.push_back({left + tw, base + th});
        v.push_back({left, base + th});
        if (i != 0) v.push_back({left, base});
      }
      return SimplePolygon(std::move(v));
    }
    case ShapeKind::RandomConvex: {
      const double k = s.get("k", 12), r = s.get("r", 1.0), seed = s.get("seed", 1);
      require_positive(r, "r");
      if (k < 3 || k != std::floor(k)) throw InvalidSpec("randomconvex needs an integer k >= 3");
      CounterRng rng(static_cast<std::uint64_t>(seed), 0);
      std::vector<Point> pts;
      for (int i = 0; i < static_cast<int>(k); ++i) {
        const double rad = r * std::sqrt(rng.uniform());
        const double t = 2 * pi * rng.uniform();
        pts.push_back({rad * std::cos(t), rad * std::sin(t)});
      }
      return convex_hull(pts);
    }
    case ShapeKind::FromFile:
      return load_shape(s.path);
  }
  throw InvalidSpec("unknown shape kind");
}

/// Similarity about the area centroid.
inline SimplePolygon scale(const SimplePolygon& p, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidScale("scale factor must be > 0");
  const Point c = centroid(p);
  std::vector<Point> out(p.vertices().begin(), p.vertices().end());
  for (Point& q : out) q = c + (q - c) * lambda;
  return SimplePolygon::trusted(std::move(out));
}

/// Translate so the area centroid sits at the origin.
inline SimplePolygon centered(const SimplePolygon& p) {
  const Point c = centroid(p);
  return translate(p, {-c.x, -c.y});
}

// ---- mini-syntax: kind:key=value,key=value ---------------------------------

inline ShapeSpec parse_shape_spec(std::string_view text) {
  ShapeSpec spec;
  const auto colon = text.find(':');
  std::string kind(text.substr(0, colon));
  for (char& c : kind) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  static const std::map<std::string, ShapeKind> kinds{
      {"circle", ShapeKind::Circle},         {"ellipse", ShapeKind::Ellipse},
      {"rect", ShapeKind::Rectangle},        {"rectangle", ShapeKind::Rectangle},
      {"regular", ShapeKind::RegularPolygon}, {"star", ShapeKind::Star},
      {"lshape", ShapeKind::LShape},         {"keyhole", ShapeKind::Keyhole},
      {"comb", ShapeKind::Comb},             {"randomconvex", ShapeKind::RandomConvex},
      {"file", ShapeKind::FromFile}};
  auto it = kinds.find(kind);
  if (it == kinds.end()) {
    // A bare path is accepted as a shape file.
    if (text.ends_with(".json")) {
      spec.kind = ShapeKind::FromFile;
      spec.path = std::string(text);
      return spec;
    }
    throw InvalidSpec("unknown shape kind '" + kind + "'");
  }
  spec.kind = it->second;
  if (spec.kind == ShapeKind::FromFile) {
    std::string_view p = rest;
    if (p.starts_with("path=")) p.remove_prefix(5);
    if (p.empty()) throw InvalidSpec("file shape needs a path");
    spec.path = std::string(p);
    return spec;
  }

  std::size_t pos = 0;
  while (pos < rest.size()) {
    std::size_t end = rest.find(',', pos);
    if (end == std::string_view::npos) end = rest.size();
    const std::string_view item = rest.substr(pos, end - pos);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidSpec("expected key=value in shape spec, got '" + std::string(item) + "'");
    const std::string key(item.substr(0, eq));
    const std::string_view val = item.substr(eq + 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), value);
    if (ec != std::errc{} || ptr != val.data() + val.size())
      throw InvalidSpec("bad number '" + std::string(val) + "' for shape parameter '" + key + "'");
    spec.params[key] = value;
    pos = end + 1;
  }
  return spec;
}

// ---- shape files ----------------------------------------------------------

/// {"vertices": [[x, y], ...]}, closure implied, 17 significant digits.
inline void save_shape(const SimplePolygon& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "{\"vertices\": [";
  char buf[64];
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", p[i].x, p[i].y);
    out << (i ? ",\n  " : "\n  ") << buf;
  }
  out << "\n]}\n";
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline SimplePolygon shape_from_json(const nlohmann::json& doc, const std::string& origin) {
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array())
    throw ParseError(origin + ": expected an object with a \"vertices\" array");
  std::vector<Point> v;
  const auto& arr = doc["vertices"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& item = arr[i];
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
      throw ParseError(origin + ": vertex " + std::to_string(i) + " is not a [x, y] number pair");
    v.push_back({item[0].get<double>(), item[1].get<double>()});
  }
  try {
    return SimplePolygon(std::move(v));
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what(), e.crossing_edges);
  }
}

inline SimplePolygon load_shape(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open shape file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is the offset; report the line for humans.
    in.clear();
    in.seekg(0);
    std::size_t line = 1, offset = 0;
    for (char c; offset + 1 < e.byte && in.get(c); ++offset)
      if (c == '\n') ++line;
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
  return shape_from_json(doc, path.string());
}

}  // namespace meanarc
