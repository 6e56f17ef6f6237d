#pragma once
// Result serialization: sweep CSV/JSON, verification tables, critical-scale
// and embeddability JSON, static SVG scenes and sweep plots.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "meanarc/arc_engine.hpp"
#include "meanarc/closed_forms.hpp"
#include "meanarc/critical.hpp"
#include "meanarc/estimators.hpp"
#include "meanarc/geometry.hpp"
#include "meanarc/shapes.hpp"

namespace meanarc {

inline constexpr std::string_view kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// ---- numbers and files ----------------------------------------------------

/// Shortest text that parses back to exactly `v`; non-finite values become "nan"/"inf"/"-inf".
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// JSON has no NaN/inf; those map to null.
inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

inline Json motion_json(const RigidMotion& m) { return Json{{"theta", m.theta}, {"tx", m.tx}, {"ty", m.ty}}; }

inline Json summary_json(ShapeSummary s) { return Json{{"area", s.area}, {"perimeter", s.perimeter}}; }

// ---- sweeps ---------------------------------------------------------------

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "lambda", "area_ratio", "per_arc_mean", "per_arc_stderr", "per_traj_mean", "normalized_per_arc", "eq5",
      "eq3", "mazzolo", "n_intersecting", "n_contained", "n_covering", "n_disjoint"};
  return cols;
}

/// One row's cells in column order; the CSV and JSON writers share this.
inline Json sweep_row_json(const SweepRow& r) {
  const auto& e = r.estimate;
  Json j;
  j["lambda"] = json_number(r.lambda);
  j["area_ratio"] = json_number(r.area_ratio);
  j["per_arc_mean"] = json_number(e.per_arc_mean);
  j["per_arc_stderr"] = json_number(e.per_arc_stderr);
  j["per_traj_mean"] = json_number(e.per_traj_mean);
  j["normalized_per_arc"] = json_number(e.normalized_per_arc);
  j["eq5"] = json_number(r.eq5);
  j["eq3"] = json_number(r.eq3);
  j["mazzolo"] = json_number(r.mazzolo);
  j["n_intersecting"] = e.intersecting_count;
  j["n_contained"] = e.contained_count;
  j["n_covering"] = e.covering_count;
  j["n_disjoint"] = e.disjoint_count;
  return j;
}

inline std::string sweep_csv(const SweepResult& result) {
  std::string out;
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const SweepRow& row : result.rows) {
    const Json j = sweep_row_json(row);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ',';
      const Json& cell = j.at(cols[i]);
      if (cell.is_number_unsigned())
        out += std::to_string(cell.get<std::uint64_t>());
      else if (cell.is_null())
        out += "nan";
      else
        out += format_number(cell.get<double>());
    }
    out += '\n';
  }
  return out;
}

/// `metadata` is copied verbatim under "metadata"; version and columns are added.
inline Json sweep_json(const SweepResult& result, Json metadata = Json::object()) {
  metadata["version"] = std::string(kVersion);
  Json j;
  j["metadata"] = std::move(metadata);
  j["domain_summary"] = summary_json(result.domain);
  j["trajectory_template_summary"] = summary_json(result.trajectory_template);
  j["model_crossover_lambda"] = json_number(result.crossover);
  j["columns"] = sweep_columns();
  Json rows = Json::array();
  for (const SweepRow& r : result.rows) {
    Json row = sweep_row_json(r);
    row["normalized_stderr"] = json_number(r.estimate.normalized_stderr);
    row["per_traj_stderr"] = json_number(r.estimate.per_traj_stderr);
    row["resampled_slots"] = r.estimate.resampled_slots;
    row["flooded_slots"] = r.estimate.flooded_slots;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

// ---- verification ---------------------------------------------------------

enum class VerifyStatus { Pass, Fail, Skipped };

inline std::string_view to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::Pass: return "pass";
    case VerifyStatus::Fail: return "FAIL";
    case VerifyStatus::Skipped: return "skipped";
  }
  return "?";
}

struct VerifyRow {
  std::string quantity;
  MeasureEstimate estimate;
  double target = 0.0;
  double z = 0.0;
  VerifyStatus status = VerifyStatus::Skipped;
  std::string note;
};

struct VerifyTable {
  std::vector<VerifyRow> rows;
  double z_limit = 4.0;
  bool failed() const {
    for (const auto& r : rows)
      if (r.status == VerifyStatus::Fail) return true;
    return false;
  }
};

/**
 * Compare measure estimates with their closed forms. The overlap and
 * containment rows need a convex pair; the containment identity also needs
 * every partial overlap to cross exactly twice, so it is skipped when more
 * than 0.1% of crossing placements had more crossings.
 */
inline VerifyTable verify_measures(const KinematicMeasures& m, bool convex_pair, double z_limit = 4.0) {
  VerifyTable t;
  t.z_limit = z_limit;
  const ShapeSummary d = m.study.domain, tr = m.study.trajectory;
  const auto row = [&](std::string name, const MeasureEstimate& e, double target, std::string skip) {
    VerifyRow r{std::move(name), e, target, e.z_score(target), VerifyStatus::Skipped, std::move(skip)};
    if (r.note.empty()) r.status = std::fabs(r.z) < z_limit ? VerifyStatus::Pass : VerifyStatus::Fail;
    t.rows.push_back(std::move(r));
  };
  row("S", m.S, blaschke_S(d, tr), "");
  row("Ni", m.Ni, poincare_Ni(d, tr), "");
  const std::string nonconvex = convex_pair ? "" : "needs a convex pair";
  row("Ntot", m.Ntot, santalo_Ntot(d, tr), nonconvex);
  std::string nc_skip = nonconvex;
  if (nc_skip.empty() && 1000 * m.study.tally.multi_crossing > m.study.tally.crossing) nc_skip = "partial overlaps with more than 2 crossings seen";
  if (nc_skip.empty() && m.study.tally.covering > 0) nc_skip = "domain-covering placements seen";
  // A measure is never negative; polygonal discretization can push the identity slightly below 0.
  row("Nc", m.Nc, std::max(0.0, contained_measure_small(d, tr)), nc_skip);
  return t;
}

inline std::string verify_text(const VerifyTable& t) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %16s %14s %16s %9s  %s\n", "row", "estimate", "std_error", "target", "z",
                "status");
  out += line;
  for (const auto& r : t.rows) {
    std::snprintf(line, sizeof line, "%-6s %16.8g %14.6g %16.8g %9.3f  %s", r.quantity.c_str(), r.estimate.value,
                  r.estimate.std_error, r.target, r.z, std::string(to_string(r.status)).c_str());
    out += line;
    if (!r.note.empty()) out += " (" + r.note + ")";
    out += '\n';
  }
  return out;
}

inline Json verify_json(const VerifyTable& t, Json metadata = Json::object()) {
  metadata["version"] = std::string(kVersion);
  Json j;
  j["metadata"] = std::move(metadata);
  j["z_limit"] = t.z_limit;
  j["failed"] = t.failed();
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row;
    row["quantity"] = r.quantity;
    row["estimate"] = json_number(r.estimate.value);
    row["std_error"] = json_number(r.estimate.std_error);
    row["samples"] = r.estimate.samples;
    row["window_measure"] = json_number(r.estimate.window_measure);
    row["target"] = json_number(r.target);
    row["z"] = json_number(r.z);
    row["status"] = std::string(to_string(r.status));
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

// ---- critical scale and embeddability -------------------------------------

inline Json critical_json(const CriticalScaleResult& r, Json metadata = Json::object()) {
  metadata["version"] = std::string(kVersion);
  Json j;
  j["metadata"] = std::move(metadata);
  j["lambda_critical"] = r.lambda_critical;
  j["lambda_failed"] = r.lambda_failed;
  j["witness_motion"] = motion_json(r.witness_motion);
  j["search_stats"] = Json{{"evaluations", r.evaluations}, {"refinement_depth", r.refinement_depth}};
  j["bound"] = "lower";
  return j;
}

inline Json embed_json(const EmbedReport& r, Json metadata = Json::object()) {
  metadata["version"] = std::string(kVersion);
  Json j;
  j["metadata"] = std::move(metadata);
  j["fits"] = r.fits;
  Json ev;
  ev["witness"] = r.witness ? motion_json(*r.witness) : Json(nullptr);
  ev["search_evaluations"] = r.search_evaluations;
  ev["Nc_estimate"] = Json{{"value", r.Nc_estimate.value},
                           {"std_error", r.Nc_estimate.std_error},
                           {"samples", r.Nc_estimate.samples},
                           {"window_measure", r.Nc_estimate.window_measure}};
  ev["nc_z"] = json_number(r.nc_z);
  ev["statistical_fits"] = r.statistical_fits;
  ev["per_arc_mean"] = r.per_arc_mean ? Json(*r.per_arc_mean) : Json(nullptr);
  ev["cauchy_mean"] = r.cauchy;
  ev["mean_gap"] = r.mean_gap ? Json(*r.mean_gap) : Json(nullptr);
  j["evidence"] = std::move(ev);
  j["verdicts_agree"] = r.verdicts_agree;
  j["disagreement"] = !r.verdicts_agree;
  return j;
}

// ---- SVG ------------------------------------------------------------------

struct ScenePlacement {
  std::vector<Point> loop;                 ///< placed trajectory
  std::vector<std::vector<Point>> inside;  ///< inside arcs, as polylines
  Classification classification = Classification::Disjoint;
};

struct Scene {
  std::vector<Point> domain;
  std::vector<ScenePlacement> placements;
  std::vector<std::pair<std::string, double>> legend;  ///< label, value
};

/// Clip each placement of `trajectory` against `domain` and collect the geometry for drawing.
inline Scene build_scene(const SimplePolygon& domain, const SimplePolygon& trajectory,
                         const std::vector<RigidMotion>& motions, const Tolerance& tol) {
  Scene s;
  s.domain.assign(domain.vertices().begin(), domain.vertices().end());
  const PreparedDomain pd(domain);
  const PreparedTrajectory pt(trajectory);
  ClipScratch scratch;
  for (const RigidMotion& m : motions) {
    ScenePlacement p;
    transform_into(trajectory.vertices(), m, p.loop);
    const ArcReport r = clip_boundary(pd, pt, m, tol, ArcDetail::Polylines, scratch);
    p.classification = r.classification;
    for (const Arc& a : r.arcs) p.inside.push_back(a.polyline);
    s.placements.push_back(std::move(p));
  }
  return s;
}

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::fabs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Maps world coordinates into a fixed-size canvas with y pointing up.
struct Canvas {
  BoundingBox box;
  double width = 640.0, height = 640.0, margin = 20.0, scale = 1.0;

  explicit Canvas(BoundingBox b, double w = 640.0) : box(b), width(w) {
    const double span = std::max({b.width(), b.height(), 1e-12});
    scale = (width - 2.0 * margin) / span;
    height = b.height() * scale + 2.0 * margin;
  }
  std::string pt(Point p) const {
    return svg_num(margin + (p.x - box.min_x) * scale) + "," + svg_num(margin + (box.max_y - p.y) * scale);
  }
  std::string path(const std::vector<Point>& v, bool closed) const {
    std::string d;
    for (std::size_t i = 0; i < v.size(); ++i) d += (i ? " L" : "M") + pt(v[i]);
    if (closed) d += " Z";
    return d;
  }
};

}  // namespace detail

inline std::string render_svg(const Scene& scene) {
  BoundingBox box;
  for (Point p : scene.domain) box.expand(p);
  for (const auto& pl : scene.placements)
    for (Point p : pl.loop) box.expand(p);
  if (scene.domain.empty() && scene.placements.empty()) box = BoundingBox{0, 0, 1, 1};
  const detail::Canvas cv(box);
  const double legend_h = 18.0 * static_cast<double>(scene.legend.size() + 2) + 10.0;
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::svg_num(cv.width) << "\" height=\""
    << detail::svg_num(cv.height + legend_h) << "\" viewBox=\"0 0 " << detail::svg_num(cv.width) << " "
    << detail::svg_num(cv.height + legend_h) << "\">\n"
    << "<style>\n"
    << ".domain{fill:#dbe8f5;stroke:#2b5d8a;stroke-width:1.5}\n"
    << ".trajectory{fill:none;stroke:#888888;stroke-width:1}\n"
    << ".inside-arc{fill:none;stroke:#d1495b;stroke-width:2}\n"
    << ".legend{font-family:sans-serif;font-size:13px;fill:#222222}\n"
    << "</style>\n";
  if (!scene.domain.empty()) o << "<path class=\"domain\" d=\"" << cv.path(scene.domain, true) << "\"/>\n";
  o << "<g id=\"trajectories\">\n";
  for (const auto& pl : scene.placements)
    o << "<path class=\"trajectory\" data-class=\"" << to_string(pl.classification) << "\" d=\""
      << cv.path(pl.loop, true) << "\"/>\n";
  o << "</g>\n<g id=\"inside-arcs\">\n";
  for (const auto& pl : scene.placements)
    for (const auto& arc : pl.inside) o << "<path class=\"inside-arc\" d=\"" << cv.path(arc, false) << "\"/>\n";
  o << "</g>\n<g id=\"legend\" class=\"legend\">\n";
  double y = cv.height + 18.0;
  o << "<text x=\"20\" y=\"" << detail::svg_num(y) << "\">domain (filled), trajectories (grey), inside arcs (red); "
    << scene.placements.size() << " placements</text>\n";
  for (const auto& [label, value] : scene.legend) {
    y += 18.0;
    o << "<text x=\"20\" y=\"" << detail::svg_num(y) << "\">" << detail::xml_escape(label) << " = "
      << format_number(value) << "</text>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

/// Normalized per-arc mean against lambda with the piecewise model overlaid.
inline std::string render_sweep_svg(const SweepResult& result) {
  const double W = 640, H = 400, m = 50;
  double lo = 0, hi = 1, ymax = 1.1;
  if (!result.rows.empty()) {
    lo = result.rows.front().lambda;
    hi = result.rows.back().lambda;
    if (hi <= lo) hi = lo + 1.0;
    for (const auto& r : result.rows)
      ymax = std::max({ymax, r.estimate.normalized_per_arc + r.estimate.normalized_stderr, r.model() / r.eq3});
  }
  const auto X = [&](double l) { return detail::svg_num(m + (l - lo) / (hi - lo) * (W - 2 * m)); };
  const auto Y = [&](double v) { return detail::svg_num(H - m - v / ymax * (H - 2 * m)); };
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n"
    << "<style>\n"
    << ".axis{stroke:#222222;stroke-width:1}\n"
    << ".estimate{fill:none;stroke:#d1495b;stroke-width:2}\n"
    << ".model{fill:none;stroke:#2b5d8a;stroke-width:1.5;stroke-dasharray:5,4}\n"
    << ".legend{font-family:sans-serif;font-size:12px;fill:#222222}\n"
    << "</style>\n";
  o << "<line class=\"axis\" x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << W - m << "\" y2=\"" << H - m
    << "\"/>\n";
  o << "<line class=\"axis\" x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << H - m << "\"/>\n";
  o << "<line class=\"axis\" x1=\"" << m << "\" y1=\"" << Y(1.0) << "\" x2=\"" << W - m << "\" y2=\"" << Y(1.0)
    << "\" stroke-dasharray=\"2,3\"/>\n";
  std::string est, model;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    est += (i ? " L" : "M") + X(r.lambda) + "," + Y(r.estimate.normalized_per_arc);
    model += (i ? " L" : "M") + X(r.lambda) + "," + Y(r.model() / r.eq3);
  }
  if (!result.rows.empty()) {
    o << "<path class=\"model\" d=\"" << model << "\"/>\n";
    o << "<path class=\"estimate\" d=\"" << est << "\"/>\n";
    for (const auto& r : result.rows)
      o << "<circle cx=\"" << X(r.lambda) << "\" cy=\"" << Y(r.estimate.normalized_per_arc)
        << "\" r=\"2.5\" fill=\"#d1495b\"/>\n";
  }
  o << "<g class=\"legend\">\n"
    << "<text x=\"" << m << "\" y=\"20\">normalized per-arc mean (solid) and piecewise model (dashed) vs lambda</text>\n"
    << "<text x=\"" << m << "\" y=\"" << H - 15 << "\">lambda " << format_number(lo) << " .. " << format_number(hi)
    << "</text>\n"
    << "<text x=\"8\" y=\"" << Y(1.0) << "\">1.0</text>\n"
    << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace meanarc
