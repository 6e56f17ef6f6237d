#pragma once
// Run configuration and the command drivers behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "meanarc/critical.hpp"
#include "meanarc/geometry.hpp"
#include "meanarc/estimators.hpp"
#include "meanarc/report.hpp"
#include "meanarc/sampler.hpp"
#include "meanarc/shapes.hpp"

namespace meanarc {

struct ConfigError : Error {
  using Error::Error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitVerifyFailed = 4,
  kExitFlood = 5,
};

struct RunConfig {
  std::string command = "sweep";
  std::string domain;
  std::string trajectory;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::uint64_t streams = 16;
  unsigned threads = 0;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  std::optional<int> lambda_steps;
  std::vector<double> lambdas;
  std::string out = "out";
  bool svg = false;
  std::optional<double> eps_length;
  double window_scale = 1.0;         ///< test hook; verification should fail when it is not 1
  std::uint64_t search_budget = 20000;  ///< placements per containment search
  int scene_placements = 40;         ///< drawn by the sample command

  /// Explicit list when given, else the linear grid.
  std::vector<double> lambda_grid() const {
    if (!lambdas.empty()) return lambdas;
    if (!lambda_min || !lambda_max) return {};
    return linear_grid(*lambda_min, *lambda_max, lambda_steps.value_or(10));
  }

  void validate() const {
    static const std::set<std::string> commands{"sweep", "verify", "critical", "embed", "sample"};
    if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");
    if (domain.empty()) throw ConfigError("--domain is required");
    if (trajectory.empty()) throw ConfigError("--trajectory is required");
    if (samples < 1000) throw ConfigError("--samples must be at least 1000");
    if (streams < 1) throw ConfigError("--streams must be at least 1");
    if (eps_length && !(*eps_length > 0.0)) throw ConfigError("--eps-length must be > 0");
    if (!(window_scale > 0.0)) throw ConfigError("window_scale must be > 0");
    if (scene_placements < 0) throw ConfigError("scene_placements must be >= 0");
    if (lambda_steps && *lambda_steps < 1) throw ConfigError("--lambda-steps must be >= 1");
    if (lambda_min && !(*lambda_min > 0.0)) throw ConfigError("--lambda-min must be > 0");
    if (lambda_min && lambda_max && !(*lambda_max >= *lambda_min))
      throw ConfigError("--lambda-max must be >= --lambda-min");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      if (!(lambdas[i] > 0.0)) throw ConfigError("--lambdas entries must be > 0");
      if (i && !(lambdas[i] > lambdas[i - 1])) throw ConfigError("--lambdas must be strictly increasing");
    }
    if (command == "sweep") {
      if (lambdas.empty() && (!lambda_min || !lambda_max))
        throw ConfigError("sweep needs --lambdas or both --lambda-min and --lambda-max");
      const auto g = lambda_grid();
      if (g.size() > 1 && !(g[1] > g[0])) throw ConfigError("lambda grid must be strictly increasing");
    }
  }
};

/// Keys mirror the long flag names with '-' or '_'; unknown keys are rejected.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c = std::move(base);
  for (const auto& [raw_key, v] : j.items()) {
    std::string key = raw_key;
    for (char& ch : key)
      if (ch == '-') ch = '_';
    try {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "domain") c.domain = v.get<std::string>();
      else if (key == "trajectory") c.trajectory = v.get<std::string>();
      else if (key == "samples") c.samples = v.get<std::uint64_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "streams") c.streams = v.get<std::uint64_t>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "lambda_min") c.lambda_min = v.get<double>();
      else if (key == "lambda_max") c.lambda_max = v.get<double>();
      else if (key == "lambda_steps") c.lambda_steps = v.get<int>();
      else if (key == "lambdas") c.lambdas = v.get<std::vector<double>>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "svg") c.svg = v.get<bool>();
      else if (key == "eps_length") c.eps_length = v.get<double>();
      else if (key == "window_scale") c.window_scale = v.get<double>();
      else if (key == "search_budget") c.search_budget = v.get<std::uint64_t>();
      else if (key == "scene_placements") c.scene_placements = v.get<int>();
      else throw ConfigError("unknown config key '" + raw_key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + raw_key + "' has the wrong type: " + e.what());
    }
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

inline Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["domain"] = c.domain;
  j["trajectory"] = c.trajectory;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["streams"] = c.streams;
  if (c.eps_length) j["eps_length"] = *c.eps_length;
  if (c.window_scale != 1.0) j["window_scale"] = c.window_scale;
  return j;
}

/// A shape spec string ("kind:k=v,...", "file:path" or a *.json path) to a polygon.
inline SimplePolygon resolve_shape(const std::string& text) {
  if (std::filesystem::exists(text) && std::filesystem::is_regular_file(text)) return load_shape(text);
  return build(parse_shape_spec(text));
}

namespace detail {

inline RunOptions run_options(const RunConfig& c) {
  RunOptions o;
  o.seed = c.seed;
  o.streams = c.streams;
  o.threads = c.threads;
  o.window_scale = c.window_scale;
  if (c.eps_length) o.tolerance = Tolerance{*c.eps_length, 1e-12};
  return o;
}

inline Json shapes_metadata(const RunConfig& c, const SimplePolygon& d, const SimplePolygon& t) {
  Json m = config_json(c);
  m["domain_summary"] = summary_json(summarize(d));
  m["trajectory_summary"] = summary_json(summarize(t));
  m["domain_convex"] = is_convex(d);
  m["trajectory_convex"] = is_convex(t);
  return m;
}

}  // namespace detail

struct Outputs {
  std::vector<std::filesystem::path> written;
};

// ---- commands -------------------------------------------------------------

inline int run_sweep(const RunConfig& c, std::ostream& log, Outputs& outputs) {
  const SimplePolygon domain = resolve_shape(c.domain);
  const SimplePolygon traj = resolve_shape(c.trajectory);
  const SweepResult res = sweep_scale(domain, traj, c.lambda_grid(), c.samples, detail::run_options(c));
  const std::filesystem::path dir(c.out);
  write_text_file(dir / "sweep.csv", sweep_csv(res));
  write_text_file(dir / "sweep.json", sweep_json(res, detail::shapes_metadata(c, domain, traj)).dump(2) + "\n");
  outputs.written.insert(outputs.written.end(), {dir / "sweep.csv", dir / "sweep.json"});
  if (c.svg) {
    write_text_file(dir / "sweep.svg", render_sweep_svg(res));
    outputs.written.push_back(dir / "sweep.svg");
  }
  for (const auto& r : res.rows)
    log << "lambda " << format_number(r.lambda) << "  normalized per-arc mean "
        << format_number(r.estimate.normalized_per_arc) << " +- " << format_number(r.estimate.normalized_stderr)
        << "  contained " << r.estimate.contained_count << "\n";
  return kExitOk;
}

inline int run_verify(const RunConfig& c, std::ostream& log, Outputs& outputs) {
  const SimplePolygon domain = resolve_shape(c.domain);
  const SimplePolygon traj = resolve_shape(c.trajectory);
  const KinematicMeasures m = estimate_measures(domain, traj, c.samples, detail::run_options(c));
  const VerifyTable t = verify_measures(m, is_convex(domain) && is_convex(traj));
  log << verify_text(t);
  const std::filesystem::path dir(c.out);
  write_text_file(dir / "verify.json", verify_json(t, detail::shapes_metadata(c, domain, traj)).dump(2) + "\n");
  outputs.written.push_back(dir / "verify.json");
  if (t.failed()) {
    log << "verification failed: |z| >= " << t.z_limit << " in at least one row\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

inline int run_critical(const RunConfig& c, std::ostream& log, Outputs& outputs) {
  const SimplePolygon domain = resolve_shape(c.domain);
  const SimplePolygon traj = resolve_shape(c.trajectory);
  LambdaBounds b = default_critical_bounds(domain, traj);
  if (c.lambda_min) b.low = *c.lambda_min;
  if (c.lambda_max) b.high = *c.lambda_max;
  const CriticalScaleResult r = find_critical_scale(domain, traj, b, c.search_budget, c.seed);
  const std::filesystem::path dir(c.out);
  Json meta = detail::shapes_metadata(c, domain, traj);
  meta["lambda_bounds"] = Json{{"low", b.low}, {"high", b.high}};
  write_text_file(dir / "critical.json", critical_json(r, meta).dump(2) + "\n");
  outputs.written.push_back(dir / "critical.json");
  if (c.svg) {
    const SimplePolygon shape = scale(traj, r.lambda_critical);
    Scene s = build_scene(domain, shape, {r.witness_motion}, default_tolerance(domain, shape));
    s.legend.emplace_back("lambda_critical", r.lambda_critical);
    write_text_file(dir / "critical.svg", render_svg(s));
    outputs.written.push_back(dir / "critical.svg");
  }
  log << "lambda_critical " << format_number(r.lambda_critical) << " (lower bound; search failed at "
      << format_number(r.lambda_failed) << ", " << r.evaluations << " evaluations)\n";
  return kExitOk;
}

inline int run_embed(const RunConfig& c, std::ostream& log, Outputs& outputs) {
  const SimplePolygon container = resolve_shape(c.domain);
  const SimplePolygon candidate = resolve_shape(c.trajectory);
  const EmbedReport r = test_embeddability(container, candidate, c.samples, detail::run_options(c), c.search_budget);
  const std::filesystem::path dir(c.out);
  write_text_file(dir / "embed.json",
                  embed_json(r, detail::shapes_metadata(c, container, candidate)).dump(2) + "\n");
  outputs.written.push_back(dir / "embed.json");
  if (c.svg) {
    Scene s = build_scene(container, candidate, r.witness ? std::vector<RigidMotion>{*r.witness} : std::vector<RigidMotion>{},
                          default_tolerance(container, candidate));
    s.legend.emplace_back("Nc z-score", r.nc_z);
    write_text_file(dir / "embed.svg", render_svg(s));
    outputs.written.push_back(dir / "embed.svg");
  }
  log << "fits " << (r.fits ? "yes" : "no") << " (direct search), Nc z-score " << format_number(r.nc_z)
      << (r.verdicts_agree ? "" : "  [verdicts disagree]") << "\n";
  return kExitOk;
}

/// Draw a handful of placements from the sampling window and record them with the run's estimate.
inline int run_sample(const RunConfig& c, std::ostream& log, Outputs& outputs) {
  const SimplePolygon domain = resolve_shape(c.domain);
  const SimplePolygon traj = resolve_shape(c.trajectory);
  const RunOptions opt = detail::run_options(c);
  const Tolerance tol = opt.tolerance.value_or(default_tolerance(domain, traj));
  const SamplingWindow w = build_window(domain, traj).scaled(c.window_scale);
  const PreparedDomain pd(domain);
  const PreparedTrajectory pt(traj);
  ClipScratch scratch;

  // Keep only overlapping placements so the picture shows something.
  std::vector<RigidMotion> motions;
  Json placements = Json::array();
  MotionStream stream(w, c.seed, 0);
  for (std::uint64_t tries = 0; motions.size() < static_cast<std::size_t>(c.scene_placements) && tries < 100000; ++tries) {
    const RigidMotion m = stream.next();
    const ArcReport r = clip_boundary(pd, pt, m, tol, ArcDetail::Lengths, scratch);
    if (r.classification == Classification::Disjoint || r.degenerate) continue;
    motions.push_back(m);
    Json p = motion_json(m);
    p["classification"] = std::string(to_string(r.classification));
    p["crossings"] = r.crossing_count;
    p["inside_length"] = r.inside_length;
    placements.push_back(std::move(p));
  }
  const MeanArcEstimate est = estimate_mean_arc(domain, traj, c.samples, opt);
  Json j;
  j["metadata"] = detail::shapes_metadata(c, domain, traj);
  j["metadata"]["version"] = std::string(kVersion);
  j["placements"] = std::move(placements);
  j["per_arc_mean"] = est.per_arc_mean;
  j["per_arc_stderr"] = est.per_arc_stderr;
  j["per_traj_mean"] = est.per_traj_mean;
  j["cauchy_mean"] = est.cauchy;
  j["arc_histogram"] = Json{{"max", est.histogram_max}, {"counts", est.arc_histogram}};
  const std::filesystem::path dir(c.out);
  write_text_file(dir / "sample.json", j.dump(2) + "\n");
  outputs.written.push_back(dir / "sample.json");
  if (c.svg) {
    Scene s = build_scene(domain, traj, motions, tol);
    s.legend.emplace_back("per-arc mean", est.per_arc_mean);
    s.legend.emplace_back("per-trajectory mean", est.per_traj_mean);
    s.legend.emplace_back("pi A / P", est.cauchy);
    write_text_file(dir / "sample.svg", render_svg(s));
    outputs.written.push_back(dir / "sample.svg");
  }
  log << "per-arc mean " << format_number(est.per_arc_mean) << " +- " << format_number(est.per_arc_stderr)
      << " (pi A / P = " << format_number(est.cauchy) << ")\n";
  return kExitOk;
}

/// Validate, dispatch and map failures to exit codes; messages go to `err`.
inline int run_command(const RunConfig& c, std::ostream& log, std::ostream& err, Outputs* outputs = nullptr) {
  Outputs local;
  Outputs& out = outputs ? *outputs : local;
  try {
    c.validate();
    if (c.command == "sweep") return run_sweep(c, log, out);
    if (c.command == "verify") return run_verify(c, log, out);
    if (c.command == "critical") return run_critical(c, log, out);
    if (c.command == "embed") return run_embed(c, log, out);
    return run_sample(c, log, out);
  } catch (const DegenerateFlood& e) {
    err << "error: " << e.what() << "\n";
    return kExitFlood;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidSpec& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidScale& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "config error: invalid shape: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BoundsInvalid& e) {
    err << "config error: " << e.what() << "; adjust --lambda-min/--lambda-max\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace meanarc
