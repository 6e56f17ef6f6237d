// Command-line driver: sweep, verify, critical, embed, sample.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "meanarc/driver.hpp"

int main(int argc, char** argv) {
  using namespace meanarc;
  CLI::App app{"Monte Carlo mean arc length of closed trajectories over 2D domains"};
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path, command, domain, trajectory, out;
  std::uint64_t samples = 0, seed = 0, streams = 0, budget = 0;
  unsigned threads = 0;
  double lambda_min = 0, lambda_max = 0, eps_length = 0, window_scale = 0;
  int lambda_steps = 0, scene = 0;
  std::vector<double> lambdas;
  bool svg = false;

  app.add_option("--config", config_path, "JSON file mirroring the flags; flags override it");
  auto* o_command = app.add_option("--command", command, "sweep | verify | critical | embed | sample")
                        ->check(CLI::IsMember({"sweep", "verify", "critical", "embed", "sample"}));
  auto* o_domain = app.add_option("--domain", domain, "domain shape: kind:k=v,... or a shape JSON path");
  auto* o_traj = app.add_option("--trajectory", trajectory, "trajectory shape: kind:k=v,... or a shape JSON path");
  auto* o_samples = app.add_option("--samples", samples, "placements drawn per estimate (>= 1000)");
  auto* o_seed = app.add_option("--seed", seed, "master seed");
  auto* o_streams = app.add_option("--streams", streams, "independent random streams");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (0: all cores); results do not depend on it");
  auto* o_lmin = app.add_option("--lambda-min", lambda_min, "smallest trajectory scale (critical: low bound)");
  auto* o_lmax = app.add_option("--lambda-max", lambda_max, "largest trajectory scale (critical: high bound)");
  auto* o_lsteps = app.add_option("--lambda-steps", lambda_steps, "grid points between --lambda-min and --lambda-max");
  auto* o_lambdas = app.add_option("--lambdas", lambdas, "explicit increasing scale list")->delimiter(',');
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_svg = app.add_flag("--svg", svg, "also write an SVG rendering");
  auto* o_eps = app.add_option("--eps-length", eps_length, "absolute length tolerance");
  auto* o_budget = app.add_option("--search-budget", budget, "placements per containment search");
  auto* o_scene = app.add_option("--scene-placements", scene, "placements drawn by the sample command");
  auto* o_wscale = app.add_option("--window-scale", window_scale, "test hook: rescale the sampling window");
  o_lambdas->excludes(o_lmin)->excludes(o_lsteps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (*o_command) cfg.command = command;
  if (*o_domain) cfg.domain = domain;
  if (*o_traj) cfg.trajectory = trajectory;
  if (*o_samples) cfg.samples = samples;
  if (*o_seed) cfg.seed = seed;
  if (*o_streams) cfg.streams = streams;
  if (*o_threads) cfg.threads = threads;
  if (*o_lmin) cfg.lambda_min = lambda_min;
  if (*o_lmax) cfg.lambda_max = lambda_max;
  if (*o_lsteps) cfg.lambda_steps = lambda_steps;
  if (*o_lambdas) cfg.lambdas = lambdas;
  if (*o_lmin || *o_lmax) {
    if (!*o_lambdas) cfg.lambdas.clear();
  }
  if (*o_out) cfg.out = out;
  if (*o_svg) cfg.svg = svg;
  if (*o_eps) cfg.eps_length = eps_length;
  if (*o_budget) cfg.search_budget = budget;
  if (*o_scene) cfg.scene_placements = scene;
  if (*o_wscale) cfg.window_scale = window_scale;

  Outputs outputs;
  const int code = run_command(cfg, std::cout, std::cerr, &outputs);
  for (const auto& p : outputs.written) std::cout << "wrote " << p.string() << "\n";
  return code;
}
