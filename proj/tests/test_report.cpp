#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "support.hpp"

using namespace meanarc;
using namespace meanarc::testing;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("meanarc_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

RunOptions opts(std::uint64_t seed) {
  RunOptions o;
  o.seed = seed;
  return o;
}

RunConfig config(std::string command, std::string domain, std::string traj, const fs::path& out) {
  RunConfig c;
  c.command = std::move(command);
  c.domain = std::move(domain);
  c.trajectory = std::move(traj);
  c.samples = 5000;
  c.out = out.string();
  return c;
}

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, pi, 1e-300, 123456789.0, -2.5}) EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_TRUE(json_number(std::nan("")).is_null());
}

TEST(SweepReport, CsvMatchesJsonBitForBit) {
  const SweepResult r = sweep_scale(unit_square(), shape("circle:r=1"), {0.1, 0.3, 0.45, 0.7}, 5000, opts(1));
  const auto csv = parse_csv(sweep_csv(r));
  const Json j = Json::parse(sweep_json(r).dump());
  ASSERT_EQ(csv.size(), r.rows.size() + 1);
  EXPECT_EQ(csv[0], sweep_columns());
  ASSERT_EQ(j["rows"].size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    for (std::size_t k = 0; k < csv[0].size(); ++k) {
      const Json& cell = j["rows"][i][csv[0][k]];
      if (cell.is_number_unsigned())
        EXPECT_EQ(std::stoull(csv[i + 1][k]), cell.get<std::uint64_t>());
      else
        EXPECT_EQ(std::stod(csv[i + 1][k]), cell.get<double>()) << csv[0][k];
    }
  EXPECT_EQ(j["metadata"]["version"], kVersion);
  EXPECT_EQ(j["columns"].get<std::vector<std::string>>(), sweep_columns());
}

TEST(SweepReport, PlateauColumnIsConstant) {
  const SweepResult r = sweep_scale(unit_square(), shape("circle:r=1"), {0.2, 0.8}, 5000, opts(2));
  for (const auto& row : r.rows) EXPECT_DOUBLE_EQ(row.eq3, pi / 4);
  const auto csv = parse_csv(sweep_csv(r));
  EXPECT_EQ(csv[1][7], csv[2][7]);
}

TEST(SweepReport, SingleLambdaAboveCritical) {
  const SweepResult r = sweep_scale(unit_square(), shape("circle:r=1"), {0.6}, 20000, opts(3));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].estimate.contained_count, 0u);
  EXPECT_NEAR(r.rows[0].estimate.normalized_per_arc, 1.0, 0.03);
  EXPECT_EQ(parse_csv(sweep_csv(r)).size(), 2u);
}

TEST(Verify, RectangleCrossesFourTimesSoContainmentIsSkipped) {
  const KinematicMeasures m = estimate_measures(shape("circle:r=1"), shape("rect:w=0.8,h=0.5"), 50000, opts(4));
  const VerifyTable t = verify_measures(m, true);
  EXPECT_FALSE(t.failed()) << verify_text(t);
  EXPECT_EQ(t.rows[2].status, VerifyStatus::Pass);
  EXPECT_EQ(t.rows[3].status, VerifyStatus::Skipped);
}

TEST(Verify, ConvexPairPasses) {
  const KinematicMeasures m = estimate_measures(shape("circle:r=1"), shape("ellipse:a=0.4,b=0.25"), 100000, opts(4));
  const VerifyTable t = verify_measures(m, true);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_FALSE(t.failed()) << verify_text(t);
  for (const auto& r : t.rows) EXPECT_EQ(r.status, VerifyStatus::Pass) << r.quantity;
  const Json j = verify_json(t);
  EXPECT_FALSE(j["failed"].get<bool>());
  EXPECT_EQ(j["rows"][0]["quantity"], "S");
}

TEST(Verify, NonConvexSkipsOverlapRows) {
  const SimplePolygon star = shape("star:outer=1,inner=0.4");
  const KinematicMeasures m = estimate_measures(star, shape("circle:r=0.2"), 50000, opts(5));
  const VerifyTable t = verify_measures(m, false);
  EXPECT_EQ(t.rows[0].status, VerifyStatus::Pass);
  EXPECT_EQ(t.rows[1].status, VerifyStatus::Pass);
  EXPECT_EQ(t.rows[2].status, VerifyStatus::Skipped);
  EXPECT_EQ(t.rows[3].status, VerifyStatus::Skipped);
  EXPECT_NE(verify_text(t).find("skipped"), std::string::npos);
}

TEST(Verify, ShrunkWindowFails) {
  RunOptions o = opts(6);
  o.window_scale = 0.5;
  const KinematicMeasures m = estimate_measures(shape("circle:r=1"), shape("circle:r=0.5"), 50000, o);
  EXPECT_TRUE(verify_measures(m, true).failed());
}

TEST(CriticalReport, Schema) {
  CriticalScaleResult r;
  r.lambda_critical = 0.49;
  r.lambda_failed = 0.5;
  r.witness_motion = RigidMotion(0.1, 0.5, 0.5);
  r.evaluations = 42;
  r.refinement_depth = 7;
  const Json j = critical_json(r);
  EXPECT_EQ(j["lambda_critical"], 0.49);
  EXPECT_EQ(j["bound"], "lower");
  EXPECT_EQ(j["witness_motion"]["tx"], 0.5);
  EXPECT_EQ(j["search_stats"]["evaluations"], 42);
  EXPECT_EQ(j["search_stats"]["refinement_depth"], 7);
}

TEST(EmbedReport, DisagreementIsFlagged) {
  EmbedReport r;
  r.fits = true;
  r.witness = RigidMotion(0, 1, 2);
  r.statistical_fits = false;
  r.verdicts_agree = false;
  const Json j = embed_json(r);
  EXPECT_TRUE(j["fits"].get<bool>());
  EXPECT_TRUE(j["disagreement"].get<bool>());
  EXPECT_EQ(j["evidence"]["witness"]["ty"], 2.0);
  EXPECT_TRUE(j["evidence"]["per_arc_mean"].is_null());
}

TEST(Svg, EmptySceneIsValid) {
  const std::string s = render_svg(Scene{});
  EXPECT_EQ(s.find("class=\"domain\" d="), std::string::npos);
  EXPECT_EQ(s.rfind("<?xml", 0), 0u);
  EXPECT_NE(s.find("id=\"legend\""), std::string::npos);
  EXPECT_NE(s.find("0 placements"), std::string::npos);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}

TEST(Svg, DomainOnlyWithoutPlacements) {
  const std::string s = render_svg(build_scene(unit_square(), unit_square(), {}, Tolerance{}));
  EXPECT_NE(s.find("class=\"domain\" d="), std::string::npos);
  EXPECT_EQ(s.find("class=\"trajectory\""), std::string::npos);
  EXPECT_EQ(s.find("class=\"inside-arc\" d="), std::string::npos);
}

TEST(Svg, ContainedLoopIsOneInsideArc) {
  const Scene sc = build_scene(unit_square(), circle_at({0, 0}, 0.1, 32), {RigidMotion(0, 0.5, 0.5)},
                               default_tolerance(unit_square(), circle_at({0, 0}, 0.1, 32)));
  ASSERT_EQ(sc.placements.size(), 1u);
  EXPECT_EQ(sc.placements[0].classification, Classification::TrajectoryInsideDomain);
  ASSERT_EQ(sc.placements[0].inside.size(), 1u);
  // The whole closed loop carries the inside style.
  const auto& arc = sc.placements[0].inside[0];
  EXPECT_EQ(arc.size(), 33u);
  EXPECT_LT(distance(arc.front(), arc.back()), 1e-12);
  const std::string s = render_svg(sc);
  EXPECT_NE(s.find("class=\"inside-arc\" d="), std::string::npos);
  EXPECT_NE(s.find("data-class=\"contained\""), std::string::npos);
}

TEST(Svg, CrossingLoopDrawsArcsDeterministically) {
  const SimplePolygon c = circle_at({0, 0}, 0.3, 64);
  std::vector<RigidMotion> ms{RigidMotion(0.3, 0.0, 0.5), RigidMotion(1.0, 1.0, 1.0), RigidMotion(0, 0.5, 0.5)};
  Scene sc = build_scene(unit_square(), c, ms, default_tolerance(unit_square(), c));
  sc.legend.emplace_back("a < b & c", 0.25);
  const std::string a = render_svg(sc), b = render_svg(sc);
  EXPECT_EQ(a, b);
  std::size_t arcs = 0;
  for (auto pos = a.find("class=\"inside-arc\" d="); pos != std::string::npos; pos = a.find("class=\"inside-arc\" d=", pos + 1))
    ++arcs;
  EXPECT_EQ(arcs, 3u);  // one per edge crossing pair plus the contained loop
  EXPECT_NE(a.find("a &lt; b &amp; c = 0.25"), std::string::npos);
}

TEST(Config, JsonKeysAndTypes) {
  const RunConfig c = config_from_json(Json::parse(R"({"command":"verify","domain":"circle:r=1","trajectory":"circle:r=0.5",
      "samples":20000,"seed":9,"lambda-min":0.1,"lambda_max":0.9,"lambda-steps":5,"eps-length":1e-8,"svg":true})"));
  EXPECT_EQ(c.command, "verify");
  EXPECT_EQ(c.samples, 20000u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.lambda_grid().size(), 5u);
  EXPECT_DOUBLE_EQ(*c.eps_length, 1e-8);
  EXPECT_TRUE(c.svg);
  EXPECT_THROW(config_from_json(Json::parse(R"({"sampels":5})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"samples":"many"})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse("[1,2]")), ConfigError);
}

TEST(Config, Validation) {
  RunConfig c = config("sweep", "rect:w=1,h=1", "circle:r=1", "x");
  EXPECT_THROW(c.validate(), ConfigError);  // no lambdas
  c.lambdas = {0.2, 0.1};
  EXPECT_THROW(c.validate(), ConfigError);
  c.lambdas = {0.1, 0.2};
  EXPECT_NO_THROW(c.validate());
  c.samples = 10;
  EXPECT_THROW(c.validate(), ConfigError);
  c.samples = 5000;
  c.command = "bogus";
  EXPECT_THROW(c.validate(), ConfigError);
  c.command = "verify";
  c.eps_length = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, FileErrors) {
  const fs::path dir = scratch_dir("cfg");
  fs::create_directories(dir);
  EXPECT_THROW(load_config(dir / "missing.json"), IoError);
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
}

TEST(RunCommand, SweepIsReproducible) {
  const fs::path dir = scratch_dir("sweep");
  RunConfig c = config("sweep", "rect:w=1,h=1", "circle:r=1", dir / "a");
  c.lambdas = {0.2, 0.5, 0.8};
  c.svg = true;
  std::ostringstream log, err;
  Outputs out;
  ASSERT_EQ(run_command(c, log, err, &out), kExitOk) << err.str();
  EXPECT_EQ(out.written.size(), 3u);
  c.out = (dir / "b").string();
  c.threads = 3;
  ASSERT_EQ(run_command(c, log, err), kExitOk);
  for (const char* f : {"sweep.csv", "sweep.json", "sweep.svg"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
}

TEST(RunCommand, ExitCodes) {
  const fs::path dir = scratch_dir("codes");
  std::ostringstream log, err;
  RunConfig c = config("verify", "circle:r=1", "circle:r=0.5", dir);
  c.samples = 20000;
  EXPECT_EQ(run_command(c, log, err), kExitOk) << err.str();
  c.window_scale = 0.5;
  EXPECT_EQ(run_command(c, log, err), kExitVerifyFailed);
  c.window_scale = 1.0;
  c.domain = (dir / "nope.json").string();
  EXPECT_EQ(run_command(c, log, err), kExitIo);  // a .json path is read as a shape file
  c.domain = "file:" + (dir / "nope.json").string();
  EXPECT_EQ(run_command(c, log, err), kExitIo);
  c.domain = "circle:r=-1";
  EXPECT_EQ(run_command(c, log, err), kExitConfig);
  c.domain = "circle:r=1,res=32";
  c.trajectory = "circle:r=0.5,res=32";
  c.eps_length = 5.0;
  EXPECT_EQ(run_command(c, log, err), kExitFlood);
  c.eps_length.reset();
  c.command = "sweep";
  c.lambdas = {0.5};
  c.window_scale = 1e6;
  EXPECT_EQ(run_command(c, log, err), kExitOther);  // nothing crossed
}

TEST(RunCommand, CriticalEmbedAndSample) {
  const fs::path dir = scratch_dir("other");
  std::ostringstream log, err;
  RunConfig c = config("critical", "rect:w=1,h=1", "circle:r=1", dir);
  c.svg = true;
  ASSERT_EQ(run_command(c, log, err), kExitOk) << err.str();
  const Json crit = Json::parse(slurp(dir / "critical.json"));
  EXPECT_NEAR(crit["lambda_critical"].get<double>(), 0.5, 1e-3);
  EXPECT_TRUE(fs::exists(dir / "critical.svg"));

  c.command = "embed";
  c.trajectory = "circle:r=0.6";
  ASSERT_EQ(run_command(c, log, err), kExitOk) << err.str();
  const Json emb = Json::parse(slurp(dir / "embed.json"));
  EXPECT_FALSE(emb["fits"].get<bool>());
  EXPECT_FALSE(emb["disagreement"].get<bool>());

  c.command = "sample";
  c.trajectory = "circle:r=0.3";
  c.scene_placements = 5;
  ASSERT_EQ(run_command(c, log, err), kExitOk) << err.str();
  const Json smp = Json::parse(slurp(dir / "sample.json"));
  EXPECT_EQ(smp["placements"].size(), 5u);
  EXPECT_EQ(slurp(dir / "sample.svg").find("<?xml"), 0u);
}

#ifdef MEANARC_CLI
int cli(const std::string& args) {
  const int raw = std::system((std::string(MEANARC_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

TEST(Cli, FlagsOverrideConfig) {
  const fs::path dir = scratch_dir("cli");
  fs::create_directories(dir);
  std::ofstream(dir / "run.json") << R"({"command":"sweep","domain":"rect:w=1,h=1","trajectory":"circle:r=1",
    "samples":3000,"lambdas":[0.2,0.4],"out":")" << (dir / "from_config").string() << "\"}";
  ASSERT_EQ(cli("--config " + (dir / "run.json").string()), 0);
  ASSERT_EQ(cli("--config " + (dir / "run.json").string() + " --lambdas 0.3 --out " + (dir / "flag").string()), 0);
  EXPECT_EQ(parse_csv(slurp(dir / "from_config" / "sweep.csv")).size(), 3u);
  const auto rows = parse_csv(slurp(dir / "flag" / "sweep.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "0.3");
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("cli_codes");
  EXPECT_EQ(cli("--command sweep --domain rect:w=1,h=1 --trajectory circle:r=1 --samples 2000 --out " + dir.string()), 2);
  EXPECT_EQ(cli("--command nope --domain rect:w=1,h=1 --trajectory circle:r=1"), 2);
  EXPECT_EQ(cli("--config " + (dir / "missing.json").string()), 3);
  EXPECT_EQ(cli("--command verify --domain circle:r=1 --trajectory circle:r=0.5 --samples 20000 --window-scale 0.5 --out " +
                dir.string()),
            4);
  EXPECT_EQ(cli("--command verify --domain circle:r=1,res=32 --trajectory circle:r=0.5,res=32 --samples 2000 "
                "--eps-length 5 --out " + dir.string()),
            5);
  EXPECT_EQ(cli("--version"), 0);
}
#endif

}  // namespace
