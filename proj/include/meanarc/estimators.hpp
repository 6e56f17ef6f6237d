#pragma once
/**
 * @file estimators.hpp
 * @brief Monte Carlo estimates of kinematic measures and of the mean arc
 * length, plus scale sweeps.
 *
 * Placements are drawn in `streams` independent streams. Every stream keeps
 * its own partial sums; the sums are merged in stream index order, so a run is
 * bit-identical for any number of worker threads.
 *
 * Placements that never touch the domain stay in the sample (integrand 0) so
 * that value = window measure x sample mean is an unbiased dK integral. Mean
 * arc statistics only use placements whose boundaries cross.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "meanarc/arc_engine.hpp"
#include "meanarc/closed_forms.hpp"
#include "meanarc/rng.hpp"
#include "meanarc/sampler.hpp"
#include "meanarc/shapes.hpp"

namespace meanarc {

struct NoIntersections : Error {
  using Error::Error;
};

struct RunOptions {
  std::uint64_t seed = 1;
  std::uint64_t streams = 16;
  unsigned threads = 0;  ///< 0: hardware concurrency
  double window_scale = 1.0;  ///< test hook; anything but 1 biases the estimates
  std::optional<Tolerance> tolerance;
  int histogram_bins = 32;
};

/// Partial sums over one or more streams.
struct KinematicTally {
  std::uint64_t slots = 0;
  std::uint64_t accepted = 0;
  std::uint64_t flooded = 0;    ///< slots dropped after kResampleCap degenerate draws
  std::uint64_t resampled = 0;  ///< slots that needed at least one redraw
  std::uint64_t redraws = 0;

  double sum_s = 0, sum_s2 = 0;  // all accepted placements
  double sum_n = 0, sum_n2 = 0;
  std::uint64_t crossing = 0, contained = 0, covering = 0, disjoint = 0;
  int max_crossings = 0;
  std::uint64_t multi_crossing = 0;  ///< crossing placements with more than 2 crossings

  // crossing placements only; k = n / 2 arcs
  double c_sum_s = 0, c_sum_s2 = 0, c_sum_k = 0, c_sum_k2 = 0, c_sum_sk = 0;

  std::vector<std::uint64_t> arc_histogram;  ///< arc lengths binned over [0, histogram_max]
  double histogram_max = 0.0;

  void add(const ArcReport& r) {
    ++accepted;
    const double s = r.inside_length, n = r.crossing_count;
    sum_s += s;
    sum_s2 += s * s;
    sum_n += n;
    sum_n2 += n * n;
    max_crossings = std::max(max_crossings, r.crossing_count);
    if (r.crossing_count > 2) ++multi_crossing;
    switch (r.classification) {
      case Classification::Crossing: {
        ++crossing;
        const double k = 0.5 * n;
        c_sum_s += s;
        c_sum_s2 += s * s;
        c_sum_k += k;
        c_sum_k2 += k * k;
        c_sum_sk += s * k;
        if (!arc_histogram.empty())
          for (const Arc& a : r.arcs) {
            const auto bins = static_cast<double>(arc_histogram.size());
            const auto b = static_cast<std::size_t>(std::clamp(a.length / histogram_max * bins, 0.0, bins - 1));
            ++arc_histogram[b];
          }
        break;
      }
      case Classification::TrajectoryInsideDomain: ++contained; break;
      case Classification::DomainInsideTrajectory: ++covering; break;
      case Classification::Disjoint: ++disjoint; break;
    }
  }

  void merge(const KinematicTally& o) {
    slots += o.slots;
    accepted += o.accepted;
    flooded += o.flooded;
    resampled += o.resampled;
    redraws += o.redraws;
    sum_s += o.sum_s;
    sum_s2 += o.sum_s2;
    sum_n += o.sum_n;
    sum_n2 += o.sum_n2;
    crossing += o.crossing;
    contained += o.contained;
    covering += o.covering;
    disjoint += o.disjoint;
    max_crossings = std::max(max_crossings, o.max_crossings);
    multi_crossing += o.multi_crossing;
    c_sum_s += o.c_sum_s;
    c_sum_s2 += o.c_sum_s2;
    c_sum_k += o.c_sum_k;
    c_sum_k2 += o.c_sum_k2;
    c_sum_sk += o.c_sum_sk;
    if (arc_histogram.size() < o.arc_histogram.size()) arc_histogram.resize(o.arc_histogram.size(), 0);
    for (std::size_t i = 0; i < o.arc_histogram.size(); ++i) arc_histogram[i] += o.arc_histogram[i];
    histogram_max = std::max(histogram_max, o.histogram_max);
  }
};

struct PlacementStudy {
  KinematicTally tally;
  SamplingWindow window;
  ShapeSummary domain;
  ShapeSummary trajectory;
};

inline unsigned resolve_threads(unsigned requested, std::uint64_t streams) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(t, streams));
}

/**
 * Draw `samples` placements of `trajectory` over `domain` and accumulate every
 * per-placement integrand. Degenerate placements are redrawn from the same
 * stream, at most kResampleCap times per slot.
 */
inline PlacementStudy run_placements(const PreparedDomain& domain, const SimplePolygon& trajectory,
                                     std::uint64_t samples, const RunOptions& opt) {
  if (samples < 1) throw Error("need at least one sample");
  if (opt.streams < 1) throw Error("need at least one stream");
  const SimplePolygon& dpoly = domain.polygon();
  const Tolerance tol = opt.tolerance.value_or(default_tolerance(dpoly, trajectory));
  tol.check();

  PlacementStudy study;
  study.window = build_window(dpoly, trajectory).scaled(opt.window_scale);
  study.domain = {domain.area(), domain.perimeter()};
  study.trajectory = summarize(trajectory);

  const PreparedTrajectory prepared(trajectory);
  std::vector<KinematicTally> partial(opt.streams);
  std::atomic<std::uint64_t> next{0};
  // Once the flood limit is passed the run is lost; stop every worker early.
  const auto flood_limit = static_cast<std::uint64_t>(kFloodFraction * static_cast<double>(samples));
  std::atomic<std::uint64_t> flooded{0};
  const auto worker = [&] {
    ClipScratch scratch;
    for (std::uint64_t s; (s = next.fetch_add(1)) < opt.streams && flooded.load() <= flood_limit;) {
      KinematicTally& t = partial[s];
      if (opt.histogram_bins > 0) {
        t.arc_histogram.assign(static_cast<std::size_t>(opt.histogram_bins), 0);
        t.histogram_max = study.trajectory.perimeter;
      }
      MotionStream stream(study.window, opt.seed, s);
      const std::uint64_t share = stream_share(samples, opt.streams, s);
      for (std::uint64_t i = 0; i < share && flooded.load(std::memory_order_relaxed) <= flood_limit; ++i) {
        ++t.slots;
        int draws = 0;
        for (;;) {
          const ArcReport r = clip_boundary(domain, prepared, stream.next(), tol, ArcDetail::Lengths, scratch);
          if (resample_policy(r) == ResampleDecision::Accept) {
            t.add(r);
            break;
          }
          if (draws == 0) ++t.resampled;
          ++t.redraws;
          if (++draws > kResampleCap) {
            ++t.flooded;
            flooded.fetch_add(1, std::memory_order_relaxed);
            break;
          }
        }
      }
    }
  };

  const unsigned nthreads = resolve_threads(opt.threads, opt.streams);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }

  for (const KinematicTally& t : partial) study.tally.merge(t);
  if (flooded.load() > flood_limit)
    throw DegenerateFlood("more than " + std::to_string(flood_limit) + " of " + std::to_string(samples) +
                          " slots exceeded the resample cap of " + std::to_string(kResampleCap) +
                          "; check --eps-length and the shapes for coincident edges");
  return study;
}

// ---- kinematic measures ---------------------------------------------------

struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  double window_measure = 0.0;

  /// (value - target) / std_error, 0 when both the gap and the error vanish.
  double z_score(double target) const {
    const double gap = value - target;
    if (std_error > 0.0) return gap / std_error;
    return gap == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), gap);
  }
};

inline MeasureEstimate measure_from_sums(double sum, double sum2, std::uint64_t n, double window_measure) {
  MeasureEstimate e;
  e.samples = n;
  e.window_measure = window_measure;
  if (n == 0) return e;
  const double N = static_cast<double>(n);
  const double mean = sum / N;
  e.value = window_measure * mean;
  if (n > 1) {
    const double var = std::max(0.0, (sum2 - sum * mean) / (N - 1.0));
    e.std_error = window_measure * std::sqrt(var / N);
  }
  return e;
}

inline MeasureEstimate measure_from_count(std::uint64_t hits, std::uint64_t n, double window_measure) {
  const double h = static_cast<double>(hits);
  return measure_from_sums(h, h, n, window_measure);
}

struct KinematicMeasures {
  MeasureEstimate S;     ///< inside arc length
  MeasureEstimate Ni;    ///< boundary crossings
  MeasureEstimate Ntot;  ///< overlapping placements
  MeasureEstimate Nc;    ///< trajectory inside domain
  MeasureEstimate Nsup;  ///< domain inside trajectory
  PlacementStudy study;
};

inline KinematicMeasures measures_from(const PlacementStudy& st) {
  const auto& t = st.tally;
  const double W = st.window.measure();
  KinematicMeasures m;
  m.S = measure_from_sums(t.sum_s, t.sum_s2, t.accepted, W);
  m.Ni = measure_from_sums(t.sum_n, t.sum_n2, t.accepted, W);
  m.Ntot = measure_from_count(t.crossing + t.contained + t.covering, t.accepted, W);
  m.Nc = measure_from_count(t.contained, t.accepted, W);
  m.Nsup = measure_from_count(t.covering, t.accepted, W);
  m.study = st;
  return m;
}

inline KinematicMeasures estimate_measures(const SimplePolygon& domain, const SimplePolygon& trajectory,
                                           std::uint64_t samples, const RunOptions& opt) {
  if (samples < 1000) throw Error("estimate_measures needs at least 1000 samples");
  return measures_from(run_placements(PreparedDomain(domain), trajectory, samples, opt));
}

// ---- mean arc length ------------------------------------------------------

struct MeanArcEstimate {
  double per_arc_mean = 0.0;    ///< sum s / sum (n/2) over crossing placements
  double per_arc_stderr = 0.0;  ///< first-order delta method
  double per_traj_mean = 0.0;   ///< sum s / crossing placements
  double per_traj_stderr = 0.0;
  std::uint64_t intersecting_count = 0;
  std::uint64_t contained_count = 0;
  std::uint64_t covering_count = 0;
  std::uint64_t disjoint_count = 0;
  double cauchy = 0.0;  ///< pi A / P of the domain
  double normalized_per_arc = 0.0;
  double normalized_stderr = 0.0;
  std::uint64_t resampled_slots = 0;
  std::uint64_t flooded_slots = 0;
  std::vector<std::uint64_t> arc_histogram;
  double histogram_max = 0.0;
};

inline MeanArcEstimate mean_arc_from(const PlacementStudy& st) {
  const auto& t = st.tally;
  if (t.crossing == 0 || t.c_sum_k <= 0.0)
    throw NoIntersections("no placement crossed the domain boundary; check shape scales and the sampling window");
  MeanArcEstimate e;
  const double m = static_cast<double>(t.crossing);
  e.per_arc_mean = t.c_sum_s / t.c_sum_k;
  e.per_traj_mean = t.c_sum_s / m;
  if (t.crossing > 1) {
    const double R = e.per_arc_mean;
    const double kbar = t.c_sum_k / m;
    const double resid = std::max(0.0, t.c_sum_s2 - 2.0 * R * t.c_sum_sk + R * R * t.c_sum_k2);
    e.per_arc_stderr = std::sqrt(resid / (m * (m - 1.0))) / kbar;
    const double var_s = std::max(0.0, (t.c_sum_s2 - t.c_sum_s * e.per_traj_mean) / (m - 1.0));
    e.per_traj_stderr = std::sqrt(var_s / m);
  }
  e.intersecting_count = t.crossing;
  e.contained_count = t.contained;
  e.covering_count = t.covering;
  e.disjoint_count = t.disjoint;
  e.cauchy = cauchy_mean(st.domain);
  e.normalized_per_arc = e.per_arc_mean / e.cauchy;
  e.normalized_stderr = e.per_arc_stderr / e.cauchy;
  e.resampled_slots = t.resampled;
  e.flooded_slots = t.flooded;
  e.arc_histogram = t.arc_histogram;
  e.histogram_max = t.histogram_max;
  return e;
}

inline MeanArcEstimate estimate_mean_arc(const SimplePolygon& domain, const SimplePolygon& trajectory,
                                         std::uint64_t samples, const RunOptions& opt) {
  if (samples < 1000) throw Error("estimate_mean_arc needs at least 1000 samples");
  return mean_arc_from(run_placements(PreparedDomain(domain), trajectory, samples, opt));
}

// ---- scale sweeps ---------------------------------------------------------

struct SweepRow {
  double lambda = 0.0;
  double area_ratio = 0.0;  ///< A_trajectory / A_domain at this scale
  MeanArcEstimate estimate;
  double eq5 = 0.0;  ///< small-trajectory prediction
  double eq3 = 0.0;  ///< Cauchy plateau
  double mazzolo = 0.0;
  double crossover = 0.0;  ///< scale where the model switches from eq5 to eq3
  /// Piecewise model: small-trajectory prediction below the crossover, plateau above.
  double model() const { return lambda < crossover ? eq5 : eq3; }
};

struct SweepResult {
  std::vector<SweepRow> rows;
  ShapeSummary domain;
  ShapeSummary trajectory_template;
  double crossover = 0.0;  ///< small_trajectory_crossover for the template
};

/// Trajectory i is `trajectory_template` scaled by lambdas[i] about its centroid; seeds derive from opt.seed.
inline SweepResult sweep_scale(const SimplePolygon& domain, const SimplePolygon& trajectory_template,
                               const std::vector<double>& lambdas, std::uint64_t samples, const RunOptions& opt) {
  if (lambdas.empty()) throw Error("sweep needs at least one lambda");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw InvalidScale("sweep lambdas must be > 0");
    if (i && !(lambdas[i] > lambdas[i - 1])) throw Error("sweep lambdas must be strictly increasing");
  }
  const PreparedDomain prepared(domain);
  SweepResult out;
  out.domain = {prepared.area(), prepared.perimeter()};
  out.trajectory_template = summarize(trajectory_template);
  out.crossover = small_trajectory_crossover(out.domain, out.trajectory_template);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const SimplePolygon traj = scale(trajectory_template, lambdas[i]);
    RunOptions o = opt;
    o.seed = derive_seed(opt.seed, i);
    SweepRow row;
    row.lambda = lambdas[i];
    const ShapeSummary ts = summarize(traj);
    row.area_ratio = ts.area / out.domain.area;
    row.estimate = mean_arc_from(run_placements(prepared, traj, samples, o));
    row.eq5 = small_trajectory_mean(out.domain, ts).value;
    row.eq3 = cauchy_mean(out.domain);
    row.mazzolo = mazzolo_mean(out.domain, ts);
    row.crossover = out.crossover;
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw Error("lambda grid needs at least one step");
  if (steps == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  return g;
}

}  // namespace meanarc
