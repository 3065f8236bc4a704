#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stcomp/bwc.hpp"
#include "stcomp/classic.hpp"
#include "stcomp/types.hpp"

namespace stcomp::eval {

// ---------------------------------------------------------------- accuracy

struct TrajectoryAccuracy {
    TrajId id = 0;
    std::size_t eval_points = 0;
    double mean_error_m = 0.0;
};

struct AccuracyReport {
    std::vector<TrajectoryAccuracy> per_trajectory;
    double mean_error_m = 0.0;                 // weighted by evaluation timestamps
    double mean_error_per_trajectory_m = 0.0;  // every trajectory weighted equally
    double interval_s = 0.0;
    double ratio = 0.0;                        // kept / raw over the evaluated ids
    std::size_t total_eval_points = 0;
};

/// Mean synchronized reconstruction error: for each trajectory, walk
/// t = first sample ts .. last sample ts in steps of interval and average
/// dist(original(t), sample(t)). Every sample must reference an existing
/// original, be one of its subsequences, and hold at least two points.
AccuracyReport accuracy(const std::map<TrajId, Trajectory>& originals,
                        const std::map<TrajId, Sample>& samples, double interval);

/// Default evaluation interval: the smallest over trajectories of the median
/// raw inter-point gap, so the densest trajectory is still resolved.
double default_interval(const std::map<TrajId, Trajectory>& originals);

// --------------------------------------------------------------- histogram

struct WindowHistogram {
    bwc::WindowConfig window;
    std::vector<std::size_t> counts;  // committed points per window index
};

/// Bins every sample point into its window. Bin k counts points with
/// window_index == k; empty input yields no bins.
WindowHistogram window_histogram(const std::map<TrajId, Sample>& samples,
                                 const bwc::WindowConfig& w);

std::size_t max_count(const WindowHistogram& h);

/// CSV: window_index,window_start_ts,count
void write_histogram_csv(const WindowHistogram& h, std::ostream& out);

/// CSV: trajectory_id,eval_points,mean_error_m (+ summary rows
/// all_count_weighted / all_trajectory_weighted).
void write_accuracy_csv(const AccuracyReport& r, std::ostream& out);

// ----------------------------------------------------------------- compare

enum class Algo {
    tdtr,
    squish,
    sttrace,
    dr,
    bwc_squish,
    bwc_sttrace,
    bwc_sttrace_imp,
    bwc_dr,
};

const char* algo_name(Algo a);
std::optional<Algo> algo_from_name(std::string_view name);
bool is_bwc(Algo a);
std::span<const Algo> all_algos();

// Ratio-driven parameter derivation, shared by the harness and the CLI.
std::size_t squish_capacity(double ratio, std::size_t traj_len);
std::size_t sttrace_buffer(double ratio, std::size_t total_points);
std::size_t bwc_budget(double ratio, std::size_t total_points, double delta, double duration);

/// Threshold (dr epsilon / tdtr tolerance, meters) whose kept-point count
/// lands closest to ratio * total. Deterministic bisection; thresholds and
/// kept counts are monotone against each other.
double calibrate_threshold(Algo algo, const std::map<TrajId, Trajectory>& originals,
                           double ratio, classic::Predictor predictor);

struct CompareSpec {
    std::vector<Algo> algos;            // empty = all eight
    double ratio = 0.10;
    bwc::WindowConfig window;           // bw == 0 derives it from ratio
    double interval = 0.0;              // 0 = default_interval rule
    double imp_precision = 0.0;         // 0 = evaluation interval
    bwc::ImpPrioritySign imp_sign = bwc::ImpPrioritySign::error_increase;
    classic::Predictor predictor = classic::Predictor::two_point;
    bool timing = false;                // wall_ms column stays 0 unless set
};

struct CompareRow {
    std::string algorithm;
    double ratio = 0.0;  // achieved
    double interval_s = 0.0;
    double mean_error_m = 0.0;
    std::size_t max_window_count = 0;
    std::size_t bw = 0;
    double delta_s = 0.0;
    double wall_ms = 0.0;
    std::size_t kept = 0;
    std::size_t raw = 0;
    std::size_t degenerate_skipped = 0;  // samples too small to evaluate
};

/// Runs every requested algorithm on the same input at the same nominal
/// ratio and reports accuracy plus per-window concentration. Window-capped
/// rows re-assert max_window_count <= bw.
std::vector<CompareRow> compare(const std::map<TrajId, Trajectory>& originals,
                                const CompareSpec& spec);

/// CSV: algorithm,ratio,interval_s,mean_error_m,max_window_count,bw,delta_s,wall_ms
void write_compare_csv(std::span<const CompareRow> rows, std::ostream& out);

}  // namespace stcomp::eval
