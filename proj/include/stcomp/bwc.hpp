#pragma once

#include <map>
#include <memory>
#include <span>

#include "stcomp/classic.hpp"
#include "stcomp/events.hpp"
#include "stcomp/types.hpp"

namespace stcomp::bwc {

// ----------------------------------------------------------------- windows

struct WindowConfig {
    double start = 0.0;   // stream origin (ts of window 0's left edge)
    double delta = 0.0;   // window length, seconds, > 0
    std::size_t bw = 1;   // points transmittable per window, >= 1
};

/// Canonical window assignment: the unique k with
///   start + k*delta <= ts < start + (k+1)*delta
/// under the same rounded boundary arithmetic everywhere. The compression
/// engines and the histogram binning both call this, so a point can never
/// sit in one window for capping and another for counting.
std::int64_t window_index(double ts, const WindowConfig& w);

/// Left edge of window k (start + k*delta, single rounding).
double window_edge(std::int64_t k, const WindowConfig& w);

// ------------------------------------------------------------ imp priority

enum class ImpPrioritySign {
    error_increase,  // error(without point) - error(with point), >= 0 in the typical regime
    as_printed,      // error(with point) - error(without point)
};

struct ImpConfig {
    double precision = 1.0;  // grid step of the error sums, seconds, > 0 (and <= delta in a run)
    ImpPrioritySign sign = ImpPrioritySign::error_increase;
};

/// Priority of the middle point as the change in time-sampled reconstruction
/// error its removal would cause. The error is summed over the grid
///   t = left.ts + k*precision, k >= 1, t < right.ts
/// comparing the raw track against the sample with and without mid. traj
/// must cover [left.ts, right.ts]; an empty grid yields 0.
double compute_priority_imp(const Point& left, const Point& mid, const Point& right,
                            std::span<const Point> traj, const ImpConfig& cfg);

// ---------------------------------------------------------- history buffer

/// Raw-point retention for one trajectory, backing the Imp priority sums.
/// Keeps at least everything from the previous window onward; pruning is
/// driven by the engine, which also pins the last committed sample point so
/// sparse trajectories that skip windows stay reconstructible.
class HistoryBuffer {
  public:
    void push(const Point& p);
    void prune_before(double min_ts);
    std::span<const Point> points() const { return pts_; }

    /// Retained subrange covering [from_ts, to_ts]; raises history_gap when
    /// the buffer no longer reaches back to from_ts.
    std::span<const Point> slice(double from_ts, double to_ts) const;

  private:
    std::vector<Point> pts_;
};

// ------------------------------------------------------------------ engine

enum class Algorithm { squish, sttrace, sttrace_imp, dr };

const char* algorithm_name(Algorithm a);

struct BwcConfig {
    Algorithm algorithm = Algorithm::sttrace;
    WindowConfig window;
    ImpConfig imp;                                              // sttrace_imp only
    classic::Predictor predictor = classic::Predictor::two_point;  // dr only
};

namespace detail {
class RunImpl;
}

/// Window-capped streaming compression. All four algorithms share the same
/// skeleton: points enter a queue bounded by the per-window budget, the
/// cheapest entry is evicted on overflow, and at each window boundary the
/// survivors are committed (transmitted) and the queue is flushed. Committed
/// points stay in the sample permanently and anchor the priorities of the
/// next window. The variants differ only in how priorities are computed and
/// repaired after an eviction.
class Run {
  public:
    explicit Run(const BwcConfig& cfg);
    ~Run();
    Run(Run&&) noexcept;
    Run& operator=(Run&&) noexcept;

    void push(const Point& p);
    std::map<TrajId, Sample> finish();

    std::vector<QueueEntry> live_entries() const;
    std::map<TrajId, std::vector<SamplePointView>> sample_view() const;
    std::map<TrajId, std::vector<Point>> history_view() const;
    std::int64_t current_window() const;
    void set_evict_observer(EvictObserver obs);

  private:
    std::unique_ptr<detail::RunImpl> impl_;
};

std::map<TrajId, Sample> compress(std::span<const Point> stream, const BwcConfig& cfg);

}  // namespace stcomp::bwc
