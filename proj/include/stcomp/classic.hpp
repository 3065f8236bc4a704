#pragma once

#include <map>
#include <memory>
#include <span>

#include "stcomp/events.hpp"
#include "stcomp/types.hpp"

namespace stcomp::classic {

namespace detail {
class SquishImpl;
class STTraceImpl;
class DeadReckoningImpl;
}  // namespace detail

// ------------------------------------------------------------------ squish

struct SquishConfig {
    std::size_t capacity = 2;  // per-trajectory sample budget, >= 2
};

/// Online single-trajectory simplification under a fixed point budget.
/// Every arriving point enters with priority +inf; the previous point then
/// receives its synchronized distance against its two neighbors, and when
/// the budget overflows the cheapest point is dropped, donating its priority
/// to both neighbors.
class SquishRun {
  public:
    SquishRun(TrajId id, const SquishConfig& cfg);
    ~SquishRun();
    SquishRun(SquishRun&&) noexcept;
    SquishRun& operator=(SquishRun&&) noexcept;

    void push(const Point& p);
    Sample finish();

    std::vector<QueueEntry> live_entries() const;
    std::vector<SamplePointView> sample_view() const;
    void set_evict_observer(EvictObserver obs);

  private:
    std::unique_ptr<detail::SquishImpl> impl_;
};

Sample squish(const Trajectory& t, const SquishConfig& cfg);

// ----------------------------------------------------------------- sttrace

struct STTraceConfig {
    std::size_t buffer = 2;  // shared budget across all trajectories, >= 2
};

/// Online multi-trajectory simplification with one shared budget. New points
/// are gated when the buffer is full: if appending would hand the current
/// last point a priority below everything already buffered, the point is not
/// worth an eviction and is skipped. Evictions recompute both neighbors'
/// priorities from the surviving sample.
class STTraceRun {
  public:
    explicit STTraceRun(const STTraceConfig& cfg);
    ~STTraceRun();
    STTraceRun(STTraceRun&&) noexcept;
    STTraceRun& operator=(STTraceRun&&) noexcept;

    void push(const Point& p);
    std::map<TrajId, Sample> finish();

    std::vector<QueueEntry> live_entries() const;
    std::map<TrajId, std::vector<SamplePointView>> sample_view() const;
    void set_evict_observer(EvictObserver obs);

  private:
    std::unique_ptr<detail::STTraceImpl> impl_;
};

std::map<TrajId, Sample> sttrace(std::span<const Point> stream, const STTraceConfig& cfg);

// ----------------------------------------------------------- dead reckoning

enum class Predictor {
    two_point,  // constant velocity through the last two kept points
    sog_cog,    // speed/course carried on the last kept point
};

struct DRConfig {
    double epsilon = 1.0;  // keep threshold, meters, > 0
    Predictor predictor = Predictor::two_point;
};

/// Keeps a point exactly when it strays more than epsilon from where the
/// predictor extrapolates the kept history. The first point of every
/// trajectory is always kept; with a single kept point the two-point
/// predictor degrades to a standstill estimate.
class DeadReckoningRun {
  public:
    explicit DeadReckoningRun(const DRConfig& cfg);
    ~DeadReckoningRun();
    DeadReckoningRun(DeadReckoningRun&&) noexcept;
    DeadReckoningRun& operator=(DeadReckoningRun&&) noexcept;

    void push(const Point& p);
    std::map<TrajId, Sample> finish();

  private:
    std::unique_ptr<detail::DeadReckoningImpl> impl_;
};

std::map<TrajId, Sample> dead_reckoning(std::span<const Point> stream, const DRConfig& cfg);

/// Predictor extrapolation from the kept tail of a sample (exposed for the
/// window-capped variant and for tests). kept must be the sample points
/// before the point being predicted, in ts order.
Vec2 dr_estimate(std::span<const Point> kept, Predictor predictor, double ts);

// ------------------------------------------------------------------- tdtr

struct TdtrConfig {
    double tolerance = 0.0;  // max allowed synchronized distance, meters, >= 0
};

/// Offline top-down splitting: recursively keep the point with the largest
/// synchronized distance against the current segment until every original
/// point is within tolerance of the reconstruction.
Sample tdtr(const Trajectory& t, const TdtrConfig& cfg);

}  // namespace stcomp::classic
