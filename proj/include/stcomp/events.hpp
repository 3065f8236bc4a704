#pragma once

#include <functional>
#include <vector>

#include "stcomp/pqueue.hpp"
#include "stcomp/types.hpp"

namespace stcomp {

/// Ordered view of one resident sample point during a run.
struct SamplePointView {
    Point pt;
    double priority = 0.0;
    bool queued = false;  // false once committed (window flush / always-kept)
};

/// One neighbor priority rewrite caused by an eviction.
struct NeighborUpdate {
    PointKey key;
    double before = 0.0;
    double after = 0.0;
};

struct EvictEvent {
    QueueEntry evicted;
    std::vector<NeighborUpdate> updates;
};

/// Called synchronously right after an eviction finished rewriting neighbor
/// priorities; the run's inspection accessors show the post-eviction state.
using EvictObserver = std::function<void(const EvictEvent&)>;

}  // namespace stcomp
