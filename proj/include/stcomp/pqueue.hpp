#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "stcomp/types.hpp"

namespace stcomp {

struct QueueEntry {
    PointKey key;
    double priority = 0.0;
    std::uint64_t seq = 0;  // insertion counter, monotone over the queue's lifetime
};

/// Min-priority queue over sample points with updatable priorities.
/// Ordering is (priority, seq): equal priorities pop oldest-inserted first,
/// which pins the eviction order wherever priorities tie (all-zero or all-inf
/// regimes). Updating a priority keeps the original seq. Implemented as a
/// binary heap plus a key -> slot index so update/remove stay O(log n).
class EvictionQueue {
  public:
    /// Inserts a new live entry. A live entry for the same key is an error.
    std::uint64_t add(PointKey key, double priority);

    /// Removes and returns the smallest (priority, seq) entry.
    QueueEntry pop_min();

    /// Re-keys an existing live entry; its seq (tie-break rank) is unchanged.
    void update_priority(PointKey key, double priority);

    /// Smallest live priority, or nothing when empty.
    std::optional<double> min_priority() const;

    std::size_t size() const { return heap_.size(); }
    bool empty() const { return heap_.empty(); }
    bool contains(PointKey key) const { return slot_.find(key) != slot_.end(); }

    /// Drops every live entry. Sample contents are owned elsewhere and are
    /// not touched; the insertion counter keeps running.
    void flush();

    /// Unordered snapshot of the live entries (inspection / tests).
    std::vector<QueueEntry> entries() const { return heap_; }

  private:
    void sift_up(std::size_t i);
    void sift_down(std::size_t i);
    void place(std::size_t i, QueueEntry e);
    static bool before(const QueueEntry& a, const QueueEntry& b);

    std::vector<QueueEntry> heap_;
    std::unordered_map<PointKey, std::size_t, PointKeyHash> slot_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace stcomp
