#pragma once

// Internal: the live sample of a run. Each trajectory owns an ordered list
// of resident points; evictions erase from the middle, so nodes live in a
// std::list and a key index keeps queue entries resolvable in O(1).

#include <limits>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stcomp/events.hpp"
#include "stcomp/geom.hpp"
#include "stcomp/types.hpp"

namespace stcomp::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline PointKey key_of(const Point& p) { return {p.id, p.ts}; }

struct Node {
    Point pt;
    double priority = 0.0;
    bool queued = false;  // still owned by the eviction queue
};

using NodeList = std::list<Node>;
using NodeIt = NodeList::iterator;

class SampleStore {
  public:
    NodeIt append(const Point& p, double priority, bool queued) {
        NodeList& lst = lists_[p.id];
        if (!lst.empty()) {
            double back_ts = lst.back().pt.ts;
            if (p.ts == back_ts)
                raise(errc::duplicate_entry, "repeated timestamp " + std::to_string(p.ts) +
                                                 " in trajectory " + std::to_string(p.id));
            if (p.ts < back_ts)
                raise(errc::ordering, "timestamps of trajectory " + std::to_string(p.id) +
                                          " must increase");
        }
        lst.push_back(Node{p, priority, queued});
        NodeIt it = std::prev(lst.end());
        index_.emplace(key_of(p), it);
        return it;
    }

    void erase(NodeIt it) {
        index_.erase(key_of(it->pt));
        lists_[it->pt.id].erase(it);
    }

    NodeIt find(const PointKey& k) {
        auto hit = index_.find(k);
        if (hit == index_.end())
            raise(errc::missing_entry, "no sample point for trajectory " + std::to_string(k.id));
        return hit->second;
    }

    std::optional<NodeIt> prev(NodeIt it) {
        NodeList& lst = lists_[it->pt.id];
        if (it == lst.begin()) return std::nullopt;
        return std::prev(it);
    }

    std::optional<NodeIt> next(NodeIt it) {
        NodeList& lst = lists_[it->pt.id];
        NodeIt n = std::next(it);
        if (n == lst.end()) return std::nullopt;
        return n;
    }

    NodeList& list(TrajId id) { return lists_[id]; }
    const std::map<TrajId, NodeList>& lists() const { return lists_; }

    std::map<TrajId, Sample> extract() const {
        std::map<TrajId, Sample> out;
        for (const auto& [id, lst] : lists_) {
            Sample s;
            s.source_id = id;
            s.points.reserve(lst.size());
            for (const Node& n : lst) s.points.push_back(n.pt);
            out.emplace(id, std::move(s));
        }
        return out;
    }

    std::map<TrajId, std::vector<SamplePointView>> view() const {
        std::map<TrajId, std::vector<SamplePointView>> out;
        for (const auto& [id, lst] : lists_) {
            auto& v = out[id];
            v.reserve(lst.size());
            for (const Node& n : lst) v.push_back({n.pt, n.priority, n.queued});
        }
        return out;
    }

  private:
    std::map<TrajId, NodeList> lists_;  // ordered so extraction is deterministic
    std::unordered_map<PointKey, NodeIt, PointKeyHash> index_;
};

/// Synchronized distance of a resident point against its current neighbors;
/// sample edges rate +inf.
inline double exact_sed_priority(SampleStore& store, NodeIt it) {
    auto p = store.prev(it);
    auto n = store.next(it);
    if (!p || !n) return kInf;
    return sed((*p)->pt, it->pt, (*n)->pt);
}

}  // namespace stcomp::detail
