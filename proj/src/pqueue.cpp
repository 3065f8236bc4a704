#include "stcomp/pqueue.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace stcomp {

namespace {
std::string key_str(const PointKey& k) {
    return "(" + std::to_string(k.id) + ", " + std::to_string(k.ts) + ")";
}
}  // namespace

bool EvictionQueue::before(const QueueEntry& a, const QueueEntry& b) {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.seq < b.seq;
}

void EvictionQueue::place(std::size_t i, QueueEntry e) {
    slot_[e.key] = i;
    heap_[i] = std::move(e);
}

void EvictionQueue::sift_up(std::size_t i) {
    while (i > 0) {
        std::size_t parent = (i - 1) / 2;
        if (!before(heap_[i], heap_[parent])) break;
        QueueEntry tmp = heap_[i];
        place(i, heap_[parent]);
        place(parent, tmp);
        i = parent;
    }
}

void EvictionQueue::sift_down(std::size_t i) {
    for (;;) {
        std::size_t left = 2 * i + 1;
        if (left >= heap_.size()) break;
        std::size_t smallest = left;
        std::size_t right = left + 1;
        if (right < heap_.size() && before(heap_[right], heap_[left])) smallest = right;
        if (!before(heap_[smallest], heap_[i])) break;
        QueueEntry tmp = heap_[i];
        place(i, heap_[smallest]);
        place(smallest, tmp);
        i = smallest;
    }
}

std::uint64_t EvictionQueue::add(PointKey key, double priority) {
    if (std::isnan(priority)) raise(errc::internal, "priority is NaN for " + key_str(key));
    if (slot_.count(key)) raise(errc::duplicate_entry, "live entry exists for " + key_str(key));
    std::uint64_t seq = next_seq_++;
    heap_.push_back(QueueEntry{key, priority, seq});
    slot_[key] = heap_.size() - 1;
    sift_up(heap_.size() - 1);
    return seq;
}

QueueEntry EvictionQueue::pop_min() {
    if (heap_.empty()) raise(errc::empty_queue, "pop_min on empty queue");
    QueueEntry top = heap_.front();
    slot_.erase(top.key);
    QueueEntry last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        place(0, last);
        sift_down(0);
    }
    return top;
}

void EvictionQueue::update_priority(PointKey key, double priority) {
    if (std::isnan(priority)) raise(errc::internal, "priority is NaN for " + key_str(key));
    auto it = slot_.find(key);
    if (it == slot_.end()) raise(errc::missing_entry, "no live entry for " + key_str(key));
    std::size_t i = it->second;
    double old = heap_[i].priority;
    heap_[i].priority = priority;
    if (priority < old)
        sift_up(i);
    else if (priority > old)
        sift_down(i);
}

std::optional<double> EvictionQueue::min_priority() const {
    if (heap_.empty()) return std::nullopt;
    return heap_.front().priority;
}

void EvictionQueue::flush() {
    heap_.clear();
    slot_.clear();
}

}  // namespace stcomp
