#include "stcomp/bwc.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "stcomp/geom.hpp"
#include "stcomp/kernels.hpp"
#include "stcomp/pqueue.hpp"
#include "sample_store.hpp"

namespace stcomp::bwc {

using stcomp::detail::kInf;
using stcomp::detail::key_of;
using stcomp::detail::Node;
using stcomp::detail::NodeIt;
using stcomp::detail::SampleStore;

// ----------------------------------------------------------------- windows

double window_edge(std::int64_t k, const WindowConfig& w) {
    return w.start + static_cast<double>(k) * w.delta;
}

std::int64_t window_index(double ts, const WindowConfig& w) {
    if (!(w.delta > 0.0)) raise(errc::config, "window length must be positive");
    auto k = static_cast<std::int64_t>(std::floor((ts - w.start) / w.delta));
    // floor() of the quotient can land one off around exact edges; settle on
    // the unique k with edge(k) <= ts < edge(k+1) under the same rounded
    // arithmetic the engine uses, so capping and binning always agree.
    while (ts < window_edge(k, w)) --k;
    while (ts >= window_edge(k + 1, w)) ++k;
    return k;
}

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::squish: return "bwc-squish";
        case Algorithm::sttrace: return "bwc-sttrace";
        case Algorithm::sttrace_imp: return "bwc-sttrace-imp";
        case Algorithm::dr: return "bwc-dr";
    }
    return "?";
}

// ---------------------------------------------------------- history buffer

void HistoryBuffer::push(const Point& p) {
    if (!pts_.empty() && p.ts <= pts_.back().ts)
        raise(errc::ordering, "raw history of trajectory " + std::to_string(p.id) +
                                  " must be strictly increasing");
    pts_.push_back(p);
}

void HistoryBuffer::prune_before(double min_ts) {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), min_ts,
                               [](const Point& p, double v) { return p.ts < v; });
    pts_.erase(pts_.begin(), it);
}

std::span<const Point> HistoryBuffer::slice(double from_ts, double to_ts) const {
    auto lo = std::upper_bound(pts_.begin(), pts_.end(), from_ts,
                               [](double v, const Point& p) { return v < p.ts; });
    if (lo == pts_.begin())
        raise(errc::history_gap, "raw history no longer reaches back to " +
                                     std::to_string(from_ts));
    --lo;  // last retained point at or before from_ts
    auto hi = std::lower_bound(lo, pts_.end(), to_ts,
                               [](const Point& p, double v) { return p.ts < v; });
    if (hi == pts_.end()) raise(errc::history_gap, "raw history ends before " +
                                                       std::to_string(to_ts));
    return {&*lo, static_cast<std::size_t>(hi - lo) + 1};
}

// ------------------------------------------------------------ imp priority

double compute_priority_imp(const Point& left, const Point& mid, const Point& right,
                            std::span<const Point> traj, const ImpConfig& cfg) {
    if (!(cfg.precision > 0.0)) raise(errc::config, "imp precision must be positive");
    if (!(left.ts < mid.ts && mid.ts < right.ts))
        raise(errc::invalid_segment, "imp priority needs left.ts < mid.ts < right.ts");

    auto t_of = [&](std::int64_t k) {
        return left.ts + static_cast<double>(k) * cfg.precision;
    };
    auto est = static_cast<std::int64_t>(std::floor((right.ts - left.ts) / cfg.precision));
    while (t_of(est) >= right.ts) --est;
    while (t_of(est + 1) < right.ts) ++est;
    std::int64_t k_end = est + 1;  // grid is k in [1, k_end), strictly inside the bracket
    if (k_end <= 1) return 0.0;

    if (traj.empty() || traj.front().ts > left.ts || traj.back().ts < right.ts)
        raise(errc::history_gap, "raw track does not cover the sample bracket");

    const Point with_pts[3] = {left, mid, right};
    const Point without_pts[2] = {left, right};
    double err_with =
        kernels::synchronized_error_sum(traj, {with_pts, 3}, left.ts, cfg.precision, 1, k_end);
    double err_without =
        kernels::synchronized_error_sum(traj, {without_pts, 2}, left.ts, cfg.precision, 1, k_end);
    double increase = err_without - err_with;
    return cfg.sign == ImpPrioritySign::error_increase ? increase : -increase;
}

// ------------------------------------------------------------------ engine

namespace detail {

class RunImpl {
  public:
    explicit RunImpl(const BwcConfig& cfg) : cfg_(cfg) {
        if (!(cfg.window.delta > 0.0)) raise(errc::config, "window length must be positive");
        if (cfg.window.bw < 1) raise(errc::config, "per-window budget must be at least 1");
        if (cfg.algorithm == Algorithm::sttrace_imp) {
            if (!(cfg.imp.precision > 0.0) || cfg.imp.precision > cfg.window.delta)
                raise(errc::config, "imp precision must be in (0, window length]");
        }
    }

    void push(const Point& p) {
        if (p.ts < cfg_.window.start)
            raise(errc::out_of_range, "point at " + std::to_string(p.ts) +
                                          " precedes the stream origin");
        if (p.ts < last_ts_) raise(errc::ordering, "stream must be ordered by timestamp");
        last_ts_ = p.ts;

        std::int64_t k = window_index(p.ts, cfg_.window);
        if (k > window_) advance_to(k);

        if (cfg_.algorithm == Algorithm::sttrace_imp) history_[p.id].push(p);

        if (cfg_.algorithm == Algorithm::dr)
            push_dr(p);
        else
            push_trio(p);

        if (q_.size() > cfg_.window.bw)
            raise(errc::internal, "queue exceeds the per-window budget");
    }

    std::map<TrajId, Sample> finish() {
        commit_queue();
        return store_.extract();
    }

    std::vector<QueueEntry> live_entries() const { return q_.entries(); }
    std::map<TrajId, std::vector<SamplePointView>> sample_view() const { return store_.view(); }

    std::map<TrajId, std::vector<Point>> history_view() const {
        std::map<TrajId, std::vector<Point>> out;
        for (const auto& [id, buf] : history_)
            out.emplace(id, std::vector<Point>(buf.points().begin(), buf.points().end()));
        return out;
    }

    std::int64_t current_window() const { return window_; }
    void set_evict_observer(EvictObserver obs) { obs_ = std::move(obs); }

  private:
    // -- window machinery

    // Entering window k: everything still queued was transmitted, becomes
    // permanent, and keeps anchoring priorities of the windows after it.
    // Jumping across empty windows flushes once, which is what the
    // boundary loop would do anyway.
    void advance_to(std::int64_t k) {
        commit_queue();
        window_ = k;
        if (cfg_.algorithm == Algorithm::sttrace_imp) prune_history();
    }

    void commit_queue() {
        for (const QueueEntry& e : q_.entries()) store_.find(e.key)->queued = false;
        q_.flush();
    }

    void prune_history() {
        // Keep the previous window per the retention contract, and never
        // prune past the newest sample point: it is the left bracket of the
        // next arrival's priority, even when the trajectory skipped windows.
        double floor_ts = window_edge(window_, cfg_.window) - cfg_.window.delta;
        for (auto& [id, buf] : history_) {
            double anchor = floor_ts;
            const auto& lst = store_.list(id);
            if (!lst.empty()) anchor = std::min(floor_ts, lst.back().pt.ts);
            buf.prune_before(anchor);
        }
    }

    // -- squish / sttrace / sttrace-imp (shared skeleton)

    void push_trio(const Point& p) {
        NodeIt it = store_.append(p, kInf, true);
        q_.add(key_of(p), kInf);
        if (auto prev = store_.prev(it)) refresh(*prev);
        if (q_.size() > cfg_.window.bw) evict_trio();
    }

    double trio_priority(NodeIt n) {
        if (cfg_.algorithm != Algorithm::sttrace_imp) return exact_sed_priority(store_, n);
        auto prev = store_.prev(n);
        auto next = store_.next(n);
        if (!prev || !next) return kInf;
        auto slice = history_[n->pt.id].slice((*prev)->pt.ts, (*next)->pt.ts);
        return compute_priority_imp((*prev)->pt, n->pt, (*next)->pt, slice, cfg_.imp);
    }

    void refresh(NodeIt n) {
        if (!n->queued) return;  // committed points are immutable
        double pr = trio_priority(n);
        n->priority = pr;
        q_.update_priority(key_of(n->pt), pr);
    }

    void evict_trio() {
        QueueEntry victim = q_.pop_min();
        NodeIt it = store_.find(victim.key);
        auto prev = store_.prev(it);
        auto next = store_.next(it);
        store_.erase(it);
        EvictEvent ev{victim, {}};
        for (auto nb : {prev, next}) {
            if (!nb || !(*nb)->queued) continue;
            Node& n = **nb;
            double before = n.priority;
            n.priority = cfg_.algorithm == Algorithm::squish ? before + victim.priority
                                                             : trio_priority(*nb);
            q_.update_priority(key_of(n.pt), n.priority);
            ev.updates.push_back({key_of(n.pt), before, n.priority});
        }
        if (obs_) obs_(ev);
    }

    // -- dead reckoning variant

    // Deviation from the predictor anchored on the two (or one) sample
    // points before `n`; fewer predecessors than the predictor needs makes
    // the point a bootstrap carrier with +inf priority.
    double dr_priority_for(NodeIt n) {
        auto p1 = store_.prev(n);
        if (!p1) return kInf;
        auto p2 = store_.prev(*p1);
        if (cfg_.predictor == classic::Predictor::two_point && !p2) return kInf;
        Point basis[2];
        std::size_t nb = 0;
        if (p2) basis[nb++] = (*p2)->pt;
        basis[nb++] = (*p1)->pt;
        return dist(classic::dr_estimate({basis, nb}, cfg_.predictor, n->pt.ts), n->pt.pos());
    }

    void push_dr(const Point& p) {
        NodeIt it = store_.append(p, 0.0, true);
        it->priority = dr_priority_for(it);
        q_.add(key_of(p), it->priority);
        if (q_.size() > cfg_.window.bw) evict_dr();
    }

    void evict_dr() {
        QueueEntry victim = q_.pop_min();
        NodeIt it = store_.find(victim.key);
        auto next = store_.next(it);
        store_.erase(it);
        EvictEvent ev{victim, {}};
        // The evicted point was predictor basis for up to two successors.
        auto w = next;
        for (int hop = 0; hop < 2 && w; ++hop) {
            if ((*w)->queued) {
                Node& n = **w;
                double before = n.priority;
                n.priority = dr_priority_for(*w);
                q_.update_priority(key_of(n.pt), n.priority);
                ev.updates.push_back({key_of(n.pt), before, n.priority});
            }
            w = store_.next(*w);
        }
        if (obs_) obs_(ev);
    }

    BwcConfig cfg_;
    SampleStore store_;
    EvictionQueue q_;
    std::unordered_map<TrajId, HistoryBuffer> history_;
    EvictObserver obs_;
    std::int64_t window_ = 0;
    double last_ts_ = -kInf;
};

}  // namespace detail

Run::Run(const BwcConfig& cfg) : impl_(std::make_unique<detail::RunImpl>(cfg)) {}
Run::~Run() = default;
Run::Run(Run&&) noexcept = default;
Run& Run::operator=(Run&&) noexcept = default;
void Run::push(const Point& p) { impl_->push(p); }
std::map<TrajId, Sample> Run::finish() { return impl_->finish(); }
std::vector<QueueEntry> Run::live_entries() const { return impl_->live_entries(); }
std::map<TrajId, std::vector<SamplePointView>> Run::sample_view() const {
    return impl_->sample_view();
}
std::map<TrajId, std::vector<Point>> Run::history_view() const { return impl_->history_view(); }
std::int64_t Run::current_window() const { return impl_->current_window(); }
void Run::set_evict_observer(EvictObserver obs) { impl_->set_evict_observer(std::move(obs)); }

std::map<TrajId, Sample> compress(std::span<const Point> stream, const BwcConfig& cfg) {
    if (stream.empty()) raise(errc::empty_input, "window-capped compression on empty stream");
    Run run(cfg);
    for (const Point& p : stream) run.push(p);
    return run.finish();
}

}  // namespace stcomp::bwc
