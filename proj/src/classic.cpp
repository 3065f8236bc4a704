#include "stcomp/classic.hpp"

#include <cmath>
#include <string>

#include "stcomp/geom.hpp"
#include "stcomp/pqueue.hpp"
#include "sample_store.hpp"

namespace stcomp::classic {

using stcomp::detail::kInf;
using stcomp::detail::key_of;
using stcomp::detail::NodeIt;
using stcomp::detail::SampleStore;

namespace detail {

// ------------------------------------------------------------------ squish

class SquishImpl {
  public:
    SquishImpl(TrajId id, const SquishConfig& cfg) : id_(id), cfg_(cfg) {
        if (cfg.capacity < 2) raise(errc::config, "squish capacity must be at least 2");
    }

    void push(const Point& p) {
        if (p.id != id_)
            raise(errc::integrity, "point of trajectory " + std::to_string(p.id) +
                                       " pushed into run for " + std::to_string(id_));
        NodeIt it = store_.append(p, kInf, true);
        q_.add(key_of(p), kInf);
        refresh_prev(it);
        if (q_.size() > cfg_.capacity) evict();
        if (q_.size() > cfg_.capacity)
            raise(errc::internal, "sample exceeds budget after eviction");
    }

    Sample finish() {
        auto all = store_.extract();
        auto hit = all.find(id_);
        if (hit == all.end()) return Sample{id_, {}};
        return std::move(hit->second);
    }

    std::vector<QueueEntry> live_entries() const { return q_.entries(); }

    std::vector<SamplePointView> sample_view() const {
        auto v = store_.view();
        auto hit = v.find(id_);
        return hit == v.end() ? std::vector<SamplePointView>{} : std::move(hit->second);
    }

    void set_evict_observer(EvictObserver obs) { obs_ = std::move(obs); }

  private:
    // The newly arrived point gives its predecessor both neighbors, so the
    // predecessor's priority becomes a real synchronized distance.
    void refresh_prev(NodeIt it) {
        if (auto prev = store_.prev(it)) {
            double pr = exact_sed_priority(store_, *prev);
            (*prev)->priority = pr;
            q_.update_priority(key_of((*prev)->pt), pr);
        }
    }

    void evict() {
        QueueEntry victim = q_.pop_min();
        NodeIt it = store_.find(victim.key);
        auto prev = store_.prev(it);
        auto next = store_.next(it);
        store_.erase(it);
        EvictEvent ev{victim, {}};
        // Both neighbors inherit the evicted priority additively. IEEE
        // arithmetic keeps sample edges at +inf without a special case.
        for (auto nb : {prev, next}) {
            if (!nb) continue;
            stcomp::detail::Node& n = **nb;
            double before = n.priority;
            n.priority = before + victim.priority;
            q_.update_priority(key_of(n.pt), n.priority);
            ev.updates.push_back({key_of(n.pt), before, n.priority});
        }
        if (obs_) obs_(ev);
    }

    TrajId id_;
    SquishConfig cfg_;
    SampleStore store_;
    EvictionQueue q_;
    EvictObserver obs_;
};

// ----------------------------------------------------------------- sttrace

class STTraceImpl {
  public:
    explicit STTraceImpl(const STTraceConfig& cfg) : cfg_(cfg) {
        if (cfg.buffer < 2) raise(errc::config, "sttrace buffer must be at least 2");
    }

    void push(const Point& p) {
        if (p.ts < last_ts_) raise(errc::ordering, "stream must be ordered by timestamp");
        last_ts_ = p.ts;

        // Full buffer: a point whose arrival would hand the current last
        // point a priority below everything buffered cannot survive the
        // eviction it triggers, so it is skipped outright.
        if (q_.size() >= cfg_.buffer) {
            stcomp::detail::NodeList& lst = store_.list(p.id);
            if (lst.size() >= 2) {
                auto last = std::prev(lst.end());
                auto last2 = std::prev(last);
                double tentative = sed(last2->pt, last->pt, p);
                if (tentative < *q_.min_priority()) return;
            }
        }

        NodeIt it = store_.append(p, kInf, true);
        q_.add(key_of(p), kInf);
        if (auto prev = store_.prev(it)) {
            double pr = exact_sed_priority(store_, *prev);
            (*prev)->priority = pr;
            q_.update_priority(key_of((*prev)->pt), pr);
        }
        if (q_.size() > cfg_.buffer) evict();
        if (q_.size() > cfg_.buffer)
            raise(errc::internal, "shared buffer exceeds budget after eviction");
    }

    std::map<TrajId, Sample> finish() { return store_.extract(); }

    std::vector<QueueEntry> live_entries() const { return q_.entries(); }
    std::map<TrajId, std::vector<SamplePointView>> sample_view() const { return store_.view(); }
    void set_evict_observer(EvictObserver obs) { obs_ = std::move(obs); }

  private:
    void evict() {
        QueueEntry victim = q_.pop_min();
        NodeIt it = store_.find(victim.key);
        auto prev = store_.prev(it);
        auto next = store_.next(it);
        store_.erase(it);
        EvictEvent ev{victim, {}};
        // Unlike the budgeted single-trajectory variant, neighbors get a
        // fresh synchronized distance over the surviving sample.
        for (auto nb : {prev, next}) {
            if (!nb) continue;
            stcomp::detail::Node& n = **nb;
            double before = n.priority;
            n.priority = exact_sed_priority(store_, *nb);
            q_.update_priority(key_of(n.pt), n.priority);
            ev.updates.push_back({key_of(n.pt), before, n.priority});
        }
        if (obs_) obs_(ev);
    }

    STTraceConfig cfg_;
    SampleStore store_;
    EvictionQueue q_;
    EvictObserver obs_;
    double last_ts_ = -kInf;
};

// ----------------------------------------------------------- dead reckoning

Vec2 dr_estimate_pair(const Point* p2, const Point& p1, Predictor predictor, double ts) {
    switch (predictor) {
        case Predictor::two_point: {
            if (!p2) return p1.pos();  // single kept point: standstill estimate
            double dt = p1.ts - p2->ts;
            double h = ts - p1.ts;
            return {p1.x + (p1.x - p2->x) / dt * h, p1.y + (p1.y - p2->y) / dt * h};
        }
        case Predictor::sog_cog: {
            if (!p1.sog || !p1.cog)
                raise(errc::schema, "sog/cog required on kept points for the sog-cog predictor");
            double h = ts - p1.ts;
            return {p1.x + std::cos(*p1.cog) * *p1.sog * h,
                    p1.y + std::sin(*p1.cog) * *p1.sog * h};
        }
    }
    raise(errc::internal, "unknown predictor");
}

class DeadReckoningImpl {
  public:
    explicit DeadReckoningImpl(const DRConfig& cfg) : cfg_(cfg) {
        if (!(cfg.epsilon > 0.0)) raise(errc::config, "dead reckoning threshold must be positive");
    }

    void push(const Point& p) {
        if (p.ts < last_ts_) raise(errc::ordering, "stream must be ordered by timestamp");
        last_ts_ = p.ts;
        stcomp::detail::NodeList& lst = store_.list(p.id);
        if (lst.empty()) {  // a receiver knows nothing yet: always transmit
            store_.append(p, 0.0, false);
            return;
        }
        const Point& p1 = lst.back().pt;
        const Point* p2 = lst.size() >= 2 ? &std::prev(lst.end(), 2)->pt : nullptr;
        double deviation = dist(dr_estimate_pair(p2, p1, cfg_.predictor, p.ts), p.pos());
        if (deviation > cfg_.epsilon) store_.append(p, deviation, false);
    }

    std::map<TrajId, Sample> finish() { return store_.extract(); }

  private:
    DRConfig cfg_;
    SampleStore store_;
    double last_ts_ = -kInf;
};

}  // namespace detail

// ------------------------------------------------------- pimpl boilerplate

SquishRun::SquishRun(TrajId id, const SquishConfig& cfg)
    : impl_(std::make_unique<detail::SquishImpl>(id, cfg)) {}
SquishRun::~SquishRun() = default;
SquishRun::SquishRun(SquishRun&&) noexcept = default;
SquishRun& SquishRun::operator=(SquishRun&&) noexcept = default;
void SquishRun::push(const Point& p) { impl_->push(p); }
Sample SquishRun::finish() { return impl_->finish(); }
std::vector<QueueEntry> SquishRun::live_entries() const { return impl_->live_entries(); }
std::vector<SamplePointView> SquishRun::sample_view() const { return impl_->sample_view(); }
void SquishRun::set_evict_observer(EvictObserver obs) { impl_->set_evict_observer(std::move(obs)); }

STTraceRun::STTraceRun(const STTraceConfig& cfg)
    : impl_(std::make_unique<detail::STTraceImpl>(cfg)) {}
STTraceRun::~STTraceRun() = default;
STTraceRun::STTraceRun(STTraceRun&&) noexcept = default;
STTraceRun& STTraceRun::operator=(STTraceRun&&) noexcept = default;
void STTraceRun::push(const Point& p) { impl_->push(p); }
std::map<TrajId, Sample> STTraceRun::finish() { return impl_->finish(); }
std::vector<QueueEntry> STTraceRun::live_entries() const { return impl_->live_entries(); }
std::map<TrajId, std::vector<SamplePointView>> STTraceRun::sample_view() const {
    return impl_->sample_view();
}
void STTraceRun::set_evict_observer(EvictObserver obs) {
    impl_->set_evict_observer(std::move(obs));
}

DeadReckoningRun::DeadReckoningRun(const DRConfig& cfg)
    : impl_(std::make_unique<detail::DeadReckoningImpl>(cfg)) {}
DeadReckoningRun::~DeadReckoningRun() = default;
DeadReckoningRun::DeadReckoningRun(DeadReckoningRun&&) noexcept = default;
DeadReckoningRun& DeadReckoningRun::operator=(DeadReckoningRun&&) noexcept = default;
void DeadReckoningRun::push(const Point& p) { impl_->push(p); }
std::map<TrajId, Sample> DeadReckoningRun::finish() { return impl_->finish(); }

// ------------------------------------------------------------ batch fronts

Sample squish(const Trajectory& t, const SquishConfig& cfg) {
    if (t.points.empty()) raise(errc::empty_input, "squish on empty trajectory");
    SquishRun run(t.id, cfg);
    for (const Point& p : t.points) run.push(p);
    return run.finish();
}

std::map<TrajId, Sample> sttrace(std::span<const Point> stream, const STTraceConfig& cfg) {
    if (stream.empty()) raise(errc::empty_input, "sttrace on empty stream");
    STTraceRun run(cfg);
    for (const Point& p : stream) run.push(p);
    return run.finish();
}

std::map<TrajId, Sample> dead_reckoning(std::span<const Point> stream, const DRConfig& cfg) {
    if (stream.empty()) raise(errc::empty_input, "dead reckoning on empty stream");
    DeadReckoningRun run(cfg);
    for (const Point& p : stream) run.push(p);
    return run.finish();
}

Vec2 dr_estimate(std::span<const Point> kept, Predictor predictor, double ts) {
    if (kept.empty()) raise(errc::empty_input, "predictor needs at least one kept point");
    const Point* p2 = kept.size() >= 2 ? &kept[kept.size() - 2] : nullptr;
    return detail::dr_estimate_pair(p2, kept.back(), predictor, ts);
}

// -------------------------------------------------------------------- tdtr

namespace {

void tdtr_split(const std::vector<Point>& pts, std::size_t lo, std::size_t hi, double tolerance,
                std::vector<char>& keep) {
    if (hi - lo < 2) return;
    double worst = -1.0;
    std::size_t at = lo;
    for (std::size_t k = lo + 1; k < hi; ++k) {
        double d = sed(pts[lo], pts[k], pts[hi]);
        if (d > worst) {  // first index attaining the max, for determinism
            worst = d;
            at = k;
        }
    }
    if (worst > tolerance) {
        keep[at] = 1;
        tdtr_split(pts, lo, at, tolerance, keep);
        tdtr_split(pts, at, hi, tolerance, keep);
    }
}

}  // namespace

Sample tdtr(const Trajectory& t, const TdtrConfig& cfg) {
    if (cfg.tolerance < 0.0) raise(errc::config, "tdtr tolerance must be non-negative");
    if (t.points.empty()) raise(errc::empty_input, "tdtr on empty trajectory");
    const auto& pts = t.points;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (!(pts[i - 1].ts < pts[i].ts))
            raise(errc::ordering, "trajectory " + std::to_string(t.id) +
                                      " is not strictly increasing in time");
    Sample out;
    out.source_id = t.id;
    if (pts.size() <= 2) {
        out.points = pts;
        return out;
    }
    const std::size_t n = pts.size();
    std::vector<char> keep(n, 0);
    keep[0] = 1;
    keep[n - 1] = 1;
    tdtr_split(pts, 0, n - 1, cfg.tolerance, keep);
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (keep[i]) out.points.push_back(pts[i]);
    return out;
}

}  // namespace stcomp::classic
