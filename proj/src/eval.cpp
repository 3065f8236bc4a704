#include "stcomp/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "stcomp/geom.hpp"
#include "stcomp/kernels.hpp"

namespace stcomp::eval {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<Point> make_stream(const std::map<TrajId, Trajectory>& trajectories) {
    std::vector<Point> out;
    for (const auto& [id, t] : trajectories) out.insert(out.end(), t.points.begin(), t.points.end());
    std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        return a.id < b.id;
    });
    return out;
}

// Verifies the sample is a subsequence of its original by identity.
void check_subsequence(const Trajectory& original, const Sample& s) {
    std::size_t i = 0;
    for (const Point& sp : s.points) {
        while (i < original.points.size() && original.points[i].ts < sp.ts) ++i;
        if (i >= original.points.size() || original.points[i].ts != sp.ts ||
            original.points[i].x != sp.x || original.points[i].y != sp.y)
            raise(errc::integrity, "sample of trajectory " + std::to_string(s.source_id) +
                                       " is not a subsequence of its original");
        ++i;
    }
}

}  // namespace

// ---------------------------------------------------------------- accuracy

AccuracyReport accuracy(const std::map<TrajId, Trajectory>& originals,
                        const std::map<TrajId, Sample>& samples, double interval) {
    if (!(interval > 0.0)) raise(errc::config, "evaluation interval must be positive");
    if (samples.empty()) raise(errc::empty_input, "no samples to evaluate");

    AccuracyReport rep;
    rep.interval_s = interval;
    double weighted_sum = 0.0;
    double traj_mean_sum = 0.0;
    std::size_t kept = 0;
    std::size_t raw = 0;

    for (const auto& [id, s] : samples) {
        auto hit = originals.find(id);
        if (hit == originals.end())
            raise(errc::integrity, "sample references unknown trajectory " + std::to_string(id));
        const Trajectory& orig = hit->second;
        if (s.points.size() < 2)
            raise(errc::integrity, "sample of trajectory " + std::to_string(id) +
                                       " needs at least two points to evaluate");
        check_subsequence(orig, s);

        double t0 = s.points.front().ts;
        double t1 = s.points.back().ts;
        if (!(t1 > t0))
            raise(errc::degenerate_span, "sample of trajectory " + std::to_string(id) +
                                             " spans no time");

        auto t_of = [&](std::int64_t k) { return t0 + static_cast<double>(k) * interval; };
        auto est = static_cast<std::int64_t>(std::floor((t1 - t0) / interval));
        while (t_of(est) > t1) --est;
        while (t_of(est + 1) <= t1) ++est;
        std::int64_t n = est + 1;  // grid k in [0, n), both span ends included

        double sum = kernels::synchronized_error_sum(orig.points, s.points, t0, interval, 0, n);
        double mean = sum / static_cast<double>(n);
        rep.per_trajectory.push_back({id, static_cast<std::size_t>(n), mean});
        rep.total_eval_points += static_cast<std::size_t>(n);
        weighted_sum += sum;
        traj_mean_sum += mean;
        kept += s.points.size();
        raw += orig.points.size();
    }

    rep.mean_error_m = weighted_sum / static_cast<double>(rep.total_eval_points);
    rep.mean_error_per_trajectory_m = traj_mean_sum / static_cast<double>(samples.size());
    rep.ratio = static_cast<double>(kept) / static_cast<double>(raw);
    return rep;
}

double default_interval(const std::map<TrajId, Trajectory>& originals) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [id, t] : originals) {
        if (t.points.size() < 2) continue;
        std::vector<double> gaps;
        gaps.reserve(t.points.size() - 1);
        for (std::size_t i = 1; i < t.points.size(); ++i)
            gaps.push_back(t.points[i].ts - t.points[i - 1].ts);
        std::sort(gaps.begin(), gaps.end());
        std::size_t m = gaps.size() / 2;
        double median = gaps.size() % 2 ? gaps[m] : 0.5 * (gaps[m - 1] + gaps[m]);
        best = std::min(best, median);
    }
    if (!std::isfinite(best))
        raise(errc::empty_input, "no trajectory with two points to derive an interval from");
    return best;
}

// --------------------------------------------------------------- histogram

WindowHistogram window_histogram(const std::map<TrajId, Sample>& samples,
                                 const bwc::WindowConfig& w) {
    WindowHistogram h;
    h.window = w;
    for (const auto& [id, s] : samples) {
        for (const Point& p : s.points) {
            std::int64_t k = bwc::window_index(p.ts, w);
            if (k < 0)
                raise(errc::out_of_range, "sample point at " + std::to_string(p.ts) +
                                              " precedes the window origin");
            if (static_cast<std::size_t>(k) >= h.counts.size()) h.counts.resize(k + 1, 0);
            ++h.counts[k];
        }
    }
    return h;
}

std::size_t max_count(const WindowHistogram& h) {
    std::size_t best = 0;
    for (std::size_t c : h.counts) best = std::max(best, c);
    return best;
}

void write_histogram_csv(const WindowHistogram& h, std::ostream& out) {
    out << "window_index,window_start_ts,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out << i << ',' << fmt(bwc::window_edge(static_cast<std::int64_t>(i), h.window)) << ','
            << h.counts[i] << '\n';
}

void write_accuracy_csv(const AccuracyReport& r, std::ostream& out) {
    out << "trajectory_id,eval_points,mean_error_m\n";
    for (const TrajectoryAccuracy& t : r.per_trajectory)
        out << t.id << ',' << t.eval_points << ',' << fmt(t.mean_error_m) << '\n';
    out << "all_count_weighted," << r.total_eval_points << ',' << fmt(r.mean_error_m) << '\n';
    out << "all_trajectory_weighted," << r.total_eval_points << ','
        << fmt(r.mean_error_per_trajectory_m) << '\n';
}

// ----------------------------------------------------------------- compare

const char* algo_name(Algo a) {
    switch (a) {
        case Algo::tdtr: return "tdtr";
        case Algo::squish: return "squish";
        case Algo::sttrace: return "sttrace";
        case Algo::dr: return "dr";
        case Algo::bwc_squish: return "bwc-squish";
        case Algo::bwc_sttrace: return "bwc-sttrace";
        case Algo::bwc_sttrace_imp: return "bwc-sttrace-imp";
        case Algo::bwc_dr: return "bwc-dr";
    }
    return "?";
}

std::optional<Algo> algo_from_name(std::string_view name) {
    for (Algo a : all_algos())
        if (name == algo_name(a)) return a;
    return std::nullopt;
}

bool is_bwc(Algo a) {
    return a == Algo::bwc_squish || a == Algo::bwc_sttrace || a == Algo::bwc_sttrace_imp ||
           a == Algo::bwc_dr;
}

std::span<const Algo> all_algos() {
    static const Algo all[] = {Algo::tdtr,       Algo::squish,      Algo::sttrace,
                               Algo::dr,         Algo::bwc_squish,  Algo::bwc_sttrace,
                               Algo::bwc_sttrace_imp, Algo::bwc_dr};
    return all;
}

std::size_t squish_capacity(double ratio, std::size_t traj_len) {
    return std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(traj_len))));
}

std::size_t sttrace_buffer(double ratio, std::size_t total_points) {
    return std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(total_points))));
}

std::size_t bwc_budget(double ratio, std::size_t total_points, double delta, double duration) {
    if (!(duration > 0.0)) raise(errc::config, "stream duration must be positive");
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(ratio * static_cast<double>(total_points) * delta / duration)));
}

namespace {

std::size_t sample_total(const std::map<TrajId, Sample>& samples) {
    std::size_t n = 0;
    for (const auto& [id, s] : samples) n += s.points.size();
    return n;
}

std::size_t kept_count_for(Algo algo, const std::map<TrajId, Trajectory>& originals,
                           const std::vector<Point>& stream, double threshold,
                           classic::Predictor predictor) {
    if (algo == Algo::tdtr) {
        std::size_t kept = 0;
        for (const auto& [id, t] : originals) kept += classic::tdtr(t, {threshold}).size();
        return kept;
    }
    return sample_total(classic::dead_reckoning(stream, {threshold, predictor}));
}

}  // namespace

double calibrate_threshold(Algo algo, const std::map<TrajId, Trajectory>& originals,
                           double ratio, classic::Predictor predictor) {
    if (algo != Algo::tdtr && algo != Algo::dr)
        raise(errc::config, "only threshold algorithms can be calibrated");
    if (!(ratio > 0.0 && ratio <= 1.0)) raise(errc::config, "ratio must be in (0, 1]");

    std::vector<Point> stream;
    std::size_t total = 0;
    for (const auto& [id, t] : originals) total += t.points.size();
    if (algo == Algo::dr) stream = make_stream(originals);
    auto target = static_cast<double>(total) * ratio;

    auto kept_at = [&](double thr) {
        return static_cast<double>(kept_count_for(algo, originals, stream, thr, predictor));
    };

    // Kept count is non-increasing in the threshold: bracket then bisect.
    double lo = 1e-9;
    double hi = 1.0;
    while (kept_at(hi) > target && hi < 1e9) hi *= 4.0;
    for (int i = 0; i < 64; ++i) {
        double mid = 0.5 * (lo + hi);
        if (kept_at(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    // Return whichever bracket end lands nearer the target budget.
    return std::abs(kept_at(lo) - target) < std::abs(kept_at(hi) - target) ? lo : hi;
}

std::vector<CompareRow> compare(const std::map<TrajId, Trajectory>& originals,
                                const CompareSpec& spec) {
    if (originals.empty()) raise(errc::empty_input, "nothing to compare on");
    if (!(spec.ratio > 0.0 && spec.ratio <= 1.0)) raise(errc::config, "ratio must be in (0, 1]");
    if (!(spec.window.delta > 0.0)) raise(errc::config, "window length must be positive");

    std::vector<Point> stream = make_stream(originals);
    if (stream.empty()) raise(errc::empty_input, "nothing to compare on");
    std::size_t total = stream.size();
    double duration = stream.back().ts - stream.front().ts;

    double interval = spec.interval > 0.0 ? spec.interval : default_interval(originals);
    double imp_precision = spec.imp_precision > 0.0 ? spec.imp_precision : interval;
    imp_precision = std::min(imp_precision, spec.window.delta);

    bwc::WindowConfig window = spec.window;
    if (window.bw == 0) window.bw = bwc_budget(spec.ratio, total, window.delta, duration);

    std::vector<Algo> algos(spec.algos);
    if (algos.empty()) algos.assign(all_algos().begin(), all_algos().end());

    std::vector<CompareRow> rows;
    for (Algo algo : algos) {
        auto begin = std::chrono::steady_clock::now();
        std::map<TrajId, Sample> samples;
        switch (algo) {
            case Algo::tdtr: {
                double tol = calibrate_threshold(algo, originals, spec.ratio, spec.predictor);
                for (const auto& [id, t] : originals) samples.emplace(id, classic::tdtr(t, {tol}));
                break;
            }
            case Algo::squish: {
                for (const auto& [id, t] : originals)
                    samples.emplace(
                        id, classic::squish(t, {squish_capacity(spec.ratio, t.points.size())}));
                break;
            }
            case Algo::sttrace:
                samples = classic::sttrace(stream, {sttrace_buffer(spec.ratio, total)});
                break;
            case Algo::dr: {
                double eps = calibrate_threshold(algo, originals, spec.ratio, spec.predictor);
                samples = classic::dead_reckoning(stream, {eps, spec.predictor});
                break;
            }
            default: {
                bwc::BwcConfig cfg;
                cfg.algorithm = algo == Algo::bwc_squish        ? bwc::Algorithm::squish
                                : algo == Algo::bwc_sttrace     ? bwc::Algorithm::sttrace
                                : algo == Algo::bwc_sttrace_imp ? bwc::Algorithm::sttrace_imp
                                                                : bwc::Algorithm::dr;
                cfg.window = window;
                cfg.imp = {imp_precision, spec.imp_sign};
                cfg.predictor = spec.predictor;
                samples = bwc::compress(stream, cfg);
                break;
            }
        }
        auto end = std::chrono::steady_clock::now();

        CompareRow row;
        row.algorithm = algo_name(algo);
        row.raw = total;
        row.kept = sample_total(samples);
        row.ratio = static_cast<double>(row.kept) / static_cast<double>(total);
        row.interval_s = interval;
        row.bw = window.bw;
        row.delta_s = window.delta;
        if (spec.timing)
            row.wall_ms =
                std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(end - begin)
                    .count();

        WindowHistogram hist = window_histogram(samples, window);
        row.max_window_count = max_count(hist);
        if (is_bwc(algo) && row.max_window_count > window.bw)
            raise(errc::internal, std::string(algo_name(algo)) +
                                      " committed more points than the window budget");

        // Starved samples (fewer than two points) cannot be scored; drop
        // them from the error mean but keep them in the achieved ratio.
        std::map<TrajId, Sample> scorable;
        for (auto& [id, s] : samples)
            if (s.points.size() >= 2) scorable.emplace(id, std::move(s));
        row.degenerate_skipped = samples.size() - scorable.size();
        if (scorable.empty())
            raise(errc::degenerate_span, std::string(algo_name(algo)) +
                                             " kept no sample large enough to evaluate");
        row.mean_error_m = accuracy(originals, scorable, interval).mean_error_m;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_compare_csv(std::span<const CompareRow> rows, std::ostream& out) {
    out << "algorithm,ratio,interval_s,mean_error_m,max_window_count,bw,delta_s,wall_ms\n";
    for (const CompareRow& r : rows)
        out << r.algorithm << ',' << fmt(r.ratio) << ',' << fmt(r.interval_s) << ','
            << fmt(r.mean_error_m) << ',' << r.max_window_count << ',' << r.bw << ','
            << fmt(r.delta_s) << ',' << fmt(r.wall_ms) << '\n';
}

}  // namespace stcomp::eval
