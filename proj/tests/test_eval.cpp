#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "stcomp/eval.hpp"

using namespace stcomp;
using namespace stcomp::eval;

namespace {

Point pt(TrajId id, double x, double y, double ts) {
    Point p;
    p.id = id;
    p.ts = ts;
    p.x = x;
    p.y = y;
    return p;
}

std::map<TrajId, Trajectory> one_traj(std::vector<Point> pts) {
    Trajectory t;
    t.id = pts.front().id;
    t.points = std::move(pts);
    std::map<TrajId, Trajectory> m;
    m.emplace(t.id, std::move(t));
    return m;
}

std::map<TrajId, Sample> as_sample(const std::map<TrajId, Trajectory>& originals) {
    std::map<TrajId, Sample> out;
    for (const auto& [id, t] : originals) out.emplace(id, Sample{id, t.points});
    return out;
}

std::map<TrajId, Trajectory> random_walks(std::uint64_t seed, int n_traj, int n_pts) {
    std::mt19937_64 gen(seed);
    auto u = [&] { return std::ldexp(static_cast<double>(gen() >> 11), -53); };
    std::map<TrajId, Trajectory> out;
    for (int id = 0; id < n_traj; ++id) {
        Trajectory t;
        t.id = id;
        double x = u() * 100;
        double y = u() * 100;
        for (int i = 0; i < n_pts; ++i) {
            x += u() * 10 - 5;
            y += u() * 10 - 5;
            t.points.push_back(pt(id, x, y, i * 1.0));
        }
        out.emplace(id, std::move(t));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- accuracy

TEST_CASE("a sample identical to its original scores exactly zero") {
    auto originals = random_walks(3, 4, 50);
    auto rep = accuracy(originals, as_sample(originals), 0.25);
    CHECK(rep.mean_error_m == 0.0);
    CHECK(rep.mean_error_per_trajectory_m == 0.0);
    CHECK(rep.ratio == 1.0);
    CHECK(rep.per_trajectory.size() == 4);
}

TEST_CASE("endpoint sample of a triangle: closed-form mean") {
    // original rises to (5,5) at t=5 and returns; sample is the straight base
    auto originals =
        one_traj({pt(1, 0, 0, 0), pt(1, 5, 5, 5), pt(1, 10, 0, 10)});
    std::map<TrajId, Sample> samples;
    samples.emplace(1, Sample{1, {pt(1, 0, 0, 0), pt(1, 10, 0, 10)}});

    auto rep = accuracy(originals, samples, 1.0);
    REQUIRE(rep.per_trajectory.size() == 1);
    CHECK(rep.per_trajectory[0].eval_points == 11);  // both span ends included
    // errors 0,1,2,3,4,5,4,3,2,1,0 sum to 25
    CHECK(rep.mean_error_m == doctest::Approx(25.0 / 11.0).epsilon(1e-12));
    CHECK(rep.mean_error_per_trajectory_m == doctest::Approx(25.0 / 11.0).epsilon(1e-12));
    CHECK(rep.ratio == doctest::Approx(2.0 / 3.0));
    CHECK(rep.total_eval_points == 11);
}

TEST_CASE("grid with a non-dividing interval stops inside the span") {
    auto originals = one_traj({pt(1, 0, 0, 0), pt(1, 10, 0, 10)});
    auto rep = accuracy(originals, as_sample(originals), 3.0);
    CHECK(rep.per_trajectory[0].eval_points == 4);  // t = 0,3,6,9

    rep = accuracy(originals, as_sample(originals), 0.1);
    CHECK(rep.per_trajectory[0].eval_points == 101);  // fixup hits t=10 exactly
}

TEST_CASE("accuracy is translation invariant") {
    auto originals = random_walks(11, 2, 40);
    std::map<TrajId, Sample> samples;
    for (const auto& [id, t] : originals) {
        Sample s{id, {}};
        for (std::size_t i = 0; i < t.points.size(); i += 3) s.points.push_back(t.points[i]);
        s.points.push_back(t.points.back());
        if (s.points[s.points.size() - 2].ts == s.points.back().ts) s.points.pop_back();
        samples.emplace(id, std::move(s));
    }
    double base = accuracy(originals, samples, 0.5).mean_error_m;

    auto shift = [&](double dx, double dy) {
        auto o2 = originals;
        auto s2 = samples;
        for (auto& [id, t] : o2)
            for (Point& p : t.points) {
                p.x += dx;
                p.y += dy;
            }
        for (auto& [id, s] : s2)
            for (Point& p : s.points) {
                p.x += dx;
                p.y += dy;
            }
        return accuracy(o2, s2, 0.5).mean_error_m;
    };
    CHECK(shift(1e4, -2e4) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("count-weighted and trajectory-weighted means differ when spans do") {
    // trajectory 1 is long and clean, trajectory 2 is short and bad
    std::map<TrajId, Trajectory> originals;
    {
        Trajectory t;
        t.id = 1;
        for (int i = 0; i <= 100; ++i) t.points.push_back(pt(1, i * 1.0, 0, i));
        originals.emplace(1, std::move(t));
        Trajectory t2;
        t2.id = 2;
        t2.points = {pt(2, 0, 0, 0), pt(2, 5, 8, 5), pt(2, 10, 0, 10)};
        originals.emplace(2, std::move(t2));
    }
    std::map<TrajId, Sample> samples;
    samples.emplace(1, Sample{1, {pt(1, 0, 0, 0), pt(1, 100, 0, 100)}});  // error 0
    samples.emplace(2, Sample{2, {pt(2, 0, 0, 0), pt(2, 10, 0, 10)}});    // error > 0

    auto rep = accuracy(originals, samples, 1.0);
    // 101 zero-error points vs 11 lossy ones: the count-weighted mean is
    // pulled down, the trajectory-weighted mean is not
    CHECK(rep.mean_error_m < rep.mean_error_per_trajectory_m);
    double traj2_mean = rep.per_trajectory[1].mean_error_m;
    CHECK(rep.mean_error_per_trajectory_m == doctest::Approx(traj2_mean / 2.0).epsilon(1e-12));
}

TEST_CASE("accuracy validates its inputs") {
    auto originals = one_traj({pt(1, 0, 0, 0), pt(1, 1, 0, 1), pt(1, 2, 0, 2)});
    auto good = as_sample(originals);
    CHECK_THROWS_AS(accuracy(originals, good, 0.0), error);
    CHECK_THROWS_AS(accuracy(originals, {}, 1.0), error);

    std::map<TrajId, Sample> stranger;
    stranger.emplace(9, Sample{9, {pt(9, 0, 0, 0), pt(9, 1, 0, 1)}});
    CHECK_THROWS_AS(accuracy(originals, stranger, 1.0), error);

    std::map<TrajId, Sample> tiny;
    tiny.emplace(1, Sample{1, {pt(1, 0, 0, 0)}});
    CHECK_THROWS_AS(accuracy(originals, tiny, 1.0), error);

    std::map<TrajId, Sample> forged;
    forged.emplace(1, Sample{1, {pt(1, 0, 0, 0), pt(1, 99, 0, 1)}});  // x mismatch
    try {
        accuracy(originals, forged, 1.0);
        FAIL("forged sample must throw");
    } catch (const error& e) {
        CHECK(e.code() == errc::integrity);
    }
}

TEST_CASE("default interval is the smallest median gap") {
    std::map<TrajId, Trajectory> originals;
    Trajectory a;
    a.id = 1;  // gaps 1, 2, 100: median 2
    for (double ts : {0.0, 1.0, 3.0, 103.0}) a.points.push_back(pt(1, ts, 0, ts));
    originals.emplace(1, std::move(a));
    Trajectory b;
    b.id = 2;  // gaps 5, 5: median 5
    for (double ts : {0.0, 5.0, 10.0}) b.points.push_back(pt(2, ts, 0, ts));
    originals.emplace(2, std::move(b));
    CHECK(default_interval(originals) == 2.0);

    std::map<TrajId, Trajectory> lonely;
    Trajectory c;
    c.id = 3;
    c.points = {pt(3, 0, 0, 0)};
    lonely.emplace(3, std::move(c));
    CHECK_THROWS_AS(default_interval(lonely), error);
}

// --------------------------------------------------------------- histogram

TEST_CASE("window histogram bins by the canonical index") {
    std::map<TrajId, Sample> samples;
    samples.emplace(1, Sample{1, {pt(1, 0, 0, 1), pt(1, 0, 0, 2), pt(1, 0, 0, 901)}});
    auto h = window_histogram(samples, bwc::WindowConfig{0.0, 900.0, 1});
    CHECK(h.counts == std::vector<std::size_t>{2, 1});
    CHECK(max_count(h) == 2);

    std::ostringstream os;
    write_histogram_csv(h, os);
    CHECK(os.str() == "window_index,window_start_ts,count\n0,0,2\n1,900,1\n");
}

TEST_CASE("histogram counts add up across many samples") {
    auto originals = random_walks(17, 5, 83);
    auto samples = as_sample(originals);
    auto h = window_histogram(samples, bwc::WindowConfig{0.0, 7.0, 1});
    std::size_t total = 0;
    for (std::size_t c : h.counts) total += c;
    CHECK(total == 5 * 83);

    std::map<TrajId, Sample> early;
    early.emplace(1, Sample{1, {pt(1, 0, 0, -5.0)}});
    CHECK_THROWS_AS(window_histogram(early, bwc::WindowConfig{0.0, 7.0, 1}), error);
}

// ----------------------------------------------------------------- compare

TEST_CASE("algo names round-trip") {
    CHECK(all_algos().size() == 8);
    for (Algo a : all_algos()) {
        auto back = algo_from_name(algo_name(a));
        REQUIRE(back.has_value());
        CHECK(*back == a);
    }
    CHECK(!algo_from_name("nope").has_value());
    CHECK(is_bwc(Algo::bwc_dr));
    CHECK(!is_bwc(Algo::tdtr));
}

TEST_CASE("ratio-driven parameter derivations") {
    CHECK(squish_capacity(0.10, 200) == 20);
    CHECK(squish_capacity(0.10, 5) == 2);    // floor of 2
    CHECK(squish_capacity(0.001, 100) == 2);
    CHECK(sttrace_buffer(0.10, 1000) == 100);
    CHECK(sttrace_buffer(0.001, 100) == 2);
    CHECK(bwc_budget(0.10, 1000, 900.0, 9000.0) == 10);
    CHECK(bwc_budget(0.0001, 100, 1.0, 1000.0) == 1);  // floor of 1
    CHECK_THROWS_AS(bwc_budget(0.1, 100, 1.0, 0.0), error);
}

TEST_CASE("calibration lands the kept count near the ratio target") {
    auto originals = random_walks(23, 3, 120);
    for (Algo a : {Algo::tdtr, Algo::dr}) {
        double thr = calibrate_threshold(a, originals, 0.25, classic::Predictor::two_point);
        CHECK(thr > 0.0);
        std::size_t kept = 0;
        if (a == Algo::tdtr) {
            for (const auto& [id, t] : originals) kept += classic::tdtr(t, {thr}).size();
        } else {
            std::vector<Point> stream;
            for (const auto& [id, t] : originals)
                stream.insert(stream.end(), t.points.begin(), t.points.end());
            std::sort(stream.begin(), stream.end(),
                      [](const Point& x, const Point& y) { return x.ts < y.ts; });
            for (const auto& [id, s] : classic::dead_reckoning(
                     stream, {thr, classic::Predictor::two_point}))
                kept += s.points.size();
        }
        double target = 0.25 * 360.0;
        CHECK(std::abs(static_cast<double>(kept) - target) <= 0.15 * 360.0);
    }
    CHECK_THROWS_AS(calibrate_threshold(Algo::squish, originals, 0.5,
                                        classic::Predictor::two_point),
                    error);
}

TEST_CASE("compare at ratio one is lossless for every algorithm") {
    // jagged walks: every point deviates, so threshold calibration keeps all
    auto originals = random_walks(29, 2, 101);
    CompareSpec spec;
    spec.ratio = 1.0;
    spec.window = {0.0, 10.0, 0};  // bw derived from the ratio
    spec.interval = 1.0;

    auto rows = compare(originals, spec);
    REQUIRE(rows.size() == 8);
    for (const CompareRow& r : rows) {
        CAPTURE(r.algorithm);
        CHECK(r.ratio == 1.0);
        CHECK(r.mean_error_m == 0.0);
        CHECK(r.raw == 202);
        CHECK(r.kept == 202);
        CHECK(r.wall_ms == 0.0);  // timing off by default: bytes stay stable
        CHECK(r.degenerate_skipped == 0);
        if (std::string(r.algorithm).rfind("bwc", 0) == 0) CHECK(r.max_window_count <= r.bw);
    }

    std::ostringstream os;
    write_compare_csv(rows, os);
    std::string csv = os.str();
    CHECK(csv.find("algorithm,ratio,interval_s,mean_error_m,max_window_count,bw,delta_s,"
                   "wall_ms\n") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("compare reports achieved ratios near the request") {
    auto originals = random_walks(31, 3, 100);
    CompareSpec spec;
    spec.ratio = 0.2;
    spec.window = {0.0, 20.0, 0};
    spec.interval = 1.0;
    auto rows = compare(originals, spec);
    for (const CompareRow& r : rows) {
        CAPTURE(r.algorithm);
        CHECK(r.ratio > 0.02);
        CHECK(r.ratio < 0.6);
        CHECK(r.mean_error_m > 0.0);
        CHECK(r.bw > 0);
    }
}

TEST_CASE("compare skips starved samples but keeps them in the ratio") {
    std::map<TrajId, Trajectory> originals;
    Trajectory parked;
    parked.id = 1;
    for (int i = 0; i < 20; ++i) parked.points.push_back(pt(1, 5, 5, i));
    originals.emplace(1, std::move(parked));
    Trajectory moving;
    moving.id = 2;
    for (int i = 0; i < 20; ++i)
        moving.points.push_back(pt(2, i * 10.0, (i % 3) * 7.0, i));
    originals.emplace(2, std::move(moving));

    CompareSpec spec;
    spec.algos = {Algo::dr};
    spec.ratio = 0.5;
    spec.window = {0.0, 5.0, 0};
    spec.interval = 1.0;
    auto rows = compare(originals, spec);
    REQUIRE(rows.size() == 1);
    // the parked trajectory keeps only its first point: unscorable
    CHECK(rows[0].degenerate_skipped == 1);
    CHECK(rows[0].kept >= 1);
}

TEST_CASE("compare validates spec") {
    auto originals = random_walks(37, 1, 10);
    CompareSpec spec;
    spec.ratio = 0.0;
    CHECK_THROWS_AS(compare(originals, spec), error);
    spec.ratio = 0.5;
    spec.window = {0.0, 0.0, 0};
    CHECK_THROWS_AS(compare(originals, spec), error);
    CHECK_THROWS_AS(compare({}, CompareSpec{}), error);
}
