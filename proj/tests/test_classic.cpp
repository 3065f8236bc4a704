#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "stcomp/classic.hpp"
#include "stcomp/geom.hpp"

using namespace stcomp;
using namespace stcomp::classic;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point pt(TrajId id, double x, double y, double ts) {
    Point p;
    p.id = id;
    p.ts = ts;
    p.x = x;
    p.y = y;
    return p;
}

Trajectory traj(TrajId id, std::vector<Point> pts) {
    Trajectory t;
    t.id = id;
    t.points = std::move(pts);
    return t;
}

std::vector<double> kept_ts(const Sample& s) {
    std::vector<double> out;
    for (const Point& p : s.points) out.push_back(p.ts);
    return out;
}

bool is_subsequence(const Sample& s, const Trajectory& t) {
    std::size_t i = 0;
    for (const Point& p : t.points) {
        if (i < s.points.size() && s.points[i].ts == p.ts && s.points[i].x == p.x &&
            s.points[i].y == p.y)
            ++i;
    }
    return i == s.points.size();
}

}  // namespace

// ---------------------------------------------------------------- squish

TEST_CASE("squish desk trace: budget 3 evicts the cheap middle point") {
    Trajectory t = traj(1, {pt(1, 0, 0, 0), pt(1, 5, 3, 5), pt(1, 10, 0, 10), pt(1, 12, 0, 12)});

    SquishRun run(1, SquishConfig{3});
    std::vector<EvictEvent> events;
    run.set_evict_observer([&](const EvictEvent& e) { events.push_back(e); });
    for (const Point& p : t.points) run.push(p);

    REQUIRE(events.size() == 1);
    CHECK(events[0].evicted.key == PointKey{1, 10.0});
    CHECK(events[0].evicted.priority == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
    REQUIRE(events[0].updates.size() == 2);
    CHECK(events[0].updates[0].key == PointKey{1, 5.0});
    CHECK(events[0].updates[0].before == doctest::Approx(3.0));
    CHECK(events[0].updates[0].after == doctest::Approx(3.0 + 6.0 / 7.0).epsilon(1e-15));
    CHECK(events[0].updates[1].key == PointKey{1, 12.0});
    CHECK(events[0].updates[1].before == kInf);
    CHECK(events[0].updates[1].after == kInf);  // inf + x stays inf, no edge special case

    auto view = run.sample_view();
    REQUIRE(view.size() == 3);
    CHECK(view[0].pt.ts == 0.0);
    CHECK(view[0].priority == kInf);
    CHECK(view[1].pt.ts == 5.0);
    CHECK(view[1].priority == doctest::Approx(27.0 / 7.0).epsilon(1e-15));
    CHECK(view[2].pt.ts == 12.0);
    CHECK(view[2].priority == kInf);

    Sample s = run.finish();
    CHECK(kept_ts(s) == std::vector<double>{0, 5, 12});
}

TEST_CASE("squish budget 2 keeps exactly the endpoints") {
    Trajectory t = traj(1, {pt(1, 0, 0, 0), pt(1, 5, 3, 5), pt(1, 10, 0, 10), pt(1, 12, 0, 12)});
    Sample s = squish(t, SquishConfig{2});
    CHECK(kept_ts(s) == std::vector<double>{0, 12});
}

TEST_CASE("squish under budget is the identity") {
    Trajectory t = traj(4, {pt(4, 0, 0, 0), pt(4, 1, 7, 2), pt(4, 2, -3, 5)});
    Sample s = squish(t, SquishConfig{3});
    CHECK(kept_ts(s) == std::vector<double>{0, 2, 5});
    s = squish(t, SquishConfig{10});
    CHECK(s.size() == 3);
}

TEST_CASE("squish holds its budget throughout and output is a subsequence") {
    std::mt19937_64 gen(5);
    auto u = [&] { return std::ldexp(static_cast<double>(gen() >> 11), -53); };
    Trajectory t;
    t.id = 9;
    double x = 0.0;
    double y = 0.0;
    for (int i = 0; i < 200; ++i) {
        x += u() * 20 - 10;
        y += u() * 20 - 10;
        t.points.push_back(pt(9, x, y, i));
    }
    SquishRun run(9, SquishConfig{17});
    for (const Point& p : t.points) {
        run.push(p);
        CHECK(run.live_entries().size() <= 17);
    }
    Sample s = run.finish();
    CHECK(s.size() == 17);
    CHECK(is_subsequence(s, t));
    // first and last always survive: they carry +inf from the edges
    CHECK(s.points.front().ts == 0.0);
    CHECK(s.points.back().ts == 199.0);
}

TEST_CASE("squish validates config and trajectory identity") {
    CHECK_THROWS_AS(SquishRun(1, SquishConfig{1}), error);
    SquishRun run(1, SquishConfig{2});
    try {
        run.push(pt(2, 0, 0, 0));
        FAIL("wrong trajectory id must throw");
    } catch (const error& e) {
        CHECK(e.code() == errc::integrity);
    }
    CHECK_THROWS_AS(squish(traj(1, {}), SquishConfig{2}), error);
}

// --------------------------------------------------------------- sttrace

TEST_CASE("sttrace gates a new point once the buffer is full") {
    // three points, shared budget two: c's tentative priority is finite,
    // the buffered minimum is +inf, so c is never admitted
    std::vector<Point> stream{pt(1, 0, 0, 0), pt(1, 10, 0, 10), pt(1, 20, 5, 20)};
    auto out = sttrace(stream, STTraceConfig{2});
    REQUIRE(out.count(1) == 1);
    CHECK(kept_ts(out[1]) == std::vector<double>{0, 10});
}

TEST_CASE("sttrace admits a point worth more than the buffered minimum") {
    STTraceRun run(STTraceConfig{3});
    run.push(pt(1, 0, 0, 0));
    run.push(pt(1, 10, 0, 10));
    run.push(pt(1, 20, 0, 20));  // buffer now full, interior priority 0
    // tentative sed for the last buffered point against this one is 8 > 0
    run.push(pt(1, 30, 16, 30));
    auto out = run.finish();
    CHECK(out[1].size() == 3);
    // the zero-priority straight-line interior point was evicted
    for (const Point& p : out[1].points) CHECK(p.ts != 10.0);
}

TEST_CASE("sttrace shares one buffer across trajectories") {
    // trajectory 1 runs straight (interior priorities 0), trajectory 2 turns
    // hard every step; the shared budget should drain toward trajectory 2
    std::vector<Point> stream;
    for (int i = 0; i < 100; ++i) {
        stream.push_back(pt(1, i * 10.0, 0.0, i));
        stream.push_back(pt(2, i * 10.0, (i % 2) * 40.0, i));
    }
    auto out = sttrace(stream, STTraceConfig{80});
    std::size_t total = out[1].size() + out[2].size();
    CHECK(total == 80);
    CHECK(out[2].size() > out[1].size());
    CHECK(out[1].size() >= 2);
}

TEST_CASE("sttrace rejects unordered streams and tiny buffers") {
    CHECK_THROWS_AS(STTraceRun(STTraceConfig{1}), error);
    STTraceRun run(STTraceConfig{4});
    run.push(pt(1, 0, 0, 10));
    try {
        run.push(pt(2, 0, 0, 9));
        FAIL("time must not run backwards");
    } catch (const error& e) {
        CHECK(e.code() == errc::ordering);
    }
}

// --------------------------------------------------------- dead reckoning

TEST_CASE("dr_estimate special cases") {
    std::vector<Point> one{pt(1, 3, 4, 10)};
    Vec2 v = dr_estimate(one, Predictor::two_point, 15.0);
    CHECK(v == Vec2{3, 4});  // standstill with a single kept point

    std::vector<Point> two{pt(1, 0, 0, 0), pt(1, 10, 5, 2)};
    v = dr_estimate(two, Predictor::two_point, 5.0);
    CHECK(v.x == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(v.y == doctest::Approx(12.5).epsilon(1e-15));

    Point carrier = pt(1, 3, 4, 10);
    carrier.sog = 2.0;
    carrier.cog = 0.0;  // due east in math convention
    std::vector<Point> sc{carrier};
    v = dr_estimate(sc, Predictor::sog_cog, 12.0);
    CHECK(v.x == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(v.y == doctest::Approx(4.0).epsilon(1e-15));
    carrier.cog = std::numbers::pi / 2.0;  // north
    std::vector<Point> sc2{carrier};
    v = dr_estimate(sc2, Predictor::sog_cog, 12.0);
    CHECK(v.x == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(v.y == doctest::Approx(8.0).epsilon(1e-15));

    CHECK_THROWS_AS(dr_estimate({}, Predictor::two_point, 0.0), error);
    std::vector<Point> bare{pt(1, 0, 0, 0)};
    try {
        dr_estimate(bare, Predictor::sog_cog, 1.0);
        FAIL("sog/cog predictor needs the fields");
    } catch (const error& e) {
        CHECK(e.code() == errc::schema);
    }
}

TEST_CASE("dead reckoning desk trace: keep only what strays past epsilon") {
    std::vector<Point> stream{pt(1, 0, 0, 0), pt(1, 10, 0, 1), pt(1, 20, 0, 2), pt(1, 20, 10, 3)};
    auto out = dead_reckoning(stream, DRConfig{10.0, Predictor::two_point});
    // p1 deviates exactly 10 from the standstill estimate: not > epsilon, dropped;
    // p2 deviates 20, kept; p3 deviates sqrt(200) ~ 14.14 from (30,0), kept
    CHECK(kept_ts(out[1]) == std::vector<double>{0, 2, 3});
    double dev = dist(dr_estimate(std::vector<Point>{pt(1, 0, 0, 0), pt(1, 20, 0, 2)},
                                  Predictor::two_point, 3.0),
                      Vec2{20, 10});
    CHECK(dev == doctest::Approx(std::sqrt(200.0)).epsilon(1e-15));
}

TEST_CASE("dead reckoning on exact constant velocity keeps two points") {
    std::vector<Point> stream;
    for (int i = 0; i < 50; ++i) stream.push_back(pt(3, i * 12.0, i * -5.0, i * 2.0));
    auto out = dead_reckoning(stream, DRConfig{1.0, Predictor::two_point});
    // first point always; second strays 13 m from standstill; after that the
    // two-point predictor is exact and nothing else clears the threshold
    CHECK(kept_ts(out[3]) == std::vector<double>{0, 2});
}

TEST_CASE("sog-cog predictor on faithful fields keeps only the first point") {
    std::vector<Point> stream;
    double speed = 13.0;
    double heading = 0.7;
    for (int i = 0; i < 40; ++i) {
        Point p = pt(5, std::cos(heading) * speed * i, std::sin(heading) * speed * i,
                     static_cast<double>(i));
        p.sog = speed;
        p.cog = heading;
        stream.push_back(p);
    }
    auto out = dead_reckoning(stream, DRConfig{0.5, Predictor::sog_cog});
    CHECK(kept_ts(out[5]) == std::vector<double>{0});
}

TEST_CASE("dead reckoning separates trajectories in one stream") {
    std::vector<Point> stream;
    for (int i = 0; i < 10; ++i) {
        stream.push_back(pt(1, i * 100.0, (i % 2) * 100.0, i));  // zigzag: everything kept
        stream.push_back(pt(2, 0.0, 0.0, i));                    // parked: first only
    }
    std::stable_sort(stream.begin(), stream.end(),
                     [](const Point& a, const Point& b) { return a.ts < b.ts; });
    auto out = dead_reckoning(stream, DRConfig{5.0, Predictor::two_point});
    CHECK(out[1].size() == 10);
    CHECK(out[2].size() == 1);
}

TEST_CASE("dead reckoning validates epsilon") {
    CHECK_THROWS_AS(DeadReckoningRun(DRConfig{0.0, Predictor::two_point}), error);
    CHECK_THROWS_AS(DeadReckoningRun(DRConfig{-2.0, Predictor::two_point}), error);
}

// ------------------------------------------------------------------- tdtr

namespace {

// plain textbook recursion, no shared helpers: keeps the library honest
void oracle_split(const std::vector<Point>& pts, std::size_t lo, std::size_t hi, double tol,
                  std::vector<std::size_t>& keep) {
    if (hi - lo < 2) return;
    double worst = -1.0;
    std::size_t at = lo;
    for (std::size_t k = lo + 1; k < hi; ++k) {
        Vec2 ref = pos(pts[lo], pts[hi], pts[k].ts);
        double d = std::hypot(pts[k].x - ref.x, pts[k].y - ref.y);
        if (d > worst) {
            worst = d;
            at = k;
        }
    }
    if (worst > tol) {
        keep.push_back(at);
        oracle_split(pts, lo, at, tol, keep);
        oracle_split(pts, at, hi, tol, keep);
    }
}

std::vector<double> oracle_tdtr(const Trajectory& t, double tol) {
    std::vector<std::size_t> keep{0, t.points.size() - 1};
    oracle_split(t.points, 0, t.points.size() - 1, tol, keep);
    std::sort(keep.begin(), keep.end());
    std::vector<double> ts;
    for (std::size_t i : keep) ts.push_back(t.points[i].ts);
    return ts;
}

}  // namespace

TEST_CASE("tdtr matches an independent recursion on random walks") {
    std::mt19937_64 gen(13);
    auto u = [&] { return std::ldexp(static_cast<double>(gen() >> 11), -53); };
    for (int rep = 0; rep < 50; ++rep) {
        Trajectory t;
        t.id = rep;
        double x = 0.0;
        double y = 0.0;
        for (int i = 0; i < 20; ++i) {
            x += u() * 30 - 15;
            y += u() * 30 - 15;
            t.points.push_back(pt(rep, x, y, i + u() * 0.5));
        }
        Sample s = tdtr(t, TdtrConfig{5.0});
        CHECK(kept_ts(s) == oracle_tdtr(t, 5.0));
        CHECK(is_subsequence(s, t));
    }
}

TEST_CASE("tdtr keeps only endpoints on a collinear constant-speed track") {
    Trajectory t;
    t.id = 1;
    for (int i = 0; i <= 10; ++i) t.points.push_back(pt(1, i * 3.0, i * 4.0, i));
    Sample s = tdtr(t, TdtrConfig{0.0});
    CHECK(kept_ts(s) == std::vector<double>{0, 10});
}

TEST_CASE("tdtr honors its tolerance everywhere") {
    std::mt19937_64 gen(29);
    auto u = [&] { return std::ldexp(static_cast<double>(gen() >> 11), -53); };
    Trajectory t;
    t.id = 2;
    for (int i = 0; i < 60; ++i) t.points.push_back(pt(2, u() * 500, u() * 500, i));
    double tol = 25.0;
    Sample s = tdtr(t, TdtrConfig{tol});
    for (const Point& p : t.points) {
        Vec2 rec = interpolate_at(s.points, p.ts);
        CHECK(dist(rec, p.pos()) <= tol + 1e-9);
    }
}

TEST_CASE("tdtr small inputs and validation") {
    Trajectory t = traj(1, {pt(1, 0, 0, 0), pt(1, 9, 9, 1)});
    CHECK(tdtr(t, TdtrConfig{0.0}).size() == 2);
    t = traj(1, {pt(1, 4, 4, 4)});
    CHECK(tdtr(t, TdtrConfig{0.0}).size() == 1);
    CHECK_THROWS_AS(tdtr(traj(1, {}), TdtrConfig{0.0}), error);
    CHECK_THROWS_AS(tdtr(t, TdtrConfig{-1.0}), error);
    Trajectory bad = traj(1, {pt(1, 0, 0, 5), pt(1, 1, 1, 5)});
    CHECK_THROWS_AS(tdtr(bad, TdtrConfig{1.0}), error);
}
