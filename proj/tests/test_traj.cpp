#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "flowplan/traj.hpp"

using namespace flowplan;
using geom::Vec2;

namespace {

traj::Trajectory random_traj(int n, std::mt19937_64& rng, double span = 10.0) {
    std::uniform_real_distribution<double> u(-span, span);
    traj::Trajectory t;
    for (int i = 0; i < n; ++i) t.push_back({u(rng), u(rng)});
    return t;
}

// Exhaustive DTW over all monotone alignments, exponential in length.
double dtw_brute(const traj::Trajectory& a, const traj::Trajectory& b, size_t i, size_t j) {
    double cost = (a[i] - b[j]).norm();
    if (i == 0 && j == 0) return cost;
    double best = std::numeric_limits<double>::infinity();
    if (i > 0) best = std::min(best, dtw_brute(a, b, i - 1, j));
    if (j > 0) best = std::min(best, dtw_brute(a, b, i, j - 1));
    if (i > 0 && j > 0) best = std::min(best, dtw_brute(a, b, i - 1, j - 1));
    return cost + best;
}

}  // namespace

TEST_CASE("normalize maps the box onto [-1,1] and round-trips") {
    traj::Box box{{0.0, -32.0}, {64.0, 32.0}};
    traj::Trajectory t = {{32.0, 0.0}, {0.0, -32.0}, {64.0, 32.0}};
    auto n = traj::normalize(t, box);
    CHECK(n.values[0] == doctest::Approx(0.0));
    CHECK(n.values[1] == doctest::Approx(0.0));
    CHECK(n.values[2] == doctest::Approx(-1.0));
    CHECK(n.values[3] == doctest::Approx(-1.0));
    CHECK(n.values[4] == doctest::Approx(1.0));
    CHECK(n.values[5] == doctest::Approx(1.0));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 64.0), uy(-32.0, 32.0);
    for (int trial = 0; trial < 50; ++trial) {
        traj::Trajectory r;
        for (int i = 0; i < 8; ++i) r.push_back({ux(rng), uy(rng)});
        auto back = traj::denormalize(traj::normalize(r, box));
        for (size_t i = 0; i < r.size(); ++i) {
            CHECK(back[i].x == doctest::Approx(r[i].x).epsilon(1e-9));
            CHECK(back[i].y == doctest::Approx(r[i].y).epsilon(1e-9));
        }
        for (double v : traj::normalize(r, box).values) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("out-of-box waypoints are reported by index") {
    traj::Box box{{0.0, 0.0}, {1.0, 1.0}};
    traj::Trajectory t = {{0.5, 0.5}, {2.0, 0.5}};
    try {
        traj::normalize(t, box);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
    CHECK_THROWS_AS(traj::normalize(t, traj::Box{{1.0, 0.0}, {0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("dtw identities and hand-checked value") {
    std::mt19937_64 rng(5);
    auto a = random_traj(6, rng);
    CHECK(traj::dtw_distance(a, a) == doctest::Approx(0.0));

    traj::Trajectory p = {{0, 0}, {1, 0}};
    traj::Trajectory q = {{0, 0}, {1, 0}, {2, 0}};
    CHECK(traj::dtw_distance(p, q) == doctest::Approx(1.0));  // 3x2 DP table by hand
    CHECK(traj::dtw_distance(q, p) == doctest::Approx(1.0));  // symmetry
}

TEST_CASE("dtw equals exhaustive alignment enumeration for short sequences") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> len(1, 6);
    for (int trial = 0; trial < 40; ++trial) {
        auto a = random_traj(len(rng), rng);
        auto b = random_traj(len(rng), rng);
        double fast = traj::dtw_distance(a, b);
        double slow = dtw_brute(a, b, a.size() - 1, b.size() - 1);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
        CHECK(fast >= 0.0);
        CHECK(traj::dtw_distance(b, a) == doctest::Approx(fast).epsilon(1e-12));
    }
}

TEST_CASE("fps selects the whole dataset at K = n") {
    std::mt19937_64 rng(23);
    std::vector<traj::Trajectory> data;
    for (int i = 0; i < 6; ++i) data.push_back(random_traj(4, rng));
    auto vocab = traj::fps_vocabulary(data, data.size(), 77);
    REQUIRE(vocab.anchors.size() == data.size());
    // every dataset element appears exactly once
    for (const auto& d : data) {
        int hits = 0;
        for (const auto& a : vocab.anchors)
            if (traj::dtw_distance(d, a) < 1e-12) ++hits;
        CHECK(hits == 1);
    }
}

TEST_CASE("fps greedy picks maximize the min-distance, verified exhaustively") {
    std::mt19937_64 rng(29);
    std::vector<traj::Trajectory> data;
    for (int i = 0; i < 10; ++i) data.push_back(random_traj(5, rng));
    auto vocab = traj::fps_vocabulary(data, 3, 1234);
    REQUIRE(vocab.anchors.size() == 3);

    // recover picked dataset indices
    std::vector<size_t> picks;
    for (const auto& a : vocab.anchors)
        for (size_t i = 0; i < data.size(); ++i)
            if (traj::dtw_distance(a, data[i]) < 1e-12) picks.push_back(i);
    REQUIRE(picks.size() == 3);

    // each pick after the first is the argmax of min-DTW to the chosen set
    for (size_t step = 1; step < picks.size(); ++step) {
        double best = -1.0;
        size_t best_idx = data.size();
        for (size_t i = 0; i < data.size(); ++i) {
            if (std::find(picks.begin(), picks.begin() + step, i) != picks.begin() + step)
                continue;
            double mind = std::numeric_limits<double>::infinity();
            for (size_t s = 0; s < step; ++s)
                mind = std::min(mind, traj::dtw_distance(data[i], data[picks[s]]));
            if (mind > best) {
                best = mind;
                best_idx = i;
            }
        }
        CHECK(picks[step] == best_idx);
    }
}

TEST_CASE("fps min-distance sequence is non-increasing") {
    std::mt19937_64 rng(31);
    std::vector<traj::Trajectory> data;
    for (int i = 0; i < 12; ++i) data.push_back(random_traj(5, rng));
    auto vocab = traj::fps_vocabulary(data, 8, 5);
    std::vector<double> gaps;
    for (size_t k = 1; k < vocab.anchors.size(); ++k) {
        double mind = std::numeric_limits<double>::infinity();
        for (size_t s = 0; s < k; ++s)
            mind = std::min(mind, traj::dtw_distance(vocab.anchors[k], vocab.anchors[s]));
        gaps.push_back(mind);
    }
    for (size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i] <= gaps[i - 1] + 1e-12);
}

TEST_CASE("fps edge cases") {
    std::mt19937_64 rng(37);
    std::vector<traj::Trajectory> data;
    for (int i = 0; i < 4; ++i) data.push_back(random_traj(4, rng));
    auto one = traj::fps_vocabulary(data, 1, 9);
    CHECK(one.anchors.size() == 1);
    auto again = traj::fps_vocabulary(data, 1, 9);
    CHECK(traj::dtw_distance(one.anchors[0], again.anchors[0]) == doctest::Approx(0.0));
    CHECK_THROWS_AS(traj::fps_vocabulary(data, 5, 9), std::invalid_argument);
    CHECK_THROWS_AS(traj::fps_vocabulary(data, 0, 9), std::invalid_argument);
}

TEST_CASE("nearest anchor retrieval") {
    std::mt19937_64 rng(41);
    traj::TrajectoryVocabulary vocab;
    for (int i = 0; i < 16; ++i) vocab.anchors.push_back(random_traj(6, rng));

    // self-retrieval
    for (size_t i = 0; i < vocab.anchors.size(); ++i)
        CHECK(traj::nearest_anchor(vocab.anchors[i], vocab) == i);

    // linear-scan oracle on random queries
    for (int trial = 0; trial < 25; ++trial) {
        auto q = random_traj(6, rng);
        size_t got = traj::nearest_anchor(q, vocab);
        size_t expect = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < vocab.anchors.size(); ++i) {
            double d = traj::dtw_distance(q, vocab.anchors[i]);
            if (d < best) {
                best = d;
                expect = i;
            }
        }
        CHECK(got == expect);
    }

    traj::TrajectoryVocabulary single;
    single.anchors.push_back(random_traj(6, rng));
    CHECK(traj::nearest_anchor(random_traj(6, rng), single) == 0);
}

TEST_CASE("compliant anchor selection ranks by clearance") {
    auto s = geom::build_scenario({geom::RoadKind::Straight, 6.0, 60.0});
    auto field = geom::compute_esdf(geom::rasterize_road(s, 0.5));

    traj::TrajectoryVocabulary vocab;
    traj::Trajectory center, offset, off_road;
    for (int i = 0; i < 8; ++i) {
        double x = 2.0 + 7.0 * i;
        center.push_back({x, 0.0});
        offset.push_back({x, 2.0});
        off_road.push_back({x, 10.0});
    }
    vocab.anchors = {off_road, offset, center};

    auto sel = traj::select_compliant_anchors(vocab, field, 10);
    REQUIRE(sel.size() == 2);
    CHECK(sel[0] == 2);  // centerline has the best clearance
    CHECK(sel[1] == 1);

    // clearance ordering verified against esdf_at scans
    CHECK(traj::min_clearance(center, field) > traj::min_clearance(offset, field));

    auto top1 = traj::select_compliant_anchors(vocab, field, 1);
    REQUIRE(top1.size() == 1);
    CHECK(top1[0] == 2);

    traj::TrajectoryVocabulary bad;
    bad.anchors = {off_road};
    CHECK(traj::select_compliant_anchors(bad, field, 5).empty());
}
