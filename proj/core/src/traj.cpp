#include "flowplan/traj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace flowplan::traj {

NormalizedTrajectory normalize(const Trajectory& traj, const Box& bounds) {
    if (bounds.max.x <= bounds.min.x || bounds.max.y <= bounds.min.y)
        throw std::invalid_argument("normalization box must have positive extent");
    NormalizedTrajectory out;
    out.bounds = bounds;
    out.values.reserve(traj.size() * 2);
    for (size_t i = 0; i < traj.size(); ++i) {
        const Vec2& w = traj[i];
        if (w.x < bounds.min.x || w.x > bounds.max.x || w.y < bounds.min.y || w.y > bounds.max.y)
            throw std::invalid_argument("waypoint " + std::to_string(i) +
                                        " lies outside the normalization box");
        out.values.push_back(2.0 * (w.x - bounds.min.x) / (bounds.max.x - bounds.min.x) - 1.0);
        out.values.push_back(2.0 * (w.y - bounds.min.y) / (bounds.max.y - bounds.min.y) - 1.0);
    }
    return out;
}

Trajectory denormalize(const std::vector<double>& values, const Box& bounds) {
    Trajectory out;
    out.reserve(values.size() / 2);
    for (size_t i = 0; i + 1 < values.size(); i += 2) {
        double x = bounds.min.x + (values[i] + 1.0) / 2.0 * (bounds.max.x - bounds.min.x);
        double y = bounds.min.y + (values[i + 1] + 1.0) / 2.0 * (bounds.max.y - bounds.min.y);
        out.push_back({x, y});
    }
    return out;
}

Trajectory denormalize(const NormalizedTrajectory& norm) {
    return denormalize(norm.values, norm.bounds);
}

double dtw_distance(const Trajectory& a, const Trajectory& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("DTW inputs must be non-empty");
    const size_t n = a.size(), m = b.size();
    const double INF = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, INF), cur(m + 1, INF);
    prev[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = INF;
        for (size_t j = 1; j <= m; ++j) {
            double cost = (a[i - 1] - b[j - 1]).norm();
            cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

TrajectoryVocabulary fps_vocabulary(const std::vector<Trajectory>& dataset, size_t k,
                                    std::uint64_t seed) {
    if (k < 1 || k > dataset.size())
        throw std::invalid_argument("vocabulary size must satisfy 1 <= K <= dataset size");

    TrajectoryVocabulary vocab;
    vocab.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> first_dist(0, dataset.size() - 1);
    size_t first = first_dist(rng);

    const size_t n = dataset.size();
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    std::vector<bool> taken(n, false);
    std::vector<size_t> picks;
    picks.push_back(first);
    taken[first] = true;

    while (picks.size() < k) {
        size_t last = picks.back();
        for (size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            min_dist[i] = std::min(min_dist[i], dtw_distance(dataset[i], dataset[last]));
        }
        size_t best = n;
        double best_d = -1.0;
        for (size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            if (min_dist[i] > best_d) {  // ties keep the lowest index
                best_d = min_dist[i];
                best = i;
            }
        }
        picks.push_back(best);
        taken[best] = true;
    }

    for (size_t idx : picks) vocab.anchors.push_back(dataset[idx]);
    return vocab;
}

size_t nearest_anchor(const Trajectory& gt, const TrajectoryVocabulary& vocab) {
    if (vocab.anchors.empty()) throw std::invalid_argument("vocabulary is empty");
    size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vocab.anchors.size(); ++i) {
        double d = dtw_distance(gt, vocab.anchors[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

double min_clearance(const Trajectory& traj, const geom::SignedDistanceField& field) {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& w : traj) c = std::min(c, geom::esdf_at(field, w).value);
    return c;
}

std::vector<size_t> select_compliant_anchors(const TrajectoryVocabulary& vocab,
                                             const geom::SignedDistanceField& field,
                                             size_t max_n) {
    if (vocab.anchors.empty()) throw std::invalid_argument("vocabulary is empty");
    std::vector<std::pair<double, size_t>> ranked;
    for (size_t i = 0; i < vocab.anchors.size(); ++i) {
        if (geom::dac_compliant(vocab.anchors[i], field))
            ranked.push_back({min_clearance(vocab.anchors[i], field), i});
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<size_t> out;
    for (size_t i = 0; i < ranked.size() && i < max_n; ++i) out.push_back(ranked[i].second);
    return out;
}

}  // namespace flowplan::traj
