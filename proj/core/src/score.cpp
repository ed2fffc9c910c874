#include "flowplan/score.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowplan::score {

ScoreBreakdown score_candidate(const traj::Trajectory& t, const geom::Scenario& scenario,
                               const geom::SignedDistanceField& field,
                               const ScoreWeights& weights) {
    if (t.size() < 2) throw std::invalid_argument("trajectory needs at least two waypoints");
    ScoreBreakdown s;
    s.dac = geom::dac_compliant(t, field) ? 1 : 0;
    s.clearance = traj::min_clearance(t, field);
    s.progress = geom::ep_score(t, scenario, weights.max_progress_cap);

    for (const auto& obs : scenario.obstacles) {
        for (const auto& w : t) {
            if ((w - obs.center).norm() < obs.radius) {
                s.collision_free = 0;
                break;
            }
        }
        if (!s.collision_free) break;
    }

    double acc = 0.0;
    for (size_t i = 2; i < t.size(); ++i) {
        geom::Vec2 dd = t[i] - t[i - 1] * 2.0 + t[i - 2];
        acc += dd.dot(dd);
    }
    s.smoothness = t.size() > 2 ? acc / double(t.size() - 2) : 0.0;

    s.total = weights.progress * s.progress +
              weights.clearance * std::min(s.clearance / 2.0, 1.0) -
              weights.smoothness * s.smoothness;
    if (s.dac && s.collision_free) s.total += kHardGateBonus;
    return s;
}

namespace {

std::vector<size_t> sort_by_score(std::vector<std::pair<double, size_t>>& scored) {
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<size_t> out;
    out.reserve(scored.size());
    for (const auto& [total, idx] : scored) out.push_back(idx);
    return out;
}

}  // namespace

std::vector<size_t> top_k_anchors(const traj::TrajectoryVocabulary& vocab,
                                  const geom::Scenario& scenario,
                                  const geom::SignedDistanceField& field, size_t k,
                                  const ScoreWeights& weights) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    std::vector<std::pair<double, size_t>> scored;
    for (size_t i = 0; i < vocab.anchors.size(); ++i)
        scored.push_back({score_candidate(vocab.anchors[i], scenario, field, weights).total, i});
    auto order = sort_by_score(scored);
    if (order.size() > k) order.resize(k);
    return order;
}

RankResult rank_and_select(const std::vector<traj::Trajectory>& candidates,
                           const traj::TrajectoryVocabulary& vocab,
                           const geom::Scenario& scenario,
                           const geom::SignedDistanceField& field,
                           const ScoreWeights& weights) {
    if (candidates.empty()) throw std::invalid_argument("candidate pool must be non-empty");
    RankResult result;
    for (size_t i = 0; i < candidates.size(); ++i)
        result.table.push_back({"generated", i, score_candidate(candidates[i], scenario, field, weights)});
    for (size_t i = 0; i < vocab.anchors.size(); ++i)
        result.table.push_back({"vocab", i, score_candidate(vocab.anchors[i], scenario, field, weights)});

    std::stable_sort(result.table.begin(), result.table.end(),
                     [](const RankedItem& a, const RankedItem& b) {
                         return a.score.total > b.score.total;
                     });
    const RankedItem& best = result.table.front();
    result.best = best.source == "generated" ? candidates[best.id] : vocab.anchors[best.id];
    return result;
}

}  // namespace flowplan::score
