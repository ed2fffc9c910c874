#pragma once

#include <string>
#include <vector>

#include "flowplan/geom.hpp"
#include "flowplan/traj.hpp"

namespace flowplan::score {

struct ScoreWeights {
    double progress = 1.0;
    double clearance = 0.3;
    double smoothness = 0.2;
    double max_progress_cap = 60.0;
};

struct ScoreBreakdown {
    int dac = 0;              // 1 when every waypoint is on the road
    int collision_free = 1;   // 0 when a waypoint touches an obstacle disc
    double progress = 0.0;    // [0,1]
    double clearance = 0.0;   // meters, min ESDF along the trajectory
    double smoothness = 0.0;  // mean squared second difference
    double total = 0.0;
};

// Items that pass the hard gates (DAC and collision) always outrank items
// that fail one; the dominance offset keeps the soft components from ever
// bridging that gap.
constexpr double kHardGateBonus = 1000.0;

ScoreBreakdown score_candidate(const traj::Trajectory& t, const geom::Scenario& scenario,
                               const geom::SignedDistanceField& field,
                               const ScoreWeights& weights = {});

std::vector<size_t> top_k_anchors(const traj::TrajectoryVocabulary& vocab,
                                  const geom::Scenario& scenario,
                                  const geom::SignedDistanceField& field, size_t k,
                                  const ScoreWeights& weights = {});

struct RankedItem {
    std::string source;  // "generated" or "vocab"
    size_t id = 0;       // candidate or anchor index
    ScoreBreakdown score;
};

struct RankResult {
    traj::Trajectory best;
    std::vector<RankedItem> table;  // descending total, ties by source/id
};

// Scores the union of generated candidates and vocabulary anchors.
RankResult rank_and_select(const std::vector<traj::Trajectory>& candidates,
                           const traj::TrajectoryVocabulary& vocab,
                           const geom::Scenario& scenario,
                           const geom::SignedDistanceField& field,
                           const ScoreWeights& weights = {});

}  // namespace flowplan::score
