#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowplan/geom.hpp"

namespace flowplan::traj {

using geom::Vec2;

// Fixed-length planar waypoint sequence in the ego frame (meters).
using Trajectory = std::vector<Vec2>;

struct Box {
    Vec2 min;
    Vec2 max;
};

// Waypoints mapped affinely into [-1, +1] per axis; keeps the box so the
// mapping is invertible.
struct NormalizedTrajectory {
    std::vector<double> values;  // 2T, interleaved x0,y0,x1,y1,...
    Box bounds;
};

struct TrajectoryVocabulary {
    std::vector<Trajectory> anchors;
    std::uint64_t seed = 0;
    std::string provenance;
};

NormalizedTrajectory normalize(const Trajectory& traj, const Box& bounds);
Trajectory denormalize(const NormalizedTrajectory& norm);
Trajectory denormalize(const std::vector<double>& values, const Box& bounds);

double dtw_distance(const Trajectory& a, const Trajectory& b);

TrajectoryVocabulary fps_vocabulary(const std::vector<Trajectory>& dataset, size_t k,
                                    std::uint64_t seed);

size_t nearest_anchor(const Trajectory& gt, const TrajectoryVocabulary& vocab);

// DAC-compliant anchor indices, best clearance first, at most max_n.
std::vector<size_t> select_compliant_anchors(const TrajectoryVocabulary& vocab,
                                             const geom::SignedDistanceField& field,
                                             size_t max_n);

// Minimum interpolated field value over the waypoints.
double min_clearance(const Trajectory& traj, const geom::SignedDistanceField& field);

}  // namespace flowplan::traj
