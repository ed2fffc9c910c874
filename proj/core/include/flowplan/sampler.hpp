#pragma once

#include <cstdint>
#include <vector>

#include "flowplan/constrain.hpp"
#include "flowplan/geom.hpp"
#include "flowplan/net.hpp"
#include "flowplan/traj.hpp"

namespace flowplan::sampler {

struct SamplerConfig {
    int steps = 100;
    double guidance_scale = 2.0;
    constrain::ConstraintConfig constraint;
    std::uint64_t seed = 0;
};

struct Diagnostics {
    std::vector<double> energy;  // one entry per integration step
    bool civ_fallback = false;
    bool cvf_degenerate = false;
    bool esdf_clamped = false;
    int anchor_index = -1;  // CIV/CVF anchor, or the conditioning anchor id
};

struct SceneFields {
    const geom::SignedDistanceField* field = nullptr;
    const traj::TrajectoryVocabulary* vocab = nullptr;
    traj::Box bounds;
};

std::vector<double> euler_step(const std::vector<double>& x, const std::vector<double>& v,
                               double dt);

std::vector<double> cfg_combine(const std::vector<double>& v_cond,
                                const std::vector<double>& v_uncond, double s);

struct SampleResult {
    traj::Trajectory trajectory;
    Diagnostics diagnostics;
};

SampleResult sample_trajectory(const net::VectorFieldParams& params, const net::ConditionSet& cond,
                               const SceneFields& scene, const SamplerConfig& cfg,
                               std::mt19937_64& rng);

// One candidate per anchor; the anchor and its endpoint are installed as
// conditions. Per-candidate noise streams derive from the master seed by
// anchor position so subsets reproduce.
std::vector<SampleResult> sample_candidates(const net::VectorFieldParams& params,
                                            const std::vector<size_t>& anchor_set,
                                            const net::ConditionSet& shared_cond,
                                            const SceneFields& scene, const SamplerConfig& cfg);

}  // namespace flowplan::sampler
