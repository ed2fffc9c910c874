#pragma once

#include <memory>
#include <random>
#include <vector>

#include "flowplan/constrain.hpp"
#include "flowplan/flow.hpp"
#include "flowplan/geom.hpp"
#include "flowplan/io.hpp"
#include "flowplan/net.hpp"
#include "flowplan/sampler.hpp"
#include "flowplan/score.hpp"
#include "flowplan/traj.hpp"

namespace flowplan::pipeline {

struct DataSample {
    geom::Scenario scenario;
    std::shared_ptr<const geom::SignedDistanceField> field;
    traj::Trajectory gt;
    std::array<double, 2> goal{};  // metric GT endpoint
    int command = 1;               // 0 left, 1 straight, 2 right, 3 unknown
    double ep = 0.0;
};

// Which scenario families the generator cycles through.
struct DatasetOptions {
    bool straights = true;
    bool curves = true;
    bool intersections = true;
    bool fork_only = false;  // intersection left/right only, for mode studies
};

geom::ScenarioRecipe recipe_for_index(size_t index, const io::RunConfig& cfg,
                                      const DatasetOptions& opts, std::mt19937_64& rng);

// Centerline-following GT with seeded speed and lateral perturbation;
// shrinks the perturbation until the result is DAC-compliant.
traj::Trajectory generate_gt(const geom::Scenario& scenario,
                             const geom::SignedDistanceField& field, int t_points,
                             double max_arc, std::mt19937_64& rng);

std::vector<DataSample> build_dataset(const io::RunConfig& cfg, size_t count,
                                      std::uint64_t seed, const DatasetOptions& opts = {});

std::array<double, 4> command_one_hot(int command);
int command_from_gt(const traj::Trajectory& gt);

net::ConditionSet make_condition(const DataSample& sample, const traj::TrajectoryVocabulary& vocab,
                                 const traj::Box& bounds);

std::vector<flow::TrainItem> to_train_items(const std::vector<DataSample>& samples,
                                            const traj::TrajectoryVocabulary& vocab,
                                            const traj::Box& bounds);

std::vector<constrain::Stage2Item> to_stage2_items(const std::vector<DataSample>& samples,
                                                   const traj::TrajectoryVocabulary& vocab,
                                                   const traj::Box& bounds);

struct EvalReport {
    double candidate_dac_rate = 0.0;
    double selected_dac_rate = 0.0;
    double mean_ep = 0.0;
    double mean_endpoint_error = 0.0;  // meters to the GT endpoint
    size_t scenarios = 0;
    size_t candidates_per_scenario = 0;
};

// Samples candidates per scenario under the given sampler config, ranks
// them with the rule-based scorer, and aggregates DAC/EP statistics.
EvalReport evaluate(const net::VectorFieldParams& params, const std::vector<DataSample>& samples,
                    const traj::TrajectoryVocabulary& vocab, const io::RunConfig& cfg,
                    const sampler::SamplerConfig& sampler_cfg, size_t candidates_per_scenario);

}  // namespace flowplan::pipeline
