#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "flowplan/net.hpp"
#include "flowplan/traj.hpp"

namespace flowplan::flow {

// One rectified-flow training sample: x_t = t*x1 + (1-t)*x0, regression
// target x1 - x0 independent of t.
struct FlowSample {
    std::vector<double> x0;
    std::vector<double> x1;
    double t = 0.0;
    std::vector<double> x_t;
    std::vector<double> target;
};

struct TrainConfig {
    int batch_size = 64;
    double learning_rate = 2e-4;
    int epochs = 30;
    double cond_dropout = 0.1;  // per-signal drop probability
    std::uint64_t seed = 0;
};

struct TrainItem {
    std::vector<double> x1;  // normalized GT trajectory values
    net::ConditionSet cond;
};

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;
    std::int64_t wall_ms = 0;
};

struct TrainResult {
    net::VectorFieldParams params;
    net::OptimizerState opt_state;
    std::vector<EpochStats> log;
};

std::vector<double> interpolate(const std::vector<double>& x0, const std::vector<double>& x1,
                                double t);

FlowSample make_flow_sample(const std::vector<double>& x1, std::mt19937_64& rng);

net::ConditionSet cfg_dropout(const net::ConditionSet& cond, double p, std::mt19937_64& rng);

double fm_training_step(net::VectorFieldParams& params, net::OptimizerState& opt,
                        const std::vector<TrainItem>& batch, const TrainConfig& cfg,
                        std::mt19937_64& rng);

TrainResult train_stage1(const std::vector<TrainItem>& dataset, const TrainConfig& cfg,
                         const net::ArchConfig& arch);

// Continues training from existing parameters; shared by the second stage.
std::vector<EpochStats> train_epochs(net::VectorFieldParams& params, net::OptimizerState& opt,
                                     const std::vector<TrainItem>& dataset,
                                     const TrainConfig& cfg, std::mt19937_64& rng);

}  // namespace flowplan::flow
