#include "flowplan/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flowplan::flow {

std::vector<double> interpolate(const std::vector<double>& x0, const std::vector<double>& x1,
                                double t) {
    if (x0.size() != x1.size()) throw std::invalid_argument("interpolation shape mismatch");
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("t must lie in [0,1]");
    std::vector<double> out(x0.size());
    for (size_t i = 0; i < x0.size(); ++i) out[i] = t * x1[i] + (1.0 - t) * x0[i];
    return out;
}

FlowSample make_flow_sample(const std::vector<double>& x1, std::mt19937_64& rng) {
    FlowSample s;
    s.x1 = x1;
    std::normal_distribution<double> gauss(0.0, 1.0);
    s.x0.resize(x1.size());
    for (double& v : s.x0) v = gauss(rng);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    s.t = uni(rng);
    s.x_t = interpolate(s.x0, s.x1, s.t);
    s.target.resize(x1.size());
    for (size_t i = 0; i < x1.size(); ++i) s.target[i] = s.x1[i] - s.x0[i];
    return s;
}

net::ConditionSet cfg_dropout(const net::ConditionSet& cond, double p, std::mt19937_64& rng) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout probability must be in [0,1)");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    net::ConditionSet out = cond;
    // One draw per slot regardless of presence keeps the stream stable.
    if (uni(rng) < p) out.anchor.reset();
    if (uni(rng) < p) out.goal.reset();
    if (uni(rng) < p) out.command.reset();
    if (uni(rng) < p) out.reward.reset();
    return out;
}

double fm_training_step(net::VectorFieldParams& params, net::OptimizerState& opt,
                        const std::vector<TrainItem>& batch, const TrainConfig& cfg,
                        std::mt19937_64& rng) {
    if (batch.empty()) throw std::invalid_argument("training batch must be non-empty");
    std::vector<net::Sample> samples;
    samples.reserve(batch.size());
    for (const auto& item : batch) {
        FlowSample fs = make_flow_sample(item.x1, rng);
        net::Sample s;
        s.x = std::move(fs.x_t);
        s.t = fs.t;
        s.cond = cfg_dropout(item.cond, cfg.cond_dropout, rng);
        s.target = std::move(fs.target);
        samples.push_back(std::move(s));
    }
    auto [loss, grads] = net::backward(params, samples);
    net::adam_step(params, grads, opt);
    return loss;
}

std::vector<EpochStats> train_epochs(net::VectorFieldParams& params, net::OptimizerState& opt,
                                     const std::vector<TrainItem>& dataset,
                                     const TrainConfig& cfg, std::mt19937_64& rng) {
    if (dataset.empty()) throw std::invalid_argument("training dataset is empty");
    std::vector<EpochStats> log;
    std::vector<size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto start = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        int steps = 0;
        for (size_t off = 0; off < order.size(); off += cfg.batch_size) {
            size_t end = std::min(order.size(), off + cfg.batch_size);
            std::vector<TrainItem> batch;
            batch.reserve(end - off);
            for (size_t i = off; i < end; ++i) batch.push_back(dataset[order[i]]);
            loss_sum += fm_training_step(params, opt, batch, cfg, rng);
            ++steps;
        }
        auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        log.push_back({epoch, steps > 0 ? loss_sum / steps : 0.0, wall});
    }
    return log;
}

TrainResult train_stage1(const std::vector<TrainItem>& dataset, const TrainConfig& cfg,
                         const net::ArchConfig& arch) {
    TrainResult result;
    result.params = net::init_params(arch, cfg.seed);
    result.opt_state = net::init_optimizer(result.params, cfg.learning_rate);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    result.log = train_epochs(result.params, result.opt_state, dataset, cfg, rng);
    return result;
}

}  // namespace flowplan::flow
