#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flowplan::net {

struct Tensor {
    int rows = 0;
    int cols = 1;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return v.size(); }
};

struct ArchConfig {
    int t_points = 8;    // waypoints per trajectory
    int time_dim = 32;   // sinusoidal time feature width, even
    int hidden = 256;    // units per hidden layer
    int depth = 3;       // tanh layers

    int in_dim() const { return 2 * t_points; }
    int cond_dim() const { return 2 * t_points + 2 + 4 + 1; }
    int out_dim() const { return 2 * t_points; }
};

// Conditioning signals; absent fields fall back to learned null embeddings.
struct ConditionSet {
    std::optional<std::vector<double>> anchor;  // normalized, 2T
    std::optional<std::array<double, 2>> goal;  // normalized endpoint
    std::optional<std::array<double, 4>> command;  // one-hot left/straight/right/unknown
    std::optional<double> reward;               // EP score in [0,1]
};

inline ConditionSet all_absent() { return {}; }

struct VectorFieldParams {
    ArchConfig arch;
    std::vector<Tensor> tensors;

    // Tensor order: w_in, w_time, w_cond, b0, then (w_i, b_i) per extra
    // hidden layer, then w_out, b_out, then the four null embeddings.
    Tensor& w_in() { return tensors[0]; }
    Tensor& w_time() { return tensors[1]; }
    Tensor& w_cond() { return tensors[2]; }
    Tensor& b0() { return tensors[3]; }
    Tensor& w_hidden(int i) { return tensors[4 + 2 * i]; }       // i in [0, depth-2)
    Tensor& b_hidden(int i) { return tensors[5 + 2 * i]; }
    Tensor& w_out() { return tensors[4 + 2 * (arch.depth - 1)]; }
    Tensor& b_out() { return tensors[5 + 2 * (arch.depth - 1)]; }
    Tensor& null_anchor() { return tensors[6 + 2 * (arch.depth - 1)]; }
    Tensor& null_goal() { return tensors[7 + 2 * (arch.depth - 1)]; }
    Tensor& null_command() { return tensors[8 + 2 * (arch.depth - 1)]; }
    Tensor& null_reward() { return tensors[9 + 2 * (arch.depth - 1)]; }

    const Tensor& w_in() const { return tensors[0]; }
    const Tensor& w_time() const { return tensors[1]; }
    const Tensor& w_cond() const { return tensors[2]; }
    const Tensor& b0() const { return tensors[3]; }
    const Tensor& w_hidden(int i) const { return tensors[4 + 2 * i]; }
    const Tensor& b_hidden(int i) const { return tensors[5 + 2 * i]; }
    const Tensor& w_out() const { return tensors[4 + 2 * (arch.depth - 1)]; }
    const Tensor& b_out() const { return tensors[5 + 2 * (arch.depth - 1)]; }
    const Tensor& null_anchor() const { return tensors[6 + 2 * (arch.depth - 1)]; }
    const Tensor& null_goal() const { return tensors[7 + 2 * (arch.depth - 1)]; }
    const Tensor& null_command() const { return tensors[8 + 2 * (arch.depth - 1)]; }
    const Tensor& null_reward() const { return tensors[9 + 2 * (arch.depth - 1)]; }

    size_t parameter_count() const;
};

struct OptimizerState {
    std::vector<Tensor> m;  // first moments, shapes match params
    std::vector<Tensor> v;  // second moments
    std::int64_t step = 0;
    double learning_rate = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

using Gradients = std::vector<Tensor>;

struct Sample {
    std::vector<double> x;  // 2T interpolant values
    double t = 0.0;
    ConditionSet cond;
    std::vector<double> target;  // 2T regression target
};

std::vector<double> embed_time(double t, int dim);

VectorFieldParams init_params(const ArchConfig& arch, std::uint64_t seed);

std::vector<double> forward(const VectorFieldParams& params, const std::vector<double>& x,
                            double t, const ConditionSet& cond);

// Batch MSE loss plus exact analytic gradients.
std::pair<double, Gradients> backward(const VectorFieldParams& params,
                                      const std::vector<Sample>& batch);

// Accumulates gradients of dot(cotangent, forward(...)) into grads and
// returns the forward output; building block for composite losses.
std::vector<double> accumulate_vjp(const VectorFieldParams& params, const std::vector<double>& x,
                                   double t, const ConditionSet& cond,
                                   const std::vector<double>& cotangent, Gradients& grads);

Gradients zero_gradients(const VectorFieldParams& params);

OptimizerState init_optimizer(const VectorFieldParams& params, double learning_rate);

void adam_step(VectorFieldParams& params, const Gradients& grads, OptimizerState& state);

}  // namespace flowplan::net
