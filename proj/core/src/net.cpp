#include "flowplan/net.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace flowplan::net {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string("non-finite ") + what);
}

// y += W * x
void matvec_acc(const Tensor& w, const std::vector<double>& x, std::vector<double>& y) {
    for (int r = 0; r < w.rows; ++r) {
        double acc = 0.0;
        const double* row = &w.v[static_cast<size_t>(r) * w.cols];
        for (int c = 0; c < w.cols; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

// y += W^T * g
void matvec_t_acc(const Tensor& w, const std::vector<double>& g, std::vector<double>& y) {
    for (int r = 0; r < w.rows; ++r) {
        const double* row = &w.v[static_cast<size_t>(r) * w.cols];
        double gr = g[r];
        for (int c = 0; c < w.cols; ++c) y[c] += row[c] * gr;
    }
}

// dW += g (outer) x
void outer_acc(Tensor& dw, const std::vector<double>& g, const std::vector<double>& x) {
    for (int r = 0; r < dw.rows; ++r) {
        double* row = &dw.v[static_cast<size_t>(r) * dw.cols];
        double gr = g[r];
        for (int c = 0; c < dw.cols; ++c) row[c] += gr * x[c];
    }
}

// Raw condition vector with learned null fallbacks; flags record presence
// so the backward pass can route gradients into the null embeddings.
struct CondVector {
    std::vector<double> values;
    bool anchor_present = false;
    bool goal_present = false;
    bool command_present = false;
    bool reward_present = false;
};

CondVector build_cond_vector(const VectorFieldParams& params, const ConditionSet& cond) {
    const VectorFieldParams& p = params;
    CondVector cv;
    cv.values.reserve(params.arch.cond_dim());
    if (cond.anchor) {
        if (static_cast<int>(cond.anchor->size()) != params.arch.in_dim())
            throw std::invalid_argument("anchor condition has wrong length");
        cv.anchor_present = true;
        cv.values.insert(cv.values.end(), cond.anchor->begin(), cond.anchor->end());
    } else {
        cv.values.insert(cv.values.end(), p.null_anchor().v.begin(), p.null_anchor().v.end());
    }
    if (cond.goal) {
        cv.goal_present = true;
        cv.values.insert(cv.values.end(), cond.goal->begin(), cond.goal->end());
    } else {
        cv.values.insert(cv.values.end(), p.null_goal().v.begin(), p.null_goal().v.end());
    }
    if (cond.command) {
        cv.command_present = true;
        cv.values.insert(cv.values.end(), cond.command->begin(), cond.command->end());
    } else {
        cv.values.insert(cv.values.end(), p.null_command().v.begin(), p.null_command().v.end());
    }
    if (cond.reward) {
        cv.reward_present = true;
        cv.values.push_back(*cond.reward);
    } else {
        cv.values.push_back(p.null_reward().v[0]);
    }
    check_finite(cv.values, "condition values");
    return cv;
}

struct ForwardCache {
    std::vector<double> x, tf, cond;
    CondVector cv;
    std::vector<std::vector<double>> h;  // depth activations
    std::vector<double> y;
};

ForwardCache run_forward(const VectorFieldParams& params, const std::vector<double>& x,
                         double t, const ConditionSet& cond) {
    const ArchConfig& a = params.arch;
    if (static_cast<int>(x.size()) != a.in_dim())
        throw std::invalid_argument("state vector has wrong length");
    check_finite(x, "state values");
    if (!std::isfinite(t) || t < 0.0 || t > 1.0)
        throw std::invalid_argument("time must lie in [0,1]");

    const VectorFieldParams& p = params;
    ForwardCache cache;
    cache.x = x;
    cache.tf = embed_time(t, a.time_dim);
    cache.cv = build_cond_vector(params, cond);
    cache.cond = cache.cv.values;

    std::vector<double> z(a.hidden, 0.0);
    for (int r = 0; r < a.hidden; ++r) z[r] = p.b0().v[r];
    matvec_acc(p.w_in(), cache.x, z);
    matvec_acc(p.w_time(), cache.tf, z);
    matvec_acc(p.w_cond(), cache.cond, z);
    for (double& u : z) u = std::tanh(u);
    cache.h.push_back(z);

    for (int i = 0; i < a.depth - 1; ++i) {
        std::vector<double> zi(a.hidden, 0.0);
        for (int r = 0; r < a.hidden; ++r) zi[r] = p.b_hidden(i).v[r];
        matvec_acc(p.w_hidden(i), cache.h.back(), zi);
        for (double& u : zi) u = std::tanh(u);
        cache.h.push_back(std::move(zi));
    }

    cache.y.assign(a.out_dim(), 0.0);
    for (int r = 0; r < a.out_dim(); ++r) cache.y[r] = p.b_out().v[r];
    matvec_acc(p.w_out(), cache.h.back(), cache.y);
    return cache;
}

void backprop(const VectorFieldParams& params, const ForwardCache& cache,
              const std::vector<double>& gy, Gradients& grads) {
    const ArchConfig& a = params.arch;
    const VectorFieldParams& p = params;
    VectorFieldParams gview;
    gview.arch = a;
    gview.tensors.swap(grads);  // borrow for named access

    outer_acc(gview.w_out(), gy, cache.h.back());
    for (int r = 0; r < a.out_dim(); ++r) gview.b_out().v[r] += gy[r];

    std::vector<double> gh(a.hidden, 0.0);
    matvec_t_acc(p.w_out(), gy, gh);

    for (int i = a.depth - 2; i >= 0; --i) {
        std::vector<double> gz(a.hidden);
        const auto& hi = cache.h[i + 1];
        for (int r = 0; r < a.hidden; ++r) gz[r] = gh[r] * (1.0 - hi[r] * hi[r]);
        outer_acc(gview.w_hidden(i), gz, cache.h[i]);
        for (int r = 0; r < a.hidden; ++r) gview.b_hidden(i).v[r] += gz[r];
        gh.assign(a.hidden, 0.0);
        matvec_t_acc(p.w_hidden(i), gz, gh);
    }

    std::vector<double> gz0(a.hidden);
    const auto& h0 = cache.h[0];
    for (int r = 0; r < a.hidden; ++r) gz0[r] = gh[r] * (1.0 - h0[r] * h0[r]);
    outer_acc(gview.w_in(), gz0, cache.x);
    outer_acc(gview.w_time(), gz0, cache.tf);
    outer_acc(gview.w_cond(), gz0, cache.cond);
    for (int r = 0; r < a.hidden; ++r) gview.b0().v[r] += gz0[r];

    std::vector<double> gc(a.cond_dim(), 0.0);
    matvec_t_acc(p.w_cond(), gz0, gc);
    size_t off = 0;
    if (!cache.cv.anchor_present)
        for (int i = 0; i < a.in_dim(); ++i) gview.null_anchor().v[i] += gc[off + i];
    off += a.in_dim();
    if (!cache.cv.goal_present)
        for (int i = 0; i < 2; ++i) gview.null_goal().v[i] += gc[off + i];
    off += 2;
    if (!cache.cv.command_present)
        for (int i = 0; i < 4; ++i) gview.null_command().v[i] += gc[off + i];
    off += 4;
    if (!cache.cv.reward_present) gview.null_reward().v[0] += gc[off];

    gview.tensors.swap(grads);
}

}  // namespace

std::vector<double> embed_time(double t, int dim) {
    if (dim <= 0 || dim % 2 != 0) throw std::invalid_argument("time embedding dim must be even");
    if (!std::isfinite(t) || t < 0.0 || t > 1.0)
        throw std::invalid_argument("time must lie in [0,1]");
    const int half = dim / 2;
    std::vector<double> out(dim);
    for (int i = 0; i < half; ++i) {
        // geometric frequency ladder from 1 to 1000
        double omega = half > 1 ? std::exp(std::log(1000.0) * i / (half - 1)) : 1.0;
        out[2 * i] = std::sin(omega * t);
        out[2 * i + 1] = std::cos(omega * t);
    }
    return out;
}

size_t VectorFieldParams::parameter_count() const {
    size_t n = 0;
    for (const auto& t : tensors) n += t.size();
    return n;
}

VectorFieldParams init_params(const ArchConfig& arch, std::uint64_t seed) {
    VectorFieldParams p;
    p.arch = arch;
    p.tensors.push_back(Tensor(arch.hidden, arch.in_dim()));
    p.tensors.push_back(Tensor(arch.hidden, arch.time_dim));
    p.tensors.push_back(Tensor(arch.hidden, arch.cond_dim()));
    p.tensors.push_back(Tensor(arch.hidden, 1));
    for (int i = 0; i < arch.depth - 1; ++i) {
        p.tensors.push_back(Tensor(arch.hidden, arch.hidden));
        p.tensors.push_back(Tensor(arch.hidden, 1));
    }
    p.tensors.push_back(Tensor(arch.out_dim(), arch.hidden));
    p.tensors.push_back(Tensor(arch.out_dim(), 1));
    p.tensors.push_back(Tensor(arch.in_dim(), 1));  // null anchor
    p.tensors.push_back(Tensor(2, 1));              // null goal
    p.tensors.push_back(Tensor(4, 1));              // null command
    p.tensors.push_back(Tensor(1, 1));              // null reward

    // biases start at zero; weights and null embeddings get seeded spreads
    std::mt19937_64 rng(seed);
    auto fill = [&rng](Tensor& t, double scale) {
        std::uniform_real_distribution<double> dist(-scale, scale);
        for (double& v : t.v) v = dist(rng);
    };
    fill(p.w_in(), 1.0 / std::sqrt(double(arch.in_dim())));
    fill(p.w_time(), 1.0 / std::sqrt(double(arch.time_dim)));
    fill(p.w_cond(), 1.0 / std::sqrt(double(arch.cond_dim())));
    for (int i = 0; i < arch.depth - 1; ++i) fill(p.w_hidden(i), 1.0 / std::sqrt(double(arch.hidden)));
    fill(p.w_out(), 1.0 / std::sqrt(double(arch.hidden)));
    fill(p.null_anchor(), 0.1);
    fill(p.null_goal(), 0.1);
    fill(p.null_command(), 0.1);
    fill(p.null_reward(), 0.1);
    return p;
}

std::vector<double> forward(const VectorFieldParams& params, const std::vector<double>& x,
                            double t, const ConditionSet& cond) {
    return run_forward(params, x, t, cond).y;
}

Gradients zero_gradients(const VectorFieldParams& params) {
    Gradients g;
    g.reserve(params.tensors.size());
    for (const auto& t : params.tensors) g.push_back(Tensor(t.rows, t.cols));
    return g;
}

std::vector<double> accumulate_vjp(const VectorFieldParams& params, const std::vector<double>& x,
                                   double t, const ConditionSet& cond,
                                   const std::vector<double>& cotangent, Gradients& grads) {
    ForwardCache cache = run_forward(params, x, t, cond);
    backprop(params, cache, cotangent, grads);
    return cache.y;
}

std::pair<double, Gradients> backward(const VectorFieldParams& params,
                                      const std::vector<Sample>& batch) {
    if (batch.empty()) throw std::invalid_argument("batch must be non-empty");
    const double denom = double(batch.size()) * params.arch.out_dim();
    Gradients grads = zero_gradients(params);
    double loss = 0.0;
    for (size_t b = 0; b < batch.size(); ++b) {
        const Sample& s = batch[b];
        ForwardCache cache = run_forward(params, s.x, s.t, s.cond);
        std::vector<double> gy(params.arch.out_dim());
        for (int k = 0; k < params.arch.out_dim(); ++k) {
            double diff = cache.y[k] - s.target[k];
            loss += diff * diff / denom;
            gy[k] = 2.0 * diff / denom;
        }
        if (!std::isfinite(loss))
            throw std::runtime_error("non-finite loss at batch sample " + std::to_string(b));
        backprop(params, cache, gy, grads);
    }
    return {loss, std::move(grads)};
}

OptimizerState init_optimizer(const VectorFieldParams& params, double learning_rate) {
    OptimizerState s;
    s.learning_rate = learning_rate;
    s.m = zero_gradients(params);
    s.v = zero_gradients(params);
    return s;
}

void adam_step(VectorFieldParams& params, const Gradients& grads, OptimizerState& state) {
    if (grads.size() != params.tensors.size())
        throw std::invalid_argument("gradient/parameter shape mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
    for (size_t i = 0; i < params.tensors.size(); ++i) {
        auto& p = params.tensors[i].v;
        const auto& g = grads[i].v;
        auto& m = state.m[i].v;
        auto& v = state.v[i].v;
        for (size_t k = 0; k < p.size(); ++k) {
            m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
            v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
            double mhat = m[k] / bc1;
            double vhat = v[k] / bc2;
            p[k] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

}  // namespace flowplan::net
