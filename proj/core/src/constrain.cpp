#include "flowplan/constrain.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flowplan::constrain {

std::vector<double> precompute_vc(const std::vector<double>& x0,
                                  const std::vector<double>& anchor_x1c) {
    if (x0.size() != anchor_x1c.size()) throw std::invalid_argument("CVF shape mismatch");
    std::vector<double> vc(x0.size());
    for (size_t i = 0; i < x0.size(); ++i) vc[i] = anchor_x1c[i] - x0[i];
    return vc;
}

CvfResult cvf_correct(const std::vector<double>& v, const std::vector<double>& v_c,
                      double lambda) {
    if (v.size() != v_c.size()) throw std::invalid_argument("CVF shape mismatch");
    double norm2 = 0.0, dot = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        norm2 += v_c[i] * v_c[i];
        dot += v[i] * v_c[i];
    }
    CvfResult out;
    if (norm2 <= 1e-8 * 1e-8) {
        out.v = v;
        out.degenerate = true;
        return out;
    }
    double coeff = 2.0 * lambda * dot / norm2;
    out.v.resize(v.size());
    for (size_t i = 0; i < v.size(); ++i) out.v[i] = v[i] + coeff * v_c[i];
    return out;
}

CivResult civ_init(const traj::TrajectoryVocabulary& vocab, const geom::SignedDistanceField& field,
                   const traj::Box& bounds, std::mt19937_64& rng) {
    auto compliant = traj::select_compliant_anchors(vocab, field, vocab.anchors.size());
    CivResult out;
    if (compliant.empty()) {
        out.fallback = true;
        std::normal_distribution<double> gauss(0.0, 1.0);
        out.x0.resize(vocab.anchors.front().size() * 2);
        for (double& v : out.x0) v = gauss(rng);
        return out;
    }
    std::uniform_int_distribution<size_t> pick(0, compliant.size() - 1);
    out.anchor_index = static_cast<int>(compliant[pick(rng)]);
    out.x0 = traj::normalize(vocab.anchors[out.anchor_index], bounds).values;
    return out;
}

EnergyResult constraint_energy(const std::vector<double>& x, const geom::SignedDistanceField& field,
                               const traj::Box& bounds, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("energy tau must be positive");
    EnergyResult out;
    traj::Trajectory pts = traj::denormalize(x, bounds);
    for (const auto& w : pts) {
        geom::EsdfSample s = geom::esdf_at(field, w);
        out.clamped = out.clamped || s.clamped;
        out.value += std::tanh(s.value / tau);
    }
    return out;
}

std::vector<double> energy_gradient(const std::vector<double>& x,
                                    const geom::SignedDistanceField& field,
                                    const traj::Box& bounds, double tau) {
    // Half-cell steps, converted to the normalized coordinate scale.
    const double hx = field.resolution / (bounds.max.x - bounds.min.x);  // 0.5 cell * 2/extent
    const double hy = field.resolution / (bounds.max.y - bounds.min.y);
    std::vector<double> grad(x.size(), 0.0);
    std::vector<double> probe = x;
    for (size_t i = 0; i < x.size(); ++i) {
        double h = (i % 2 == 0) ? hx : hy;
        probe[i] = x[i] + h;
        double e_plus = constraint_energy(probe, field, bounds, tau).value;
        probe[i] = x[i] - h;
        double e_minus = constraint_energy(probe, field, bounds, tau).value;
        probe[i] = x[i];
        grad[i] = (e_plus - e_minus) / (2.0 * h);
    }
    return grad;
}

std::vector<flow::EpochStats> train_stage2(net::VectorFieldParams& params,
                                           net::OptimizerState& opt,
                                           const std::vector<Stage2Item>& dataset,
                                           const Stage2Config& cfg, std::mt19937_64& rng) {
    if (dataset.empty()) throw std::invalid_argument("stage-2 dataset is empty");
    const int out_dim = params.arch.out_dim();
    std::vector<flow::EpochStats> log;
    std::vector<size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.base.epochs; ++epoch) {
        auto start = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        int steps = 0;
        for (size_t off = 0; off < order.size(); off += cfg.base.batch_size) {
            size_t end = std::min(order.size(), off + cfg.base.batch_size);
            const double denom = double(end - off) * out_dim;
            const double batch_n = double(end - off);

            // Draw flow samples first so the rng stream matches stage-1.
            struct Prepared {
                net::Sample s;
                const geom::SignedDistanceField* field;
            };
            std::vector<Prepared> prepared;
            prepared.reserve(end - off);
            for (size_t i = off; i < end; ++i) {
                const Stage2Item& it = dataset[order[i]];
                flow::FlowSample fs = flow::make_flow_sample(it.item.x1, rng);
                net::Sample s;
                s.x = std::move(fs.x_t);
                s.t = fs.t;
                s.cond = flow::cfg_dropout(it.item.cond, cfg.base.cond_dropout, rng);
                s.target = std::move(fs.target);
                prepared.push_back({std::move(s), it.field.get()});
            }

            net::Gradients grads = net::zero_gradients(params);
            double loss = 0.0;
            for (auto& pr : prepared) {
                std::vector<double> y = net::forward(params, pr.s.x, pr.s.t, pr.s.cond);
                std::vector<double> gy(out_dim);
                for (int k = 0; k < out_dim; ++k) {
                    double diff = y[k] - pr.s.target[k];
                    loss += diff * diff / denom;
                    gy[k] = 2.0 * diff / denom;
                }
                if (cfg.energy_weight > 0.0 && pr.field != nullptr) {
                    // One-step endpoint prediction and its energy hinge.
                    std::vector<double> x1_hat(out_dim);
                    for (int k = 0; k < out_dim; ++k)
                        x1_hat[k] = pr.s.x[k] + (1.0 - pr.s.t) * y[k];
                    EnergyResult e =
                        constraint_energy(x1_hat, *pr.field, cfg.bounds, cfg.energy_tau);
                    if (-e.value > 0.0) {
                        loss += cfg.energy_weight * (-e.value) / batch_n;
                        auto de = energy_gradient(x1_hat, *pr.field, cfg.bounds, cfg.energy_tau);
                        double scale = -cfg.energy_weight * (1.0 - pr.s.t) / batch_n;
                        for (int k = 0; k < out_dim; ++k) gy[k] += scale * de[k];
                    }
                }
                net::accumulate_vjp(params, pr.s.x, pr.s.t, pr.s.cond, gy, grads);
            }
            if (!std::isfinite(loss)) throw std::runtime_error("non-finite stage-2 loss");
            net::adam_step(params, grads, opt);
            loss_sum += loss;
            ++steps;
        }
        auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        log.push_back({epoch, steps > 0 ? loss_sum / steps : 0.0, wall});
    }
    return log;
}

}  // namespace flowplan::constrain
