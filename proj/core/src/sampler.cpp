#include "flowplan/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace flowplan::sampler {

std::vector<double> euler_step(const std::vector<double>& x, const std::vector<double>& v,
                               double dt) {
    if (x.size() != v.size()) throw std::invalid_argument("euler step shape mismatch");
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + v[i] * dt;
    return out;
}

std::vector<double> cfg_combine(const std::vector<double>& v_cond,
                                const std::vector<double>& v_uncond, double s) {
    if (v_cond.size() != v_uncond.size()) throw std::invalid_argument("cfg shape mismatch");
    std::vector<double> out(v_cond.size());
    for (size_t i = 0; i < v_cond.size(); ++i)
        out[i] = v_uncond[i] + s * (v_cond[i] - v_uncond[i]);
    return out;
}

SampleResult sample_trajectory(const net::VectorFieldParams& params, const net::ConditionSet& cond,
                               const SceneFields& scene, const SamplerConfig& cfg,
                               std::mt19937_64& rng) {
    if (cfg.steps < 1) throw std::invalid_argument("sampler needs at least one step");
    const int dim = params.arch.out_dim();
    const auto& cc = cfg.constraint;

    SampleResult result;
    std::vector<double> x(dim);

    if (cc.civ_enabled) {
        if (!scene.vocab || !scene.field)
            throw std::invalid_argument("CIV requires a vocabulary and a distance field");
        auto civ = constrain::civ_init(*scene.vocab, *scene.field, scene.bounds, rng);
        x = civ.x0;
        result.diagnostics.civ_fallback = civ.fallback;
        result.diagnostics.anchor_index = civ.anchor_index;
    } else {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double& v : x) v = gauss(rng);
    }

    std::vector<double> v_c;
    if (cc.cvf_enabled) {
        if (!scene.vocab || !scene.field)
            throw std::invalid_argument("CVF requires a vocabulary and a distance field");
        int anchor_idx = result.diagnostics.anchor_index;
        if (anchor_idx < 0) {
            auto compliant = traj::select_compliant_anchors(*scene.vocab, *scene.field,
                                                            scene.vocab->anchors.size());
            if (!compliant.empty()) anchor_idx = static_cast<int>(compliant.front());
        }
        if (anchor_idx >= 0) {
            auto anchor_norm = traj::normalize(scene.vocab->anchors[anchor_idx], scene.bounds);
            v_c = constrain::precompute_vc(x, anchor_norm.values);
            result.diagnostics.anchor_index = anchor_idx;
        }
    }

    const double dt = 1.0 / cfg.steps;
    const int guided_from =
        cfg.steps - static_cast<int>(std::round(cc.energy_window * cfg.steps));
    for (int step = 0; step < cfg.steps; ++step) {
        const double t = step * dt;
        std::vector<double> v_cond = net::forward(params, x, t, cond);
        std::vector<double> v = cfg.guidance_scale == 1.0
                                    ? v_cond
                                    : cfg_combine(v_cond, net::forward(params, x, t, net::all_absent()),
                                                  cfg.guidance_scale);
        if (!v_c.empty()) {
            auto corrected = constrain::cvf_correct(v, v_c, cc.lambda);
            result.diagnostics.cvf_degenerate |= corrected.degenerate;
            v = std::move(corrected.v);
        }
        if (cc.energy_weight > 0.0 && scene.field && step >= guided_from) {
            auto grad = constrain::energy_gradient(x, *scene.field, scene.bounds, cc.energy_tau);
            for (int k = 0; k < dim; ++k) v[k] += cc.energy_weight * grad[k];
        }
        x = euler_step(x, v, dt);
        for (double u : x)
            if (!std::isfinite(u))
                throw std::runtime_error("non-finite state at sampling step " +
                                         std::to_string(step));
        if (scene.field) {
            auto e = constrain::constraint_energy(x, *scene.field, scene.bounds, cc.energy_tau);
            result.diagnostics.esdf_clamped |= e.clamped;
            result.diagnostics.energy.push_back(e.value);
        } else {
            result.diagnostics.energy.push_back(0.0);
        }
    }

    result.trajectory = traj::denormalize(x, scene.bounds);
    return result;
}

std::vector<SampleResult> sample_candidates(const net::VectorFieldParams& params,
                                            const std::vector<size_t>& anchor_set,
                                            const net::ConditionSet& shared_cond,
                                            const SceneFields& scene, const SamplerConfig& cfg) {
    if (anchor_set.empty()) throw std::invalid_argument("anchor set must be non-empty");
    if (!scene.vocab) throw std::invalid_argument("candidate sampling requires a vocabulary");

    std::vector<SampleResult> out;
    out.reserve(anchor_set.size());
    for (size_t i = 0; i < anchor_set.size(); ++i) {
        size_t anchor_idx = anchor_set[i];
        auto anchor_norm = traj::normalize(scene.vocab->anchors[anchor_idx], scene.bounds);
        net::ConditionSet cond = shared_cond;
        cond.anchor = anchor_norm.values;
        cond.goal = {anchor_norm.values[anchor_norm.values.size() - 2],
                     anchor_norm.values[anchor_norm.values.size() - 1]};
        std::mt19937_64 rng(cfg.seed ^ (0xd1342543de82ef95ull * (i + 1)));
        SampleResult r = sample_trajectory(params, cond, scene, cfg, rng);
        r.diagnostics.anchor_index = static_cast<int>(anchor_idx);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace flowplan::sampler
