#include "flowplan/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowplan::pipeline {

geom::ScenarioRecipe recipe_for_index(size_t index, const io::RunConfig& cfg,
                                      const DatasetOptions& opts, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    geom::ScenarioRecipe r;
    r.seed = rng();
    r.width = cfg.road_width * (0.85 + 0.3 * u01(rng));
    r.length = 45.0 + 15.0 * u01(rng);
    r.radius = 12.0 + 10.0 * u01(rng);

    std::vector<geom::RoadKind> kinds;
    if (opts.fork_only) {
        r.kind = geom::RoadKind::Intersection;
        r.branch = (index % 2 == 0) ? geom::Branch::Left : geom::Branch::Right;
        return r;
    }
    if (opts.straights) kinds.push_back(geom::RoadKind::Straight);
    if (opts.curves) {
        kinds.push_back(geom::RoadKind::CurveLeft);
        kinds.push_back(geom::RoadKind::CurveRight);
    }
    if (opts.intersections) kinds.push_back(geom::RoadKind::Intersection);
    if (kinds.empty()) throw std::invalid_argument("dataset options exclude every road kind");
    r.kind = kinds[index % kinds.size()];
    if (r.kind == geom::RoadKind::Intersection) {
        double b = u01(rng);
        r.branch = b < 0.34 ? geom::Branch::Left : (b < 0.67 ? geom::Branch::Straight : geom::Branch::Right);
    }
    return r;
}

traj::Trajectory generate_gt(const geom::Scenario& scenario,
                             const geom::SignedDistanceField& field, int t_points,
                             double max_arc, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double route_len = geom::centerline_length(scenario.centerline);
    const double span = std::min(route_len, max_arc);
    const double speed_factor = 0.45 + 0.55 * u01(rng);
    double amplitude = 1.2 * u01(rng);
    const double phase = 2.0 * M_PI * u01(rng);

    for (int attempt = 0; attempt < 4; ++attempt) {
        traj::Trajectory gt;
        for (int i = 0; i < t_points; ++i) {
            double s = speed_factor * span * i / (t_points - 1);
            geom::Vec2 p = geom::centerline_point_at(scenario.centerline, s);
            geom::Vec2 ahead = geom::centerline_point_at(
                scenario.centerline, std::min(s + 0.5, route_len));
            geom::Vec2 dir = ahead - p;
            double dlen = dir.norm();
            geom::Vec2 normal = dlen > 1e-9 ? geom::Vec2{-dir.y / dlen, dir.x / dlen}
                                            : geom::Vec2{0.0, 1.0};
            double off = amplitude * std::sin(M_PI * i / (t_points - 1) + phase);
            gt.push_back(p + normal * off);
        }
        if (geom::dac_compliant(gt, field)) return gt;
        amplitude *= 0.5;
        if (attempt == 2) amplitude = 0.0;
    }
    throw std::runtime_error("could not generate a compliant GT trajectory for " + scenario.id);
}

std::vector<DataSample> build_dataset(const io::RunConfig& cfg, size_t count,
                                      std::uint64_t seed, const DatasetOptions& opts) {
    std::mt19937_64 rng(seed);
    std::vector<DataSample> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        geom::ScenarioRecipe recipe = recipe_for_index(i, cfg, opts, rng);
        DataSample s;
        s.scenario = geom::build_scenario(recipe);
        auto mask = geom::rasterize_road(s.scenario, cfg.resolution, cfg.bounds.min, cfg.bounds.max);
        s.field = std::make_shared<geom::SignedDistanceField>(geom::compute_esdf(mask));
        s.gt = generate_gt(s.scenario, *s.field, cfg.arch.t_points, cfg.max_progress_cap * 0.8, rng);
        s.goal = {s.gt.back().x, s.gt.back().y};
        s.command = command_from_gt(s.gt);
        s.ep = geom::ep_score(s.gt, s.scenario, cfg.max_progress_cap);
        out.push_back(std::move(s));
    }
    return out;
}

std::array<double, 4> command_one_hot(int command) {
    if (command < 0 || command > 3) throw std::invalid_argument("command out of range");
    std::array<double, 4> oh{0.0, 0.0, 0.0, 0.0};
    oh[command] = 1.0;
    return oh;
}

int command_from_gt(const traj::Trajectory& gt) {
    if (gt.size() < 3) return 3;
    geom::Vec2 d0 = gt[1] - gt[0];
    geom::Vec2 d1 = gt.back() - gt[gt.size() - 2];
    if (d0.norm() < 1e-6 || d1.norm() < 1e-6) return 3;
    double heading_change = std::atan2(d1.y, d1.x) - std::atan2(d0.y, d0.x);
    while (heading_change > M_PI) heading_change -= 2.0 * M_PI;
    while (heading_change < -M_PI) heading_change += 2.0 * M_PI;
    const double threshold = 20.0 * M_PI / 180.0;
    if (heading_change > threshold) return 0;
    if (heading_change < -threshold) return 2;
    return 1;
}

net::ConditionSet make_condition(const DataSample& sample, const traj::TrajectoryVocabulary& vocab,
                                 const traj::Box& bounds) {
    net::ConditionSet cond;
    size_t idx = traj::nearest_anchor(sample.gt, vocab);
    cond.anchor = traj::normalize(vocab.anchors[idx], bounds).values;
    auto goal_norm = traj::normalize({{sample.goal[0], sample.goal[1]}}, bounds).values;
    cond.goal = {goal_norm[0], goal_norm[1]};
    cond.command = command_one_hot(sample.command);
    cond.reward = sample.ep;
    return cond;
}

std::vector<flow::TrainItem> to_train_items(const std::vector<DataSample>& samples,
                                            const traj::TrajectoryVocabulary& vocab,
                                            const traj::Box& bounds) {
    std::vector<flow::TrainItem> items;
    items.reserve(samples.size());
    for (const auto& s : samples) {
        flow::TrainItem item;
        item.x1 = traj::normalize(s.gt, bounds).values;
        item.cond = make_condition(s, vocab, bounds);
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<constrain::Stage2Item> to_stage2_items(const std::vector<DataSample>& samples,
                                                   const traj::TrajectoryVocabulary& vocab,
                                                   const traj::Box& bounds) {
    std::vector<constrain::Stage2Item> items;
    items.reserve(samples.size());
    for (const auto& s : samples) {
        constrain::Stage2Item it;
        it.item.x1 = traj::normalize(s.gt, bounds).values;
        it.item.cond = make_condition(s, vocab, bounds);
        it.field = s.field;
        items.push_back(std::move(it));
    }
    return items;
}

EvalReport evaluate(const net::VectorFieldParams& params, const std::vector<DataSample>& samples,
                    const traj::TrajectoryVocabulary& vocab, const io::RunConfig& cfg,
                    const sampler::SamplerConfig& sampler_cfg, size_t candidates_per_scenario) {
    EvalReport report;
    report.scenarios = samples.size();
    report.candidates_per_scenario = candidates_per_scenario;
    size_t dac_hits = 0, dac_total = 0, selected_hits = 0;
    double ep_sum = 0.0, err_sum = 0.0;
    size_t selected_count = 0;

    for (size_t si = 0; si < samples.size(); ++si) {
        const DataSample& s = samples[si];
        sampler::SceneFields scene{s.field.get(), &vocab, cfg.bounds};
        auto anchors = score::top_k_anchors(vocab, s.scenario, *s.field,
                                            candidates_per_scenario, cfg.weights);
        sampler::SamplerConfig sc = sampler_cfg;
        sc.seed = sampler_cfg.seed ^ (0x9e3779b97f4a7c15ull * (si + 1));
        net::ConditionSet shared;
        shared.command = command_one_hot(s.command);
        auto results = sampler::sample_candidates(params, anchors, shared, scene, sc);

        std::vector<traj::Trajectory> candidates;
        for (const auto& r : results) {
            candidates.push_back(r.trajectory);
            dac_total += 1;
            if (geom::dac_compliant(r.trajectory, *s.field)) dac_hits += 1;
        }
        auto ranked = score::rank_and_select(candidates, vocab, s.scenario, *s.field, cfg.weights);
        if (geom::dac_compliant(ranked.best, *s.field)) selected_hits += 1;
        selected_count += 1;
        ep_sum += geom::ep_score(ranked.best, s.scenario, cfg.max_progress_cap);
        err_sum += (ranked.best.back() - geom::Vec2{s.goal[0], s.goal[1]}).norm();
    }

    report.candidate_dac_rate = dac_total ? double(dac_hits) / dac_total : 0.0;
    report.selected_dac_rate = selected_count ? double(selected_hits) / selected_count : 0.0;
    report.mean_ep = selected_count ? ep_sum / selected_count : 0.0;
    report.mean_endpoint_error = selected_count ? err_sum / selected_count : 0.0;
    return report;
}

}  // namespace flowplan::pipeline
