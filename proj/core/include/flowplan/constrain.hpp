#pragma once

#include <memory>
#include <random>
#include <vector>

#include "flowplan/flow.hpp"
#include "flowplan/geom.hpp"
#include "flowplan/net.hpp"
#include "flowplan/traj.hpp"

namespace flowplan::constrain {

struct ConstraintConfig {
    double lambda = -0.1;       // CVF strength
    bool cvf_enabled = false;
    bool civ_enabled = false;
    double energy_weight = 0.0;  // eta; inference guidance and stage-2 penalty
    double energy_tau = 1.0;     // meters, tanh softness scale
    double energy_window = 0.3;  // final fraction of sampling steps with guidance
};

// v_c = anchor - x0; the straight-line field that would reach the anchor.
std::vector<double> precompute_vc(const std::vector<double>& x0,
                                  const std::vector<double>& anchor_x1c);

struct CvfResult {
    std::vector<double> v;
    bool degenerate = false;  // ||v_c|| below epsilon, v returned unchanged
};

CvfResult cvf_correct(const std::vector<double>& v, const std::vector<double>& v_c,
                      double lambda);

struct CivResult {
    std::vector<double> x0;  // normalized flow origin
    bool fallback = false;   // no compliant anchor; Gaussian draw used
    int anchor_index = -1;   // vocabulary index when not a fallback
};

CivResult civ_init(const traj::TrajectoryVocabulary& vocab, const geom::SignedDistanceField& field,
                   const traj::Box& bounds, std::mt19937_64& rng);

struct EnergyResult {
    double value = 0.0;
    bool clamped = false;  // some waypoint fell outside the grid extent
};

// E(x) = sum over waypoints of tanh(esdf(w)/tau); bounded in [-T, T].
EnergyResult constraint_energy(const std::vector<double>& x, const geom::SignedDistanceField& field,
                               const traj::Box& bounds, double tau);

// Central finite differences of constraint_energy; step is half a cell in
// normalized units per axis.
std::vector<double> energy_gradient(const std::vector<double>& x,
                                    const geom::SignedDistanceField& field,
                                    const traj::Box& bounds, double tau);

struct Stage2Item {
    flow::TrainItem item;
    std::shared_ptr<const geom::SignedDistanceField> field;
};

struct Stage2Config {
    flow::TrainConfig base;      // epochs/lr/batch/dropout/seed for this stage
    double energy_weight = 1.0;  // eta
    double energy_tau = 1.0;
    traj::Box bounds;
};

// Fine-tune with FM loss plus a hinge on negative one-step-endpoint energy.
std::vector<flow::EpochStats> train_stage2(net::VectorFieldParams& params,
                                           net::OptimizerState& opt,
                                           const std::vector<Stage2Item>& dataset,
                                           const Stage2Config& cfg, std::mt19937_64& rng);

}  // namespace flowplan::constrain
