#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flowplan/constrain.hpp"
#include "flowplan/flow.hpp"
#include "flowplan/geom.hpp"
#include "flowplan/net.hpp"
#include "flowplan/sampler.hpp"
#include "flowplan/score.hpp"
#include "flowplan/traj.hpp"

namespace flowplan::io {

// Everything needed to reproduce a run; round-trips losslessly through
// JSON and hashes deterministically.
struct RunConfig {
    int num_scenarios = 2000;
    int num_eval_scenarios = 200;
    double road_width = 6.0;
    double resolution = 0.5;
    traj::Box bounds{{-8.0, -32.0}, {72.0, 32.0}};
    double max_progress_cap = 60.0;

    int vocab_k = 256;
    net::ArchConfig arch;

    flow::TrainConfig train;           // stage 1
    int stage2_epochs = 10;
    double stage2_energy_weight = 1.0;
    double stage2_energy_tau = 1.0;

    sampler::SamplerConfig sampler;    // steps=100, guidance, constraints
    int candidates = 100;

    score::ScoreWeights weights;
    std::uint64_t master_seed = 0;
    std::string out_dir = "out";
};

std::uint64_t fnv1a64(const std::string& data);

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);
std::uint64_t run_config_hash(const RunConfig& cfg);

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path);
RunConfig load_run_config(const std::filesystem::path& path);

void save_scenario(const geom::Scenario& s, const std::filesystem::path& path);
geom::Scenario load_scenario(const std::filesystem::path& path);

// CSV grid with a 3-line header: origin, resolution, shape.
void export_esdf_csv(const geom::SignedDistanceField& field, const std::filesystem::path& path);

void save_vocabulary(const traj::TrajectoryVocabulary& vocab, const std::filesystem::path& path,
                     std::uint64_t config_hash);
traj::TrajectoryVocabulary load_vocabulary(const std::filesystem::path& path,
                                           std::uint64_t* config_hash = nullptr);

struct Checkpoint {
    net::VectorFieldParams params;
    net::OptimizerState opt_state;
    std::uint64_t config_hash = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Per-sample record of a generated dataset entry.
struct ManifestEntry {
    std::string scenario_file;
    traj::Trajectory gt;
    std::array<double, 2> goal{};        // metric GT endpoint
    int command = 1;                     // 0 left, 1 straight, 2 right, 3 unknown
    double ep = 0.0;
};

struct Manifest {
    std::uint64_t config_hash = 0;
    std::vector<ManifestEntry> entries;
};

void save_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

void write_training_log(const std::vector<flow::EpochStats>& log,
                        const std::filesystem::path& path);

// Road polygons, ground truth, candidates, and the selected trajectory as
// a standalone SVG.
void write_scene_svg(const geom::Scenario& scenario, const traj::Trajectory* gt,
                     const std::vector<traj::Trajectory>& candidates,
                     const traj::Trajectory* selected, const std::filesystem::path& path);

}  // namespace flowplan::io
