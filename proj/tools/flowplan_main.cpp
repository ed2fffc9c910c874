#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "flowplan/pipeline.hpp"

namespace fs = std::filesystem;
using namespace flowplan;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitMissingArtifact = 3;
constexpr int kExitNumericalFailure = 4;

struct MissingArtifact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const fs::path& p, const char* what) {
    if (!fs::exists(p))
        throw MissingArtifact(std::string(what) + " not found: " + p.string() +
                              " (run the upstream command first)");
}

fs::path scenario_path(const fs::path& out_dir, size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scn_%05zu.json", index);
    return out_dir / "scenarios" / buf;
}

// Rebuild the derived per-sample state (ESDF, conditions) from disk.
std::vector<pipeline::DataSample> load_samples(const io::RunConfig& cfg, const io::Manifest& m,
                                               const fs::path& out_dir) {
    std::vector<pipeline::DataSample> samples;
    samples.reserve(m.entries.size());
    for (const auto& e : m.entries) {
        pipeline::DataSample s;
        s.scenario = io::load_scenario(out_dir / e.scenario_file);
        auto mask = geom::rasterize_road(s.scenario, cfg.resolution, cfg.bounds.min, cfg.bounds.max);
        s.field = std::make_shared<geom::SignedDistanceField>(geom::compute_esdf(mask));
        s.gt = e.gt;
        s.goal = e.goal;
        s.command = e.command;
        s.ep = e.ep;
        samples.push_back(std::move(s));
    }
    return samples;
}

void write_candidates_csv(const std::vector<sampler::SampleResult>& results,
                          const geom::SignedDistanceField& field, const fs::path& path) {
    std::ostringstream ss;
    ss << std::setprecision(17);
    ss << "candidate_id,anchor_id";
    size_t t_points = results.empty() ? 0 : results.front().trajectory.size();
    for (size_t i = 0; i < t_points; ++i) ss << ",x" << i << ",y" << i;
    ss << ",dac,final_energy\n";
    for (size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        ss << i << "," << r.diagnostics.anchor_index;
        for (const auto& w : r.trajectory) ss << "," << w.x << "," << w.y;
        ss << "," << (geom::dac_compliant(r.trajectory, field) ? 1 : 0) << ","
           << (r.diagnostics.energy.empty() ? 0.0 : r.diagnostics.energy.back()) << "\n";
    }
    std::ofstream f(path);
    f << ss.str();
}

void write_ranked_csv(const score::RankResult& ranked, const fs::path& path) {
    std::ostringstream ss;
    ss << std::setprecision(17);
    ss << "rank,source,id,dac,progress,clearance,smoothness,total\n";
    for (size_t i = 0; i < ranked.table.size(); ++i) {
        const auto& item = ranked.table[i];
        ss << i << "," << item.source << "," << item.id << "," << item.score.dac << ","
           << item.score.progress << "," << item.score.clearance << "," << item.score.smoothness
           << "," << item.score.total << "\n";
    }
    std::ofstream f(path);
    f << ss.str();
}

int cmd_gen_data(const io::RunConfig& cfg) {
    fs::path out(cfg.out_dir);
    fs::create_directories(out / "scenarios");
    io::save_run_config(cfg, out / "config.json");

    auto samples = pipeline::build_dataset(cfg, cfg.num_scenarios, cfg.master_seed);
    io::Manifest manifest;
    manifest.config_hash = io::run_config_hash(cfg);
    for (size_t i = 0; i < samples.size(); ++i) {
        fs::path sp = scenario_path(out, i);
        io::save_scenario(samples[i].scenario, sp);
        io::ManifestEntry e;
        e.scenario_file = fs::relative(sp, out).string();
        e.gt = samples[i].gt;
        e.goal = samples[i].goal;
        e.command = samples[i].command;
        e.ep = samples[i].ep;
        manifest.entries.push_back(std::move(e));
    }
    io::save_manifest(manifest, out / "manifest.json");
    std::cout << "wrote " << manifest.entries.size() << " scenarios under " << out << "\n";
    return 0;
}

int cmd_build_vocab(const io::RunConfig& cfg) {
    fs::path out(cfg.out_dir);
    require_file(out / "manifest.json", "dataset manifest");
    io::Manifest m = io::load_manifest(out / "manifest.json");
    std::vector<traj::Trajectory> gts;
    for (const auto& e : m.entries) gts.push_back(e.gt);
    size_t k = std::min<size_t>(cfg.vocab_k, gts.size());
    auto vocab = traj::fps_vocabulary(gts, k, cfg.master_seed);
    vocab.provenance = "manifest.json";
    io::save_vocabulary(vocab, out / "vocab.json", io::run_config_hash(cfg));
    std::cout << "vocabulary of " << vocab.anchors.size() << " anchors written\n";
    return 0;
}

int cmd_train(const io::RunConfig& cfg) {
    fs::path out(cfg.out_dir);
    require_file(out / "manifest.json", "dataset manifest");
    require_file(out / "vocab.json", "trajectory vocabulary");
    io::Manifest m = io::load_manifest(out / "manifest.json");
    auto vocab = io::load_vocabulary(out / "vocab.json");
    auto samples = load_samples(cfg, m, out);
    auto items = pipeline::to_train_items(samples, vocab, cfg.bounds);

    auto result = flow::train_stage1(items, cfg.train, cfg.arch);
    io::Checkpoint ckpt{std::move(result.params), std::move(result.opt_state),
                        io::run_config_hash(cfg)};
    io::save_checkpoint(ckpt, out / "ckpt_stage1.bin");
    io::write_training_log(result.log, out / "train_log.csv");
    std::cout << "stage-1 checkpoint written; final mean loss "
              << (result.log.empty() ? 0.0 : result.log.back().mean_loss) << "\n";
    return 0;
}

int cmd_finetune(const io::RunConfig& cfg) {
    fs::path out(cfg.out_dir);
    require_file(out / "ckpt_stage1.bin", "stage-1 checkpoint");
    require_file(out / "manifest.json", "dataset manifest");
    require_file(out / "vocab.json", "trajectory vocabulary");
    io::Checkpoint ckpt = io::load_checkpoint(out / "ckpt_stage1.bin");
    io::Manifest m = io::load_manifest(out / "manifest.json");
    auto vocab = io::load_vocabulary(out / "vocab.json");
    auto samples = load_samples(cfg, m, out);
    auto items = pipeline::to_stage2_items(samples, vocab, cfg.bounds);

    constrain::Stage2Config s2;
    s2.base = cfg.train;
    s2.base.epochs = cfg.stage2_epochs;
    s2.energy_weight = cfg.stage2_energy_weight;
    s2.energy_tau = cfg.stage2_energy_tau;
    s2.bounds = cfg.bounds;
    std::mt19937_64 rng(cfg.train.seed ^ 0xa5a5a5a5a5a5a5a5ull);
    auto log = constrain::train_stage2(ckpt.params, ckpt.opt_state, items, s2, rng);
    io::save_checkpoint(ckpt, out / "ckpt_stage2.bin");
    io::write_training_log(log, out / "finetune_log.csv");
    std::cout << "stage-2 checkpoint written; final mean loss "
              << (log.empty() ? 0.0 : log.back().mean_loss) << "\n";
    return 0;
}

int cmd_sample(const io::RunConfig& cfg, int scenario_index, const std::string& checkpoint_name) {
    fs::path out(cfg.out_dir);
    fs::path ckpt_path = out / checkpoint_name;
    require_file(ckpt_path, "checkpoint");
    require_file(out / "manifest.json", "dataset manifest");
    require_file(out / "vocab.json", "trajectory vocabulary");
    io::Checkpoint ckpt = io::load_checkpoint(ckpt_path);
    io::Manifest m = io::load_manifest(out / "manifest.json");
    auto vocab = io::load_vocabulary(out / "vocab.json");
    if (scenario_index < 0 || scenario_index >= static_cast<int>(m.entries.size()))
        throw CLI::ValidationError("--scenario-index out of range");
    const auto& entry = m.entries[scenario_index];
    geom::Scenario scenario = io::load_scenario(out / entry.scenario_file);
    auto mask = geom::rasterize_road(scenario, cfg.resolution, cfg.bounds.min, cfg.bounds.max);
    auto field = geom::compute_esdf(mask);

    sampler::SceneFields scene{&field, &vocab, cfg.bounds};
    auto anchors = score::top_k_anchors(vocab, scenario, field, cfg.candidates, cfg.weights);
    net::ConditionSet shared;
    shared.command = pipeline::command_one_hot(entry.command);
    auto results = sampler::sample_candidates(ckpt.params, anchors, shared, scene, cfg.sampler);

    std::vector<traj::Trajectory> candidates;
    for (const auto& r : results) candidates.push_back(r.trajectory);
    auto ranked = score::rank_and_select(candidates, vocab, scenario, field, cfg.weights);

    write_candidates_csv(results, field, out / "candidates.csv");
    write_ranked_csv(ranked, out / "ranked.csv");
    io::export_esdf_csv(field, out / "esdf.csv");
    io::write_scene_svg(scenario, &entry.gt, candidates, &ranked.best, out / "scene.svg");
    std::cout << "sampled " << results.size() << " candidates for scenario " << scenario.id
              << "\n";
    return 0;
}

int cmd_eval(const io::RunConfig& cfg, const std::string& checkpoint_name, bool ab, bool force) {
    fs::path out(cfg.out_dir);
    fs::path ckpt_path = out / checkpoint_name;
    require_file(ckpt_path, "checkpoint");
    require_file(out / "vocab.json", "trajectory vocabulary");
    io::Checkpoint ckpt = io::load_checkpoint(ckpt_path);
    std::uint64_t vocab_hash = 0;
    auto vocab = io::load_vocabulary(out / "vocab.json", &vocab_hash);
    std::uint64_t cfg_hash = io::run_config_hash(cfg);
    if (!force && (ckpt.config_hash != cfg_hash || vocab_hash != cfg_hash))
        throw CLI::ValidationError(
            "artifact config hashes disagree with the current config; pass --force to override");

    // Held-out scenarios come from a shifted seed stream.
    auto held_out = pipeline::build_dataset(cfg, cfg.num_eval_scenarios,
                                            cfg.master_seed + 0x5eed0ull);
    size_t per_scene = std::min<size_t>(cfg.candidates, vocab.anchors.size());
    auto report = pipeline::evaluate(ckpt.params, held_out, vocab, cfg, cfg.sampler, per_scene);

    std::ostringstream ss;
    ss << std::setprecision(17);
    ss << "config,candidate_dac_rate,selected_dac_rate,mean_ep,mean_endpoint_error,scenarios,"
          "candidates_per_scenario\n";
    ss << "constrained," << report.candidate_dac_rate << "," << report.selected_dac_rate << ","
       << report.mean_ep << "," << report.mean_endpoint_error << "," << report.scenarios << ","
       << report.candidates_per_scenario << "\n";
    if (ab) {
        sampler::SamplerConfig plain = cfg.sampler;
        plain.constraint.civ_enabled = false;
        plain.constraint.cvf_enabled = false;
        plain.constraint.energy_weight = 0.0;
        auto base = pipeline::evaluate(ckpt.params, held_out, vocab, cfg, plain, per_scene);
        ss << "unconstrained," << base.candidate_dac_rate << "," << base.selected_dac_rate << ","
           << base.mean_ep << "," << base.mean_endpoint_error << "," << base.scenarios << ","
           << base.candidates_per_scenario << "\n";
    }
    std::ofstream f(out / "report.csv");
    f << ss.str();
    std::cout << ss.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained flow-matching trajectory generator"};
    app.require_subcommand(1);

    io::RunConfig cfg;
    std::string config_file;

    // The config file is pre-scanned before parsing so its values act as
    // defaults that explicit flags override.
    auto add_common = [&cfg, &config_file](CLI::App* sub) {
        sub->add_option("--config", config_file, "Run configuration JSON file")
            ->envname("FLOWPLAN_CONFIG");
        sub->add_option("--out", cfg.out_dir, "Output directory")->envname("FLOWPLAN_OUT");
        sub->add_option("--seed", cfg.master_seed, "Master seed")->envname("FLOWPLAN_SEED");
        sub->add_option("--scenarios", cfg.num_scenarios, "Training scenario count")
            ->envname("FLOWPLAN_SCENARIOS");
        sub->add_option("--eval-scenarios", cfg.num_eval_scenarios, "Held-out scenario count")
            ->envname("FLOWPLAN_EVAL_SCENARIOS");
        sub->add_option("--vocab-k", cfg.vocab_k, "Vocabulary size")->envname("FLOWPLAN_VOCAB_K");
        sub->add_option("--steps", cfg.sampler.steps, "Sampling steps")->envname("FLOWPLAN_STEPS");
        sub->add_option("--candidates", cfg.candidates, "Candidate count")
            ->envname("FLOWPLAN_CANDIDATES");
        sub->add_option("--lambda", cfg.sampler.constraint.lambda, "CVF strength")
            ->envname("FLOWPLAN_LAMBDA");
        sub->add_option("--guidance", cfg.sampler.guidance_scale, "Guidance scale")
            ->envname("FLOWPLAN_GUIDANCE");
        sub->add_option("--lr", cfg.train.learning_rate, "Learning rate")->envname("FLOWPLAN_LR");
        sub->add_option("--batch", cfg.train.batch_size, "Batch size")->envname("FLOWPLAN_BATCH");
        sub->add_option("--epochs", cfg.train.epochs, "Stage-1 epochs")
            ->envname("FLOWPLAN_EPOCHS");
        sub->add_option("--stage2-epochs", cfg.stage2_epochs, "Stage-2 epochs")
            ->envname("FLOWPLAN_STAGE2_EPOCHS");
        sub->add_option("--energy-weight", cfg.sampler.constraint.energy_weight,
                        "Inference energy guidance weight")
            ->envname("FLOWPLAN_ENERGY_WEIGHT");
        sub->add_flag("--civ", cfg.sampler.constraint.civ_enabled, "Enable CIV initialization")
            ->envname("FLOWPLAN_CIV");
        sub->add_flag("--cvf", cfg.sampler.constraint.cvf_enabled, "Enable CVF correction")
            ->envname("FLOWPLAN_CVF");
    };

    auto* gen = app.add_subcommand("gen-data", "Generate the synthetic scenario dataset");
    add_common(gen);
    auto* vocab_cmd = app.add_subcommand("build-vocab", "Build the FPS anchor vocabulary");
    add_common(vocab_cmd);
    auto* train = app.add_subcommand("train", "Stage-1 flow-matching training");
    add_common(train);
    auto* finetune = app.add_subcommand("finetune", "Stage-2 energy-penalized fine-tuning");
    add_common(finetune);

    auto* sample = app.add_subcommand("sample", "Sample ranked candidates for one scenario");
    add_common(sample);
    int scenario_index = 0;
    std::string checkpoint_name = "ckpt_stage2.bin";
    sample->add_option("--scenario-index", scenario_index, "Manifest index of the scenario");
    sample->add_option("--checkpoint", checkpoint_name, "Checkpoint file name");

    auto* eval = app.add_subcommand("eval", "Evaluate on held-out scenarios");
    add_common(eval);
    bool ab = false, force = false;
    eval->add_option("--checkpoint", checkpoint_name, "Checkpoint file name");
    eval->add_flag("--ab", ab, "Also report the unconstrained baseline");
    eval->add_flag("--force", force, "Accept mixed config hashes");

    auto* show = app.add_subcommand("show-config", "Print the effective configuration");
    add_common(show);

    try {
        // First pass: find --config among the arguments manually so file
        // values act as defaults under the later flag overrides.
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") config_file = argv[i + 1];
        }
        if (config_file.empty()) {
            if (const char* env = std::getenv("FLOWPLAN_CONFIG")) config_file = env;
        }
        if (!config_file.empty()) {
            require_file(config_file, "config file");
            cfg = io::load_run_config(config_file);
        }
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfigError;
    } catch (const MissingArtifact& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingArtifact;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(cfg);
        if (vocab_cmd->parsed()) return cmd_build_vocab(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (finetune->parsed()) return cmd_finetune(cfg);
        if (sample->parsed()) return cmd_sample(cfg, scenario_index, checkpoint_name);
        if (eval->parsed()) return cmd_eval(cfg, checkpoint_name, ab, force);
        if (show->parsed()) {
            std::cout << io::run_config_to_json(cfg) << "\n";
            return 0;
        }
    } catch (const MissingArtifact& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingArtifact;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    return 0;
}
