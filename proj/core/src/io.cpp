#include "flowplan/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace flowplan::io {

using nlohmann::json;

namespace {

json box_to_json(const traj::Box& b) {
    return json{{"min", {b.min.x, b.min.y}}, {"max", {b.max.x, b.max.y}}};
}

traj::Box box_from_json(const json& j) {
    return {{j.at("min")[0], j.at("min")[1]}, {j.at("max")[0], j.at("max")[1]}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_i64(std::ostream& os, std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
std::int64_t get_i64(std::istream& is) {
    std::int64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
double get_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void put_tensors(std::ostream& os, const std::vector<net::Tensor>& ts) {
    put_u32(os, static_cast<std::uint32_t>(ts.size()));
    for (const auto& t : ts) {
        put_u32(os, t.rows);
        put_u32(os, t.cols);
        os.write(reinterpret_cast<const char*>(t.v.data()), t.v.size() * sizeof(double));
    }
}

std::vector<net::Tensor> get_tensors(std::istream& is) {
    std::uint32_t n = get_u32(is);
    std::vector<net::Tensor> ts;
    ts.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        int rows = static_cast<int>(get_u32(is));
        int cols = static_cast<int>(get_u32(is));
        net::Tensor t(rows, cols);
        is.read(reinterpret_cast<char*>(t.v.data()), t.v.size() * sizeof(double));
        ts.push_back(std::move(t));
    }
    return ts;
}

json traj_to_json(const traj::Trajectory& t) {
    json arr = json::array();
    for (const auto& w : t) arr.push_back({w.x, w.y});
    return arr;
}

traj::Trajectory traj_from_json(const json& j) {
    traj::Trajectory t;
    for (const auto& w : j) t.push_back({w[0], w[1]});
    return t;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string run_config_to_json(const RunConfig& cfg) {
    json j;
    j["num_scenarios"] = cfg.num_scenarios;
    j["num_eval_scenarios"] = cfg.num_eval_scenarios;
    j["road_width"] = cfg.road_width;
    j["resolution"] = cfg.resolution;
    j["bounds"] = box_to_json(cfg.bounds);
    j["max_progress_cap"] = cfg.max_progress_cap;
    j["vocab_k"] = cfg.vocab_k;
    j["arch"] = {{"t_points", cfg.arch.t_points},
                 {"time_dim", cfg.arch.time_dim},
                 {"hidden", cfg.arch.hidden},
                 {"depth", cfg.arch.depth}};
    j["train"] = {{"batch_size", cfg.train.batch_size},
                  {"learning_rate", cfg.train.learning_rate},
                  {"epochs", cfg.train.epochs},
                  {"cond_dropout", cfg.train.cond_dropout},
                  {"seed", cfg.train.seed}};
    j["stage2"] = {{"epochs", cfg.stage2_epochs},
                   {"energy_weight", cfg.stage2_energy_weight},
                   {"energy_tau", cfg.stage2_energy_tau}};
    j["sampler"] = {{"steps", cfg.sampler.steps},
                    {"guidance_scale", cfg.sampler.guidance_scale},
                    {"seed", cfg.sampler.seed},
                    {"constraint",
                     {{"lambda", cfg.sampler.constraint.lambda},
                      {"cvf_enabled", cfg.sampler.constraint.cvf_enabled},
                      {"civ_enabled", cfg.sampler.constraint.civ_enabled},
                      {"energy_weight", cfg.sampler.constraint.energy_weight},
                      {"energy_tau", cfg.sampler.constraint.energy_tau},
                      {"energy_window", cfg.sampler.constraint.energy_window}}}};
    j["candidates"] = cfg.candidates;
    j["weights"] = {{"progress", cfg.weights.progress},
                    {"clearance", cfg.weights.clearance},
                    {"smoothness", cfg.weights.smoothness},
                    {"max_progress_cap", cfg.weights.max_progress_cap}};
    j["master_seed"] = cfg.master_seed;
    j["out_dir"] = cfg.out_dir;
    return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
    json j = json::parse(text);
    RunConfig c;
    c.num_scenarios = j.at("num_scenarios");
    c.num_eval_scenarios = j.at("num_eval_scenarios");
    c.road_width = j.at("road_width");
    c.resolution = j.at("resolution");
    c.bounds = box_from_json(j.at("bounds"));
    c.max_progress_cap = j.at("max_progress_cap");
    c.vocab_k = j.at("vocab_k");
    c.arch.t_points = j.at("arch").at("t_points");
    c.arch.time_dim = j.at("arch").at("time_dim");
    c.arch.hidden = j.at("arch").at("hidden");
    c.arch.depth = j.at("arch").at("depth");
    c.train.batch_size = j.at("train").at("batch_size");
    c.train.learning_rate = j.at("train").at("learning_rate");
    c.train.epochs = j.at("train").at("epochs");
    c.train.cond_dropout = j.at("train").at("cond_dropout");
    c.train.seed = j.at("train").at("seed");
    c.stage2_epochs = j.at("stage2").at("epochs");
    c.stage2_energy_weight = j.at("stage2").at("energy_weight");
    c.stage2_energy_tau = j.at("stage2").at("energy_tau");
    c.sampler.steps = j.at("sampler").at("steps");
    c.sampler.guidance_scale = j.at("sampler").at("guidance_scale");
    c.sampler.seed = j.at("sampler").at("seed");
    const auto& cc = j.at("sampler").at("constraint");
    c.sampler.constraint.lambda = cc.at("lambda");
    c.sampler.constraint.cvf_enabled = cc.at("cvf_enabled");
    c.sampler.constraint.civ_enabled = cc.at("civ_enabled");
    c.sampler.constraint.energy_weight = cc.at("energy_weight");
    c.sampler.constraint.energy_tau = cc.at("energy_tau");
    c.sampler.constraint.energy_window = cc.at("energy_window");
    c.candidates = j.at("candidates");
    c.weights.progress = j.at("weights").at("progress");
    c.weights.clearance = j.at("weights").at("clearance");
    c.weights.smoothness = j.at("weights").at("smoothness");
    c.weights.max_progress_cap = j.at("weights").at("max_progress_cap");
    c.master_seed = j.at("master_seed");
    c.out_dir = j.at("out_dir");
    return c;
}

std::uint64_t run_config_hash(const RunConfig& cfg) {
    // json object keys are sorted, so the dump is canonical.
    return fnv1a64(run_config_to_json(cfg));
}

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path) {
    write_text(path, run_config_to_json(cfg));
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_json(read_text(path));
}

void save_scenario(const geom::Scenario& s, const std::filesystem::path& path) {
    json j;
    j["id"] = s.id;
    json polys = json::array();
    for (const auto& poly : s.drivable_region) {
        json p = json::array();
        for (const auto& v : poly) p.push_back({v.x, v.y});
        polys.push_back(p);
    }
    j["drivable_region"] = polys;
    json cl = json::array();
    for (const auto& v : s.centerline) cl.push_back({v.x, v.y});
    j["centerline"] = cl;
    json obs = json::array();
    for (const auto& o : s.obstacles) obs.push_back({{"center", {o.center.x, o.center.y}}, {"radius", o.radius}});
    j["obstacles"] = obs;
    write_text(path, j.dump(2));
}

geom::Scenario load_scenario(const std::filesystem::path& path) {
    json j = json::parse(read_text(path));
    geom::Scenario s;
    s.id = j.at("id");
    for (const auto& p : j.at("drivable_region")) {
        geom::Polygon poly;
        for (const auto& v : p) poly.push_back({v[0], v[1]});
        s.drivable_region.push_back(std::move(poly));
    }
    for (const auto& v : j.at("centerline")) s.centerline.push_back({v[0], v[1]});
    for (const auto& o : j.at("obstacles"))
        s.obstacles.push_back({{o.at("center")[0], o.at("center")[1]}, o.at("radius")});
    if (s.centerline.size() < 2) throw std::runtime_error("scenario centerline too short");
    return s;
}

void export_esdf_csv(const geom::SignedDistanceField& field, const std::filesystem::path& path) {
    std::ostringstream ss;
    ss << std::setprecision(17);
    ss << "origin," << field.origin.x << "," << field.origin.y << "\n";
    ss << "resolution," << field.resolution << "\n";
    ss << "shape," << field.height << "," << field.width << "\n";
    for (int iy = 0; iy < field.height; ++iy) {
        for (int ix = 0; ix < field.width; ++ix) {
            if (ix) ss << ",";
            ss << field.at(ix, iy);
        }
        ss << "\n";
    }
    write_text(path, ss.str());
}

void save_vocabulary(const traj::TrajectoryVocabulary& vocab, const std::filesystem::path& path,
                     std::uint64_t config_hash) {
    json j;
    j["k"] = vocab.anchors.size();
    j["t"] = vocab.anchors.empty() ? 0 : vocab.anchors.front().size();
    j["seed"] = vocab.seed;
    j["provenance"] = vocab.provenance;
    j["config_hash"] = config_hash;
    json rows = json::array();
    for (const auto& a : vocab.anchors) rows.push_back(traj_to_json(a));
    j["anchors"] = rows;
    write_text(path, j.dump());
}

traj::TrajectoryVocabulary load_vocabulary(const std::filesystem::path& path,
                                           std::uint64_t* config_hash) {
    json j = json::parse(read_text(path));
    traj::TrajectoryVocabulary v;
    v.seed = j.at("seed");
    v.provenance = j.at("provenance");
    for (const auto& row : j.at("anchors")) v.anchors.push_back(traj_from_json(row));
    if (config_hash) *config_hash = j.at("config_hash");
    if (v.anchors.empty()) throw std::runtime_error("vocabulary file holds no anchors");
    size_t t = v.anchors.front().size();
    if (t < 2) throw std::runtime_error("vocabulary anchors too short");
    for (const auto& a : v.anchors)
        if (a.size() != t) throw std::runtime_error("vocabulary anchors have mixed lengths");
    if (v.anchors.size() != j.at("k").get<size_t>())
        throw std::runtime_error("vocabulary K field disagrees with anchor count");
    return v;
}

namespace {
constexpr std::uint32_t kCheckpointMagic = 0x46504b31;  // "FPK1"
constexpr std::uint32_t kCheckpointVersion = 1;
}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    put_u32(f, kCheckpointMagic);
    put_u32(f, kCheckpointVersion);
    put_u64(f, ckpt.config_hash);
    const auto& a = ckpt.params.arch;
    put_u32(f, a.t_points);
    put_u32(f, a.time_dim);
    put_u32(f, a.hidden);
    put_u32(f, a.depth);
    put_tensors(f, ckpt.params.tensors);
    put_i64(f, ckpt.opt_state.step);
    put_f64(f, ckpt.opt_state.learning_rate);
    put_f64(f, ckpt.opt_state.beta1);
    put_f64(f, ckpt.opt_state.beta2);
    put_f64(f, ckpt.opt_state.epsilon);
    put_tensors(f, ckpt.opt_state.m);
    put_tensors(f, ckpt.opt_state.v);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    if (get_u32(f) != kCheckpointMagic) throw std::runtime_error("bad checkpoint magic");
    if (get_u32(f) != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version");
    Checkpoint c;
    c.config_hash = get_u64(f);
    c.params.arch.t_points = static_cast<int>(get_u32(f));
    c.params.arch.time_dim = static_cast<int>(get_u32(f));
    c.params.arch.hidden = static_cast<int>(get_u32(f));
    c.params.arch.depth = static_cast<int>(get_u32(f));
    c.params.tensors = get_tensors(f);
    c.opt_state.step = get_i64(f);
    c.opt_state.learning_rate = get_f64(f);
    c.opt_state.beta1 = get_f64(f);
    c.opt_state.beta2 = get_f64(f);
    c.opt_state.epsilon = get_f64(f);
    c.opt_state.m = get_tensors(f);
    c.opt_state.v = get_tensors(f);
    if (!f) throw std::runtime_error("truncated checkpoint " + path.string());
    return c;
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
    json j;
    j["config_hash"] = m.config_hash;
    json entries = json::array();
    for (const auto& e : m.entries) {
        entries.push_back({{"scenario_file", e.scenario_file},
                           {"gt", traj_to_json(e.gt)},
                           {"goal", {e.goal[0], e.goal[1]}},
                           {"command", e.command},
                           {"ep", e.ep}});
    }
    j["entries"] = entries;
    write_text(path, j.dump());
}

Manifest load_manifest(const std::filesystem::path& path) {
    json j = json::parse(read_text(path));
    Manifest m;
    m.config_hash = j.at("config_hash");
    for (const auto& e : j.at("entries")) {
        ManifestEntry me;
        me.scenario_file = e.at("scenario_file");
        me.gt = traj_from_json(e.at("gt"));
        me.goal = {e.at("goal")[0], e.at("goal")[1]};
        me.command = e.at("command");
        me.ep = e.at("ep");
        m.entries.push_back(std::move(me));
    }
    return m;
}

void write_training_log(const std::vector<flow::EpochStats>& log,
                        const std::filesystem::path& path) {
    std::ostringstream ss;
    ss << std::setprecision(17);
    ss << "epoch,mean_loss,wall_ms\n";
    for (const auto& e : log) ss << e.epoch << "," << e.mean_loss << "," << e.wall_ms << "\n";
    write_text(path, ss.str());
}

namespace {

struct SvgMapper {
    double min_x, min_y, scale, height;
    double sx(double x) const { return (x - min_x) * scale + 10; }
    double sy(double y) const { return height - ((y - min_y) * scale + 10); }
};

void svg_polyline(std::ostringstream& ss, const SvgMapper& m, const traj::Trajectory& t,
                  const char* color, double width) {
    ss << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
       << "\" points=\"";
    for (const auto& w : t) ss << m.sx(w.x) << "," << m.sy(w.y) << " ";
    ss << "\"/>\n";
}

}  // namespace

void write_scene_svg(const geom::Scenario& scenario, const traj::Trajectory* gt,
                     const std::vector<traj::Trajectory>& candidates,
                     const traj::Trajectory* selected, const std::filesystem::path& path) {
    double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;
    for (const auto& poly : scenario.drivable_region)
        for (const auto& v : poly) {
            min_x = std::min(min_x, v.x);
            min_y = std::min(min_y, v.y);
            max_x = std::max(max_x, v.x);
            max_y = std::max(max_y, v.y);
        }
    const double scale = 8.0;
    SvgMapper m{min_x, min_y, scale, (max_y - min_y) * scale + 20};
    double svg_w = (max_x - min_x) * scale + 20;
    double svg_h = m.height;

    std::ostringstream ss;
    ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_w << "\" height=\"" << svg_h
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    for (const auto& poly : scenario.drivable_region) {
        ss << "<polygon fill=\"#d8d8d8\" stroke=\"#888888\" points=\"";
        for (const auto& v : poly) ss << m.sx(v.x) << "," << m.sy(v.y) << " ";
        ss << "\"/>\n";
    }
    for (const auto& o : scenario.obstacles)
        ss << "<circle cx=\"" << m.sx(o.center.x) << "\" cy=\"" << m.sy(o.center.y) << "\" r=\""
           << o.radius * scale << "\" fill=\"#c06060\"/>\n";
    svg_polyline(ss, m, scenario.centerline, "#a0a0ff", 1.0);
    for (const auto& c : candidates) svg_polyline(ss, m, c, "#70b070", 1.0);
    if (gt) svg_polyline(ss, m, *gt, "#2040c0", 2.0);
    if (selected) svg_polyline(ss, m, *selected, "#c02020", 2.0);
    ss << "</svg>\n";
    write_text(path, ss.str());
}

}  // namespace flowplan::io
