#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "motionforge/pipeline.hpp"

namespace mforge {

using nlohmann::json;
namespace fs = std::filesystem;

std::map<std::string, TargetSamplingSpace> default_sampling_spaces() {
    return {
        {"punch", {{0.5, 2.0}, {1.0, 1.0}, {-1.7, 1.7}}},
        {"kick", {{0.8, 1.2}, {0.8, 1.2}, {-0.785, 0.785}}},
        {"walk", {{0.5, 2.0}, {1.0, 1.0}, {-0.3, 0.3}}},
    };
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + ctx);
    }
}

std::array<double, 2> range2(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(ctx + " must be a [lo, hi] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

TargetSamplingSpace parse_space(const json& j, const std::string& ctx) {
    check_keys(j, {"radial_range", "height_range", "angle_range"}, ctx);
    TargetSamplingSpace s;
    if (j.contains("radial_range")) s.radial_range = range2(j["radial_range"], ctx + ".radial_range");
    if (j.contains("height_range")) s.height_range = range2(j["height_range"], ctx + ".height_range");
    if (j.contains("angle_range")) s.angle_range = range2(j["angle_range"], ctx + ".angle_range");
    try {
        s.validate();
    } catch (const std::exception& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
    return s;
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    check_keys(doc,
               {"manifest", "out_dir", "seed", "multiplier", "jobs", "quiet", "end_effector",
                "ik", "synthesis", "sampling_spaces", "time_warp", "controller", "thresholds",
                "metrics", "debias"},
               "config");

    PipelineConfig c;
    c.sampling_spaces = default_sampling_spaces();

    fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    if (doc.contains("manifest")) c.manifest_path = resolve(doc["manifest"].get<std::string>());
    if (doc.contains("out_dir")) c.out_dir = resolve(doc["out_dir"].get<std::string>());
    if (doc.contains("seed")) {
        c.seed = doc["seed"].get<std::uint64_t>();
        c.seed_set = true;
    }
    if (doc.contains("multiplier")) {
        c.multiplier = doc["multiplier"].get<int>();
        if (c.multiplier < 0) throw ConfigError("multiplier must be >= 0");
    }
    if (doc.contains("jobs")) {
        c.jobs = doc["jobs"].get<int>();
        if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
    }
    if (doc.contains("quiet")) c.quiet = doc["quiet"].get<bool>();
    if (doc.contains("end_effector")) c.end_effector = doc["end_effector"].get<std::string>();

    if (doc.contains("ik")) {
        const json& j = doc["ik"];
        check_keys(j, {"tolerance", "max_iters"}, "config.ik");
        if (j.contains("tolerance")) c.ik.tolerance = j["tolerance"].get<double>();
        if (j.contains("max_iters")) c.ik.max_iters = j["max_iters"].get<int>();
        if (!(c.ik.tolerance > 0.0) || c.ik.max_iters < 1)
            throw ConfigError("config.ik: tolerance must be > 0 and max_iters >= 1");
    }

    if (doc.contains("synthesis")) {
        const json& j = doc["synthesis"];
        check_keys(j, {"ik", "latent", "embeddings", "decoder", "n_clusters", "n_samples"},
                   "config.synthesis");
        if (j.contains("ik")) c.synthesis.ik = j["ik"].get<bool>();
        if (j.contains("latent")) c.synthesis.latent = j["latent"].get<bool>();
        if (j.contains("embeddings")) c.synthesis.embeddings_path = resolve(j["embeddings"].get<std::string>());
        if (j.contains("decoder")) c.synthesis.decoder_path = resolve(j["decoder"].get<std::string>());
        if (j.contains("n_clusters")) c.synthesis.n_clusters = j["n_clusters"].get<int>();
        if (j.contains("n_samples")) c.synthesis.n_samples = j["n_samples"].get<int>();
        if (c.synthesis.n_clusters < 1 || c.synthesis.n_samples < 1)
            throw ConfigError("config.synthesis: n_clusters and n_samples must be >= 1");
    }

    if (doc.contains("sampling_spaces")) {
        for (auto it = doc["sampling_spaces"].begin(); it != doc["sampling_spaces"].end(); ++it)
            c.sampling_spaces[it.key()] =
                parse_space(it.value(), "config.sampling_spaces." + it.key());
    }

    if (doc.contains("time_warp")) {
        const json& j = doc["time_warp"];
        check_keys(j, {"enabled", "bounds"}, "config.time_warp");
        if (j.contains("enabled")) c.time_warp.enabled = j["enabled"].get<bool>();
        if (j.contains("bounds")) c.time_warp.bounds = range2(j["bounds"], "config.time_warp.bounds");
        if (c.time_warp.bounds[0] > c.time_warp.bounds[1] || c.time_warp.bounds[0] <= 0.0)
            throw ConfigError("config.time_warp.bounds must be a positive [lo, hi] pair");
    }

    if (doc.contains("controller")) {
        const json& j = doc["controller"];
        check_keys(j,
                   {"dt", "substeps", "inertia", "kp", "kd", "torque_limit", "root_mass",
                    "root_kp", "root_kd", "residual_force_limit", "ground_height",
                    "root_ground_clearance", "reward"},
                   "config.controller");
        ControllerConfig& cc = c.controller;
        if (j.contains("dt")) cc.dt = j["dt"].get<double>();
        if (j.contains("substeps")) cc.substeps = j["substeps"].get<int>();
        if (j.contains("inertia")) cc.inertia = j["inertia"].get<double>();
        if (j.contains("kp")) cc.kp = j["kp"].get<double>();
        if (j.contains("kd")) cc.kd = j["kd"].get<double>();
        if (j.contains("torque_limit")) cc.torque_limit = j["torque_limit"].get<double>();
        if (j.contains("root_mass")) cc.root_mass = j["root_mass"].get<double>();
        if (j.contains("root_kp")) cc.root_kp = j["root_kp"].get<double>();
        if (j.contains("root_kd")) cc.root_kd = j["root_kd"].get<double>();
        if (j.contains("residual_force_limit"))
            cc.residual_force_limit = j["residual_force_limit"].get<double>();
        if (j.contains("ground_height")) cc.ground_height = j["ground_height"].get<double>();
        if (j.contains("root_ground_clearance"))
            cc.root_ground_clearance = j["root_ground_clearance"].get<double>();
        if (j.contains("reward")) {
            const json& r = j["reward"];
            check_keys(r, {"w_pose", "w_root", "a_pose", "a_root"}, "config.controller.reward");
            if (r.contains("w_pose")) cc.reward.w_pose = r["w_pose"].get<double>();
            if (r.contains("w_root")) cc.reward.w_root = r["w_root"].get<double>();
            if (r.contains("a_pose")) cc.reward.a_pose = r["a_pose"].get<double>();
            if (r.contains("a_root")) cc.reward.a_root = r["a_root"].get<double>();
        }
    }

    if (doc.contains("thresholds")) {
        const json& j = doc["thresholds"];
        check_keys(j,
                   {"ground_height", "ground_eps", "contact_height", "max_foot_speed",
                    "bone_radius", "max_angular_speed"},
                   "config.thresholds");
        PlausibilityThresholds& t = c.thresholds;
        if (j.contains("ground_height")) t.ground_height = j["ground_height"].get<double>();
        if (j.contains("ground_eps")) t.ground_eps = j["ground_eps"].get<double>();
        if (j.contains("contact_height")) t.contact_height = j["contact_height"].get<double>();
        if (j.contains("max_foot_speed")) t.max_foot_speed = j["max_foot_speed"].get<double>();
        if (j.contains("bone_radius")) t.bone_radius = j["bone_radius"].get<double>();
        if (j.contains("max_angular_speed"))
            t.max_angular_speed = j["max_angular_speed"].get<double>();
    }

    if (doc.contains("metrics")) {
        const json& j = doc["metrics"];
        check_keys(j, {"bandwidth", "horizons_ms"}, "config.metrics");
        if (j.contains("bandwidth") && !j["bandwidth"].is_null())
            c.metrics.bandwidth = j["bandwidth"].get<double>();
        if (j.contains("horizons_ms"))
            c.metrics.horizons_ms = j["horizons_ms"].get<std::vector<double>>();
    }

    if (doc.contains("debias")) {
        const json& j = doc["debias"];
        check_keys(j, {"kind", "lambda", "hidden", "epochs", "per_class"}, "config.debias");
        if (j.contains("kind")) {
            std::string k = j["kind"].get<std::string>();
            if (k == "affine")
                c.debias.kind = DebiasKind::affine;
            else if (k == "one_hidden_layer")
                c.debias.kind = DebiasKind::one_hidden_layer;
            else
                throw ConfigError("config.debias.kind must be 'affine' or 'one_hidden_layer'");
        }
        if (j.contains("lambda")) c.debias.lambda = j["lambda"].get<double>();
        if (j.contains("hidden")) c.debias.hidden = j["hidden"].get<std::size_t>();
        if (j.contains("epochs")) c.debias.epochs = j["epochs"].get<int>();
        if (j.contains("per_class")) c.debias.per_class = j["per_class"].get<bool>();
        if (c.debias.lambda < 0.0) throw ConfigError("config.debias.lambda must be >= 0");
    }

    return c;
}

Corpus load_corpus(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot open corpus manifest '" + manifest_path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("corpus manifest is not valid JSON: ") + e.what());
    }
    check_keys(doc, {"motions"}, "corpus manifest");
    if (!doc.contains("motions") || !doc["motions"].is_array())
        throw ConfigError("corpus manifest must contain a 'motions' array");

    fs::path base = fs::path(manifest_path).parent_path();
    Corpus corpus;
    bool have_skeleton = false;
    for (const json& rec : doc["motions"]) {
        check_keys(rec, {"path", "action", "split", "id"}, "corpus manifest entry");
        CorpusEntry entry;
        if (!rec.contains("path")) throw ConfigError("corpus manifest entry lacks 'path'");
        fs::path p(rec["path"].get<std::string>());
        entry.path = p.is_absolute() ? p.string() : (base / p).string();
        entry.action = rec.value("action", std::string{});
        entry.split = rec.value("split", std::string{"train"});
        entry.id = rec.value("id", p.stem().string());
        if (entry.split != "train" && entry.split != "test")
            throw ConfigError("corpus entry '" + entry.id + "': split must be 'train' or 'test'");
        if (!fs::exists(entry.path))
            throw ConfigError("corpus entry '" + entry.id + "': file not found: " + entry.path);

        auto [skel, motion] = read_bvh_file(entry.path);
        motion.action_label = entry.action.empty() ? std::nullopt
                                                   : std::optional<std::string>(entry.action);
        if (!have_skeleton) {
            corpus.skeleton = skel;
            have_skeleton = true;
        } else if (!skeletons_match(corpus.skeleton, skel)) {
            throw std::runtime_error("skeleton in '" + entry.path +
                                     "' does not match the corpus skeleton");
        }
        entry.motion = std::move(motion);
        corpus.entries.push_back(std::move(entry));
    }
    if (corpus.entries.empty()) throw ConfigError("corpus manifest lists no motions");
    return corpus;
}

std::vector<const CorpusEntry*> Corpus::split(const std::string& name) const {
    std::vector<const CorpusEntry*> out;
    for (const CorpusEntry& e : entries)
        if (e.split == name) out.push_back(&e);
    return out;
}

}  // namespace mforge
