#include "motionforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "motionforge/kernels.hpp"
#include "motionforge/latent.hpp"
#include "motionforge/rng.hpp"

namespace mforge {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Logger {
public:
    explicit Logger(bool quiet) : quiet_(quiet) {}
    void line(const std::string& msg) {
        if (quiet_) return;
        std::lock_guard<std::mutex> lock(mutex_);
        std::cout << msg << "\n";
    }

private:
    bool quiet_;
    std::mutex mutex_;
};

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::vector<fs::path> list_bvh_files(const std::string& dir) {
    if (!fs::exists(dir) || !fs::is_directory(dir))
        throw ConfigError("directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".bvh")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "'");
}

void require_seed(const PipelineConfig& config) {
    if (!config.seed_set)
        throw ConfigError("no seed configured; set 'seed' in the config or pass --seed");
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any worker is rethrown after all workers join.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    int workers = std::max(1, std::min(jobs, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
    json arr = json::array();
    for (const Diagnostic& d : diags)
        arr.push_back({{"type", d.type},
                       {"start_frame", d.start_frame},
                       {"end_frame", d.end_frame},
                       {"magnitude", d.magnitude}});
    return arr;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

int default_end_effector(const Skeleton& skeleton) {
    for (std::size_t j = 0; j < skeleton.joints.size(); ++j)
        if (skeleton.joints[j].is_end_effector && skeleton.joints[j].parent)
            return *skeleton.joints[j].parent;
    throw ConfigError("skeleton has no end sites; set 'end_effector' in the config");
}

IkChain resolve_chain(const PipelineConfig& config, const Skeleton& skeleton) {
    if (!config.end_effector.empty()) return make_chain(skeleton, config.end_effector);
    return make_chain(skeleton, default_end_effector(skeleton));
}

SimCharacter build_character(const ControllerConfig& cc, const Skeleton& skeleton) {
    SimCharacter c = character_for(skeleton, cc.inertia, cc.kp, cc.kd, cc.torque_limit);
    c.root_mass = cc.root_mass;
    c.root_kp = cc.root_kp;
    c.root_kd = cc.root_kd;
    c.residual_force_limit = cc.residual_force_limit;
    c.ground_height = cc.ground_height;
    c.root_ground_clearance = cc.root_ground_clearance;
    return c;
}

const TargetSamplingSpace& space_for(const PipelineConfig& config, const CorpusEntry& entry) {
    auto it = config.sampling_spaces.find(entry.action);
    if (it == config.sampling_spaces.end())
        throw ConfigError("no sampling space configured for action class '" + entry.action +
                          "' (motion '" + entry.id + "')");
    return it->second;
}

}  // namespace

// ---------------------------------------------------------------------------
// augment

int cmd_augment(const PipelineConfig& config) {
    require_seed(config);
    if (config.manifest_path.empty())
        throw ConfigError("augment requires 'manifest' in the config");
    if (!config.synthesis.ik && !config.synthesis.latent)
        throw ConfigError("augment: both synthesis paths are disabled");

    Logger log(config.quiet);
    Corpus corpus = load_corpus(config.manifest_path);
    std::vector<const CorpusEntry*> train = corpus.split("train");
    ensure_dir(config.out_dir);

    struct OutputRecord {
        std::string filename;
        json record;
    };
    std::vector<OutputRecord> records;
    std::mutex records_mutex;
    std::atomic<int> soft_failures{0};

    if (config.synthesis.ik && !train.empty() && config.multiplier > 0) {
        IkChain chain = resolve_chain(config, corpus.skeleton);
        // fail fast on missing per-class spaces before any work starts
        for (const CorpusEntry* e : train) space_for(config, *e);

        struct Task {
            const CorpusEntry* src;
            int k;
            std::uint64_t seed;
            std::string filename;
        };
        std::vector<Task> tasks;
        for (std::size_t i = 0; i < train.size(); ++i)
            for (int k = 0; k < config.multiplier; ++k) {
                char suffix[32];
                std::snprintf(suffix, sizeof(suffix), "_ik_%03d.bvh", k);
                tasks.push_back({train[i], k,
                                 derive_seed(config.seed, tasks.size()),
                                 train[i]->id + suffix});
            }

        parallel_for(static_cast<int>(tasks.size()), config.jobs, [&](int ti) {
            const Task& task = tasks[ti];
            auto start = std::chrono::steady_clock::now();
            json rec{{"file", task.filename},
                     {"method", "ik"},
                     {"source", task.src->id},
                     {"action", task.src->action},
                     {"seed", task.seed}};
            try {
                Rng rng(task.seed);
                IkSynthesisResult result =
                    synthesize_ik_motion(corpus.skeleton, task.src->motion, chain,
                                         space_for(config, *task.src), rng, config.ik);
                Motion out = std::move(result.motion);
                if (config.time_warp.enabled) {
                    double scale =
                        rng.uniform(config.time_warp.bounds[0], config.time_warp.bounds[1]);
                    out = time_warp(corpus.skeleton, out, scale, config.time_warp.bounds);
                    rec["time_warp_scale"] = scale;
                }
                rec["t_key"] = result.t_key;
                rec["target"] = {result.sampled_target.x, result.sampled_target.y,
                                 result.sampled_target.z};
                rec["reachable"] = result.target_reachable;
                rec["keyframe_error"] = result.keyframe_error;
                rec["diagnostics"] =
                    diagnostics_to_json(validate_plausibility(corpus.skeleton, out,
                                                              config.thresholds));
                write_bvh_file((fs::path(config.out_dir) / task.filename).string(), corpus.skeleton,
                               out);
                log.line("augmented " + task.filename + " (keyframe " +
                         std::to_string(result.t_key) +
                         (result.target_reachable ? "" : ", target at max reach") + ") in " +
                         fmt(ms_since(start)) + " ms");
            } catch (const std::exception& e) {
                rec["error"] = e.what();
                ++soft_failures;
                log.line("FAILED " + task.filename + ": " + e.what());
            }
            std::lock_guard<std::mutex> lock(records_mutex);
            records.push_back({task.filename, std::move(rec)});
        });
    }

    if (config.synthesis.latent && !train.empty() && config.multiplier > 0) {
        if (config.synthesis.embeddings_path.empty() || config.synthesis.decoder_path.empty())
            throw ConfigError("latent synthesis requires 'embeddings' and 'decoder' paths");
        if (!fs::exists(config.synthesis.embeddings_path))
            throw ConfigError("embeddings file not found: " + config.synthesis.embeddings_path);
        if (!fs::exists(config.synthesis.decoder_path))
            throw ConfigError("decoder file not found: " + config.synthesis.decoder_path);
        std::vector<LatentEmbedding> embeddings = load_embeddings(config.synthesis.embeddings_path);
        LinearMotionDecoder decoder = LinearMotionDecoder::load(config.synthesis.decoder_path);
        if (decoder.latent_dim() != embeddings.front().mu.size())
            throw ConfigError("decoder latent dimension does not match the embeddings file");
        if (decoder.pose_dim() != 3 + static_cast<std::size_t>(corpus.skeleton.angle_count()))
            throw ConfigError("decoder pose dimension does not match the corpus skeleton");

        std::uint64_t latent_seed = derive_seed(config.seed, 0x6C617400ULL);  // distinct stream
        ClusterModel model = kmeans_fit(embeddings, config.synthesis.n_clusters,
                                        derive_seed(latent_seed, 0));
        int count = config.multiplier * static_cast<int>(train.size());

        parallel_for(count, config.jobs, [&](int i) {
            auto start = std::chrono::steady_clock::now();
            char name[32];
            std::snprintf(name, sizeof(name), "latent_%04d.bvh", i);
            json rec{{"file", name}, {"method", "latent"}};
            try {
                Rng rng(derive_seed(latent_seed, 1 + static_cast<std::uint64_t>(i)));
                SnsDraw draw = sample_near_samples(embeddings, model, config.synthesis.n_samples, rng);
                Motion out = decoder.decode(draw.z);
                validate_motion(corpus.skeleton, out);
                if (config.time_warp.enabled) {
                    double scale =
                        rng.uniform(config.time_warp.bounds[0], config.time_warp.bounds[1]);
                    out = time_warp(corpus.skeleton, out, scale, config.time_warp.bounds);
                    rec["time_warp_scale"] = scale;
                }
                rec["seed"] = derive_seed(latent_seed, 1 + static_cast<std::uint64_t>(i));
                rec["cluster"] = draw.cluster;
                rec["z"] = draw.z;
                rec["diagnostics"] = diagnostics_to_json(
                    validate_plausibility(corpus.skeleton, out, config.thresholds));
                write_bvh_file((fs::path(config.out_dir) / name).string(), corpus.skeleton, out);
                log.line(std::string("augmented ") + name + " (cluster " +
                         std::to_string(draw.cluster) + ") in " + fmt(ms_since(start)) + " ms");
            } catch (const std::exception& e) {
                rec["error"] = e.what();
                ++soft_failures;
                log.line(std::string("FAILED ") + name + ": " + e.what());
            }
            std::lock_guard<std::mutex> lock(records_mutex);
            records.push_back({name, std::move(rec)});
        });
    }

    std::sort(records.begin(), records.end(),
              [](const OutputRecord& a, const OutputRecord& b) { return a.filename < b.filename; });
    json manifest{{"seed", config.seed},
                  {"multiplier", config.multiplier},
                  {"train_motions", train.size()},
                  {"outputs", json::array()}};
    for (OutputRecord& r : records) manifest["outputs"].push_back(std::move(r.record));
    write_text((fs::path(config.out_dir) / "augment_manifest.json").string(),
               manifest.dump(2) + "\n");

    log.line("augment: " + std::to_string(records.size() - soft_failures) + " motions written, " +
             std::to_string(soft_failures.load()) + " failed");
    return 0;
}

// ---------------------------------------------------------------------------
// correct

int cmd_correct(const PipelineConfig& config, const std::string& input_dir) {
    Logger log(config.quiet);
    std::vector<fs::path> files = list_bvh_files(input_dir);
    ensure_dir(config.out_dir);

    struct Row {
        std::string file;
        int frames = 0;
        double r_norm = 0.0;
        std::string status = "ok";
        json details;
    };
    std::vector<Row> rows(files.size());

    Skeleton skeleton;
    bool have_skeleton = false;
    if (!files.empty()) {
        skeleton = read_bvh_file(files.front().string()).first;
        have_skeleton = true;
    }
    SimCharacter character;
    if (have_skeleton) character = build_character(config.controller, skeleton);

    parallel_for(static_cast<int>(files.size()), config.jobs, [&](int i) {
        auto start = std::chrono::steady_clock::now();
        Row& row = rows[i];
        row.file = files[i].filename().string();
        try {
            auto [skel, motion] = read_bvh_file(files[i].string());
            if (!skeletons_match(skeleton, skel))
                throw std::runtime_error("skeleton does not match the first input file");
            row.frames = motion.frame_count();

            int substeps = config.controller.substeps;
            double dt = config.controller.dt;
            if (std::fabs(dt * substeps - motion.frame_time) > 1e-9)
                dt = motion.frame_time / substeps;  // keep dt*substeps == frame_time

            TrackResult tracked =
                track_motion(character, skeleton, motion, dt, substeps, config.controller.reward);
            row.r_norm = normalized_reward(tracked.trace);
            row.details = json{{"diagnostics", diagnostics_to_json(tracked.diagnostics)},
                               {"validation", diagnostics_to_json(validate_plausibility(
                                                  skeleton, tracked.rectified, config.thresholds))}};
            write_bvh_file((fs::path(config.out_dir) / row.file).string(), skeleton,
                           tracked.rectified);
            log.line("corrected " + row.file + " (R_norm " + fmt(row.r_norm) + ") in " +
                     fmt(ms_since(start)) + " ms");
        } catch (const std::exception& e) {
            row.status = e.what();
            log.line("FAILED " + row.file + ": " + e.what());
        }
    });

    std::string csv = "file,frames,r_norm,status\n";
    json report = json::array();
    for (const Row& row : rows) {
        bool ok = row.status == "ok";
        csv += row.file + "," + std::to_string(row.frames) + "," + (ok ? fmt(row.r_norm) : "") +
               ",\"" + row.status + "\"\n";
        json entry{{"file", row.file}, {"frames", row.frames}, {"status", row.status}};
        if (ok) {
            entry["r_norm"] = row.r_norm;
            entry.update(row.details);
        }
        report.push_back(std::move(entry));
    }
    write_text((fs::path(config.out_dir) / "correct_report.csv").string(), csv);
    write_text((fs::path(config.out_dir) / "correct_report.json").string(),
               report.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// debias

namespace {

// Longest corpus-id prefix matching the file stem resolves its action class
// (augmented outputs are named "<id>_<method>_<k>.bvh").
std::string action_for_stem(const Corpus& corpus, const std::string& stem) {
    std::string best_action;
    std::size_t best_len = 0;
    for (const CorpusEntry& e : corpus.entries) {
        if (stem == e.id || (stem.size() > e.id.size() && stem.compare(0, e.id.size(), e.id) == 0 &&
                             stem[e.id.size()] == '_')) {
            if (e.id.size() > best_len) {
                best_len = e.id.size();
                best_action = e.action;
            }
        }
    }
    return best_action;
}

}  // namespace

int cmd_debias(const PipelineConfig& config, const std::string& pairs_dir,
               const std::string& input_dir) {
    Logger log(config.quiet);
    fs::path biased_dir = fs::path(pairs_dir) / "biased";
    fs::path unbiased_dir = fs::path(pairs_dir) / "unbiased";
    if (!fs::is_directory(biased_dir) || !fs::is_directory(unbiased_dir))
        throw ConfigError("pairs directory must contain 'biased/' and 'unbiased/' subdirectories");

    std::vector<fs::path> biased_files = list_bvh_files(biased_dir.string());
    if (biased_files.empty()) throw ConfigError("no BVH pairs found in " + pairs_dir);

    std::optional<Corpus> corpus;
    if (config.debias.per_class) {
        if (config.manifest_path.empty())
            throw ConfigError("debias.per_class requires 'manifest' in the config");
        corpus = load_corpus(config.manifest_path);
    }

    // grouped by action class; pooled fit uses the single "" group
    std::map<std::string, std::vector<TrainingPair>> groups;
    Skeleton skeleton;
    bool have_skeleton = false;
    for (const fs::path& bf : biased_files) {
        fs::path uf = unbiased_dir / bf.filename();
        if (!fs::exists(uf))
            throw ConfigError("pair file missing: " + uf.string());
        auto [bs, bm] = read_bvh_file(bf.string());
        auto [us, um] = read_bvh_file(uf.string());
        if (!have_skeleton) {
            skeleton = bs;
            have_skeleton = true;
        }
        if (!skeletons_match(skeleton, bs) || !skeletons_match(skeleton, us))
            throw std::runtime_error("pair '" + bf.filename().string() +
                                     "' does not match the pair-set skeleton");
        if (bm.frames.size() != um.frames.size())
            throw std::runtime_error("pair '" + bf.filename().string() +
                                     "' is not framewise aligned (" +
                                     std::to_string(bm.frames.size()) + " vs " +
                                     std::to_string(um.frames.size()) + " frames)");
        std::string group;
        if (config.debias.per_class) {
            group = action_for_stem(*corpus, bf.stem().string());
            if (group.empty())
                throw ConfigError("cannot resolve an action class for pair '" +
                                  bf.filename().string() + "'");
        }
        groups[group].push_back({std::move(bm), std::move(um)});
    }

    ensure_dir(config.out_dir);
    DebiasFitOptions options;
    options.kind = config.debias.kind;
    options.lambda = config.debias.lambda;
    options.hidden = config.debias.hidden;
    options.epochs = config.debias.epochs;
    options.seed = config.seed_set ? config.seed : 0;

    auto mean_pair_error = [](const std::vector<TrainingPair>& pairs, const DebiasModel* model) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const TrainingPair& p : pairs)
            for (std::size_t f = 0; f < p.biased.frames.size(); ++f) {
                std::vector<double> x = pose_to_vector(p.biased.frames[f]);
                std::vector<double> y = pose_to_vector(p.unbiased.frames[f]);
                if (model) x = model->apply(x);
                sum += std::sqrt(kernels::sum_sq_diff(x.data(), y.data(), x.size()));
                ++count;
            }
        return sum / static_cast<double>(count);
    };

    std::map<std::string, DebiasModel> models;
    for (auto& [group, pairs] : groups) {
        auto start = std::chrono::steady_clock::now();
        DebiasFitResult fit = fit_debias(pairs, options);
        std::string model_name = group.empty() ? "debias_model.json" : "debias_model_" + group + ".json";
        fit.model.save((fs::path(config.out_dir) / model_name).string());
        log.line("debias fit" + (group.empty() ? std::string{} : " [" + group + "]") + ": mean frame error " +
                 fmt(mean_pair_error(pairs, nullptr)) + " -> " +
                 fmt(mean_pair_error(pairs, &fit.model)) + " on " +
                 std::to_string(pairs.size()) + " pairs in " + fmt(ms_since(start)) + " ms");
        models[group] = std::move(fit.model);
    }

    std::vector<fs::path> inputs = list_bvh_files(input_dir);
    std::atomic<int> soft_failures{0};
    parallel_for(static_cast<int>(inputs.size()), config.jobs, [&](int i) {
        auto start = std::chrono::steady_clock::now();
        std::string name = inputs[i].filename().string();
        try {
            auto [skel, motion] = read_bvh_file(inputs[i].string());
            if (!skeletons_match(skeleton, skel))
                throw std::runtime_error("skeleton does not match the pair-set skeleton");
            const DebiasModel* model;
            if (config.debias.per_class) {
                std::string group = action_for_stem(*corpus, inputs[i].stem().string());
                auto it = models.find(group);
                if (group.empty() || it == models.end())
                    throw std::runtime_error("no per-class model for '" + name + "'");
                model = &it->second;
            } else {
                model = &models.at("");
            }
            Motion out = apply_debias(*model, motion);
            write_bvh_file((fs::path(config.out_dir) / name).string(), skeleton, out);
            log.line("debiased " + name + " in " + fmt(ms_since(start)) + " ms");
        } catch (const std::exception& e) {
            ++soft_failures;
            log.line("FAILED " + name + ": " + e.what());
        }
    });
    log.line("debias: " + std::to_string(inputs.size() - soft_failures) + " motions written, " +
             std::to_string(soft_failures.load()) + " failed");
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate

int cmd_evaluate(const PipelineConfig& config, const std::string& test_dir,
                 const std::string& candidate_dir) {
    Logger log(config.quiet);
    std::vector<fs::path> test_files = list_bvh_files(test_dir);
    std::vector<fs::path> cand_files = list_bvh_files(candidate_dir);
    if (test_files.empty() || cand_files.empty())
        throw ConfigError("evaluate requires non-empty test and candidate directories");

    Skeleton skeleton;
    bool have_skeleton = false;
    auto load_set = [&](const std::vector<fs::path>& files, std::vector<Motion>& motions,
                        std::vector<std::string>& ids) {
        for (const fs::path& f : files) {
            auto [skel, motion] = read_bvh_file(f.string());
            if (!have_skeleton) {
                skeleton = skel;
                have_skeleton = true;
            } else if (!skeletons_match(skeleton, skel)) {
                throw std::runtime_error("skeleton mismatch in '" + f.string() + "'");
            }
            motions.push_back(std::move(motion));
            ids.push_back(f.stem().string());
        }
    };
    std::vector<Motion> test_set, cand_set;
    std::vector<std::string> test_ids, cand_ids;
    load_set(test_files, test_set, test_ids);
    load_set(cand_files, cand_set, cand_ids);

    auto start = std::chrono::steady_clock::now();
    MetricReport metrics = score_sets(test_set, cand_set, skeleton, config.metrics.bandwidth);
    log.line("evaluate: min_dtw " + fmt(metrics.min_dtw) + ", mmd " + fmt(metrics.mmd) +
             " over " + std::to_string(test_set.size()) + "x" + std::to_string(cand_set.size()) +
             " motions in " + fmt(ms_since(start)) + " ms");

    ensure_dir(config.out_dir);
    std::string csv =
        "metric,value\nmin_dtw," + fmt(metrics.min_dtw) + "\nmmd," + fmt(metrics.mmd) + "\n";
    write_text((fs::path(config.out_dir) / "evaluation.csv").string(), csv);

    std::string per_test = "test_id,nearest_candidate,dtw\n";
    json per_test_json = json::array();
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        per_test += test_ids[i] + "," + cand_ids[metrics.nearest[i]] + "," +
                    fmt(metrics.per_test[i]) + "\n";
        per_test_json.push_back({{"test_id", test_ids[i]},
                                 {"nearest_candidate", cand_ids[metrics.nearest[i]]},
                                 {"dtw", metrics.per_test[i]}});
    }
    write_text((fs::path(config.out_dir) / "evaluation_per_test.csv").string(), per_test);

    json report{{"min_dtw", metrics.min_dtw},
                {"mmd", metrics.mmd},
                {"per_test", std::move(per_test_json)}};
    write_text((fs::path(config.out_dir) / "evaluation.json").string(), report.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const PipelineConfig& config, const std::string& input_dir) {
    Logger log(config.quiet);
    std::vector<fs::path> files = list_bvh_files(input_dir);
    ensure_dir(config.out_dir);

    json report = json::array();
    std::string csv = "file,flags\n";
    for (const fs::path& f : files) {
        auto start = std::chrono::steady_clock::now();
        std::string name = f.filename().string();
        try {
            auto [skel, motion] = read_bvh_file(f.string());
            std::vector<Diagnostic> diags = validate_plausibility(skel, motion, config.thresholds);
            report.push_back({{"file", name}, {"diagnostics", diagnostics_to_json(diags)}});
            csv += name + "," + std::to_string(diags.size()) + "\n";
            log.line("validated " + name + " (" + std::to_string(diags.size()) + " flags) in " +
                     fmt(ms_since(start)) + " ms");
        } catch (const std::exception& e) {
            report.push_back({{"file", name}, {"error", e.what()}});
            csv += name + ",error\n";
            log.line("FAILED " + name + ": " + e.what());
        }
    }
    write_text((fs::path(config.out_dir) / "validation.json").string(), report.dump(2) + "\n");
    write_text((fs::path(config.out_dir) / "validation.csv").string(), csv);
    return 0;
}

// ---------------------------------------------------------------------------
// resample

int cmd_resample(const PipelineConfig& config, const std::string& input_dir, double target_hz,
                 std::optional<double> warp_scale) {
    if (!(target_hz > 0.0)) throw ConfigError("resample rate must be positive");
    Logger log(config.quiet);
    std::vector<fs::path> files = list_bvh_files(input_dir);
    ensure_dir(config.out_dir);

    std::atomic<int> soft_failures{0};
    parallel_for(static_cast<int>(files.size()), config.jobs, [&](int i) {
        auto start = std::chrono::steady_clock::now();
        std::string name = files[i].filename().string();
        try {
            auto [skel, motion] = read_bvh_file(files[i].string());
            Motion out = resample(skel, motion, target_hz);
            if (warp_scale) out = time_warp(skel, out, *warp_scale, config.time_warp.bounds);
            write_bvh_file((fs::path(config.out_dir) / name).string(), skel, out);
            log.line("resampled " + name + " (" + std::to_string(motion.frame_count()) + " -> " +
                     std::to_string(out.frame_count()) + " frames) in " + fmt(ms_since(start)) +
                     " ms");
        } catch (const std::exception& e) {
            ++soft_failures;
            log.line("FAILED " + name + ": " + e.what());
        }
    });
    return 0;
}

}  // namespace mforge
