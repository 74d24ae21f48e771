#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "motionforge/pipeline.hpp"

using namespace mforge;

int main(int argc, char** argv) {
    CLI::App app{"motionforge: motion-capture augmentation, correction and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> jobs;
    bool quiet = false;
    app.add_option("--config", config_path, "pipeline config file (JSON)");
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--jobs", jobs, "worker threads (overrides the config)");
    app.add_flag("--quiet", quiet, "suppress per-motion log lines");

    CLI::App* augment = app.add_subcommand("augment", "synthesize augmented motions from the corpus manifest");

    std::string correct_in;
    CLI::App* correct = app.add_subcommand("correct", "physically correct motions via PD tracking");
    correct->add_option("input_dir", correct_in, "directory of BVH files")->required();

    std::string pairs_dir, debias_in;
    CLI::App* debias = app.add_subcommand("debias", "fit a debias model from pairs and apply it");
    debias->add_option("pairs_dir", pairs_dir, "directory with biased/ and unbiased/ subdirectories")->required();
    debias->add_option("input_dir", debias_in, "directory of BVH files to debias")->required();

    std::string test_dir, cand_dir;
    CLI::App* evaluate = app.add_subcommand("evaluate", "score a candidate corpus against a test set");
    evaluate->add_option("test_dir", test_dir, "directory of test BVH files")->required();
    evaluate->add_option("candidate_dir", cand_dir, "directory of candidate BVH files")->required();

    std::string validate_in;
    CLI::App* validate = app.add_subcommand("validate", "run plausibility checks on motions");
    validate->add_option("input_dir", validate_in, "directory of BVH files")->required();

    std::string resample_in;
    double target_hz = 30.0;
    std::optional<double> warp_scale;
    CLI::App* resample = app.add_subcommand("resample", "resample motions to a target frame rate");
    resample->add_option("input_dir", resample_in, "directory of BVH files")->required();
    resample->add_option("--hz", target_hz, "target frame rate")->required();
    resample->add_option("--warp", warp_scale, "optional temporal scale after resampling");

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig config;
        if (!config_path.empty()) {
            config = load_config(config_path);
        } else if (augment->parsed() || debias->parsed()) {
            throw ConfigError("this subcommand requires --config");
        }
        if (seed) {
            config.seed = *seed;
            config.seed_set = true;
        }
        if (out_dir) config.out_dir = *out_dir;
        if (jobs) config.jobs = *jobs;
        if (quiet) config.quiet = true;

        if (augment->parsed()) return cmd_augment(config);
        if (correct->parsed()) return cmd_correct(config, correct_in);
        if (debias->parsed()) return cmd_debias(config, pairs_dir, debias_in);
        if (evaluate->parsed()) return cmd_evaluate(config, test_dir, cand_dir);
        if (validate->parsed()) return cmd_validate(config, validate_in);
        if (resample->parsed()) return cmd_resample(config, resample_in, target_hz, warp_scale);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
