#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "motionforge/bvh.hpp"
#include "motionforge/debias.hpp"
#include "motionforge/ik_augment.hpp"
#include "motionforge/metrics.hpp"
#include "motionforge/physics.hpp"

namespace mforge {

/// Invalid or incomplete configuration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ControllerConfig {
    double dt = 1.0 / 300.0;
    int substeps = 10;
    double inertia = 1.0;
    double kp = 300.0, kd = 30.0;
    double torque_limit = 200.0;
    double root_mass = 60.0;
    double root_kp = 500.0, root_kd = 50.0;
    double residual_force_limit = 300.0;
    double ground_height = 0.0;
    double root_ground_clearance = 0.0;
    RewardWeights reward;
};

struct MetricsConfig {
    std::optional<double> bandwidth;                  // MMD kernel bandwidth; median heuristic when unset
    std::vector<double> horizons_ms{100.0, 200.0, 400.0};
};

struct DebiasConfig {
    DebiasKind kind = DebiasKind::affine;
    double lambda = 1e-6;
    std::size_t hidden = 512;
    int epochs = 200;
    bool per_class = false;
};

struct SynthesisConfig {
    bool ik = true;
    bool latent = false;
    std::string embeddings_path;  // required when latent synthesis is enabled
    std::string decoder_path;
    int n_clusters = 3;
    int n_samples = 2;
};

struct TimeWarpConfig {
    bool enabled = false;
    std::array<double, 2> bounds{0.9, 1.1};
};

struct PipelineConfig {
    std::string manifest_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;  // a seed must be given explicitly; there is no wall-clock default
    int multiplier = 10;
    int jobs = 1;
    bool quiet = false;
    std::string end_effector;  // chain end joint name; empty = parent of the first end site

    IkParams ik;
    SynthesisConfig synthesis;
    std::map<std::string, TargetSamplingSpace> sampling_spaces;
    TimeWarpConfig time_warp;
    ControllerConfig controller;
    PlausibilityThresholds thresholds;
    MetricsConfig metrics;
    DebiasConfig debias;
};

/// Kick/punch/walk presets for the cylindrical target sampling spaces.
std::map<std::string, TargetSamplingSpace> default_sampling_spaces();

/// Parses and validates a config file. Unknown keys fail fast.
PipelineConfig load_config(const std::string& path);

struct CorpusEntry {
    std::string id;
    std::string path;    // resolved, absolute or manifest-relative
    std::string action;
    std::string split;   // "train" or "test"
    Motion motion;
};

struct Corpus {
    Skeleton skeleton;
    std::vector<CorpusEntry> entries;

    std::vector<const CorpusEntry*> split(const std::string& name) const;
};

/// Loads every motion listed in a corpus manifest and checks that all files
/// share one skeleton.
Corpus load_corpus(const std::string& manifest_path);

// Commands return a process exit code: 0 on success (soft per-file failures
// are reported but do not fail the batch), 1 on fatal errors. Configuration
// problems throw ConfigError.
int cmd_augment(const PipelineConfig& config);
int cmd_correct(const PipelineConfig& config, const std::string& input_dir);
int cmd_debias(const PipelineConfig& config, const std::string& pairs_dir,
               const std::string& input_dir);
int cmd_evaluate(const PipelineConfig& config, const std::string& test_dir,
                 const std::string& candidate_dir);
int cmd_validate(const PipelineConfig& config, const std::string& input_dir);
int cmd_resample(const PipelineConfig& config, const std::string& input_dir, double target_hz,
                 std::optional<double> warp_scale);

}  // namespace mforge
