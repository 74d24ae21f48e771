#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "motionforge/bvh.hpp"
#include "motionforge/rng.hpp"

namespace mforge {

/// Per-motion Gaussian in latent space as produced by an external encoder.
struct LatentEmbedding {
    std::string motion_id;
    std::vector<double> mu;
    std::vector<double> sigma2;  // element-wise variances, strictly positive
};

void validate_embeddings(const std::vector<LatentEmbedding>& embeddings);

std::vector<LatentEmbedding> load_embeddings(const std::string& path);
void save_embeddings(const std::string& path, const std::vector<LatentEmbedding>& embeddings);

struct ClusterModel {
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignments;       // per embedding
    std::vector<double> sse_trace;      // within-cluster SSE after each Lloyd iteration
    std::size_t dim = 0;

    int cluster_count() const { return static_cast<int>(centroids.size()); }
    std::vector<int> members_of(int cluster) const;
};

/// k-means over embedding means: k-means++ seeding, Lloyd iterations until
/// the assignment fixpoint (at most 300), empty clusters re-seeded to the
/// point farthest from its current centroid.
ClusterModel kmeans_fit(const std::vector<LatentEmbedding>& embeddings, int n_c,
                        std::uint64_t seed);

/// One latent draw from a chosen cluster: average the (mu, sigma2) of n_s
/// members sampled uniformly without replacement (with replacement when the
/// cluster is smaller than n_s), then z = mu_bar + sigma_bar * eps.
std::vector<double> sample_from_cluster(const std::vector<LatentEmbedding>& embeddings,
                                        const ClusterModel& model, int cluster, int n_s,
                                        Rng& rng);

struct SnsDraw {
    std::vector<double> z;
    int cluster = 0;
};

/// Cluster chosen uniformly, then sample_from_cluster.
SnsDraw sample_near_samples(const std::vector<LatentEmbedding>& embeddings,
                            const ClusterModel& model, int n_s, Rng& rng);

/// Decodes latent vectors into motions. Implementations must be
/// deterministic per z.
class MotionDecoder {
public:
    virtual ~MotionDecoder() = default;
    virtual std::size_t latent_dim() const = 0;
    virtual Motion decode(std::span<const double> z) const = 0;
};

/// Reference decoder: frame f of the output is base_frames[f] + weight * z,
/// where each frame vector is (root translation, joint angles). Exercises
/// the sampling-to-decoding path without any learned model.
class LinearMotionDecoder final : public MotionDecoder {
public:
    LinearMotionDecoder(double frame_time, std::size_t pose_dim, std::size_t latent_dim,
                        std::vector<std::vector<double>> base_frames,
                        std::vector<double> weight /* pose_dim x latent_dim, row-major */);

    std::size_t latent_dim() const override { return latent_dim_; }
    std::size_t pose_dim() const { return pose_dim_; }
    Motion decode(std::span<const double> z) const override;

    static LinearMotionDecoder load(const std::string& path);
    void save(const std::string& path) const;

private:
    double frame_time_;
    std::size_t pose_dim_;
    std::size_t latent_dim_;
    std::vector<std::vector<double>> base_frames_;
    std::vector<double> weight_;
};

/// `count` independent sampling-near-samples draws decoded into motions.
/// Each draw uses a child seed split from `seed`, so results do not depend
/// on evaluation order. By default the (mu_bar, sigma2_bar) moments are
/// recomputed from a fresh member subset for every draw; with
/// `reuse_moments` one subset per cluster is drawn up front and all z draws
/// share those moments.
std::vector<Motion> generate_batch(const std::vector<LatentEmbedding>& embeddings,
                                   const MotionDecoder& decoder, int n_c, int n_s, int count,
                                   std::uint64_t seed, bool reuse_moments = false);

}  // namespace mforge
