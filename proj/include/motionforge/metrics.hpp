#pragma once

#include <optional>
#include <vector>

#include "motionforge/bvh.hpp"

namespace mforge {

/// Distance between two poses: Euclidean norm of the wrapped per-channel
/// angle differences over all non-root joints. Root translation and root
/// rotation are excluded.
double frame_distance(const Pose& a, const Pose& b, const Skeleton& skeleton);

struct DistanceMatrix {
    int rows = 0, cols = 0;
    std::vector<double> values;  // row-major

    double operator()(int i, int j) const { return values[i * cols + j]; }
};

DistanceMatrix distance_matrix(const Motion& a, const Motion& b, const Skeleton& skeleton);

/// Classic dynamic-time-warping distance with match/insert/delete steps and
/// no warping window; local cost is frame_distance.
double dtw(const Motion& a, const Motion& b, const Skeleton& skeleton);

struct MinDtwResult {
    double mean = 0.0;                // arithmetic mean over test motions
    std::vector<double> per_test;     // minimum DTW per test motion
    std::vector<int> nearest;         // index of the closest candidate per test motion
};

/// For each test motion, the DTW distance to its closest candidate.
MinDtwResult min_dtw(const std::vector<Motion>& test_set, const std::vector<Motion>& synth_set,
                     const Skeleton& skeleton);

/// Biased (V-statistic) squared-MMD estimate with a Gaussian kernel over DTW
/// distances. Without an explicit bandwidth, sigma is the median of all
/// pairwise DTW distances across the pooled sets; if that median is zero the
/// call fails and an explicit bandwidth is required.
double mmd(const std::vector<Motion>& set_a, const std::vector<Motion>& set_b,
           const Skeleton& skeleton, std::optional<double> bandwidth = std::nullopt);

struct MetricReport {
    double min_dtw = 0.0;
    double mmd = 0.0;
    std::vector<double> per_test;  // minimum DTW per test motion
    std::vector<int> nearest;      // closest candidate per test motion
};

/// min_dtw and mmd of a candidate set against a test set, in one pass.
MetricReport score_sets(const std::vector<Motion>& test_set,
                        const std::vector<Motion>& candidate_set, const Skeleton& skeleton,
                        std::optional<double> bandwidth = std::nullopt);

/// Per-horizon mean of framewise distances between prediction and ground
/// truth, from the first frame up to each horizon (milliseconds).
std::vector<double> prediction_error(const Motion& predicted, const Motion& ground_truth,
                                     const Skeleton& skeleton,
                                     const std::vector<double>& horizons_ms);

}  // namespace mforge
