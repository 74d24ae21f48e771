#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "motionforge/bvh.hpp"

namespace mforge {

/// Full pose vector for regression: (root translation, joint angles).
std::vector<double> pose_to_vector(const Pose& pose);
Pose vector_to_pose(std::span<const double> v);

enum class DebiasKind { affine, one_hidden_layer };

/// Framewise map from correction-biased poses back to unbiased poses.
/// Affine: y = W x + b, fitted by closed-form ridge regression on centered
/// frames. One-hidden-layer: y = W2 relu(W1 x + b1) + b2 on standardized
/// frames, trained by full-batch gradient descent with backtracking.
struct DebiasModel {
    DebiasKind kind = DebiasKind::affine;
    std::size_t dim = 0;
    std::size_t hidden = 0;
    double training_lambda = 0.0;

    // affine parameters (weight: dim x dim, row-major)
    std::vector<double> weight, bias;

    // one-hidden-layer parameters
    std::vector<double> w1, b1;  // hidden x dim, hidden
    std::vector<double> w2, b2;  // dim x hidden, dim
    std::vector<double> x_mean, x_std, y_mean, y_std;

    std::vector<double> apply(std::span<const double> x) const;

    void save(const std::string& path) const;
    static DebiasModel load(const std::string& path);
};

struct TrainingPair {
    Motion biased;    // imitation output of an original motion
    Motion unbiased;  // the original
};

struct DebiasFitOptions {
    DebiasKind kind = DebiasKind::affine;
    double lambda = 1e-6;
    std::size_t hidden = 512;
    int epochs = 200;
    double initial_step = 0.1;
    std::uint64_t seed = 0;
};

struct DebiasFitResult {
    DebiasModel model;
    std::vector<double> loss_trace;  // accepted-step losses (iterative kind only)
};

DebiasFitResult fit_debias(const std::vector<TrainingPair>& pairs, const DebiasFitOptions& options);

Motion apply_debias(const DebiasModel& model, const Motion& motion);

/// Mean-squared-error loss of the one-hidden-layer model on (X, Y) frames
/// and its analytic gradient, in parameter order (w1, b1, w2, b2).
double hidden_layer_loss(const DebiasModel& model, const std::vector<std::vector<double>>& x,
                         const std::vector<std::vector<double>>& y,
                         std::vector<double>* gradient = nullptr);

/// Compares the analytic gradient against central finite differences
/// (step 1e-5) on the given frames; returns the largest relative error.
double gradient_check(const DebiasModel& model, const std::vector<std::vector<double>>& x,
                      const std::vector<std::vector<double>>& y);

}  // namespace mforge
