#pragma once

#include <array>
#include <vector>

#include "motionforge/kinematics.hpp"
#include "motionforge/rng.hpp"

namespace mforge {

/// Region of IK targets for a keyframe, expressed relative to the keyframe's
/// own cylindrical coordinates: multipliers on radius and height plus an
/// additive azimuth offset.
struct TargetSamplingSpace {
    std::array<double, 2> radial_range{1.0, 1.0};
    std::array<double, 2> height_range{1.0, 1.0};
    std::array<double, 2> angle_range{0.0, 0.0};  // radians, within (-pi, pi]

    void validate() const;
};

/// The frame where the chain end effector is farthest from the root,
/// measured in the root's per-frame local frame, plus that position in
/// cylindrical coordinates (r = horizontal radius from the root's local
/// vertical axis, h = height above the root, theta = azimuth from local +X
/// toward local +Z).
struct KeyframeInfo {
    int t_key = 0;
    Vec3 p_key;          // world end-effector position at t_key
    double r = 0.0, h = 0.0, theta = 0.0;
    Vec3 root_position;  // world root frame at t_key
    Mat3 root_rotation;
};

KeyframeInfo detect_keyframe(const Skeleton& skeleton, const Motion& motion,
                             const IkChain& chain);

/// Uniform draw from the sampling space, returned as a world position at the
/// keyframe. A degenerate space ([1,1], [1,1], zero offsets) returns p_key.
Vec3 sample_target(const TargetSamplingSpace& space, const KeyframeInfo& key, Rng& rng);

/// Per-frame IK targets: the keyframe displacement decays linearly to zero
/// toward both ends of the motion. propagation_weight(t_key, t, T) is the
/// decay factor f with f(t_key) = 1 and f = 0 at both endpoints.
double propagation_weight(int t_key, int t, int frame_count);
std::vector<Vec3> propagate_targets(const std::vector<Vec3>& end_effector_traj, int t_key,
                                    const Vec3& p_sample);

struct IkSynthesisResult {
    Motion motion;
    int t_key = 0;
    Vec3 sampled_target;
    bool target_reachable = true;
    double keyframe_error = 0.0;  // end-effector distance to the sampled target at t_key
};

/// Full single-motion synthesis: keyframe detection, target sampling, linear
/// propagation, and per-frame IK. Deterministic for a fixed rng state.
IkSynthesisResult synthesize_ik_motion(const Skeleton& skeleton, const Motion& motion,
                                       const IkChain& chain, const TargetSamplingSpace& space,
                                       Rng& rng, const IkParams& params = {});

}  // namespace mforge
