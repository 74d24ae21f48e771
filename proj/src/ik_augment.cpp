#include "motionforge/ik_augment.hpp"

#include <cmath>
#include <stdexcept>

namespace mforge {

void TargetSamplingSpace::validate() const {
    auto ordered = [](const std::array<double, 2>& r) { return r[0] <= r[1]; };
    if (!ordered(radial_range) || !ordered(height_range) || !ordered(angle_range))
        throw std::runtime_error("sampling-space range has lo > hi");
    if (angle_range[0] <= -kPi || angle_range[1] > kPi)
        throw std::runtime_error("sampling-space angle offsets must lie within (-pi, pi]");
}

KeyframeInfo detect_keyframe(const Skeleton& skeleton, const Motion& motion,
                             const IkChain& chain) {
    if (motion.frames.empty()) throw std::runtime_error("cannot detect keyframe of empty motion");
    int ee = chain.end_effector();
    int root = skeleton.root_index;

    KeyframeInfo best;
    double best_dist = -1.0;
    for (int t = 0; t < motion.frame_count(); ++t) {
        FkState fk = fk_full(skeleton, motion.frames[t]);
        Vec3 local = fk.rotations[root].transposed() * (fk.positions[ee] - fk.positions[root]);
        double dist = local.norm();
        if (dist > best_dist) {
            best_dist = dist;
            best.t_key = t;
            best.p_key = fk.positions[ee];
            best.r = std::hypot(local.x, local.z);
            best.h = local.y;
            best.theta = std::atan2(local.z, local.x);
            best.root_position = fk.positions[root];
            best.root_rotation = fk.rotations[root];
        }
    }
    if (best.r < 1e-9)
        throw std::runtime_error("degenerate keyframe: end effector on the root's vertical axis");
    return best;
}

Vec3 sample_target(const TargetSamplingSpace& space, const KeyframeInfo& key, Rng& rng) {
    space.validate();
    if (!(key.r > 0.0)) throw std::runtime_error("keyframe radius must be positive");

    double r = key.r * rng.uniform(space.radial_range[0], space.radial_range[1]);
    double h = key.h * rng.uniform(space.height_range[0], space.height_range[1]);
    double theta = key.theta + rng.uniform(space.angle_range[0], space.angle_range[1]);

    Vec3 local{r * std::cos(theta), h, r * std::sin(theta)};
    return key.root_position + key.root_rotation * local;
}

double propagation_weight(int t_key, int t, int frame_count) {
    if (t == t_key) return 1.0;
    if (t < t_key) return static_cast<double>(t) / static_cast<double>(t_key);
    return static_cast<double>(frame_count - 1 - t) / static_cast<double>(frame_count - 1 - t_key);
}

std::vector<Vec3> propagate_targets(const std::vector<Vec3>& end_effector_traj, int t_key,
                                    const Vec3& p_sample) {
    int T = static_cast<int>(end_effector_traj.size());
    if (t_key < 0 || t_key >= T) throw std::runtime_error("keyframe index out of range");

    Vec3 diff = p_sample - end_effector_traj[t_key];
    std::vector<Vec3> targets(T);
    for (int t = 0; t < T; ++t)
        targets[t] = end_effector_traj[t] + diff * propagation_weight(t_key, t, T);
    return targets;
}

IkSynthesisResult synthesize_ik_motion(const Skeleton& skeleton, const Motion& motion,
                                       const IkChain& chain, const TargetSamplingSpace& space,
                                       Rng& rng, const IkParams& params) {
    KeyframeInfo key = detect_keyframe(skeleton, motion, chain);
    Vec3 target = sample_target(space, key, rng);

    std::vector<Vec3> traj(motion.frame_count());
    std::vector<Vec3> bases(motion.frame_count());
    for (int t = 0; t < motion.frame_count(); ++t) {
        FkState fk = fk_full(skeleton, motion.frames[t]);
        traj[t] = fk.positions[chain.end_effector()];
        bases[t] = fk.positions[chain.joint_indices.front()];
    }
    std::vector<Vec3> targets = propagate_targets(traj, key.t_key, target);

    IkSynthesisResult result;
    result.t_key = key.t_key;
    result.sampled_target = target;
    result.target_reachable =
        (target - bases[key.t_key]).norm() <= chain.total_reach() + params.tolerance;

    result.motion.frame_time = motion.frame_time;
    result.motion.action_label = motion.action_label;
    result.motion.frames.reserve(motion.frames.size());
    for (int t = 0; t < motion.frame_count(); ++t)
        result.motion.frames.push_back(
            ik_frame(skeleton, motion.frames[t], chain, targets[t], params));

    FkState key_fk = fk_full(skeleton, result.motion.frames[key.t_key]);
    result.keyframe_error = (key_fk.positions[chain.end_effector()] - target).norm();
    return result;
}

}  // namespace mforge
