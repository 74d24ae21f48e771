#pragma once

#include <vector>

#include "motionforge/bvh.hpp"
#include "motionforge/math3d.hpp"

namespace mforge {

/// World-space joint positions, one per skeleton joint.
struct JointPositions {
    std::vector<Vec3> positions;
};

/// Full forward-kinematics state: world positions plus world rotations.
struct FkState {
    std::vector<Vec3> positions;
    std::vector<Mat3> rotations;  // end sites inherit the parent rotation
};

/// Composes per-joint channel rotations and offsets from root to leaves.
/// Root translation is added as the final step, so positions are exactly
/// translation-equivariant in Pose::root_translation.
FkState fk_full(const Skeleton& skeleton, const Pose& pose);
JointPositions forward_kinematics(const Skeleton& skeleton, const Pose& pose);

/// A parent-to-child path through the skeleton ending at an end effector.
/// The base joint's position is fixed during IK; its orientation may change.
struct IkChain {
    std::vector<int> joint_indices;    // proximal to distal
    std::vector<double> bone_lengths;  // |offset| of each child along the path

    int end_effector() const { return joint_indices.back(); }
    double total_reach() const;
    void validate(const Skeleton& skeleton) const;
};

/// Path from the root to `end_joint`, excluding the root joint itself.
IkChain make_chain(const Skeleton& skeleton, int end_joint);
IkChain make_chain(const Skeleton& skeleton, const std::string& end_joint_name);

struct IkParams {
    double tolerance = 1e-4;
    int max_iters = 100;
};

struct FabrikResult {
    std::vector<Vec3> positions;
    int iterations = 0;
    double end_error = 0.0;
    std::vector<double> error_trace;  // end-effector error after each iteration
};

/// Forward-and-backward reaching IK on chain positions. The base position is
/// pinned and bone lengths are re-imposed by every pass. Unreachable targets
/// straighten the chain toward the target.
FabrikResult fabrik_solve(const IkChain& chain, const std::vector<Vec3>& initial_positions,
                          const Vec3& target, double tolerance = 1e-4, int max_iters = 100);

/// Rewrites the chain joints' angles in `reference_pose` so that forward
/// kinematics reproduces `solved_positions`. Each joint receives the minimal
/// rotation from its reference orientation that aligns its bone direction;
/// the antipodal case tie-breaks to the joint's local X axis. All off-chain
/// joints (and the chain end joint's own rotation) are left untouched.
Pose positions_to_pose(const Skeleton& skeleton, const IkChain& chain,
                       const std::vector<Vec3>& solved_positions, const Pose& reference_pose);

/// Single-frame IK: FABRIK on the chain extracted from `pose`, then angle
/// recovery. If the end effector is already within tolerance the pose is
/// returned unchanged.
Pose ik_frame(const Skeleton& skeleton, const Pose& pose, const IkChain& chain,
              const Vec3& target, const IkParams& params = {});

/// Chain joint positions pulled out of a full FK solve.
std::vector<Vec3> chain_positions(const IkChain& chain, const FkState& fk);

}  // namespace mforge
