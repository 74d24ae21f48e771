#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "motionforge/math3d.hpp"

namespace mforge {

enum class Channel { Xpos, Ypos, Zpos, Xrot, Yrot, Zrot };

bool is_rotation_channel(Channel c);
/// 0=X, 1=Y, 2=Z for both position and rotation channels.
int channel_axis(Channel c);
const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);

struct Joint {
    std::string name;
    std::optional<int> parent;   // absent for the root
    Vec3 offset;
    std::vector<Channel> channels;  // 6 for the root, 3 for joints, empty for end sites
    bool is_end_effector = false;

    bool articulated() const { return !channels.empty(); }
    /// Declared rotation axes in channel order (articulated joints only).
    std::array<int, 3> rotation_order() const;
};

struct Skeleton {
    std::vector<Joint> joints;   // topological order: parents precede children
    int root_index = 0;

    // Derived lookup tables, filled by finalize().
    std::vector<int> angle_offset;  // per joint: index into Pose::joint_angles, -1 for end sites
    int total_channels = 0;
    int articulated_joints = 0;

    /// Rebuilds derived fields and checks the structural invariants.
    /// Must be called after constructing or mutating `joints` by hand.
    void finalize();

    int angle_count() const { return 3 * articulated_joints; }
    std::vector<int> children_of(int joint) const;
    int find_joint(const std::string& name) const;  // -1 when absent
};

/// One frame: root translation plus per-joint Euler angles in radians,
/// three per articulated joint, each triple in that joint's channel order.
struct Pose {
    Vec3 root_translation;
    std::vector<double> joint_angles;
};

struct Motion {
    double frame_time = 1.0 / 30.0;  // seconds
    std::vector<Pose> frames;
    std::optional<std::string> action_label;

    int frame_count() const { return static_cast<int>(frames.size()); }
    double duration() const {
        return frames.empty() ? 0.0 : frame_time * static_cast<double>(frames.size() - 1);
    }
};

/// Checks Motion invariants against a skeleton (pose width, finiteness,
/// positive frame time). Throws std::runtime_error on violation.
void validate_motion(const Skeleton& skeleton, const Motion& motion);

/// Structural equality (names, parents, channels, end-effector flags) with
/// offsets compared to `offset_tol`.
bool skeletons_match(const Skeleton& a, const Skeleton& b, double offset_tol = 1e-6);

/// Parses a complete BVH document (HIERARCHY + MOTION). Angles are converted
/// from degrees to radians. Throws std::runtime_error with a description of
/// the first problem found.
std::pair<Skeleton, Motion> parse_bvh(const std::string& text);

/// Serializes to BVH text; radians back to degrees, 6-decimal fixed format.
std::string write_bvh(const Skeleton& skeleton, const Motion& motion);

std::pair<Skeleton, Motion> read_bvh_file(const std::string& path);
void write_bvh_file(const std::string& path, const Skeleton& skeleton, const Motion& motion);

/// Linear per-channel resampling to a new frame rate. Rotation channels use
/// shortest-arc interpolation. Output frame count is
/// floor(duration * target_hz) + 1, so duration is preserved within one
/// output frame. Requires at least two input frames.
Motion resample(const Skeleton& skeleton, const Motion& motion, double target_hz);

/// Temporal stretch/shrink: output has round(T * scale) frames covering the
/// same content with unchanged frame_time. `scale` must lie within `bounds`.
Motion time_warp(const Skeleton& skeleton, const Motion& motion, double scale,
                 std::array<double, 2> bounds = {0.9, 1.1});

}  // namespace mforge
