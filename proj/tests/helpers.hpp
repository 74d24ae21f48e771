#pragma once

// Shared fixtures for the test suites: small synthetic skeletons and motions.

#include <cmath>
#include <string>
#include <vector>

#include "motionforge/bvh.hpp"
#include "motionforge/math3d.hpp"
#include "motionforge/rng.hpp"

namespace testutil {

using namespace mforge;

inline Joint make_root(const std::string& name = "root") {
    Joint j;
    j.name = name;
    j.channels = {Channel::Xpos, Channel::Ypos, Channel::Zpos,
                  Channel::Zrot, Channel::Xrot, Channel::Yrot};
    return j;
}

inline Joint make_joint(const std::string& name, int parent, Vec3 offset) {
    Joint j;
    j.name = name;
    j.parent = parent;
    j.offset = offset;
    j.channels = {Channel::Zrot, Channel::Xrot, Channel::Yrot};
    return j;
}

inline Joint make_end_site(const std::string& name, int parent, Vec3 offset) {
    Joint j;
    j.name = name;
    j.parent = parent;
    j.offset = offset;
    j.is_end_effector = true;
    return j;
}

/// root -> link1 -> ... -> linkN -> end site, all bones along +X.
/// Chain joints rotate about their declared ZXY channels.
inline Skeleton chain_skeleton(const std::vector<double>& bone_lengths) {
    Skeleton s;
    s.joints.push_back(make_root());
    int parent = 0;
    for (std::size_t i = 0; i < bone_lengths.size(); ++i) {
        Vec3 offset = i == 0 ? Vec3{0, 0, 0} : Vec3{bone_lengths[i - 1], 0, 0};
        s.joints.push_back(make_joint("link" + std::to_string(i + 1), parent, offset));
        parent = static_cast<int>(s.joints.size()) - 1;
    }
    s.joints.push_back(make_end_site("tip", parent, {bone_lengths.back(), 0, 0}));
    s.finalize();
    return s;
}

inline Pose zero_pose(const Skeleton& s) {
    Pose p;
    p.joint_angles.assign(s.angle_count(), 0.0);
    return p;
}

/// Small biped-ish rig: root with one leg (hip/knee/foot + toe end site) and
/// a torso with a head end site. Used by the augmentation and physics tests.
inline Skeleton biped_skeleton() {
    Skeleton s;
    s.joints.push_back(make_root());                                     // 0
    s.joints.push_back(make_joint("hip", 0, {0.1, -0.05, 0.0}));         // 1
    s.joints.push_back(make_joint("knee", 1, {0.0, -0.4, 0.0}));         // 2
    s.joints.push_back(make_joint("foot", 2, {0.0, -0.4, 0.0}));         // 3
    s.joints.push_back(make_end_site("foot_end", 3, {0.0, -0.05, 0.12}));     // 4
    s.joints.push_back(make_joint("torso", 0, {0.0, 0.25, 0.0}));        // 5
    s.joints.push_back(make_end_site("torso_end", 5, {0.0, 0.25, 0.0}));      // 6
    s.finalize();
    return s;
}

/// A kick: the leg swings forward (hip rotation about X) and back, with the
/// apex mid-motion. Root stands at standing height.
inline Motion kick_motion(const Skeleton& biped, int frames = 21, double height = 0.95) {
    Motion m;
    m.frame_time = 1.0 / 30.0;
    m.action_label = "kick";
    int hip = biped.find_joint("hip");
    int knee = biped.find_joint("knee");
    for (int t = 0; t < frames; ++t) {
        Pose p = zero_pose(biped);
        p.root_translation = {0.0, height, 0.0};
        double phase = static_cast<double>(t) / (frames - 1);            // 0..1
        double swing = std::sin(phase * kPi);                            // 0 at ends, 1 mid
        // hip rotates about X so the foot swings toward +Z and up; the knee
        // unfolds toward the apex but keeps a slight bend so IK has slack
        p.joint_angles[biped.angle_offset[hip] + 1] = -swing * 1.2;
        p.joint_angles[biped.angle_offset[knee] + 1] = 1.5 - 0.7 * swing;
        m.frames.push_back(p);
    }
    return m;
}

inline Motion random_motion(const Skeleton& s, int frames, Rng& rng, double amplitude = 0.5) {
    Motion m;
    m.frame_time = 1.0 / 30.0;
    for (int t = 0; t < frames; ++t) {
        Pose p = zero_pose(s);
        p.root_translation = {rng.uniform(-1, 1), rng.uniform(0, 2), rng.uniform(-1, 1)};
        for (double& a : p.joint_angles) a = rng.uniform(-amplitude, amplitude);
        m.frames.push_back(p);
    }
    return m;
}

/// Random skeleton for fuzzing: a tree of 1..max_joints articulated joints,
/// random channel orders, each leaf closed with an end site.
inline Skeleton random_skeleton(Rng& rng, int max_joints = 8) {
    Skeleton s;
    Joint root = make_root();
    // random rotation-channel order for the root
    std::vector<Channel> rots = {Channel::Xrot, Channel::Yrot, Channel::Zrot};
    for (int i = 2; i > 0; --i) std::swap(rots[i], rots[rng.uniform_index(i + 1)]);
    root.channels = {Channel::Xpos, Channel::Ypos, Channel::Zpos, rots[0], rots[1], rots[2]};
    s.joints.push_back(root);

    int n = 1 + static_cast<int>(rng.uniform_index(max_joints));
    for (int i = 0; i < n; ++i) {
        int parent = static_cast<int>(rng.uniform_index(s.joints.size()));
        Joint j = make_joint("j" + std::to_string(i), parent,
                             {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
        for (int k = 2; k > 0; --k) std::swap(rots[k], rots[rng.uniform_index(k + 1)]);
        j.channels = {rots[0], rots[1], rots[2]};
        s.joints.push_back(j);
    }
    // close every leaf with an end site
    std::vector<bool> has_child(s.joints.size(), false);
    for (const Joint& j : s.joints)
        if (j.parent) has_child[*j.parent] = true;
    std::size_t leaf_count = s.joints.size();
    for (std::size_t i = 0; i < leaf_count; ++i)
        if (!has_child[i])
            s.joints.push_back(make_end_site(s.joints[i].name + "_end", static_cast<int>(i),
                                             {rng.uniform(-1, 1), rng.uniform(-1, 1),
                                              rng.uniform(-1, 1)}));
    s.finalize();
    return s;
}

inline Motion random_fuzz_motion(const Skeleton& s, Rng& rng) {
    int frames = 1 + static_cast<int>(rng.uniform_index(12));
    Motion m;
    m.frame_time = rng.uniform(0.005, 0.05);
    for (int t = 0; t < frames; ++t) {
        Pose p = zero_pose(s);
        p.root_translation = {rng.uniform(-100, 100), rng.uniform(-100, 100),
                              rng.uniform(-100, 100)};
        for (double& a : p.joint_angles) a = deg_to_rad(rng.uniform(-360, 360));
        m.frames.push_back(p);
    }
    return m;
}

}  // namespace testutil
