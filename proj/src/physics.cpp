#include "motionforge/physics.hpp"

#include <cmath>
#include <stdexcept>

#include "motionforge/kernels.hpp"
#include "motionforge/kinematics.hpp"

namespace mforge {

std::vector<std::string> SimCharacter::validate() const {
    auto all_positive = [](const std::vector<double>& v) {
        for (double x : v)
            if (!(x > 0.0)) return false;
        return true;
    };
    if (inertia.size() != dof_count || kp.size() != dof_count || kd.size() != dof_count ||
        torque_limit.size() != dof_count)
        throw std::runtime_error("SimCharacter per-DOF array sizes disagree with dof_count");
    if (!all_positive(inertia) || !all_positive(kp) || !all_positive(kd) ||
        !all_positive(torque_limit))
        throw std::runtime_error("SimCharacter inertias, gains and limits must be positive");
    if (!(root_mass > 0.0) || !(root_kp > 0.0) || !(root_kd > 0.0) ||
        !(residual_force_limit > 0.0))
        throw std::runtime_error("SimCharacter root parameters must be positive");

    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < dof_count; ++i)
        if (kd[i] * kd[i] < 4.0 * kp[i] * inertia[i]) {
            warnings.push_back("underdamped gains on DOF " + std::to_string(i) +
                               " (kd^2 < 4*kp*I)");
            break;  // one warning is enough
        }
    return warnings;
}

SimCharacter SimCharacter::uniform(std::size_t dof_count, double inertia, double kp, double kd,
                                   double torque_limit) {
    SimCharacter c;
    c.dof_count = dof_count;
    c.inertia.assign(dof_count, inertia);
    c.kp.assign(dof_count, kp);
    c.kd.assign(dof_count, kd);
    c.torque_limit.assign(dof_count, torque_limit);
    return c;
}

SimCharacter character_for(const Skeleton& skeleton, double inertia, double kp, double kd,
                           double torque_limit) {
    return SimCharacter::uniform(static_cast<std::size_t>(skeleton.angle_count()), inertia, kp,
                                 kd, torque_limit);
}

std::vector<double> pd_torque(const std::vector<double>& q, const std::vector<double>& qdot,
                              const std::vector<double>& q_target,
                              const SimCharacter& character) {
    if (q.size() != character.dof_count || qdot.size() != character.dof_count ||
        q_target.size() != character.dof_count)
        throw std::runtime_error("pd_torque: dimension mismatch");
    std::vector<double> tau(character.dof_count);
    kernels::pd_torque(q.data(), qdot.data(), q_target.data(), character.kp.data(),
                       character.kd.data(), character.torque_limit.data(), tau.data(),
                       character.dof_count);
    return tau;
}

Vec3 pd_residual_force(const Vec3& root_pos, const Vec3& root_vel, const Vec3& goal_root_pos,
                       double kp, double kd, double limit) {
    if (!root_pos.finite() || !root_vel.finite() || !goal_root_pos.finite())
        throw std::runtime_error("pd_residual_force: non-finite input");
    Vec3 f = (goal_root_pos - root_pos) * kp - root_vel * kd;
    double mag = f.norm();
    if (mag > limit) f = f * (limit / mag);
    return f;
}

SimState sim_step(const SimCharacter& character, const SimState& state,
                  const std::vector<double>& torques, const Vec3& residual_force, double dt) {
    if (!(dt > 0.0) || dt > 0.01)
        throw std::runtime_error("sim_step: dt must lie in (0, 0.01]");
    if (state.q.size() != character.dof_count || state.qdot.size() != character.dof_count ||
        torques.size() != character.dof_count)
        throw std::runtime_error("sim_step: dimension mismatch");

    SimState next = state;
    for (std::size_t i = 0; i < character.dof_count; ++i) {
        next.qdot[i] += torques[i] / character.inertia[i] * dt;
        next.q[i] += next.qdot[i] * dt;
    }
    next.root_vel += (character.gravity + residual_force / character.root_mass) * dt;
    next.root_pos += next.root_vel * dt;

    double floor_y = character.ground_height + character.root_ground_clearance;
    if (next.root_pos.y < floor_y) {
        next.root_pos.y = floor_y;
        if (next.root_vel.y < 0.0) next.root_vel.y = 0.0;  // inelastic contact
    }
    next.time += dt;

    for (std::size_t i = 0; i < character.dof_count; ++i)
        if (!std::isfinite(next.q[i]) || !std::isfinite(next.qdot[i]))
            throw std::runtime_error("sim_step diverged on DOF " + std::to_string(i) + " at t=" +
                                     std::to_string(next.time));
    if (!next.root_pos.finite() || !next.root_vel.finite())
        throw std::runtime_error("sim_step diverged on the root at t=" + std::to_string(next.time));
    return next;
}

double imitation_reward(const std::vector<double>& sim_q, const std::vector<double>& goal_q,
                        const Vec3& sim_root, const Vec3& goal_root,
                        const RewardWeights& weights) {
    if (sim_q.size() != goal_q.size())
        throw std::runtime_error("imitation_reward: dimension mismatch");
    if (std::fabs(weights.w_pose + weights.w_root - 1.0) > 1e-9)
        throw std::runtime_error("imitation_reward: weights must sum to 1");

    double dq2 = kernels::sum_sq_wrapped_diff(sim_q.data(), goal_q.data(), sim_q.size());
    double droot2 = (sim_root - goal_root).norm2();
    return weights.w_pose * std::exp(-weights.a_pose * dq2) +
           weights.w_root * std::exp(-weights.a_root * droot2);
}

double normalized_reward(const RewardTrace& trace) {
    if (trace.r_im.empty() || trace.r_im.size() != trace.r_im_max.size())
        throw std::runtime_error("normalized_reward: empty or inconsistent trace");
    double sum = 0.0;
    for (std::size_t t = 0; t < trace.r_im.size(); ++t) {
        if (!(trace.r_im[t] > 0.0) || trace.r_im[t] > trace.r_im_max[t])
            throw std::runtime_error("normalized_reward: trace violates 0 < r <= r_max");
        sum += trace.r_im[t] / trace.r_im_max[t];
    }
    return sum / static_cast<double>(trace.r_im.size());
}

TrackResult track_motion(const SimCharacter& character, const Skeleton& skeleton,
                         const Motion& goal, double dt, int substeps,
                         const RewardWeights& weights) {
    validate_motion(skeleton, goal);
    if (goal.frames.empty()) throw std::runtime_error("track_motion: empty goal motion");
    if (substeps < 1) throw std::runtime_error("track_motion: substeps must be >= 1");
    if (std::fabs(dt * substeps - goal.frame_time) > 1e-9)
        throw std::runtime_error("track_motion: dt * substeps must equal the goal frame time");
    if (character.dof_count != static_cast<std::size_t>(skeleton.angle_count()))
        throw std::runtime_error("track_motion: character DOF count does not match skeleton");
    character.validate();

    SimState state;
    state.q = goal.frames.front().joint_angles;
    state.qdot.assign(character.dof_count, 0.0);
    state.root_pos = goal.frames.front().root_translation;
    state.root_vel = {};
    double floor_y = character.ground_height + character.root_ground_clearance;
    if (state.root_pos.y < floor_y) state.root_pos.y = floor_y;

    TrackResult result;
    result.rectified.frame_time = goal.frame_time;
    result.rectified.action_label = goal.action_label;
    result.rectified.frames.reserve(goal.frames.size());

    int clamp_frames = 0, saturated_frames = 0;
    for (int f = 0; f < goal.frame_count(); ++f) {
        const Pose& target = goal.frames[f];
        bool clamped = false, saturated = false;
        for (int s = 0; s < substeps; ++s) {
            std::vector<double> tau = pd_torque(state.q, state.qdot, target.joint_angles, character);
            Vec3 raw = (target.root_translation - state.root_pos) * character.root_kp -
                       state.root_vel * character.root_kd;
            if (raw.norm() > character.residual_force_limit) saturated = true;
            Vec3 force = pd_residual_force(state.root_pos, state.root_vel,
                                           target.root_translation, character.root_kp,
                                           character.root_kd, character.residual_force_limit);
            try {
                SimState next = sim_step(character, state, tau, force, dt);
                if (next.root_pos.y == floor_y) clamped = true;
                state = std::move(next);
            } catch (const std::exception& e) {
                throw std::runtime_error("track_motion diverged at frame " + std::to_string(f) +
                                         ": " + e.what());
            }
        }
        if (clamped) ++clamp_frames;
        if (saturated) ++saturated_frames;

        Pose rectified;
        rectified.root_translation = state.root_pos;
        rectified.joint_angles = state.q;
        result.rectified.frames.push_back(std::move(rectified));

        result.trace.r_im.push_back(imitation_reward(state.q, target.joint_angles,
                                                     state.root_pos, target.root_translation,
                                                     weights));
        result.trace.r_im_max.push_back(1.0);
    }

    if (clamp_frames > 0)
        result.diagnostics.push_back(
            {"ground_contact_clamp", 0, goal.frame_count() - 1, static_cast<double>(clamp_frames)});
    if (saturated_frames > 0)
        result.diagnostics.push_back({"residual_force_saturation", 0, goal.frame_count() - 1,
                                      static_cast<double>(saturated_frames)});
    return result;
}

// ---------------------------------------------------------------------------
// plausibility validation

namespace {

// Closest-distance between segments p1-q1 and p2-q2 (Ericson, Real-Time
// Collision Detection 5.1.9).
double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
    Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    double a = d1.norm2(), e = d2.norm2(), f = d2.dot(r);
    double s, t;
    const double eps = 1e-12;
    if (a <= eps && e <= eps) return r.norm();
    if (a <= eps) {
        s = 0.0;
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        double c = d1.dot(r);
        if (e <= eps) {
            t = 0.0;
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            double b = d1.dot(d2);
            double denom = a * e - b * b;
            s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

// Collapses a per-frame flag array plus magnitudes into frame-range records.
void emit_ranges(std::vector<Diagnostic>& out, const std::string& type,
                 const std::vector<double>& magnitude_per_frame) {
    int T = static_cast<int>(magnitude_per_frame.size());
    int start = -1;
    double mag = 0.0;
    for (int t = 0; t <= T; ++t) {
        bool flagged = t < T && magnitude_per_frame[t] > 0.0;
        if (flagged) {
            if (start < 0) start = t;
            mag = std::max(mag, magnitude_per_frame[t]);
        } else if (start >= 0) {
            out.push_back({type, start, t - 1, mag});
            start = -1;
            mag = 0.0;
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate_plausibility(const Skeleton& skeleton, const Motion& motion,
                                              const PlausibilityThresholds& thresholds) {
    validate_motion(skeleton, motion);
    if (motion.frames.empty()) throw std::runtime_error("validate_plausibility: empty motion");

    int T = motion.frame_count();
    std::size_t n_joints = skeleton.joints.size();

    std::vector<FkState> fk;
    fk.reserve(T);
    for (const Pose& p : motion.frames) fk.push_back(fk_full(skeleton, p));

    std::vector<Diagnostic> out;

    // ground penetration
    {
        std::vector<double> depth(T, 0.0);
        for (int t = 0; t < T; ++t)
            for (std::size_t j = 0; j < n_joints; ++j) {
                double pen = thresholds.ground_height - thresholds.ground_eps - fk[t].positions[j].y;
                if (pen > 0.0) depth[t] = std::max(depth[t], pen + thresholds.ground_eps);
            }
        emit_ranges(out, "ground_penetration", depth);
    }

    // footskate: end-effector joints translating horizontally while grounded
    {
        std::vector<int> feet;
        for (std::size_t j = 0; j < n_joints; ++j)
            if (skeleton.joints[j].is_end_effector) feet.push_back(static_cast<int>(j));

        std::vector<double> skate(T, 0.0);
        for (int t = 1; t < T; ++t)
            for (int j : feet) {
                const Vec3& a = fk[t - 1].positions[j];
                const Vec3& b = fk[t].positions[j];
                bool grounded = a.y < thresholds.ground_height + thresholds.contact_height &&
                                b.y < thresholds.ground_height + thresholds.contact_height;
                if (!grounded) continue;
                double speed = std::hypot(b.x - a.x, b.z - a.z) / motion.frame_time;
                if (speed > thresholds.max_foot_speed)
                    skate[t] = std::max(skate[t], speed);
            }
        emit_ranges(out, "footskate", skate);
    }

    // limb interpenetration between non-adjacent bone segments
    {
        struct Bone { int parent, child; };
        std::vector<Bone> bones;
        for (std::size_t j = 0; j < n_joints; ++j) {
            const Joint& joint = skeleton.joints[j];
            if (joint.parent && joint.offset.norm() > 1e-9)
                bones.push_back({*joint.parent, static_cast<int>(j)});
        }
        auto adjacent = [](const Bone& a, const Bone& b) {
            return a.parent == b.parent || a.parent == b.child || a.child == b.parent ||
                   a.child == b.child;
        };
        // bones linked through zero-length connector joints touch by
        // construction; treat coincident endpoints as adjacency too
        auto touching = [](const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1) {
            const double eps = 1e-9;
            return (a0 - b0).norm() < eps || (a0 - b1).norm() < eps ||
                   (a1 - b0).norm() < eps || (a1 - b1).norm() < eps;
        };

        std::vector<double> inter(T, 0.0);
        for (int t = 0; t < T; ++t)
            for (std::size_t i = 0; i < bones.size(); ++i)
                for (std::size_t k = i + 1; k < bones.size(); ++k) {
                    if (adjacent(bones[i], bones[k])) continue;
                    if (touching(fk[t].positions[bones[i].parent], fk[t].positions[bones[i].child],
                                 fk[t].positions[bones[k].parent], fk[t].positions[bones[k].child]))
                        continue;
                    double dist = segment_segment_distance(
                        fk[t].positions[bones[i].parent], fk[t].positions[bones[i].child],
                        fk[t].positions[bones[k].parent], fk[t].positions[bones[k].child]);
                    double overlap = 2.0 * thresholds.bone_radius - dist;
                    if (overlap > 0.0) inter[t] = std::max(inter[t], overlap);
                }
        emit_ranges(out, "interpenetration", inter);
    }

    // per-channel angular velocity spikes
    {
        std::vector<double> spike(T, 0.0);
        for (int t = 1; t < T; ++t) {
            const auto& a = motion.frames[t - 1].joint_angles;
            const auto& b = motion.frames[t].joint_angles;
            for (std::size_t i = 0; i < a.size(); ++i) {
                double speed = std::fabs(wrap_angle(b[i] - a[i])) / motion.frame_time;
                if (speed > thresholds.max_angular_speed) spike[t] = std::max(spike[t], speed);
            }
        }
        emit_ranges(out, "velocity_spike", spike);
    }

    return out;
}

}  // namespace mforge
