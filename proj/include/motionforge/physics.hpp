#pragma once

#include <string>
#include <vector>

#include "motionforge/bvh.hpp"
#include "motionforge/math3d.hpp"

namespace mforge {

/// Simplified tracking character: decoupled per-DOF double integrators for
/// the joint angles plus a point-mass root. Preserves the PD and
/// PD-residual-force math without an articulated rigid-body engine.
struct SimCharacter {
    std::size_t dof_count = 0;
    std::vector<double> inertia;       // per DOF, kg*m^2 equivalent
    std::vector<double> kp, kd;        // per-DOF gains
    std::vector<double> torque_limit;  // per-DOF max |tau|
    double root_mass = 60.0;           // kg
    double root_kp = 500.0, root_kd = 50.0;
    double residual_force_limit = 300.0;  // N
    Vec3 gravity{0.0, -9.81, 0.0};
    double ground_height = 0.0;
    double root_ground_clearance = 0.0;  // rest height of the root above the ground

    /// Checks positivity invariants; returns human-readable warnings
    /// (e.g. underdamped gain combinations, which are permitted).
    std::vector<std::string> validate() const;

    static SimCharacter uniform(std::size_t dof_count, double inertia = 1.0, double kp = 300.0,
                                double kd = 30.0, double torque_limit = 200.0);
};

struct SimState {
    std::vector<double> q;     // rad
    std::vector<double> qdot;  // rad/s
    Vec3 root_pos;
    Vec3 root_vel;
    double time = 0.0;
};

struct RewardTrace {
    std::vector<double> r_im;      // per-frame imitation reward, in (0, 1]
    std::vector<double> r_im_max;  // per-frame maximum
};

struct RewardWeights {
    double w_pose = 0.7, w_root = 0.3;  // must sum to 1
    double a_pose = 2.0, a_root = 10.0;
};

/// PD torque law over all DOFs: clamp(kp * wrap(q_target - q) - kd * qdot).
std::vector<double> pd_torque(const std::vector<double>& q, const std::vector<double>& qdot,
                              const std::vector<double>& q_target, const SimCharacter& character);

/// Root-level residual force toward the goal root position, magnitude
/// clamped to the character's limit with direction preserved.
Vec3 pd_residual_force(const Vec3& root_pos, const Vec3& root_vel, const Vec3& goal_root_pos,
                       double kp, double kd, double limit);

/// One semi-implicit Euler step; inelastic ground contact clamps the root.
/// dt must lie in (0, 0.01]. Throws on a non-finite result.
SimState sim_step(const SimCharacter& character, const SimState& state,
                  const std::vector<double>& torques, const Vec3& residual_force, double dt);

/// Imitation reward surrogate:
/// w_pose * exp(-a_pose * |dq|^2) + w_root * exp(-a_root * |droot|^2).
double imitation_reward(const std::vector<double>& sim_q, const std::vector<double>& goal_q,
                        const Vec3& sim_root, const Vec3& goal_root,
                        const RewardWeights& weights = {});

/// Mean over frames of r_im / r_im_max; in (0, 1].
double normalized_reward(const RewardTrace& trace);

struct Diagnostic {
    std::string type;
    int start_frame = 0, end_frame = 0;  // inclusive range
    double magnitude = 0.0;
};

struct TrackResult {
    Motion rectified;
    RewardTrace trace;
    std::vector<Diagnostic> diagnostics;  // contact clamps, residual saturation
};

/// Tracks a goal motion frame by frame: PD torques toward the goal pose and
/// a residual force toward the goal root are applied over `substeps`
/// sub-steps per frame. dt * substeps must equal the goal frame time.
TrackResult track_motion(const SimCharacter& character, const Skeleton& skeleton,
                         const Motion& goal, double dt, int substeps,
                         const RewardWeights& weights = {});

struct PlausibilityThresholds {
    double ground_height = 0.0;
    double ground_eps = 0.01;        // penetration depth tolerance
    double contact_height = 0.05;    // foot counts as grounded below this height
    double max_foot_speed = 0.2;     // horizontal m/s while grounded
    double bone_radius = 0.05;       // interpenetration when segment gap < 2r
    double max_angular_speed = 20.0; // rad/s per channel
};

/// Flags ground penetration, footskate, limb interpenetration and angular
/// velocity spikes. An empty result means the motion is plausible under the
/// given thresholds.
std::vector<Diagnostic> validate_plausibility(const Skeleton& skeleton, const Motion& motion,
                                              const PlausibilityThresholds& thresholds = {});

/// Character sized for a skeleton: one DOF per angle channel.
SimCharacter character_for(const Skeleton& skeleton, double inertia = 1.0, double kp = 300.0,
                           double kd = 30.0, double torque_limit = 200.0);

}  // namespace mforge
