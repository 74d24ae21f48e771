#include <cmath>
#include <set>
#include <stdexcept>

#include <doctest.h>

#include "helpers.hpp"
#include "motionforge/ik_augment.hpp"

using namespace mforge;
using namespace testutil;

namespace {

TargetSamplingSpace identity_space() { return {{1, 1}, {1, 1}, {0, 0}}; }

TargetSamplingSpace kick_space() { return {{0.8, 1.2}, {0.8, 1.2}, {-0.785, 0.785}}; }

}  // namespace

TEST_CASE("sampling space validation") {
    CHECK_THROWS_AS((TargetSamplingSpace{{1.2, 0.8}, {1, 1}, {0, 0}}.validate()),
                    std::runtime_error);
    CHECK_THROWS_AS((TargetSamplingSpace{{1, 1}, {1, 1}, {-4.0, 0.0}}.validate()),
                    std::runtime_error);
    CHECK_NOTHROW(kick_space().validate());
}

TEST_CASE("detect_keyframe finds the kick apex") {
    Skeleton s = biped_skeleton();
    Motion m = kick_motion(s);
    IkChain chain = make_chain(s, "foot");
    KeyframeInfo key = detect_keyframe(s, m, chain);
    CHECK(key.t_key == 10);  // sin apex of a 21-frame swing
    CHECK(key.r > 0.0);
    FkState fk = fk_full(s, m.frames[key.t_key]);
    CHECK((key.p_key - fk.positions[chain.end_effector()]).norm() < 1e-12);
}

TEST_CASE("detect_keyframe tie-breaks to the earliest frame") {
    Skeleton s = biped_skeleton();
    Motion m;
    m.frame_time = 1.0 / 30.0;
    Pose p = zero_pose(s);
    p.root_translation = {0, 1, 0};
    for (int t = 0; t < 5; ++t) m.frames.push_back(p);  // constant pose, all frames tie
    KeyframeInfo key = detect_keyframe(s, m, make_chain(s, "foot"));
    CHECK(key.t_key == 0);
}

TEST_CASE("detect_keyframe matches a brute-force argmax on synthetic distances") {
    // leg angles chosen so the foot-root distance follows [small, large, medium]
    Skeleton s = biped_skeleton();
    IkChain chain = make_chain(s, "foot");
    Motion m;
    m.frame_time = 1.0 / 30.0;
    std::vector<double> knee_bend = {2.0, 0.1, 1.0};  // straighter leg = farther foot
    for (double bend : knee_bend) {
        Pose p = zero_pose(s);
        p.root_translation = {0, 1, 0};
        p.joint_angles[s.angle_offset[s.find_joint("knee")] + 1] = bend;
        m.frames.push_back(p);
    }
    // independent argmax over FK distances
    int best = 0;
    double best_d = -1;
    for (int t = 0; t < 3; ++t) {
        FkState fk = fk_full(s, m.frames[t]);
        double d = (fk.positions[chain.end_effector()] - fk.positions[s.root_index]).norm();
        if (d > best_d) {
            best_d = d;
            best = t;
        }
    }
    CHECK(best == 1);
    CHECK(detect_keyframe(s, m, chain).t_key == best);
}

TEST_CASE("detect_keyframe uses root-local coordinates") {
    // identical leg pose every frame, but the root translates away; distances
    // must not grow with world displacement
    Skeleton s = biped_skeleton();
    Motion m;
    m.frame_time = 1.0 / 30.0;
    for (int t = 0; t < 6; ++t) {
        Pose p = zero_pose(s);
        p.root_translation = {static_cast<double>(t), 1.0, 0.0};  // walking along +X
        m.frames.push_back(p);
    }
    KeyframeInfo key = detect_keyframe(s, m, make_chain(s, "foot"));
    CHECK(key.t_key == 0);  // earliest tie, not biased toward late frames
}

TEST_CASE("degenerate keyframe radius is reported") {
    // foot directly on the root's vertical axis: r = 0, azimuth undefined
    Skeleton s;
    s.joints.push_back(make_root());
    s.joints.push_back(make_joint("mid", 0, {0, 0, 0}));
    s.joints.push_back(make_joint("low", 1, {0.0, -0.5, 0.0}));
    s.joints.push_back(make_end_site("low_end", 2, {0.0, -0.5, 0.0}));
    s.finalize();
    Motion m;
    m.frame_time = 1.0 / 30.0;
    m.frames.push_back(zero_pose(s));
    CHECK_THROWS_WITH_AS(detect_keyframe(s, m, make_chain(s, "low")),
                         doctest::Contains("degenerate"), std::runtime_error);
}

TEST_CASE("sample_target: identity space returns the keyframe position") {
    Skeleton s = biped_skeleton();
    Motion m = kick_motion(s);
    KeyframeInfo key = detect_keyframe(s, m, make_chain(s, "foot"));
    Rng rng(5);
    Vec3 p = sample_target(identity_space(), key, rng);
    CHECK((p - key.p_key).norm() < 1e-12);
}

TEST_CASE("sample_target stays inside the kick-class bounds") {
    Skeleton s = biped_skeleton();
    Motion m = kick_motion(s);
    KeyframeInfo key = detect_keyframe(s, m, make_chain(s, "foot"));
    TargetSamplingSpace space = kick_space();
    Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        Vec3 world = sample_target(space, key, rng);
        // back to the keyframe's root-local cylindrical coordinates
        Vec3 local = key.root_rotation.transposed() * (world - key.root_position);
        double r = std::hypot(local.x, local.z);
        double theta = std::atan2(local.z, local.x);
        CHECK(r >= 0.8 * key.r - 1e-9);
        CHECK(r <= 1.2 * key.r + 1e-9);
        CHECK(local.y >= std::min(0.8 * key.h, 1.2 * key.h) - 1e-9);
        CHECK(local.y <= std::max(0.8 * key.h, 1.2 * key.h) + 1e-9);
        CHECK(std::fabs(wrap_angle(theta - key.theta)) <= 0.785 + 1e-9);
    }
}

TEST_CASE("sample_target: empirical ranges converge to the space bounds") {
    Skeleton s = biped_skeleton();
    Motion m = kick_motion(s);
    KeyframeInfo key = detect_keyframe(s, m, make_chain(s, "foot"));
    TargetSamplingSpace walk{{0.5, 2.0}, {1.0, 1.0}, {-0.3, 0.3}};
    Rng rng(123);
    double r_lo = 1e9, r_hi = -1e9, th_lo = 1e9, th_hi = -1e9;
    for (int i = 0; i < 10000; ++i) {
        Vec3 world = sample_target(walk, key, rng);
        Vec3 local = key.root_rotation.transposed() * (world - key.root_position);
        double r = std::hypot(local.x, local.z) / key.r;
        double dth = wrap_angle(std::atan2(local.z, local.x) - key.theta);
        r_lo = std::min(r_lo, r);
        r_hi = std::max(r_hi, r);
        th_lo = std::min(th_lo, dth);
        th_hi = std::max(th_hi, dth);
        CHECK(std::fabs(local.y - key.h) < 1e-9);  // fixed height multiplier
    }
    // min/max converge to the range endpoints within 1% of the span
    CHECK(r_lo < 0.5 + 0.015 * 1.5);
    CHECK(r_hi > 2.0 - 0.015 * 1.5);
    CHECK(th_lo < -0.3 + 0.01 * 0.6);
    CHECK(th_hi > 0.3 - 0.01 * 0.6);
}

TEST_CASE("propagation weights: exact anchors") {
    // f(t_key) = 1, f(0) = f(T-1) = 0, midpoint = 0.5
    CHECK(propagation_weight(10, 10, 21) == 1.0);
    CHECK(propagation_weight(10, 0, 21) == 0.0);
    CHECK(propagation_weight(10, 20, 21) == 0.0);
    CHECK(propagation_weight(10, 5, 21) == 0.5);

    // keyframe at an endpoint: one side is empty, the anchor still holds
    CHECK(propagation_weight(0, 0, 5) == 1.0);
    CHECK(propagation_weight(0, 4, 5) == 0.0);
    CHECK(propagation_weight(4, 4, 5) == 1.0);
    CHECK(propagation_weight(4, 0, 5) == 0.0);
}

TEST_CASE("propagate_targets applies the linear ramp") {
    std::vector<Vec3> traj(21, Vec3{0, 0, 0});
    Vec3 sample{2, 0, 0};  // p_diff = (2,0,0) from traj[10] = 0
    std::vector<Vec3> targets = propagate_targets(traj, 10, sample);
    CHECK((targets[10] - sample).norm() == 0.0);
    CHECK(targets[0] == Vec3{0, 0, 0});
    CHECK(targets[20] == Vec3{0, 0, 0});
    CHECK((targets[5] - Vec3{1, 0, 0}).norm() < 1e-15);  // f = 0.5

    SUBCASE("offsets stay collinear with p_diff and affine in t") {
        for (int t = 1; t < 10; ++t) {
            Vec3 offset = targets[t] - traj[t];
            CHECK(std::fabs(offset.y) < 1e-15);
            CHECK(std::fabs(offset.z) < 1e-15);
            CHECK(offset.x == doctest::Approx(2.0 * t / 10.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("synthesize_ik_motion with the identity space is a near no-op") {
    Skeleton s = biped_skeleton();
    Motion m = kick_motion(s);
    IkChain chain = make_chain(s, "foot");
    Rng rng(7);
    IkSynthesisResult r = synthesize_ik_motion(s, m, chain, identity_space(), rng);
    REQUIRE(r.motion.frame_count() == m.frame_count());
    for (int t = 0; t < m.frame_count(); ++t) {
        FkState a = fk_full(s, m.frames[t]);
        FkState b = fk_full(s, r.motion.frames[t]);
        for (std::size_t j = 0; j < s.joints.size(); ++j)
            CHECK((a.positions[j] - b.positions[j]).norm() < 2e-4);
    }
}

TEST_CASE("synthesize_ik_motion: seeded kick hits target, keeps endpoints") {
    Skeleton s = biped_skeleton();
    Motion m = kick_motion(s);
    IkChain chain = make_chain(s, "foot");

    Rng rng(2025);
    IkSynthesisResult r = synthesize_ik_motion(s, m, chain, kick_space(), rng);
    CHECK(r.t_key == 10);
    if (r.target_reachable) CHECK(r.keyframe_error < 1e-3);

    for (int t : {0, m.frame_count() - 1}) {
        FkState a = fk_full(s, m.frames[t]);
        FkState b = fk_full(s, r.motion.frames[t]);
        CHECK((a.positions[chain.end_effector()] - b.positions[chain.end_effector()]).norm() <
              2e-4);
    }
}

TEST_CASE("synthesize_ik_motion: distinct seeds give distinct keyframe feet") {
    Skeleton s = biped_skeleton();
    Motion m = kick_motion(s);
    IkChain chain = make_chain(s, "foot");

    std::vector<Vec3> feet;
    for (int seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        IkSynthesisResult r = synthesize_ik_motion(s, m, chain, kick_space(), rng);
        FkState fk = fk_full(s, r.motion.frames[r.t_key]);
        feet.push_back(fk.positions[chain.end_effector()]);
    }
    for (std::size_t i = 0; i < feet.size(); ++i)
        for (std::size_t j = i + 1; j < feet.size(); ++j)
            CHECK((feet[i] - feet[j]).norm() > 0.0);
}

TEST_CASE("synthesize_ik_motion is deterministic for a fixed seed") {
    Skeleton s = biped_skeleton();
    Motion m = kick_motion(s);
    IkChain chain = make_chain(s, "foot");

    Rng rng1(77), rng2(77);
    IkSynthesisResult a = synthesize_ik_motion(s, m, chain, kick_space(), rng1);
    IkSynthesisResult b = synthesize_ik_motion(s, m, chain, kick_space(), rng2);
    REQUIRE(a.motion.frames.size() == b.motion.frames.size());
    for (std::size_t t = 0; t < a.motion.frames.size(); ++t) {
        CHECK(a.motion.frames[t].root_translation == b.motion.frames[t].root_translation);
        for (std::size_t i = 0; i < a.motion.frames[t].joint_angles.size(); ++i)
            CHECK(a.motion.frames[t].joint_angles[i] == b.motion.frames[t].joint_angles[i]);
    }
}

TEST_CASE("unreachable sampled target is flagged, motion still produced") {
    Skeleton s = biped_skeleton();
    Motion m = kick_motion(s);
    IkChain chain = make_chain(s, "foot");
    TargetSamplingSpace huge{{5.0, 5.0}, {1.0, 1.0}, {0.0, 0.0}};
    Rng rng(3);
    IkSynthesisResult r = synthesize_ik_motion(s, m, chain, huge, rng);
    CHECK_FALSE(r.target_reachable);
    CHECK(r.motion.frame_count() == m.frame_count());
    CHECK(r.keyframe_error > 0.1);  // landed at max reach, far from the sample
}
