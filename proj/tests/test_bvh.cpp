#include <cmath>
#include <stdexcept>
#include <string>

#include <doctest.h>

#include "helpers.hpp"
#include "motionforge/bvh.hpp"

using namespace mforge;
using namespace testutil;

namespace {

const char* kMinimalBvh = R"(HIERARCHY
ROOT root
{
  OFFSET 0.0 0.0 0.0
  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
  End Site
  {
    OFFSET 0.0 1.0 0.0
  }
}
MOTION
Frames: 2
Frame Time: 0.033333
0 0 0 0 0 0
1 2 3 90 0 0
)";

double max_motion_diff(const Motion& a, const Motion& b) {
    REQUIRE(a.frames.size() == b.frames.size());
    double worst = std::fabs(a.frame_time - b.frame_time);
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
        worst = std::max(worst, (a.frames[f].root_translation - b.frames[f].root_translation).norm());
        for (std::size_t i = 0; i < a.frames[f].joint_angles.size(); ++i)
            worst = std::max(worst,
                             std::fabs(a.frames[f].joint_angles[i] - b.frames[f].joint_angles[i]));
    }
    return worst;
}

}  // namespace

TEST_CASE("parse minimal document") {
    auto [skel, motion] = parse_bvh(kMinimalBvh);
    CHECK(skel.joints.size() == 2);  // root + end site
    CHECK(skel.articulated_joints == 1);
    CHECK(skel.joints[1].is_end_effector);
    CHECK(motion.frame_count() == 2);
    CHECK(motion.frames[1].root_translation == Vec3{1, 2, 3});
    // 90 degrees on the root's Z channel, stored in radians
    CHECK(motion.frames[1].joint_angles[0] == doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("write(parse(minimal)) round-trips structurally") {
    auto [skel, motion] = parse_bvh(kMinimalBvh);
    std::string text = write_bvh(skel, motion);
    auto [skel2, motion2] = parse_bvh(text);
    CHECK(skeletons_match(skel, skel2));
    CHECK(max_motion_diff(motion, motion2) < 1e-6);

    auto [skel3, motion3] = parse_bvh(write_bvh(skel2, motion2));
    CHECK(skeletons_match(skel2, skel3));
    CHECK(max_motion_diff(motion2, motion3) < 1e-6);
}

TEST_CASE("all-zero frame writes a zero MOTION row") {
    Skeleton s = chain_skeleton({1.0});
    Motion m;
    m.frames.push_back(zero_pose(s));
    std::string text = write_bvh(s, m);
    CHECK(text.find("\n0.000000 0.000000 0.000000 0.000000 0.000000 0.000000 0.000000 "
                    "0.000000 0.000000\n") != std::string::npos);
}

TEST_CASE("constructed 3-joint chain round-trips within 1e-6") {
    Skeleton s = chain_skeleton({0.5, 1.0, 0.25});
    Rng rng(11);
    Motion m = random_motion(s, 10, rng, 3.0);

    // the constructed document; end-site names are canonicalized by parsing
    std::string doc = write_bvh(s, m);
    auto [s1, m1] = parse_bvh(doc);
    CHECK(max_motion_diff(m, m1) < 1e-6);

    auto [s2, m2] = parse_bvh(write_bvh(s1, m1));
    CHECK(skeletons_match(s1, s2, 0.0));
    CHECK(max_motion_diff(m1, m2) < 1e-6);
}

TEST_CASE("fuzzed skeletons round-trip: parse-write-parse = parse") {
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        Skeleton s = random_skeleton(rng);
        Motion m = random_fuzz_motion(s, rng);
        auto [s1, m1] = parse_bvh(write_bvh(s, m));
        auto [s2, m2] = parse_bvh(write_bvh(s1, m1));
        CHECK(skeletons_match(s1, s2, 0.0));  // structure exact
        CHECK(max_motion_diff(m1, m2) < 1e-6);
    }
}

TEST_CASE("root channels may interleave positions and rotations") {
    const char* doc = R"(HIERARCHY
ROOT hips
{
  OFFSET 0 0 0
  CHANNELS 6 Zrotation Xposition Xrotation Yposition Yrotation Zposition
  End Site
  {
    OFFSET 0 1 0
  }
}
MOTION
Frames: 1
Frame Time: 0.04
45 1 0 2 0 3
)";
    auto [skel, motion] = parse_bvh(doc);
    CHECK(motion.frames[0].root_translation == Vec3{1, 2, 3});
    CHECK(motion.frames[0].joint_angles[0] == doctest::Approx(kPi / 4));  // Z first
    CHECK(motion.frames[0].joint_angles[1] == 0.0);

    auto [skel2, motion2] = parse_bvh(write_bvh(skel, motion));
    CHECK(skeletons_match(skel, skel2, 0.0));
    CHECK(max_motion_diff(motion, motion2) < 1e-6);
}

TEST_CASE("parser rejects malformed documents") {
    CHECK_THROWS(parse_bvh("HIERARCHY ROOT a { OFFSET 0 0 0 CHANNELS 3 Zrotation Xrotation "
                           "Yrotation MOTION"));  // unbalanced braces
    CHECK_THROWS_WITH_AS(parse_bvh("HIERARCHY\nROOT a\n{\n CHANNELS 6 Xposition Yposition "
                                   "Zposition Zrotation Xrotation Yrotation\n}\nMOTION\nFrames: 0\n"
                                   "Frame Time: 0.01\n"),
                         doctest::Contains("missing OFFSET"), std::runtime_error);

    // row width mismatch
    std::string doc(kMinimalBvh);
    CHECK_THROWS_WITH_AS(parse_bvh(doc.substr(0, doc.size() - 15) + "1 2 3\n"),
                         doctest::Contains("values"), std::runtime_error);

    // declared frame count != rows present
    std::string short_doc(kMinimalBvh);
    short_doc.replace(short_doc.find("Frames: 2"), 9, "Frames: 3");
    CHECK_THROWS_WITH_AS(parse_bvh(short_doc), doctest::Contains("declared"), std::runtime_error);

    // non-numeric token
    std::string bad_doc(kMinimalBvh);
    bad_doc.replace(bad_doc.find("90"), 2, "xx");
    CHECK_THROWS_WITH_AS(parse_bvh(bad_doc), doctest::Contains("non-numeric"), std::runtime_error);
}

TEST_CASE("resample: rate change preserves duration") {
    Skeleton s = chain_skeleton({1.0});
    Rng rng(3);

    // 120 Hz motion of 120 frames -> 30 Hz
    Motion m = random_motion(s, 120, rng);
    m.frame_time = 1.0 / 120.0;
    Motion r = resample(s, m, 30.0);
    CHECK(r.frame_time == doctest::Approx(1.0 / 30.0).epsilon(1e-15));
    CHECK(r.frame_count() == 30);  // floor(119/120*30)+1
    CHECK(std::fabs(r.duration() - m.duration()) <= r.frame_time);

    // truncated 120 Hz frame time as found in real capture files
    Motion h = random_motion(s, 50, rng);
    h.frame_time = 0.008333;
    CHECK(resample(s, h, 30.0).frame_time == 1.0 / 30.0);
}

TEST_CASE("resample at the same rate is the identity") {
    Skeleton s = chain_skeleton({1.0, 1.0});
    Rng rng(5);
    Motion m = random_motion(s, 17, rng);
    Motion r = resample(s, m, 1.0 / m.frame_time);
    REQUIRE(r.frame_count() == m.frame_count());
    CHECK(max_motion_diff(m, r) < 1e-12);
}

TEST_CASE("resample: linear ramp stays linear") {
    Skeleton s = chain_skeleton({1.0});
    Motion m;
    m.frame_time = 1.0 / 40.0;
    for (int t = 0; t <= 40; ++t) {  // channel ramps 0 -> 1 over exactly 1 s
        Pose p = zero_pose(s);
        p.joint_angles[3] = static_cast<double>(t) / 40.0;
        m.frames.push_back(p);
    }
    for (double hz : {17.0, 30.0, 60.0, 240.0}) {
        Motion r = resample(s, m, hz);
        for (int i = 0; i < r.frame_count(); ++i) {
            double t = i / hz;
            CHECK(std::fabs(r.frames[i].joint_angles[3] - t) < 1e-9);
        }
    }
}

TEST_CASE("resample edge cases") {
    Skeleton s = chain_skeleton({1.0});
    Motion one;
    one.frames.push_back(zero_pose(s));
    CHECK_THROWS_AS(resample(s, one, 30.0), std::runtime_error);
    Motion m;
    m.frames.push_back(zero_pose(s));
    m.frames.push_back(zero_pose(s));
    CHECK_THROWS_AS(resample(s, m, 0.0), std::runtime_error);
}

TEST_CASE("time_warp frame counts and identity") {
    Skeleton s = chain_skeleton({1.0});
    Rng rng(8);
    Motion m = random_motion(s, 100, rng);

    CHECK(time_warp(s, m, 0.9).frame_count() == 90);
    CHECK(time_warp(s, m, 1.1).frame_count() == 110);

    Motion same = time_warp(s, m, 1.0);
    CHECK(max_motion_diff(m, same) == 0.0);  // frame-identical

    CHECK_THROWS_AS(time_warp(s, m, 0.5), std::runtime_error);
    CHECK_THROWS_AS(time_warp(s, m, 1.2), std::runtime_error);
    CHECK(time_warp(s, m, 0.5, {0.4, 1.6}).frame_count() == 50);  // configurable bounds
}

TEST_CASE("time_warp keeps a linear ramp linear and preserves endpoints") {
    Skeleton s = chain_skeleton({1.0});
    Motion m;
    m.frame_time = 1.0 / 30.0;
    int T = 61;
    for (int t = 0; t < T; ++t) {
        Pose p = zero_pose(s);
        p.joint_angles[5] = static_cast<double>(t) / (T - 1);
        m.frames.push_back(p);
    }
    Motion w = time_warp(s, m, 1.1);
    int N = w.frame_count();
    CHECK(w.frames.front().joint_angles[5] == 0.0);
    CHECK(w.frames.back().joint_angles[5] == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < N; ++i)
        CHECK(std::fabs(w.frames[i].joint_angles[5] - static_cast<double>(i) / (N - 1)) < 1e-9);
}

TEST_CASE("time_warp round trip recovers the frame count within one") {
    Skeleton s = chain_skeleton({1.0});
    Rng rng(9);
    for (int T : {10, 33, 100}) {
        Motion m = random_motion(s, T, rng);
        for (double scale : {0.9, 0.95, 1.05, 1.1}) {
            Motion w = time_warp(s, m, scale);
            Motion back = time_warp(s, w, 1.0 / scale, {0.8, 1.25});
            CHECK(std::abs(back.frame_count() - T) <= 1);
        }
    }
}

TEST_CASE("motion invariants are enforced") {
    Skeleton s = chain_skeleton({1.0});
    Motion m;
    m.frame_time = -1.0;
    m.frames.push_back(zero_pose(s));
    CHECK_THROWS_AS(validate_motion(s, m), std::runtime_error);

    m.frame_time = 0.033;
    m.frames[0].joint_angles.pop_back();
    CHECK_THROWS_AS(validate_motion(s, m), std::runtime_error);

    Motion nf;
    nf.frames.push_back(zero_pose(s));
    nf.frames[0].joint_angles[0] = std::nan("");
    CHECK_THROWS_AS(validate_motion(s, nf), std::runtime_error);
}
