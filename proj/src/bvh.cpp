#include "motionforge/bvh.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "motionforge/kernels.hpp"

namespace mforge {

bool is_rotation_channel(Channel c) {
    return c == Channel::Xrot || c == Channel::Yrot || c == Channel::Zrot;
}

int channel_axis(Channel c) {
    switch (c) {
        case Channel::Xpos:
        case Channel::Xrot: return 0;
        case Channel::Ypos:
        case Channel::Yrot: return 1;
        default: return 2;
    }
}

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::Xpos: return "Xposition";
        case Channel::Ypos: return "Yposition";
        case Channel::Zpos: return "Zposition";
        case Channel::Xrot: return "Xrotation";
        case Channel::Yrot: return "Yrotation";
        default: return "Zrotation";
    }
}

Channel channel_from_name(const std::string& name) {
    if (name == "Xposition") return Channel::Xpos;
    if (name == "Yposition") return Channel::Ypos;
    if (name == "Zposition") return Channel::Zpos;
    if (name == "Xrotation") return Channel::Xrot;
    if (name == "Yrotation") return Channel::Yrot;
    if (name == "Zrotation") return Channel::Zrot;
    throw std::runtime_error("unknown BVH channel '" + name + "'");
}

std::array<int, 3> Joint::rotation_order() const {
    std::array<int, 3> order{0, 1, 2};
    int k = 0;
    for (Channel c : channels)
        if (is_rotation_channel(c)) {
            if (k >= 3) throw std::runtime_error("joint '" + name + "' has more than 3 rotation channels");
            order[k++] = channel_axis(c);
        }
    if (k != 3) throw std::runtime_error("joint '" + name + "' lacks a full rotation-channel triple");
    return order;
}

void Skeleton::finalize() {
    if (joints.empty()) throw std::runtime_error("skeleton has no joints");

    int roots = 0;
    angle_offset.assign(joints.size(), -1);
    total_channels = 0;
    articulated_joints = 0;

    for (std::size_t i = 0; i < joints.size(); ++i) {
        const Joint& j = joints[i];
        if (!j.parent) {
            ++roots;
            root_index = static_cast<int>(i);
            if (j.channels.size() != 6)
                throw std::runtime_error("root joint '" + j.name + "' must declare 6 channels");
        } else {
            if (*j.parent < 0 || static_cast<std::size_t>(*j.parent) >= i)
                throw std::runtime_error("joint '" + j.name + "' breaks topological order");
            if (j.channels.size() != 3 && !j.channels.empty())
                throw std::runtime_error("joint '" + j.name + "' must declare 3 channels (or none for an end site)");
        }
        if (!j.offset.finite())
            throw std::runtime_error("joint '" + j.name + "' has a non-finite offset");

        std::unordered_set<int> seen;
        int positions = 0, rotations = 0;
        for (Channel c : j.channels) {
            if (!seen.insert(static_cast<int>(c)).second)
                throw std::runtime_error("joint '" + j.name + "' declares duplicate channels");
            (is_rotation_channel(c) ? rotations : positions)++;
        }
        if (!j.channels.empty()) {
            if (rotations != 3)
                throw std::runtime_error("joint '" + j.name + "' must declare 3 rotation channels");
            if (positions != 0 && positions != 3)
                throw std::runtime_error("joint '" + j.name + "' has a partial translation triple");
            angle_offset[i] = 3 * articulated_joints;
            ++articulated_joints;
        } else if (!j.is_end_effector) {
            throw std::runtime_error("channel-less joint '" + j.name + "' is not an end site");
        }
        total_channels += static_cast<int>(j.channels.size());
    }
    if (roots != 1) throw std::runtime_error("skeleton must have exactly one root joint");

    // end sites must be leaves
    std::vector<bool> has_child(joints.size(), false);
    for (const Joint& j : joints)
        if (j.parent) has_child[*j.parent] = true;
    for (std::size_t i = 0; i < joints.size(); ++i)
        if (!joints[i].articulated() && has_child[i])
            throw std::runtime_error("end site '" + joints[i].name + "' has children");
}

std::vector<int> Skeleton::children_of(int joint) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < joints.size(); ++i)
        if (joints[i].parent && *joints[i].parent == joint) out.push_back(static_cast<int>(i));
    return out;
}

int Skeleton::find_joint(const std::string& name) const {
    for (std::size_t i = 0; i < joints.size(); ++i)
        if (joints[i].name == name) return static_cast<int>(i);
    return -1;
}

void validate_motion(const Skeleton& skeleton, const Motion& motion) {
    if (!(motion.frame_time > 0.0))
        throw std::runtime_error("frame_time must be positive");
    for (std::size_t f = 0; f < motion.frames.size(); ++f) {
        const Pose& p = motion.frames[f];
        if (static_cast<int>(p.joint_angles.size()) != skeleton.angle_count())
            throw std::runtime_error("frame " + std::to_string(f) + " width " +
                                     std::to_string(p.joint_angles.size()) +
                                     " does not match skeleton angle count " +
                                     std::to_string(skeleton.angle_count()));
        if (!p.root_translation.finite())
            throw std::runtime_error("frame " + std::to_string(f) + " has non-finite root translation");
        for (double a : p.joint_angles)
            if (!std::isfinite(a))
                throw std::runtime_error("frame " + std::to_string(f) + " has non-finite angles");
    }
}

bool skeletons_match(const Skeleton& a, const Skeleton& b, double offset_tol) {
    if (a.joints.size() != b.joints.size()) return false;
    for (std::size_t i = 0; i < a.joints.size(); ++i) {
        const Joint &ja = a.joints[i], &jb = b.joints[i];
        if (ja.name != jb.name || ja.parent != jb.parent || ja.channels != jb.channels ||
            ja.is_end_effector != jb.is_end_effector)
            return false;
        if ((ja.offset - jb.offset).norm() > offset_tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class Tokenizer {
public:
    explicit Tokenizer(const std::string& text) : text_(text) {}

    std::string next() {
        skip_ws();
        if (pos_ >= text_.size()) throw std::runtime_error("unexpected end of BVH document");
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    void expect(const std::string& tok) {
        std::string got = next();
        if (got != tok)
            throw std::runtime_error("expected '" + tok + "', got '" + got + "'");
    }

    double number() {
        std::string tok = next();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw std::runtime_error("expected a number, got '" + tok + "'");
        return v;
    }

    long integer() {
        std::string tok = next();
        long v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw std::runtime_error("expected an integer, got '" + tok + "'");
        return v;
    }

    /// Remaining text from the current position.
    std::string rest() {
        skip_ws();
        return text_.substr(pos_);
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

// Parses one joint body "{ OFFSET ... CHANNELS ... children }" into `joints`.
// `self` is the index of the joint whose body is being read.
void parse_joint_body(Tokenizer& tok, std::vector<Joint>& joints, int self) {
    tok.expect("{");
    bool saw_offset = false, saw_channels = false;
    bool is_end_site = joints[self].is_end_effector;
    while (true) {
        std::string t = tok.next();
        if (t == "OFFSET") {
            joints[self].offset = {tok.number(), tok.number(), tok.number()};
            saw_offset = true;
        } else if (t == "CHANNELS") {
            long n = tok.integer();
            if (n < 0 || n > 6) throw std::runtime_error("invalid channel count " + std::to_string(n));
            for (long i = 0; i < n; ++i)
                joints[self].channels.push_back(channel_from_name(tok.next()));
            saw_channels = true;
        } else if (t == "JOINT" || t == "ROOT") {
            Joint child;
            child.name = tok.next();
            child.parent = self;
            joints.push_back(child);
            parse_joint_body(tok, joints, static_cast<int>(joints.size()) - 1);
        } else if (t == "End") {
            tok.expect("Site");
            Joint site;
            site.name = joints[self].name + "_end";
            site.parent = self;
            site.is_end_effector = true;
            joints.push_back(site);
            parse_joint_body(tok, joints, static_cast<int>(joints.size()) - 1);
        } else if (t == "}") {
            break;
        } else {
            throw std::runtime_error("unexpected token '" + t + "' in joint '" + joints[self].name + "'");
        }
    }
    if (!saw_offset)
        throw std::runtime_error("joint '" + joints[self].name + "' is missing OFFSET");
    if (!is_end_site && !saw_channels)
        throw std::runtime_error("joint '" + joints[self].name + "' is missing CHANNELS");
    if (is_end_site && saw_channels)
        throw std::runtime_error("end site under '" + joints[self].name + "' must not declare channels");
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

}  // namespace

std::pair<Skeleton, Motion> parse_bvh(const std::string& text) {
    Tokenizer tok(text);
    tok.expect("HIERARCHY");
    tok.expect("ROOT");

    Skeleton skeleton;
    Joint root;
    root.name = tok.next();
    skeleton.joints.push_back(root);
    parse_joint_body(tok, skeleton.joints, 0);
    skeleton.finalize();

    tok.expect("MOTION");
    tok.expect("Frames:");
    long declared_frames = tok.integer();
    if (declared_frames < 0) throw std::runtime_error("negative frame count");
    tok.expect("Frame");
    tok.expect("Time:");
    Motion motion;
    motion.frame_time = tok.number();
    if (!(motion.frame_time > 0.0)) throw std::runtime_error("Frame Time must be positive");

    // Frame data, one frame per line.
    std::istringstream rows(tok.rest());
    std::string line;
    motion.frames.reserve(static_cast<std::size_t>(declared_frames));
    while (std::getline(rows, line)) {
        std::vector<std::string> vals = split_ws(line);
        if (vals.empty()) continue;
        if (static_cast<int>(vals.size()) != skeleton.total_channels)
            throw std::runtime_error("frame row " + std::to_string(motion.frames.size()) +
                                     " has " + std::to_string(vals.size()) + " values, expected " +
                                     std::to_string(skeleton.total_channels));
        Pose pose;
        pose.joint_angles.resize(skeleton.angle_count());
        std::size_t v = 0;
        auto value = [&](const std::string& s) {
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
            if (ec != std::errc{} || ptr != s.data() + s.size())
                throw std::runtime_error("non-numeric value '" + s + "' in frame row " +
                                         std::to_string(motion.frames.size()));
            return x;
        };
        for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
            const Joint& joint = skeleton.joints[j];
            int rot_slot = 0;
            for (Channel c : joint.channels) {
                double x = value(vals[v++]);
                if (is_rotation_channel(c)) {
                    pose.joint_angles[skeleton.angle_offset[j] + rot_slot++] = deg_to_rad(x);
                } else {
                    switch (channel_axis(c)) {
                        case 0: pose.root_translation.x = x; break;
                        case 1: pose.root_translation.y = x; break;
                        default: pose.root_translation.z = x; break;
                    }
                }
            }
        }
        motion.frames.push_back(std::move(pose));
    }
    if (static_cast<long>(motion.frames.size()) != declared_frames)
        throw std::runtime_error("declared " + std::to_string(declared_frames) + " frames but found " +
                                 std::to_string(motion.frames.size()));

    validate_motion(skeleton, motion);
    return {std::move(skeleton), std::move(motion)};
}

// ---------------------------------------------------------------------------
// writing

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void write_joint(std::string& out, const Skeleton& skeleton, int index, int depth) {
    const Joint& j = skeleton.joints[index];
    std::string indent(depth, '\t');
    if (!j.parent) {
        out += "ROOT " + j.name + "\n";
    } else if (j.articulated()) {
        out += indent + "JOINT " + j.name + "\n";
    } else {
        out += indent + "End Site\n";
    }
    out += indent + "{\n";
    out += indent + "\tOFFSET " + fmt6(j.offset.x) + " " + fmt6(j.offset.y) + " " + fmt6(j.offset.z) + "\n";
    if (j.articulated()) {
        out += indent + "\tCHANNELS " + std::to_string(j.channels.size());
        for (Channel c : j.channels) out += std::string(" ") + channel_name(c);
        out += "\n";
    }
    for (int child : skeleton.children_of(index)) write_joint(out, skeleton, child, depth + 1);
    out += indent + "}\n";
}

}  // namespace

std::string write_bvh(const Skeleton& skeleton, const Motion& motion) {
    validate_motion(skeleton, motion);

    std::string out = "HIERARCHY\n";
    write_joint(out, skeleton, skeleton.root_index, 0);
    out += "MOTION\n";
    out += "Frames: " + std::to_string(motion.frames.size()) + "\n";
    out += "Frame Time: " + fmt6(motion.frame_time) + "\n";

    for (const Pose& pose : motion.frames) {
        bool first = true;
        for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
            const Joint& joint = skeleton.joints[j];
            int rot_slot = 0;
            for (Channel c : joint.channels) {
                double v;
                if (is_rotation_channel(c)) {
                    v = rad_to_deg(pose.joint_angles[skeleton.angle_offset[j] + rot_slot++]);
                } else {
                    switch (channel_axis(c)) {
                        case 0: v = pose.root_translation.x; break;
                        case 1: v = pose.root_translation.y; break;
                        default: v = pose.root_translation.z; break;
                    }
                }
                if (!first) out += " ";
                out += fmt6(v);
                first = false;
            }
        }
        out += "\n";
    }
    return out;
}

std::pair<Skeleton, Motion> read_bvh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open BVH file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_bvh(buf.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_bvh_file(const std::string& path, const Skeleton& skeleton, const Motion& motion) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write BVH file '" + path + "'");
    out << write_bvh(skeleton, motion);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// resampling

namespace {

Pose interpolate_pose(const Pose& a, const Pose& b, double t) {
    Pose out;
    const double ta[3] = {a.root_translation.x, a.root_translation.y, a.root_translation.z};
    const double tb[3] = {b.root_translation.x, b.root_translation.y, b.root_translation.z};
    double to[3];
    kernels::lerp(ta, tb, t, to, 3);
    out.root_translation = {to[0], to[1], to[2]};
    out.joint_angles.resize(a.joint_angles.size());
    kernels::lerp_wrapped(a.joint_angles.data(), b.joint_angles.data(), t,
                          out.joint_angles.data(), a.joint_angles.size());
    return out;
}

/// Samples the motion at continuous frame position `u` in [0, T-1].
Pose sample_at(const Motion& motion, double u) {
    int last = motion.frame_count() - 1;
    if (u <= 0.0) return motion.frames.front();
    if (u >= static_cast<double>(last)) return motion.frames.back();
    int j = static_cast<int>(u);
    double alpha = u - static_cast<double>(j);
    if (alpha == 0.0) return motion.frames[j];
    return interpolate_pose(motion.frames[j], motion.frames[j + 1], alpha);
}

}  // namespace

Motion resample(const Skeleton& skeleton, const Motion& motion, double target_hz) {
    validate_motion(skeleton, motion);
    if (!(target_hz > 0.0)) throw std::runtime_error("target rate must be positive");
    if (motion.frame_count() < 2)
        throw std::runtime_error("resample needs at least 2 frames");

    double duration = motion.duration();
    // small epsilon keeps exact boundary frames (e.g. 21 frames at 30 Hz
    // resampled to 60 Hz) from dropping to floating-point rounding
    int out_frames = static_cast<int>(std::floor(duration * target_hz + 1e-9)) + 1;

    Motion out;
    out.frame_time = 1.0 / target_hz;
    out.action_label = motion.action_label;
    out.frames.reserve(out_frames);
    for (int i = 0; i < out_frames; ++i) {
        double t = static_cast<double>(i) * out.frame_time;
        out.frames.push_back(sample_at(motion, t / motion.frame_time));
    }
    return out;
}

Motion time_warp(const Skeleton& skeleton, const Motion& motion, double scale,
                 std::array<double, 2> bounds) {
    validate_motion(skeleton, motion);
    if (scale < bounds[0] || scale > bounds[1])
        throw std::runtime_error("time-warp scale " + std::to_string(scale) +
                                 " outside [" + std::to_string(bounds[0]) + ", " +
                                 std::to_string(bounds[1]) + "]");
    int T = motion.frame_count();
    if (T == 0) throw std::runtime_error("cannot warp an empty motion");

    int out_frames = std::max<int>(1, static_cast<int>(std::lround(static_cast<double>(T) * scale)));
    Motion out;
    out.frame_time = motion.frame_time;
    out.action_label = motion.action_label;
    out.frames.reserve(out_frames);
    if (out_frames == 1 || T == 1) {
        out.frames.push_back(motion.frames.front());
        return out;
    }
    for (int i = 0; i < out_frames; ++i) {
        double u = static_cast<double>(i) * static_cast<double>(T - 1) /
                   static_cast<double>(out_frames - 1);
        out.frames.push_back(sample_at(motion, u));
    }
    return out;
}

}  // namespace mforge
