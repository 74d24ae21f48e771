#include "motionforge/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace mforge {

FkState fk_full(const Skeleton& skeleton, const Pose& pose) {
    if (static_cast<int>(pose.joint_angles.size()) != skeleton.angle_count())
        throw std::runtime_error("pose width does not match skeleton");

    std::size_t n = skeleton.joints.size();
    FkState fk;
    fk.positions.resize(n);
    fk.rotations.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const Joint& j = skeleton.joints[i];
        Mat3 parent_rot = j.parent ? fk.rotations[*j.parent] : Mat3::identity();
        Vec3 parent_pos = j.parent ? fk.positions[*j.parent] : Vec3{};

        Vec3 pos = parent_pos + parent_rot * j.offset;
        Mat3 rot = parent_rot;
        if (j.articulated()) {
            int off = skeleton.angle_offset[i];
            Mat3 local = euler_to_matrix(j.rotation_order(),
                                         {pose.joint_angles[off], pose.joint_angles[off + 1],
                                          pose.joint_angles[off + 2]});
            rot = parent_rot * local;
        }
        fk.positions[i] = pos;
        fk.rotations[i] = rot;
    }
    // root translation enters last (exact translation equivariance)
    for (std::size_t i = 0; i < n; ++i) fk.positions[i] += pose.root_translation;
    return fk;
}

JointPositions forward_kinematics(const Skeleton& skeleton, const Pose& pose) {
    return {fk_full(skeleton, pose).positions};
}

double IkChain::total_reach() const {
    double r = 0.0;
    for (double l : bone_lengths) r += l;
    return r;
}

void IkChain::validate(const Skeleton& skeleton) const {
    if (joint_indices.size() < 2)
        throw std::runtime_error("IK chain needs at least 2 joints");
    if (bone_lengths.size() + 1 != joint_indices.size())
        throw std::runtime_error("IK chain bone count mismatch");
    for (std::size_t i = 1; i < joint_indices.size(); ++i) {
        const Joint& child = skeleton.joints[joint_indices[i]];
        if (!child.parent || *child.parent != joint_indices[i - 1])
            throw std::runtime_error("IK chain indices are not a parent-child path");
        double len = child.offset.norm();
        if (!(len > 0.0))
            throw std::runtime_error("IK chain contains a zero-length bone at '" + child.name + "'");
        if (std::fabs(len - bone_lengths[i - 1]) > 1e-9)
            throw std::runtime_error("IK chain bone length disagrees with skeleton offset");
    }
}

IkChain make_chain(const Skeleton& skeleton, int end_joint) {
    if (end_joint < 0 || end_joint >= static_cast<int>(skeleton.joints.size()))
        throw std::runtime_error("chain end joint index out of range");
    std::vector<int> path;
    for (int j = end_joint; ; ) {
        path.push_back(j);
        const Joint& joint = skeleton.joints[j];
        if (!joint.parent) break;
        j = *joint.parent;
    }
    std::reverse(path.begin(), path.end());
    // drop the root: its pose is never modified by IK
    if (path.size() > 1 && path.front() == skeleton.root_index) path.erase(path.begin());
    if (path.size() < 2)
        throw std::runtime_error("chain to '" + skeleton.joints[end_joint].name + "' is too short");

    IkChain chain;
    chain.joint_indices = path;
    for (std::size_t i = 1; i < path.size(); ++i)
        chain.bone_lengths.push_back(skeleton.joints[path[i]].offset.norm());
    chain.validate(skeleton);
    return chain;
}

IkChain make_chain(const Skeleton& skeleton, const std::string& end_joint_name) {
    int idx = skeleton.find_joint(end_joint_name);
    if (idx < 0) throw std::runtime_error("no joint named '" + end_joint_name + "'");
    return make_chain(skeleton, idx);
}

std::vector<Vec3> chain_positions(const IkChain& chain, const FkState& fk) {
    std::vector<Vec3> out;
    out.reserve(chain.joint_indices.size());
    for (int j : chain.joint_indices) out.push_back(fk.positions[j]);
    return out;
}

namespace {

// Re-targets p to lie at distance `len` from anchor, toward p's current
// direction. Falls back to +X if the two points coincide.
Vec3 place_at_distance(const Vec3& anchor, const Vec3& p, double len) {
    Vec3 dir = p - anchor;
    double d = dir.norm();
    if (d < 1e-15) dir = {1, 0, 0}; else dir = dir / d;
    return anchor + dir * len;
}

}  // namespace

FabrikResult fabrik_solve(const IkChain& chain, const std::vector<Vec3>& initial_positions,
                          const Vec3& target, double tolerance, int max_iters) {
    std::size_t n = chain.joint_indices.size();
    if (initial_positions.size() != n)
        throw std::runtime_error("fabrik: wrong number of chain positions");
    if (!target.finite()) throw std::runtime_error("fabrik: non-finite target");
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double len = (initial_positions[i + 1] - initial_positions[i]).norm();
        if (std::fabs(len - chain.bone_lengths[i]) > 1e-6)
            throw std::runtime_error("fabrik: initial positions violate bone lengths");
    }

    FabrikResult result;
    result.positions = initial_positions;
    std::vector<Vec3>& p = result.positions;
    const Vec3 base = p.front();

    double err = (p.back() - target).norm();
    if (err < tolerance) {
        result.end_error = err;
        return result;  // already solved, zero iterations
    }

    if ((target - base).norm() > chain.total_reach()) {
        // unreachable: straighten the chain toward the target
        for (std::size_t i = 0; i + 1 < n; ++i)
            p[i + 1] = place_at_distance(p[i], target, chain.bone_lengths[i]);
        result.iterations = 1;
        result.end_error = (p.back() - target).norm();
        result.error_trace.push_back(result.end_error);
        return result;
    }

    double prev_err = err;
    std::vector<Vec3> prev_p;
    std::vector<Vec3> extrapolated(n);
    for (int iter = 0; iter < max_iters; ++iter) {
        std::vector<Vec3> before = p;
        // backward pass: fix the end at the target, walk toward the base
        p.back() = target;
        for (std::size_t i = n - 1; i-- > 0;)
            p[i] = place_at_distance(p[i + 1], p[i], chain.bone_lengths[i]);
        // forward pass: pin the base, walk back out
        p.front() = base;
        for (std::size_t i = 0; i + 1 < n; ++i)
            p[i + 1] = place_at_distance(p[i], p[i + 1], chain.bone_lengths[i]);

        err = (p.back() - target).norm();

        // Folded chains can creep (contraction ratio near 1) while slowly
        // re-aiming. The reaching cycle is a fixed-point map, so a secant
        // extrapolation along the last step jumps ahead; it is kept only
        // when it reduces the error, after lengths are re-imposed by a
        // forward pass, so monotonicity and bone lengths are preserved.
        if (err >= tolerance && !prev_p.empty() && err > 0.9 * prev_err && err < prev_err) {
            double rho = err / prev_err;
            double alpha = std::min(rho / (1.0 - rho), 64.0);
            for (; alpha >= 1.0; alpha *= 0.5) {
                extrapolated[0] = base;
                for (std::size_t i = 1; i < n; ++i)
                    extrapolated[i] = p[i] + (p[i] - prev_p[i]) * alpha;
                for (std::size_t i = 0; i + 1 < n; ++i)
                    extrapolated[i + 1] = place_at_distance(extrapolated[i], extrapolated[i + 1],
                                                            chain.bone_lengths[i]);
                double ex_err = (extrapolated.back() - target).norm();
                if (ex_err < err) {
                    p = extrapolated;
                    err = ex_err;
                    break;
                }
            }
        }

        prev_p = std::move(before);
        prev_err = err;
        result.iterations = iter + 1;
        result.error_trace.push_back(err);
        if (err < tolerance) break;
    }
    result.end_error = err;
    return result;
}

Pose positions_to_pose(const Skeleton& skeleton, const IkChain& chain,
                       const std::vector<Vec3>& solved_positions, const Pose& reference_pose) {
    std::size_t n = chain.joint_indices.size();
    if (solved_positions.size() != n)
        throw std::runtime_error("positions_to_pose: wrong number of chain positions");

    Pose pose = reference_pose;
    // Walk the chain proximal to distal. Each step recomputes FK under the
    // partially-updated pose, then rotates joint i so its bone points at the
    // solved child position.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        FkState fk = fk_full(skeleton, pose);
        int ji = chain.joint_indices[i];
        int jc = chain.joint_indices[i + 1];

        Vec3 cur_dir = fk.positions[jc] - fk.positions[ji];
        Vec3 want_dir = solved_positions[i + 1] - solved_positions[i];
        double cur_len = cur_dir.norm(), want_len = want_dir.norm();
        if (cur_len < 1e-12 || want_len < 1e-12)
            throw std::runtime_error("positions_to_pose: degenerate bone direction");
        cur_dir = cur_dir / cur_len;
        want_dir = want_dir / want_len;

        // joint-local X in world resolves the antipodal ambiguity
        Vec3 local_x_world = fk.rotations[ji] * Vec3{1, 0, 0};
        Mat3 align = rotation_between(cur_dir, want_dir, local_x_world);

        const Joint& joint = skeleton.joints[ji];
        Mat3 parent_rot = joint.parent ? fk.rotations[*joint.parent] : Mat3::identity();
        Mat3 new_world = align * fk.rotations[ji];
        Mat3 new_local = parent_rot.transposed() * new_world;

        std::array<double, 3> angles = matrix_to_euler(joint.rotation_order(), new_local);
        int off = skeleton.angle_offset[ji];
        pose.joint_angles[off] = angles[0];
        pose.joint_angles[off + 1] = angles[1];
        pose.joint_angles[off + 2] = angles[2];
    }
    return pose;
}

Pose ik_frame(const Skeleton& skeleton, const Pose& pose, const IkChain& chain,
              const Vec3& target, const IkParams& params) {
    FkState fk = fk_full(skeleton, pose);
    std::vector<Vec3> initial = chain_positions(chain, fk);
    if ((initial.back() - target).norm() < params.tolerance) return pose;

    FabrikResult solved = fabrik_solve(chain, initial, target, params.tolerance, params.max_iters);
    return positions_to_pose(skeleton, chain, solved.positions, pose);
}

}  // namespace mforge
