#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace mforge {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

inline double deg_to_rad(double d) { return d * (kPi / 180.0); }
inline double rad_to_deg(double r) { return r * (180.0 / kPi); }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    bool operator==(const Vec3& o) const = default;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const {
        double n = norm();
        return n > 0.0 ? *this / n : Vec3{};
    }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Row-major 3x3 matrix. Used for joint rotations and frame changes.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double& operator()(int r, int c) { return m[r * 3 + c]; }
    double operator()(int r, int c) const { return m[r * 3 + c]; }

    static Mat3 identity() { return {}; }

    static Mat3 rot_x(double a) {
        double c = std::cos(a), s = std::sin(a);
        return {{1, 0, 0, 0, c, -s, 0, s, c}};
    }
    static Mat3 rot_y(double a) {
        double c = std::cos(a), s = std::sin(a);
        return {{c, 0, s, 0, 1, 0, -s, 0, c}};
    }
    static Mat3 rot_z(double a) {
        double c = std::cos(a), s = std::sin(a);
        return {{c, -s, 0, s, c, 0, 0, 0, 1}};
    }

    /// Rotation about axis 0=X, 1=Y, 2=Z.
    static Mat3 rot_axis(int axis, double a) {
        switch (axis) {
            case 0: return rot_x(a);
            case 1: return rot_y(a);
            default: return rot_z(a);
        }
    }

    /// Rodrigues rotation about a unit axis.
    static Mat3 axis_angle(const Vec3& axis, double angle) {
        double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
        double x = axis.x, y = axis.y, z = axis.z;
        return {{t * x * x + c,     t * x * y - s * z, t * x * z + s * y,
                 t * x * y + s * z, t * y * y + c,     t * y * z - s * x,
                 t * x * z - s * y, t * y * z + s * x, t * z * z + c}};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) +
                          (*this)(i, 2) * o(2, j);
        return r;
    }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 transposed() const {
        return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
    }
};

/// Frobenius distance between two matrices, handy for rotation comparisons.
inline double frobenius_distance(const Mat3& a, const Mat3& b) {
    double s = 0.0;
    for (int i = 0; i < 9; ++i) {
        double d = a.m[i] - b.m[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Minimal rotation taking unit vector `from` onto unit vector `to`.
/// For the antipodal case the rotation axis is ambiguous; `fallback_axis`
/// (any direction not parallel to `from`) resolves it.
inline Mat3 rotation_between(const Vec3& from, const Vec3& to, const Vec3& fallback_axis) {
    Vec3 w = from.cross(to);
    double s = w.norm();
    double c = from.dot(to);
    if (s < 1e-12) {
        if (c > 0.0) return Mat3::identity();
        Vec3 axis = fallback_axis - from * fallback_axis.dot(from);
        if (axis.norm() < 1e-12) {
            // fallback parallel to `from`; pick whichever world axis is least aligned
            Vec3 alt = std::fabs(from.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
            axis = alt - from * alt.dot(from);
        }
        return Mat3::axis_angle(axis.normalized(), kPi);
    }
    return Mat3::axis_angle(w / s, std::atan2(s, std::clamp(c, -1.0, 1.0)));
}

/// Composes R = R_axis0(a0) * R_axis1(a1) * R_axis2(a2) for a declared
/// rotation-channel order (each axis 0=X,1=Y,2=Z, all distinct).
inline Mat3 euler_to_matrix(const std::array<int, 3>& order, const std::array<double, 3>& angles) {
    return Mat3::rot_axis(order[0], angles[0]) * Mat3::rot_axis(order[1], angles[1]) *
           Mat3::rot_axis(order[2], angles[2]);
}

namespace detail {
// sin/cos extraction for a pure single-axis rotation matrix
inline double single_axis_angle(const Mat3& r, int axis) {
    int u = (axis + 1) % 3, v = (axis + 2) % 3;
    return std::atan2(r(v, u), r(u, u));
}
}  // namespace detail

/// Recovers (a0, a1, a2) with R = R_A(a0) * R_B(a1) * R_C(a2) for distinct
/// axes A,B,C. Near gimbal lock the third angle is set to zero and the first
/// absorbs the remaining rotation; the recomposed matrix still matches R.
inline std::array<double, 3> matrix_to_euler(const std::array<int, 3>& order, const Mat3& r) {
    int a = order[0], b = order[1], c = order[2];
    // sign of the axis permutation (a,b,c)
    bool even = (b == (a + 1) % 3);
    double sgn = even ? 1.0 : -1.0;
    double sb = std::clamp(sgn * r(a, c), -1.0, 1.0);
    double mid = std::asin(sb);
    if (std::fabs(sb) > 1.0 - 1e-10) {
        // gimbal lock: R == R_A(a0) * R_B(+-pi/2)
        Mat3 ra = r * Mat3::rot_axis(b, mid).transposed();
        return {detail::single_axis_angle(ra, a), mid, 0.0};
    }
    double first = std::atan2(-sgn * r(b, c), r(c, c));
    double third = std::atan2(-sgn * r(a, b), r(a, a));
    return {first, mid, third};
}

}  // namespace mforge
