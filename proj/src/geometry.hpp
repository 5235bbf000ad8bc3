#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "errors.hpp"

namespace cyclereg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kDefaultAxisEpsilon = 1e-9;

// Element of SE(3): x -> R*x + t.
struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static RigidTransform identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    RigidTransform inverse() const {
        RigidTransform inv;
        inv.rotation = rotation.transpose();
        inv.translation = -(inv.rotation * translation);
        return inv;
    }
};

// Composition: (a * b)(x) = a(b(x)).
inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
    RigidTransform out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

bool is_rotation(const Mat3& r, double tol = 1e-9);

// Rotation by theta around the z-axis, zero translation.
RigidTransform rot_z(double theta);

// Maps p1 to the origin and p2 onto the +z axis at distance |p2 - p1|.
// The free rotation about z is pinned by the shortest-arc choice taking the
// unit chord direction to (0,0,1); a chord within 1e-9 of -z uses a half
// turn about x instead. Throws DegenerateAxis when |p2 - p1| <= eps.
RigidTransform align_z(const Vec3& p1, const Vec3& p2,
                       double eps = kDefaultAxisEpsilon);

// Data-driven change of frame for one scan pair: h sends scan A into the
// shared virtual-axis frame, g does the same for scan B.
struct PredefinedPair {
    RigidTransform h;
    RigidTransform g;
    double axis_length_a = 0.0;
    double axis_length_b = 0.0;
};

PredefinedPair make_predefined(const Vec3& p1_a, const Vec3& p2_a,
                               const Vec3& p1_b, const Vec3& p2_b,
                               double eps = kDefaultAxisEpsilon);

// h_next * g_prev^-1; the fixed SE(3) factor between consecutive virtual
// axes expressed in the shared middle scan.
inline RigidTransform k_matrix(const RigidTransform& h_next,
                               const RigidTransform& g_prev) {
    return h_next * g_prev.inverse();
}

// Relative rotation angle in degrees; argument clamped to [-1, 1].
double rotation_angle_error_deg(const Mat3& a, const Mat3& b);

Vec3 so3_log(const Mat3& r);
Mat3 so3_exp(const Vec3& v);

inline double wrap_angle(double theta) {
    theta = std::fmod(theta + M_PI, 2.0 * M_PI);
    if (theta < 0) theta += 2.0 * M_PI;
    return theta - M_PI;
}

}  // namespace cyclereg
