#include "geometry.hpp"

#include <algorithm>
#include <cmath>

namespace cyclereg {

bool is_rotation(const Mat3& r, double tol) {
    const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

RigidTransform rot_z(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    RigidTransform out;
    out.rotation << c, -s, 0.0,
                    s,  c, 0.0,
                    0.0, 0.0, 1.0;
    return out;
}

RigidTransform align_z(const Vec3& p1, const Vec3& p2, double eps) {
    const Vec3 chord = p2 - p1;
    const double len = chord.norm();
    if (!(len > eps)) {
        throw Error(ErrorCode::DegenerateAxis,
                    "align_z: anchor points coincide (chord length " +
                        std::to_string(len) + ")");
    }
    const Vec3 d = chord / len;
    const double c = d.z();  // dot(d, e_z)

    Mat3 rot;
    if (c < -1.0 + 1e-9) {
        // chord points along -z: half turn about x
        rot << 1.0, 0.0, 0.0,
               0.0, -1.0, 0.0,
               0.0, 0.0, -1.0;
    } else {
        const Vec3 v = d.cross(Vec3::UnitZ());
        Mat3 vx;
        vx << 0.0, -v.z(), v.y(),
              v.z(), 0.0, -v.x(),
              -v.y(), v.x(), 0.0;
        rot = Mat3::Identity() + vx + vx * vx * (1.0 / (1.0 + c));
    }

    RigidTransform out;
    out.rotation = rot;
    out.translation = -(rot * p1);
    return out;
}

PredefinedPair make_predefined(const Vec3& p1_a, const Vec3& p2_a,
                               const Vec3& p1_b, const Vec3& p2_b, double eps) {
    PredefinedPair pair;
    pair.h = align_z(p1_a, p2_a, eps);
    pair.g = align_z(p1_b, p2_b, eps);
    pair.axis_length_a = (p2_a - p1_a).norm();
    pair.axis_length_b = (p2_b - p1_b).norm();
    return pair;
}

double rotation_angle_error_deg(const Mat3& a, const Mat3& b) {
    const double tr = (a * b.transpose()).trace();
    const double arg = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(arg) * 180.0 / M_PI;
}

Vec3 so3_log(const Mat3& r) {
    const double arg = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    const double angle = std::acos(arg);

    if (angle < 1e-10) {
        // first-order: R ~ I + [v]x
        return Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)) * 0.5;
    }

    if (angle > M_PI - 1e-4) {
        // Near pi the antisymmetric part vanishes; recover the axis from the
        // symmetric part B = (R + I)/2 = axis*axis^T + O(pi - angle).
        const Mat3 b = (r + Mat3::Identity()) * 0.5;
        int k = 0;
        b.diagonal().maxCoeff(&k);
        Vec3 axis;
        axis[k] = std::sqrt(std::max(b(k, k), 0.0));
        for (int j = 0; j < 3; ++j) {
            if (j != k) axis[j] = b(k, j) / axis[k];
        }
        axis.normalize();
        // Disambiguate the overall sign with the antisymmetric part when it
        // is not exactly zero; at exactly pi both signs are valid.
        const Vec3 anti(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
        if (anti.dot(axis) < 0) axis = -axis;
        return axis * angle;
    }

    const double scale = angle / (2.0 * std::sin(angle));
    return Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)) * scale;
}

Mat3 so3_exp(const Vec3& v) {
    const double angle = v.norm();
    if (angle < 1e-12) {
        Mat3 vx;
        vx << 0.0, -v.z(), v.y(),
              v.z(), 0.0, -v.x(),
              -v.y(), v.x(), 0.0;
        return Mat3::Identity() + vx;
    }
    const Vec3 axis = v / angle;
    return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

}  // namespace cyclereg
