#include "tricrystal/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace tricrystal {

Mat2 Mat2::rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c, -s, s, c};
}

std::array<Vec2, 3> TrianglePlacement::side_vectors() const {
    return {corners[2] - corners[1], corners[0] - corners[2], corners[1] - corners[0]};
}

std::array<double, 3> TrianglePlacement::side_lengths() const {
    const auto s = side_vectors();
    return {s[0].norm(), s[1].norm(), s[2].norm()};
}

SingularValues singular_values(const Mat2& m) {
    // m = conformal part + anticonformal part; |q| +- |r| are the singular values.
    const double q = 0.5 * std::hypot(m.a + m.d, m.c - m.b);
    const double r = 0.5 * std::hypot(m.a - m.d, m.c + m.b);
    return {q + r, std::abs(q - r)};
}

double dist_so2(const Mat2& m) {
    const SingularValues s = singular_values(m);
    const double d1 = s.largest - 1.0;
    const double d2 = m.det() >= 0.0 ? s.smallest - 1.0 : s.smallest + 1.0;
    return std::hypot(d1, d2);
}

double procrustes_angle(const Mat2& m) {
    const double cos_part = m.a + m.d;
    const double sin_part = m.c - m.b;
    if (cos_part == 0.0 && sin_part == 0.0) {
        return 0.0;
    }
    return std::atan2(sin_part, cos_part);
}

Mat2 best_rotation(std::span<const WeightedJacobian> jacobians) {
    Mat2 sum{};
    double total_weight = 0.0;
    for (const auto& [jac, w] : jacobians) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("best_rotation: negative or NaN weight");
        }
        sum += w * jac;
        total_weight += w;
    }
    if (!(total_weight > 0.0)) {
        throw std::invalid_argument("best_rotation: no positive weight");
    }
    return Mat2::rotation(procrustes_angle(sum));
}

Mat2 jacobian_from_edges(const Vec2& ref_u, const Vec2& ref_v, const Vec2& img_u, const Vec2& img_v) {
    const double det = cross(ref_u, ref_v);
    // inverse of [ref_u ref_v]
    const Mat2 inv{ref_v.y / det, -ref_v.x / det, -ref_u.y / det, ref_u.x / det};
    return Mat2::from_columns(img_u, img_v) * inv;
}

Mat2 jacobian_from_corners(const TrianglePlacement& reference, const TrianglePlacement& image) {
    const Vec2 ref_u = reference.corners[1] - reference.corners[0];
    const Vec2 ref_v = reference.corners[2] - reference.corners[0];
    const double scale = std::max(ref_u.norm_sq(), ref_v.norm_sq());
    if (std::abs(cross(ref_u, ref_v)) <= 1e-14 * scale || scale == 0.0) {
        throw std::domain_error("jacobian_from_corners: degenerate reference triangle");
    }
    return jacobian_from_edges(ref_u, ref_v, image.corners[1] - image.corners[0],
                               image.corners[2] - image.corners[0]);
}

double heron_area(double a1, double a2, double a3) {
    std::array<double, 3> s{a1, a2, a3};
    std::sort(s.begin(), s.end(), std::greater<>());
    const double a = s[0], b = s[1], c = s[2];
    if (c < 0.0) {
        throw std::domain_error("heron_area: negative side length");
    }
    // Kahan's ordering of the factors avoids cancellation for needle-like triangles.
    const double f1 = a + (b + c);
    const double f2 = c - (a - b);
    const double f3 = c + (a - b);
    const double f4 = a + (b - c);
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * a;
    if (f2 < -slack) {
        throw std::domain_error("heron_area: triangle inequality violated");
    }
    const double prod = f1 * std::max(f2, 0.0) * f3 * f4;
    return 0.25 * std::sqrt(prod);
}

double heron_gradient_check(double l, double step) {
    const double expected = l / (2.0 * std::sqrt(3.0));
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
        std::array<double, 3> plus{l, l, l};
        std::array<double, 3> minus{l, l, l};
        plus[j] += step;
        minus[j] -= step;
        const double fd = (heron_area(plus[0], plus[1], plus[2]) - heron_area(minus[0], minus[1], minus[2])) /
                          (2.0 * step);
        worst = std::max(worst, std::abs(fd - expected));
    }
    return worst;
}

double signed_area(const TrianglePlacement& t) {
    return 0.5 * cross(t.corners[1] - t.corners[0], t.corners[2] - t.corners[0]);
}

}  // namespace tricrystal
