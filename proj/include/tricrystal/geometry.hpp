#ifndef TRICRYSTAL_GEOMETRY_HPP
#define TRICRYSTAL_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <span>

namespace tricrystal {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    double norm() const { return std::hypot(x, y); }
    constexpr double norm_sq() const { return x * x + y * y; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 scaled_identity(double s) { return {s, 0.0, 0.0, s}; }
    static Mat2 rotation(double theta);
    /// Matrix with the given columns.
    static constexpr Mat2 from_columns(const Vec2& c0, const Vec2& c1) { return {c0.x, c1.x, c0.y, c1.y}; }

    constexpr double det() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }
    constexpr double frobenius_sq() const { return a * a + b * b + c * c + d * d; }
    double frobenius() const { return std::sqrt(frobenius_sq()); }
    constexpr Mat2 transpose() const { return {a, c, b, d}; }

    constexpr Mat2& operator+=(const Mat2& o) { a += o.a; b += o.b; c += o.c; d += o.d; return *this; }
    constexpr Mat2& operator-=(const Mat2& o) { a -= o.a; b -= o.b; c -= o.c; d -= o.d; return *this; }
    constexpr Mat2& operator*=(double s) { a *= s; b *= s; c *= s; d *= s; return *this; }

    friend constexpr Mat2 operator+(Mat2 m, const Mat2& o) { return m += o; }
    friend constexpr Mat2 operator-(Mat2 m, const Mat2& o) { return m -= o; }
    friend constexpr Mat2 operator*(double s, Mat2 m) { return m *= s; }
    friend constexpr Mat2 operator*(Mat2 m, double s) { return m *= s; }
    friend constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend constexpr Vec2 operator*(const Mat2& m, const Vec2& v) {
        return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

/// Corner positions A1, A2, A3 of a (possibly degenerate) triangle in the plane.
struct TrianglePlacement {
    std::array<Vec2, 3> corners;

    /// Side vectors a1 = A3 - A2, a2 = A1 - A3, a3 = A2 - A1; they sum to zero.
    std::array<Vec2, 3> side_vectors() const;
    std::array<double, 3> side_lengths() const;
};

struct SingularValues {
    double largest = 0.0;
    double smallest = 0.0;  // always >= 0
};

/// Closed-form singular values of a 2x2 matrix.
SingularValues singular_values(const Mat2& m);

/// Frobenius distance from `m` to SO(2).
double dist_so2(const Mat2& m);

/// Angle of the rotation in SO(2) that maximizes tr(R^T m), i.e. the planar
/// Procrustes solution. Returns 0 when the antisymmetric-trace pair vanishes.
double procrustes_angle(const Mat2& m);

struct WeightedJacobian {
    Mat2 jacobian;
    double weight = 1.0;
};

/// Rotation R minimizing sum_i w_i |M_i - R|_F^2. Throws std::invalid_argument
/// if no weight is positive (or any weight is negative).
Mat2 best_rotation(std::span<const WeightedJacobian> jacobians);

/// Linear part of the affine map carrying `reference` onto `image`.
/// Throws std::domain_error for a zero-area reference triangle.
Mat2 jacobian_from_corners(const TrianglePlacement& reference, const TrianglePlacement& image);

/// Fast path: the matrix M with M*ref_u = img_u and M*ref_v = img_v.
Mat2 jacobian_from_edges(const Vec2& ref_u, const Vec2& ref_v, const Vec2& img_u, const Vec2& img_v);

/// Area from side lengths. Throws std::domain_error when the triangle
/// inequality fails beyond rounding; degenerate triangles give 0.
double heron_area(double a1, double a2, double a3);

/// Max over the three sides of |dA/da_j(l,l,l) - l/(2 sqrt 3)| using central
/// differences with the given step.
double heron_gradient_check(double l, double step = 1e-6);

/// Half the determinant of (A2 - A1, A3 - A1); positive for counterclockwise corners.
double signed_area(const TrianglePlacement& t);

}  // namespace tricrystal

#endif  // TRICRYSTAL_GEOMETRY_HPP
