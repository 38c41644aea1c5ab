#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "tricrystal/geometry.hpp"
#include "tricrystal/lattice.hpp"
#include "tricrystal/rng.hpp"

using namespace tricrystal;

namespace {

bool near(const Mat2& a, const Mat2& b, double tol) { return (a - b).frobenius() <= tol; }

TrianglePlacement unit_triangle() { return {{Vec2{0, 0}, Vec2{1, 0}, embed(0, 1)}}; }

TrianglePlacement transformed(const TrianglePlacement& t, const Mat2& m, const Vec2& shift) {
    TrianglePlacement out;
    for (int k = 0; k < 3; ++k) out.corners[k] = m * t.corners[k] + shift;
    return out;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("jacobian of identity, scaling and rotation") {
    const auto ref = unit_triangle();
    CHECK(near(jacobian_from_corners(ref, ref), Mat2::identity(), 1e-14));
    CHECK(near(jacobian_from_corners(ref, transformed(ref, Mat2::scaled_identity(1.03), {})),
               Mat2::scaled_identity(1.03), 1e-14));
    const Mat2 r90 = Mat2::rotation(std::numbers::pi / 2);
    const Mat2 j = jacobian_from_corners(ref, transformed(ref, r90, {0.3, -2.0}));
    CHECK(std::abs(j.a) <= 1e-12);
    CHECK(std::abs(j.b + 1.0) <= 1e-12);
    CHECK(std::abs(j.c - 1.0) <= 1e-12);
    CHECK(std::abs(j.d) <= 1e-12);
}

TEST_CASE("jacobian recovers affine maps exactly for representable inputs") {
    const TrianglePlacement ref{{Vec2{0, 0}, Vec2{2, 0}, Vec2{0, 4}}};
    const Mat2 m{1.5, -0.25, 0.75, 2.0};
    CHECK(jacobian_from_corners(ref, transformed(ref, m, {3.0, 5.0})) == m);
}

TEST_CASE("degenerate reference triangle throws") {
    const TrianglePlacement flat{{Vec2{0, 0}, Vec2{1, 0}, Vec2{2, 0}}};
    CHECK_THROWS_AS(jacobian_from_corners(flat, unit_triangle()), std::domain_error);
}

TEST_CASE("jacobian_from_edges agrees with the corner form") {
    Rng rng(7);
    const auto ref = unit_triangle();
    for (int i = 0; i < 200; ++i) {
        const Mat2 m = oracle::random_matrix(rng);
        const auto img = transformed(ref, m, {rng.uniform(), rng.uniform()});
        const Mat2 a = jacobian_from_corners(ref, img);
        const Mat2 b = jacobian_from_edges(ref.corners[1] - ref.corners[0], ref.corners[2] - ref.corners[0],
                                           img.corners[1] - img.corners[0], img.corners[2] - img.corners[0]);
        CHECK(near(a, m, 1e-12));
        CHECK(near(a, b, 1e-13));
    }
}

TEST_CASE("dist_so2 examples") {
    CHECK(dist_so2(Mat2::identity()) == 0.0);
    CHECK(dist_so2(Mat2::scaled_identity(2.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(dist_so2({2.0, 0.0, 0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(dist_so2({2.0, 0.0, 0.0, 1.0}) - oracle::grid_dist_so2({2.0, 0.0, 0.0, 1.0}, 1000000)) <= 1e-6);
    // Reflection: singular values (1,1), det < 0 so the distance is 2.
    CHECK(dist_so2({1.0, 0.0, 0.0, -1.0}) == doctest::Approx(2.0));
    CHECK(dist_so2({}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("dist_so2 matches the angle-grid oracle including det < 0") {
    Rng rng(11);
    int negative = 0;
    for (int i = 0; i < 2000; ++i) {
        const Mat2 m = oracle::random_matrix(rng);
        negative += m.det() < 0;
        CHECK(std::abs(dist_so2(m) - oracle::grid_dist_so2(m)) <= 1e-6);
    }
    CHECK(negative > 500);
}

TEST_CASE("singular values") {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const Mat2 m = oracle::random_matrix(rng);
        const auto sv = singular_values(m);
        CHECK(sv.largest >= sv.smallest);
        CHECK(sv.smallest >= 0.0);
        CHECK(sv.largest * sv.smallest == doctest::Approx(std::abs(m.det())).epsilon(1e-10));
        CHECK(sv.largest * sv.largest + sv.smallest * sv.smallest ==
              doctest::Approx(m.frobenius_sq()).epsilon(1e-10));
    }
}

TEST_CASE("dist_so2 is rotation invariant and vanishes exactly on rotations") {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const Mat2 m = oracle::random_matrix(rng);
        const double d = dist_so2(m);
        for (int k = 0; k < 100; ++k) {
            const Mat2 r = Mat2::rotation(2 * std::numbers::pi * rng.uniform());
            CHECK(std::abs(dist_so2(r * m) - d) <= 1e-10);
            CHECK(std::abs(dist_so2(m * r) - d) <= 1e-10);
        }
    }
    for (int k = 0; k < 100; ++k) {
        const Mat2 r = Mat2::rotation(2 * std::numbers::pi * rng.uniform());
        CHECK(dist_so2(r) <= 1e-10);
        CHECK(dist_so2(1.001 * r) > 1e-4);
    }
}

TEST_CASE("best rotation of a single rotation and of a pair") {
    const std::vector<WeightedJacobian> one{{Mat2::rotation(0.7), 1.0}};
    CHECK(near(best_rotation(one), Mat2::rotation(0.7), 1e-12));
    for (double t0 : {-3.0, -1.2, 0.4, 2.9}) {
        const std::vector<WeightedJacobian> two{{Mat2::identity(), 1.0}, {Mat2::rotation(t0), 1.0}};
        CHECK(near(best_rotation(two), Mat2::rotation(t0 / 2), 1e-12));
        const std::vector<std::pair<Mat2, double>> items{{Mat2::identity(), 1.0}, {Mat2::rotation(t0), 1.0}};
        CHECK(near(Mat2::rotation(oracle::grid_best_angle(items, 1000000)), Mat2::rotation(t0 / 2), 1e-6));
    }
}

TEST_CASE("best rotation is optimal against grid angles and the grid oracle") {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<WeightedJacobian> js;
        std::vector<std::pair<Mat2, double>> items;
        const int k = 1 + static_cast<int>(rng.below(6));
        for (int i = 0; i < k; ++i) {
            const Mat2 m = oracle::random_matrix(rng);
            const double w = rng.uniform() + 0.01;
            js.push_back({m, w});
            items.emplace_back(m, w);
        }
        const Mat2 r = best_rotation(js);
        CHECK(std::abs(r.det() - 1.0) <= 1e-12);
        const double theta = std::atan2(r.c, r.a);
        const double best = oracle::rotation_objective(items, theta);
        for (int g = 0; g < 360; ++g)
            CHECK(best <= oracle::rotation_objective(items, g * std::numbers::pi / 180) + 1e-12);
        CHECK(near(r, Mat2::rotation(oracle::grid_best_angle(items)), 1e-6));
    }
}

TEST_CASE("best rotation is covariant under left rotation") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<WeightedJacobian> js;
        for (int i = 0; i < 4; ++i) js.push_back({oracle::random_matrix(rng), rng.uniform() + 0.1});
        const Mat2 q = Mat2::rotation(2 * std::numbers::pi * rng.uniform());
        auto rotated = js;
        for (auto& j : rotated) j.jacobian = q * j.jacobian;
        CHECK(near(best_rotation(rotated), q * best_rotation(js), 1e-10));
    }
}

TEST_CASE("best rotation degenerate and invalid weights") {
    const std::vector<WeightedJacobian> cancel{{Mat2::identity(), 1.0}, {Mat2::scaled_identity(-1.0), 1.0}};
    CHECK(best_rotation(cancel) == Mat2::identity());
    const std::vector<WeightedJacobian> zero{{Mat2::identity(), 0.0}};
    CHECK_THROWS_AS(best_rotation(zero), std::invalid_argument);
    const std::vector<WeightedJacobian> negative{{Mat2::identity(), 1.0}, {Mat2::identity(), -1.0}};
    CHECK_THROWS_AS(best_rotation(negative), std::invalid_argument);
}

TEST_CASE("heron area") {
    CHECK(heron_area(1, 1, 1) == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-15));
    CHECK(heron_area(3, 4, 5) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(heron_area(1, 2, 3) == 0.0);
    CHECK_THROWS_AS(heron_area(1, 1, 3), std::domain_error);
    const double l = 1.04;
    TrianglePlacement t{{Vec2{0, 0}, l * Vec2{1, 0}, l * embed(0, 1)}};
    CHECK(std::abs(heron_area(l, l, l) - signed_area(t)) <= 1e-12);
    CHECK(std::abs(heron_area(l, l, l) - std::sqrt(3.0) * l * l / 4) <= 1e-12);
}

TEST_CASE("heron gradient check") {
    CHECK(heron_gradient_check(1.0) <= 1e-8);
    CHECK(heron_gradient_check(1.01) <= 1e-8);
    // Central differences are second order: halving the step quarters the error.
    const double e1 = heron_gradient_check(1.0, 1e-2);
    const double e2 = heron_gradient_check(1.0, 5e-3);
    CHECK(e1 > 0.0);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("signed area orientation and agreement with heron") {
    const auto t = unit_triangle();
    CHECK(signed_area(t) == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-15));
    TrianglePlacement swapped = t;
    std::swap(swapped.corners[1], swapped.corners[2]);
    CHECK(signed_area(swapped) == doctest::Approx(-std::sqrt(3.0) / 4).epsilon(1e-15));

    Rng rng(19);
    for (int i = 0; i < 10000; ++i) {
        TrianglePlacement r;
        for (auto& c : r.corners) c = {rng.uniform() * 2 - 1, rng.uniform() * 2 - 1};
        const auto s = r.side_lengths();
        const auto v = r.side_vectors();
        CHECK((v[0] + v[1] + v[2]).norm() <= 1e-15);
        CHECK(std::abs(std::abs(signed_area(r)) - heron_area(s[0], s[1], s[2])) <= 1e-12);
    }
}

TEST_CASE("procrustes angle") {
    CHECK(procrustes_angle(Mat2::rotation(0.3)) == doctest::Approx(0.3));
    CHECK(procrustes_angle({}) == 0.0);
}

TEST_CASE("side length and so2 distance are comparable on near-isometric matrices") {
    // Sum (a_j - 1)^2 over the unit triangle sides vs dist^2: positive lower ratio.
    Rng rng(23);
    const std::array<Vec2, 3> sides{Vec2{1, 0}, embed(0, 1), embed(-1, 1)};
    double lo = 1e300, hi = 0;
    int kept = 0;
    while (kept < 20000) {
        const Mat2 eps = oracle::random_matrix(rng, 0.05);
        const Mat2 m = Mat2::rotation(2 * std::numbers::pi * rng.uniform()) * (Mat2::identity() + eps);
        bool ok = m.det() > 0;
        double s = 0;
        for (const auto& v : sides) {
            const double a = (m * v).norm();
            ok = ok && std::abs(a - 1) < 0.05;
            s += (a - 1) * (a - 1);
        }
        const double d = dist_so2(m);
        if (!ok || d == 0) continue;
        ++kept;
        lo = std::min(lo, s / (d * d));
        hi = std::max(hi, s / (d * d));
    }
    CHECK(lo > 0.0);
    CHECK(std::isfinite(hi));
}

}  // TEST_SUITE
