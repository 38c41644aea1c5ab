#include "oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace oracle {

using tricrystal::embed;
using tricrystal::Vec2;

double brute_force_hamiltonian(const Configuration& c) {
    const auto& lat = c.lattice();
    const auto& spec = c.spec();
    const int n = lat.size();
    const int sites = lat.site_count();
    double pair_sum = 0.0;
    for (int x = 0; x < sites; ++x) {
        if (c.is_hole(x)) continue;
        const Vec2 ex = embed(lat.site(x));
        const Vec2 wx = spec.l * ex + c.displacement(x);
        for (int y = 0; y < sites; ++y) {
            if (y == x || c.is_hole(y)) continue;
            const Vec2 ey = embed(lat.site(y));
            for (int z1 = -1; z1 <= 1; ++z1) {
                for (int z2 = -1; z2 <= 1; ++z2) {
                    const Vec2 period = embed(n * z1, n * z2);
                    const Vec2 rel = ey + period - ex;
                    if (std::abs(rel.norm() - 1.0) > 1e-9) continue;
                    const Vec2 wy = spec.l * (ey + period) + c.displacement(y);
                    pair_sum += 0.5 * spec.potential.value((wy - wx).norm());
                }
            }
        }
    }
    return pair_sum + spec.m * static_cast<double>(c.defect_count());
}

namespace {

template <class F>
double golden_min(F&& f, double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - g * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + g * (b - a); f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

template <class F>
double grid_argmin(F&& f, int points) {
    const double two_pi = 2.0 * std::numbers::pi;
    double best = 0.0, best_val = f(0.0);
    for (int i = 1; i < points; ++i) {
        const double t = two_pi * i / points;
        const double v = f(t);
        if (v < best_val) { best_val = v; best = t; }
    }
    const double h = two_pi / points;
    return golden_min(f, best - h, best + h);
}

}  // namespace

double grid_dist_so2(const Mat2& m, int points) {
    auto f = [&](double t) { return (m - Mat2::rotation(t)).frobenius_sq(); };
    return std::sqrt(std::max(0.0, f(grid_argmin(f, points))));
}

double rotation_objective(std::span<const std::pair<Mat2, double>> items, double theta) {
    const Mat2 r = Mat2::rotation(theta);
    double s = 0.0;
    for (const auto& [m, w] : items) s += w * (m - r).frobenius_sq();
    return s;
}

double grid_best_angle(std::span<const std::pair<Mat2, double>> items, int points) {
    return grid_argmin([&](double t) { return rotation_objective(items, t); }, points);
}

Mat2 random_matrix(tricrystal::Rng& rng, double scale) {
    auto u = [&] { return scale * (2.0 * rng.uniform() - 1.0); };
    return {u(), u(), u(), u()};
}

HarmonicCrystal::HarmonicCrystal(int n, double kappa) : n_(n), kappa_(kappa) {
    const tricrystal::Lattice lat(n);
    const int dof = 2 * lat.site_count();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dof, dof);
    for (int e = 0; e < lat.edge_count(); ++e) {
        const auto [x, y] = lat.edge_endpoints(e);
        const Vec2 dir = tricrystal::unit_direction(lat.edge(e).direction);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(dof);
        b(2 * y) += dir.x;
        b(2 * y + 1) += dir.y;
        b(2 * x) -= dir.x;
        b(2 * x + 1) -= dir.y;
        k += kappa_ * b * b.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k);
    const double cutoff = 1e-9 * solver.eigenvalues().maxCoeff();
    for (int i = 0; i < dof; ++i) {
        const double lambda = solver.eigenvalues()(i);
        if (lambda <= cutoff) continue;
        eigenvalues_.push_back(lambda);
        const Eigen::VectorXd v = solver.eigenvectors().col(i);
        eigenvectors_.emplace_back(v.data(), v.data() + dof);
    }
    nonzero_ = static_cast<int>(eigenvalues_.size());

    double total = 0.0;
    for (int e = 0; e < lat.edge_count(); ++e) {
        const auto [x, y] = lat.edge_endpoints(e);
        for (std::size_t m = 0; m < eigenvalues_.size(); ++m) {
            const auto& v = eigenvectors_[m];
            const double dx = v[2 * y] - v[2 * x];
            const double dy = v[2 * y + 1] - v[2 * x + 1];
            total += (dx * dx + dy * dy) / eigenvalues_[m];
        }
    }
    unit_trace_ = total / lat.edge_count();
}

double HarmonicCrystal::expected_bond_dev_sq(double beta) const { return unit_trace_ / beta; }

double HarmonicCrystal::expected_energy(double beta) const { return nonzero_ / (2.0 * beta); }

std::vector<Vec2> HarmonicCrystal::sample(double beta, tricrystal::Rng& rng) const {
    std::vector<Vec2> u(static_cast<std::size_t>(n_) * n_);
    for (std::size_t m = 0; m < eigenvalues_.size(); ++m) {
        // Box-Muller from the project's generator keeps the oracle seedable.
        const double r1 = 1.0 - rng.uniform();
        const double r2 = rng.uniform();
        const double g = std::sqrt(-2.0 * std::log(r1)) * std::cos(2.0 * std::numbers::pi * r2);
        const double amp = g / std::sqrt(beta * eigenvalues_[m]);
        const auto& v = eigenvectors_[m];
        for (std::size_t s = 0; s < u.size(); ++s) {
            u[s].x += amp * v[2 * s];
            u[s].y += amp * v[2 * s + 1];
        }
    }
    return u;
}

double HarmonicCrystal::bond_dev_sq(std::span<const Vec2> u) const {
    const tricrystal::Lattice lat(n_);
    double total = 0.0;
    for (int e = 0; e < lat.edge_count(); ++e) {
        const auto [x, y] = lat.edge_endpoints(e);
        total += (u[y] - u[x]).norm_sq();
    }
    return total / lat.edge_count();
}

}  // namespace oracle
