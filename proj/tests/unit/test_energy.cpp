#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tricrystal/energy.hpp"
#include "tricrystal/harness.hpp"
#include "tricrystal/sampler.hpp"

using namespace tricrystal;

namespace {

std::vector<Configuration> random_configs(int n, int count, std::uint64_t seed, double l = 1.0) {
    Rng rng(seed);
    return random_valid_configs(fixture::lattice(n), fixture::spec(100.0, 100.0, 20.0, l), count, 3, rng);
}

double v(double r, double kappa = 100.0) { return 0.5 * kappa * (r - 1) * (r - 1); }

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("standard configuration energy") {
    for (double l : {1.0, 1.02}) {
        const auto c = fixture::standard(6, 100.0, 20.0, l);
        const auto h = hamiltonian(c);
        CHECK(h.total == doctest::Approx(3 * 36 * v(l)).epsilon(1e-13));
        CHECK(h.defect_term == 0.0);
        CHECK(h.total == h.bond_sum + h.defect_term);
        CHECK(standard_energy(c.lattice(), c.spec()) == doctest::Approx(h.total).epsilon(1e-13));
        CHECK(std::abs(energy_gap(c)) <= 1e-12);
        // Exact in real arithmetic; the bond sum and 3N^2 V(l) round differently.
        CHECK(decomposition_check(c) <= 1e-14 * (1 + h.total));
    }
}

TEST_CASE("single hole in the standard configuration") {
    for (double l : {1.0, 1.02}) {
        auto c = fixture::standard(6, 100.0, 20.0, l);
        c.make_hole(14);
        const auto h = hamiltonian(c);
        CHECK(h.total == doctest::Approx(3 * 36 * v(l) - 6 * v(l) + 20.0).epsilon(1e-13));
        CHECK(energy_gap(c) == doctest::Approx(20.0 - 6 * v(l)).epsilon(1e-12));
        CHECK(decomposition_check(c) <= 1e-12);
        const auto terms = decomposition_terms(c);
        CHECK(terms.boundary_edges == 6);
        CHECK(terms.absent_edges == 6);
    }
}

TEST_CASE("hamiltonian matches the brute-force pair loop") {
    for (int n : {5, 6, 8}) {
        for (const auto& c : random_configs(n, 30, 10 + n, n == 6 ? 1.02 : 1.0)) {
            const double h = hamiltonian(c).total;
            CHECK(std::abs(h - oracle::brute_force_hamiltonian(c)) <= 1e-12 * std::max(1.0, std::abs(h)));
        }
    }
}

TEST_CASE("out-of-domain bond names the edge") {
    auto c = fixture::standard(5);
    c.set_displacement(1, {0.15, 0.0});
    try {
        hamiltonian(c);
        FAIL("expected BondDomainError");
    } catch (const BondDomainError& e) {
        const auto [x, y] = c.lattice().edge_endpoints(e.edge());
        CHECK((x == 1 || y == 1));
        CHECK((e.length() > 1.1 || e.length() < 0.9));
    }
}

TEST_CASE("energy gap is shift invariant") {
    for (const auto& c : random_configs(6, 10, 5)) {
        const auto& lat = c.lattice();
        std::vector<std::uint8_t> present(36);
        std::vector<Vec2> disp(36);
        for (int dp : {1, 3}) {
            for (int dq : {0, 2}) {
                for (int s = 0; s < 36; ++s) {
                    const int t = lat.index(lat.shift(lat.site(s), dp, dq));
                    present[t] = !c.is_hole(s);
                    disp[t] = c.displacement(s);
                }
                const auto shifted = Configuration::from_state(c.lattice_ptr(), c.spec_ptr(), present, disp);
                CHECK(energy_gap(shifted) == doctest::Approx(energy_gap(c)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("delta_h matches full recomputation") {
    CHECK(delta_h(fixture::standard(5), {MoveKind::displace, 3, Vec2{}, 1.0}) == 0.0);

    auto std6 = fixture::standard(6);
    const ProposedMove create{MoveKind::create_defect, 8, Vec2{}, 1.0};
    CHECK(delta_h(std6, create) == doctest::Approx(20.0).epsilon(1e-14));

    Rng rng(99);
    int checked = 0;
    for (auto c : random_configs(6, 40, 3)) {
        for (int k = 0; k < 50; ++k) {
            const int s = static_cast<int>(rng.below(36));
            ProposedMove mv;
            mv.site = s;
            if (c.is_hole(s)) {
                mv.kind = MoveKind::annihilate_defect;
                mv.displacement = c.neighbour_mean(s) + rng.disk(0.02);
            } else if (rng.uniform() < 0.2) {
                mv.kind = MoveKind::create_defect;
            } else {
                mv.kind = MoveKind::displace;
                mv.displacement = c.displacement(s) + rng.disk(0.01);
            }
            const auto ev = evaluate_move(c, mv);
            if (!ev.feasible) continue;
            const double before = hamiltonian(c).total;
            auto after = c;
            apply_move(after, mv);
            const double full = hamiltonian(after).total - before;
            CHECK(std::abs(delta_h(c, mv) - full) <= 1e-12);
            ++checked;
            c = after;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("delta_h flags bonds leaving the window") {
    const auto c = fixture::standard(5);
    CHECK(std::isinf(delta_h(c, {MoveKind::displace, 0, Vec2{0.2, 0.0}, 1.0})));
}

TEST_CASE("decomposition holds on random configs, including a boundary-stretched bond") {
    for (int n : {5, 6, 8})
        for (const auto& c : random_configs(n, 100, 40 + n)) {
            const auto t = decomposition_terms(c);
            CHECK(std::abs(t.lhs - t.rhs) <= 1e-10 * (1 + std::abs(t.lhs)));
            CHECK(t.boundary_edges == 6 * c.defect_count());
        }

    auto c = fixture::standard(6);
    // Bond (0,0)-(1,0) at 1 + alpha - 1e-6.
    c.set_displacement(1, {0.1 - 1e-6, 0.0});
    CHECK(c.check_constraints().ok());
    CHECK(decomposition_check(c) <= 1e-10);
}

TEST_CASE("decomposition fault injection breaks the identity") {
    auto c = fixture::standard(6);
    c.make_hole(0);
    c.set_displacement(1, {0.01, 0.0});
    CHECK(decomposition_check(c) <= 1e-12);
    const auto bad = decomposition_terms(c, -1.0);
    CHECK(std::abs(bad.lhs - bad.rhs) > 1e-6);
}

TEST_CASE("energy breakdown half-counting") {
    for (const auto& c : random_configs(6, 20, 61)) {
        const auto h = hamiltonian(c);
        double tri = 0;
        for (double x : h.triangle_contributions) tri += x;
        CHECK(h.bond_sum == doctest::Approx(tri + 0.5 * h.boundary_edge_sum).epsilon(1e-12));
    }
}

TEST_CASE("rigidity terms") {
    const auto s = rigidity_lower_bound_check(fixture::standard(6));
    CHECK(s.energy_gap == 0.0);
    CHECK(s.rigidity_sum == 0.0);
    CHECK(s.defect_count == 0);

    Rng rng(12);
    const auto c = Configuration::near_standard_sample(fixture::lattice(6), fixture::spec(), 0.1 / 8, rng);
    const auto r = rigidity_lower_bound_check(c);
    CHECK(r.energy_gap > 0);
    CHECK(r.rigidity_sum > 0);
    CHECK(r.identity_deviation >= r.rigidity_sum);
}

TEST_CASE("periodic gradient moment vanishes") {
    for (const auto& c : random_configs(8, 50, 71, 1.03)) {
        const Mat2 m = periodic_gradient_moment(c);
        CHECK(m.frobenius() <= 1e-11);
    }
}

}  // TEST_SUITE
