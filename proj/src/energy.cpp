#include "tricrystal/energy.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tricrystal {

BondDomainError::BondDomainError(int edge, double length)
    : std::domain_error("bond on edge " + std::to_string(edge) + " has length " + std::to_string(length) +
                        " outside the potential's domain"),
      edge_(edge),
      length_(length) {}

namespace {

bool in_domain(const PotentialSpec& spec, double r) { return r >= spec.domain_min() && r <= spec.domain_max(); }

}  // namespace

EnergyBreakdown hamiltonian(const Configuration& c) {
    const Lattice& lat = c.lattice();
    const PotentialSpec& spec = c.spec();
    EnergyBreakdown out;
    out.triangle_contributions.assign(lat.triangle_count(), 0.0);

    std::vector<double> bond_energy(lat.edge_count(), 0.0);
    for (int e = 0; e < lat.edge_count(); ++e) {
        const auto [x, y] = lat.edge_endpoints(e);
        if (c.is_hole(x) || c.is_hole(y)) {
            continue;
        }
        const double len = c.bond(x, e % 3).norm();
        if (!in_domain(spec, len)) {
            throw BondDomainError(e, len);
        }
        bond_energy[e] = spec.potential.value(len);
        out.bond_sum += bond_energy[e];
    }
    for (int e = 0; e < lat.edge_count(); ++e) {
        const auto [x, y] = lat.edge_endpoints(e);
        if (c.is_hole(x) || c.is_hole(y)) {
            continue;
        }
        bool boundary = false;
        for (int t : lat.edge_triangles(e)) {
            if (c.triangle_present(t)) {
                out.triangle_contributions[t] += 0.5 * bond_energy[e];
            } else {
                boundary = true;
            }
        }
        if (boundary) {
            out.boundary_edge_sum += bond_energy[e];
        }
    }
    out.defect_term = spec.m * c.defect_count();
    out.total = out.bond_sum + out.defect_term;
    return out;
}

double standard_energy(const Lattice& lattice, const PotentialSpec& spec) {
    return 3.0 * lattice.site_count() * spec.potential.value(spec.l);
}

double energy_gap(const Configuration& c) { return hamiltonian(c).total - standard_energy(c.lattice(), c.spec()); }

double delta_h(const Configuration& c, const ProposedMove& move) {
    const Lattice& lat = c.lattice();
    const PotentialSpec& spec = c.spec();
    const int s = move.site;
    constexpr double kInf = std::numeric_limits<double>::infinity();

    switch (move.kind) {
    case MoveKind::displace: {
        double dh = 0.0;
        for (int j = 0; j < 6; ++j) {
            const int nb = lat.neighbor(s, j);
            if (c.is_hole(nb)) {
                continue;
            }
            const double r_new = (spec.l * unit_direction(j) + c.displacement(nb) - move.displacement).norm();
            if (!in_domain(spec, r_new)) {
                return kInf;
            }
            dh += spec.potential.value(r_new) - spec.potential.value(c.bond(s, j).norm());
        }
        return dh;
    }
    case MoveKind::create_defect: {
        double removed = 0.0;
        for (int j = 0; j < 6; ++j) {
            if (!c.is_hole(lat.neighbor(s, j))) {
                removed += spec.potential.value(c.bond(s, j).norm());
            }
        }
        return spec.m - removed;
    }
    case MoveKind::annihilate_defect: {
        double added = 0.0;
        for (int j = 0; j < 6; ++j) {
            const int nb = lat.neighbor(s, j);
            if (c.is_hole(nb)) {
                continue;
            }
            const double r_new = (spec.l * unit_direction(j) + c.displacement(nb) - move.displacement).norm();
            if (!in_domain(spec, r_new)) {
                return kInf;
            }
            added += spec.potential.value(r_new);
        }
        return added - spec.m;
    }
    }
    return kInf;
}

DecompositionTerms decomposition_terms(const Configuration& c, double boundary_sign) {
    const Lattice& lat = c.lattice();
    const PotentialSpec& spec = c.spec();
    const double v_l = spec.potential.value(spec.l);
    DecompositionTerms out;

    const double defects = c.defect_count();
    out.lhs = energy_gap(c) + (6.0 * v_l - spec.m) * defects;

    for (int t = 0; t < lat.triangle_count(); ++t) {
        if (!c.triangle_present(t)) {
            continue;
        }
        const auto& cs = lat.corners(t);
        TrianglePlacement placed{{c.extended_position(cs[0]), c.extended_position(cs[1]), c.extended_position(cs[2])}};
        // Positions are in the fundamental image; unwrap corners 1 and 2
        // through the triangle's lattice offsets so sides are short.
        const auto offs = Lattice::corner_offsets(static_cast<Orientation>(t % 2));
        const Vec2 anchor = c.extended_position(cs[0]);
        for (int k = 1; k < 3; ++k) {
            placed.corners[k] = anchor + spec.l * embed(offs[k][0], offs[k][1]) + c.extended_displacement(cs[k]) -
                                c.extended_displacement(cs[0]);
        }
        double sum = 0.0;
        for (double a : placed.side_lengths()) {
            sum += eval_v(spec, a);
        }
        out.triangle_part += 0.5 * (sum - 3.0 * v_l);
    }

    const auto classes = c.classify_edges();
    for (int e = 0; e < lat.edge_count(); ++e) {
        if (classes[e] == EdgeClass::absent) {
            ++out.absent_edges;
        } else if (classes[e] == EdgeClass::boundary) {
            ++out.boundary_edges;
            const auto [x, y] = lat.edge_endpoints(e);
            out.boundary_part += 0.5 * (eval_v(spec, c.bond(x, e % 3).norm()) - v_l);
        }
    }
    out.rhs = out.triangle_part + boundary_sign * out.boundary_part;
    return out;
}

double decomposition_check(const Configuration& c) {
    const DecompositionTerms t = decomposition_terms(c);
    return std::abs(t.lhs - t.rhs);
}

RigidityTerms rigidity_lower_bound_check(const Configuration& c) {
    RigidityTerms out;
    out.energy_gap = energy_gap(c);
    out.defect_count = c.defect_count();
    const double inv_l = 1.0 / c.spec().l;
    for (const Mat2& j : c.jacobians()) {
        const Mat2 scaled = inv_l * j;
        const double d = dist_so2(scaled);
        out.rigidity_sum += kUnitTriangleArea * d * d;
        out.identity_deviation += kUnitTriangleArea * (scaled - Mat2::identity()).frobenius_sq();
    }
    return out;
}

Mat2 periodic_gradient_moment(const Configuration& c) {
    Mat2 sum{};
    const double inv_l = 1.0 / c.spec().l;
    for (const Mat2& j : c.jacobians()) {
        sum += kUnitTriangleArea * (inv_l * j - Mat2::identity());
    }
    return sum;
}

}  // namespace tricrystal
