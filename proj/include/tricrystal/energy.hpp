#ifndef TRICRYSTAL_ENERGY_HPP
#define TRICRYSTAL_ENERGY_HPP

#include <stdexcept>
#include <vector>

#include "tricrystal/configuration.hpp"
#include "tricrystal/move.hpp"

namespace tricrystal {

/// A present bond whose length lies outside the potential's domain.
class BondDomainError : public std::domain_error {
public:
    BondDomainError(int edge, double length);
    int edge() const { return edge_; }
    double length() const { return length_; }

private:
    int edge_;
    double length_;
};

struct EnergyBreakdown {
    double bond_sum = 0.0;     // sum of V over present bonds, each undirected bond once
    double defect_term = 0.0;  // m * |defects|
    double total = 0.0;
    /// Half the bond energy of each present triangle's three sides (0 for
    /// triangles touching a hole). Inner bonds are shared by two present
    /// triangles, so bond_sum = sum(triangle) + boundary_edge_sum / 2.
    std::vector<double> triangle_contributions;
    double boundary_edge_sum = 0.0;  // sum of V over boundary bonds
};

/// H(omega). Throws BondDomainError naming the first offending edge.
EnergyBreakdown hamiltonian(const Configuration& c);

/// H(omega_l) = 3 N^2 V(l).
double standard_energy(const Lattice& lattice, const PotentialSpec& spec);

/// A(omega) = H(omega) - H(omega_l).
double energy_gap(const Configuration& c);

/// H(omega') - H(omega) from the bonds touched by the move; +infinity if a
/// new bond leaves [1 - alpha, 1 + alpha].
double delta_h(const Configuration& c, const ProposedMove& move);

struct DecompositionTerms {
    double lhs = 0.0;               // H - H(omega_l) + (6 V(l) - m) |defects|
    double triangle_part = 0.0;     // 1/2 sum_present (sum_j V(a_j) - 3 V(l))
    double boundary_part = 0.0;     // 1/2 sum_boundary (V - V(l))
    double rhs = 0.0;
    int boundary_edges = 0;
    int absent_edges = 0;
};

/// Both sides of the present-triangle / boundary-edge decomposition of the
/// energy gap, computed by independent routes. `boundary_sign` exists only
/// for mutation testing; any value other than 1 breaks the identity.
DecompositionTerms decomposition_terms(const Configuration& c, double boundary_sign = 1.0);

/// |lhs - rhs| of the decomposition.
double decomposition_check(const Configuration& c);

struct RigidityTerms {
    double energy_gap = 0.0;
    /// sum over triangles of area * dist(l^-1 J, SO(2))^2 (unit-lattice areas).
    double rigidity_sum = 0.0;
    /// sum over triangles of area * |l^-1 J - id|_F^2.
    double identity_deviation = 0.0;
    int defect_count = 0;
};

RigidityTerms rigidity_lower_bound_check(const Configuration& c);

/// sum over triangles of area * (l^-1 J - id); zero for periodic fields.
Mat2 periodic_gradient_moment(const Configuration& c);

}  // namespace tricrystal

#endif  // TRICRYSTAL_ENERGY_HPP
