#ifndef TRICRYSTAL_MOVE_HPP
#define TRICRYSTAL_MOVE_HPP

#include <cstdint>

#include "tricrystal/geometry.hpp"

namespace tricrystal {

enum class MoveKind : std::uint8_t { displace = 0, create_defect = 1, annihilate_defect = 2 };

/// A single-site Metropolis-Hastings proposal.
///
/// displace: particle at `site` moves to displacement `displacement`.
/// create_defect: particle at `site` is removed.
/// annihilate_defect: a particle is inserted into the hole at `site` with
///   displacement `displacement`.
/// `proposal_density` is the insertion density q evaluated at the inserted
/// point (annihilate) or at the deleted particle's point (create); it is
/// unused for displacements.
struct ProposedMove {
    MoveKind kind = MoveKind::displace;
    int site = 0;
    Vec2 displacement;
    double proposal_density = 1.0;
};

}  // namespace tricrystal

#endif  // TRICRYSTAL_MOVE_HPP
