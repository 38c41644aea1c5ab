#ifndef TRICRYSTAL_CONFIGURATION_HPP
#define TRICRYSTAL_CONFIGURATION_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tricrystal/geometry.hpp"
#include "tricrystal/lattice.hpp"
#include "tricrystal/potential.hpp"
#include "tricrystal/rng.hpp"

namespace tricrystal {

/// Raised when an operation needs a structural invariant that does not hold
/// (e.g. filling a hole next to another hole).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class EdgeClass : std::uint8_t { inner, boundary, absent };

struct ConstraintReport {
    bool omega1 = true;  // bond lengths in (1 - alpha, 1 + alpha)
    bool omega2 = true;  // holes pairwise farther apart than 2
    bool omega4 = true;  // positive Jacobian determinant on every triangle
    std::vector<int> bad_edges;
    std::vector<std::pair<int, int>> bad_hole_pairs;
    std::vector<int> bad_triangles;

    bool ok() const { return omega1 && omega2 && omega4; }
};

/// Extended displacement overriding the cached value at one site; used to
/// evaluate Jacobians of a proposed state without mutating the configuration.
struct SiteValue {
    int site = -1;
    Vec2 value;
};

/// Particle positions (or holes) on the N-periodic triangular lattice.
///
/// Each site x stores the displacement u(x) = omega(x) - l * embed(x); the
/// periodic images then satisfy omega(x + N z) = omega(x) + l N z by
/// construction. Cached: the hole-filled displacements (u for particles, the
/// mean of the six neighbour displacements for holes) and one Jacobian per
/// triangle of the piecewise-affine extension.
class Configuration {
public:
    /// The standard configuration omega_l (no holes, zero displacement).
    Configuration(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const PotentialSpec> spec);

    static Configuration standard(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const PotentialSpec> spec);
    /// omega(x) = l * embed(x) + (independent uniform disk(r) sample).
    /// Throws std::invalid_argument unless 0 <= r < alpha / 4.
    static Configuration near_standard_sample(std::shared_ptr<const Lattice> lattice,
                                              std::shared_ptr<const PotentialSpec> spec, double r, Rng& rng);
    /// Rebuilds a configuration from per-site presence flags and stored
    /// displacements (as written by a snapshot).
    static Configuration from_state(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const PotentialSpec> spec,
                                    const std::vector<std::uint8_t>& present, const std::vector<Vec2>& displacements);

    const Lattice& lattice() const { return *lattice_; }
    const PotentialSpec& spec() const { return *spec_; }
    const std::shared_ptr<const Lattice>& lattice_ptr() const { return lattice_; }
    const std::shared_ptr<const PotentialSpec>& spec_ptr() const { return spec_; }

    int site_count() const { return lattice_->site_count(); }
    bool is_hole(int site) const { return hole_[site] != 0; }
    int defect_count() const { return static_cast<int>(holes_.size()); }
    /// Sorted hole site indices.
    const std::vector<int>& holes() const { return holes_; }

    /// Stored displacement u(x); for holes this is the fill value at the time
    /// the hole was created.
    Vec2 displacement(int site) const { return disp_[site]; }
    /// Hole-filled displacement.
    Vec2 extended_displacement(int site) const { return filled_[site]; }
    /// Hole-filled position in the fundamental image.
    Vec2 extended_position(int site) const { return spec_->l * embed(lattice_->site(site)) + filled_[site]; }
    /// omega_hat(x + tau^j) - omega_hat(x).
    Vec2 extended_bond(int site, int direction) const {
        return spec_->l * unit_direction(direction) + filled_[lattice_->neighbor(site, direction)] - filled_[site];
    }
    /// omega(x + tau^j) - omega(x) from stored displacements.
    Vec2 bond(int site, int direction) const {
        return spec_->l * unit_direction(direction) + disp_[lattice_->neighbor(site, direction)] - disp_[site];
    }

    const Mat2& jacobian(int triangle) const { return jacobian_[triangle]; }
    const std::vector<Mat2>& jacobians() const { return jacobian_; }
    /// Jacobian of `triangle` with some extended displacements replaced.
    Mat2 jacobian_with(int triangle, std::span<const SiteValue> overrides) const;

    /// omega_hat(s) for a hole: mean of the six neighbour positions.
    /// Throws InvariantViolation if s is not a hole or a neighbour is a hole.
    Vec2 fill_hole_value(const Site& s) const;
    /// Mean of the six neighbour displacements of `site`.
    Vec2 neighbour_mean(int site) const;

    // Mutators. They maintain the caches but never check constraints.
    void set_displacement(int site, const Vec2& u);
    void make_hole(int site);
    void place_particle(int site, const Vec2& u);

    void recompute_caches();
    /// Max deviation between the caches and a from-scratch recomputation.
    double cache_deviation() const;

    ConstraintReport check_constraints() const;
    std::vector<EdgeClass> classify_edges() const;
    std::vector<int> present_triangles() const;
    bool triangle_present(int triangle) const;

private:
    Mat2 compute_jacobian(int triangle, const Vec2& f0, const Vec2& f1, const Vec2& f2) const;
    void refresh_fill(int site);
    void refresh_triangles_around(int site);

    std::shared_ptr<const Lattice> lattice_;
    std::shared_ptr<const PotentialSpec> spec_;
    std::vector<std::uint8_t> hole_;
    std::vector<Vec2> disp_;
    std::vector<Vec2> filled_;
    std::vector<Mat2> jacobian_;
    std::vector<int> holes_;
};

/// Mean of six neighbour positions; the hole-filling rule on raw points.
Vec2 hole_fill(std::span<const Vec2, 6> neighbour_positions);

}  // namespace tricrystal

#endif  // TRICRYSTAL_CONFIGURATION_HPP
