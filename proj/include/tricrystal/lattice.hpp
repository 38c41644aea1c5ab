#ifndef TRICRYSTAL_LATTICE_HPP
#define TRICRYSTAL_LATTICE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "tricrystal/geometry.hpp"

namespace tricrystal {

/// Lattice point p + q*tau with tau = exp(i*pi/3). Canonical sites have
/// p, q in [0, N).
struct Site {
    int p = 0;
    int q = 0;
    friend constexpr bool operator==(const Site&, const Site&) = default;
};

enum class Orientation : std::uint8_t { up = 0, down = 1 };

/// Undirected edge {site, site + tau^direction}, direction in {0, 1, 2}.
struct EdgeId {
    Site site;
    int direction = 0;
    friend constexpr bool operator==(const EdgeId&, const EdgeId&) = default;
};

/// up: corners x, x+1, x+tau. down: corners x, x+tau, x+tau^2.
struct TriangleId {
    Site site;
    Orientation orientation = Orientation::up;
    friend constexpr bool operator==(const TriangleId&, const TriangleId&) = default;
};

/// Integer offsets of tau^j, j = 0..5, in the (1, tau) basis (tau^2 = tau - 1).
inline constexpr std::array<std::array<int, 2>, 6> kDirections{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

/// Euclidean embedding of the lattice point p + q*tau (unit spacing).
constexpr Vec2 embed(int p, int q) { return {p + 0.5 * q, 0.8660254037844386 * q}; }
constexpr Vec2 embed(const Site& s) { return embed(s.p, s.q); }
constexpr Vec2 unit_direction(int j) { return embed(kDirections[j][0], kDirections[j][1]); }

/// Area of one unit lattice triangle.
inline constexpr double kUnitTriangleArea = 0.4330127018922193;

/// The N-periodic triangular lattice A2 / N A2.
///
/// Sites, edges and triangles are addressed both by value types and by dense
/// integer indices: site = q*N + p, edge = 3*site + direction,
/// triangle = 2*site + orientation. All incidence tables are built once.
class Lattice {
public:
    /// Throws std::invalid_argument for N < 3.
    explicit Lattice(int n);

    int size() const { return n_; }
    int site_count() const { return n_ * n_; }
    int edge_count() const { return 3 * n_ * n_; }
    int triangle_count() const { return 2 * n_ * n_; }

    Site canon(int p, int q) const;
    Site canon(const Site& s) const { return canon(s.p, s.q); }
    Site shift(const Site& s, int dp, int dq) const { return canon(s.p + dp, s.q + dq); }

    int index(const Site& s) const { return s.q * n_ + s.p; }
    Site site(int index) const { return {index % n_, index / n_}; }
    int edge_index(const EdgeId& e) const { return 3 * index(e.site) + e.direction; }
    EdgeId edge(int index) const { return {site(index / 3), index % 3}; }
    int triangle_index(const TriangleId& t) const { return 2 * index(t.site) + static_cast<int>(t.orientation); }
    TriangleId triangle(int index) const { return {site(index / 2), static_cast<Orientation>(index % 2)}; }

    /// s + tau^j for j = 0..5, canonicalized, counterclockwise from +1.
    std::array<Site, 6> neighbors(const Site& s) const;
    int neighbor(int site, int direction) const { return neighbor_[6 * site + direction]; }

    std::array<Site, 3> triangle_corners(const TriangleId& t) const;
    const std::array<int, 3>& corners(int triangle) const { return corners_[triangle]; }
    /// Corner offsets relative to the triangle's anchor site, in the (1, tau) basis.
    static std::array<std::array<int, 2>, 3> corner_offsets(Orientation o);

    /// The 6 triangles incident to s, ordered as the wedges between
    /// tau^j and tau^(j+1); they alternate up/down.
    std::vector<TriangleId> layer_u0(const Site& s) const;
    const std::array<int, 6>& incident_triangles(int site) const { return incident_[site]; }

    /// Triangles with all corners in s + n + n, minus layer_u0(s).
    /// Throws std::invalid_argument for N < 5.
    std::vector<TriangleId> layer_u1(const Site& s) const;

    /// Endpoints of an undirected edge as site indices.
    std::array<int, 2> edge_endpoints(int edge) const;
    /// The two triangles bounded by an edge.
    const std::array<int, 2>& edge_triangles(int edge) const { return edge_triangles_[edge]; }

    /// Minimum Euclidean distance between the period images of two sites.
    double torus_distance(const Site& a, const Site& b) const;
    /// True iff a == b or their torus distance exceeds 2. Requires N >= 5.
    bool torus_distance_ok(const Site& a, const Site& b) const;
    /// The sites at torus distance in (0, 2] from `site` (18 of them for N >= 5).
    const std::vector<int>& near_sites(int site) const;

private:
    int n_;
    std::vector<int> neighbor_;
    std::vector<std::array<int, 3>> corners_;
    std::vector<std::array<int, 6>> incident_;
    std::vector<std::array<int, 2>> edge_triangles_;
    std::vector<std::vector<int>> near_;
};

}  // namespace tricrystal

#endif  // TRICRYSTAL_LATTICE_HPP
