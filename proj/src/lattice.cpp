#include "tricrystal/lattice.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace tricrystal {

namespace {

// Wedge j is the triangle with corners s, s + tau^j, s + tau^(j+1); the entry
// gives its anchor offset from s and its orientation.
struct Wedge {
    int dp;
    int dq;
    Orientation orientation;
};

constexpr std::array<Wedge, 6> kWedges{{
    {0, 0, Orientation::up},
    {0, 0, Orientation::down},
    {-1, 0, Orientation::up},
    {0, -1, Orientation::down},
    {0, -1, Orientation::up},
    {1, -1, Orientation::down},
}};

int floor_mod(int a, int n) {
    const int r = a % n;
    return r < 0 ? r + n : r;
}

int hex_norm(int p, int q) { return std::max({std::abs(p), std::abs(q), std::abs(p + q)}); }

}  // namespace

Lattice::Lattice(int n) : n_(n) {
    if (n < 3) {
        throw std::invalid_argument("Lattice: N must be at least 3, got " + std::to_string(n));
    }
    const int sites = site_count();
    neighbor_.resize(6 * static_cast<std::size_t>(sites));
    corners_.resize(triangle_count());
    incident_.resize(sites);
    edge_triangles_.resize(edge_count());
    near_.resize(sites);

    for (int i = 0; i < sites; ++i) {
        const Site s = site(i);
        for (int j = 0; j < 6; ++j) {
            neighbor_[6 * i + j] = index(shift(s, kDirections[j][0], kDirections[j][1]));
        }
        for (int o = 0; o < 2; ++o) {
            const auto offs = corner_offsets(static_cast<Orientation>(o));
            for (int k = 0; k < 3; ++k) {
                corners_[2 * i + o][k] = index(shift(s, offs[k][0], offs[k][1]));
            }
        }
        for (int j = 0; j < 6; ++j) {
            const Wedge& w = kWedges[j];
            incident_[i][j] = triangle_index({shift(s, w.dp, w.dq), w.orientation});
        }
        // Edge in direction d lies between wedges d-1 and d.
        for (int d = 0; d < 3; ++d) {
            edge_triangles_[3 * i + d] = {incident_[i][(d + 5) % 6], incident_[i][d]};
        }
        if (n_ >= 5) {
            for (int dq = -2; dq <= 2; ++dq) {
                for (int dp = -2; dp <= 2; ++dp) {
                    const int h = hex_norm(dp, dq);
                    if (h >= 1 && h <= 2) {
                        near_[i].push_back(index(shift(s, dp, dq)));
                    }
                }
            }
            std::sort(near_[i].begin(), near_[i].end());
        }
    }
}

Site Lattice::canon(int p, int q) const { return {floor_mod(p, n_), floor_mod(q, n_)}; }

std::array<Site, 6> Lattice::neighbors(const Site& s) const {
    std::array<Site, 6> out;
    for (int j = 0; j < 6; ++j) {
        out[j] = shift(s, kDirections[j][0], kDirections[j][1]);
    }
    return out;
}

std::array<std::array<int, 2>, 3> Lattice::corner_offsets(Orientation o) {
    if (o == Orientation::up) {
        return {{{0, 0}, {1, 0}, {0, 1}}};
    }
    return {{{0, 0}, {0, 1}, {-1, 1}}};
}

std::array<Site, 3> Lattice::triangle_corners(const TriangleId& t) const {
    const auto offs = corner_offsets(t.orientation);
    return {shift(t.site, offs[0][0], offs[0][1]), shift(t.site, offs[1][0], offs[1][1]),
            shift(t.site, offs[2][0], offs[2][1])};
}

std::vector<TriangleId> Lattice::layer_u0(const Site& s) const {
    std::vector<TriangleId> out;
    out.reserve(6);
    for (const Wedge& w : kWedges) {
        out.push_back({shift(s, w.dp, w.dq), w.orientation});
    }
    return out;
}

std::vector<TriangleId> Lattice::layer_u1(const Site& s) const {
    if (n_ < 5) {
        throw std::invalid_argument("layer_u1: requires N >= 5");
    }
    std::vector<TriangleId> out;
    for (int dq = -3; dq <= 3; ++dq) {
        for (int dp = -3; dp <= 3; ++dp) {
            for (int o = 0; o < 2; ++o) {
                const auto orient = static_cast<Orientation>(o);
                bool inside = true;
                bool touches_center = false;
                for (const auto& off : corner_offsets(orient)) {
                    const int cp = dp + off[0];
                    const int cq = dq + off[1];
                    inside = inside && hex_norm(cp, cq) <= 2;
                    touches_center = touches_center || (cp == 0 && cq == 0);
                }
                if (inside && !touches_center) {
                    out.push_back({shift(s, dp, dq), orient});
                }
            }
        }
    }
    return out;
}

std::array<int, 2> Lattice::edge_endpoints(int edge) const {
    const int s = edge / 3;
    return {s, neighbor(s, edge % 3)};
}

double Lattice::torus_distance(const Site& a, const Site& b) const {
    auto centered = [this](int v) {
        const int r = floor_mod(v, n_);
        return 2 * r > n_ ? r - n_ : r;
    };
    const int dp = centered(b.p - a.p);
    const int dq = centered(b.q - a.q);
    double best = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            best = std::min(best, embed(dp + i * n_, dq + j * n_).norm());
        }
    }
    return best;
}

bool Lattice::torus_distance_ok(const Site& a, const Site& b) const {
    if (n_ < 5) {
        throw std::invalid_argument("torus_distance_ok: requires N >= 5");
    }
    return canon(a) == canon(b) || torus_distance(a, b) > 2.0 + 1e-9;
}

const std::vector<int>& Lattice::near_sites(int site) const {
    if (n_ < 5) {
        throw std::invalid_argument("near_sites: requires N >= 5");
    }
    return near_[site];
}

}  // namespace tricrystal
