#include "tricrystal/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tricrystal {

namespace {

constexpr double kInvSqrt3 = 0.57735026918962576;

// Inverses of the reference edge matrices [e_u e_v] of the unit up/down triangles.
constexpr Mat2 kInvRefUp{1.0, -kInvSqrt3, 0.0, 2.0 * kInvSqrt3};
constexpr Mat2 kInvRefDown{1.0, kInvSqrt3, -1.0, kInvSqrt3};

double max_abs(const Mat2& m) { return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)}); }

}  // namespace

Vec2 hole_fill(std::span<const Vec2, 6> neighbour_positions) {
    Vec2 sum{};
    for (const Vec2& p : neighbour_positions) {
        sum += p;
    }
    return sum * (1.0 / 6.0);
}

Configuration::Configuration(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const PotentialSpec> spec)
    : lattice_(std::move(lattice)), spec_(std::move(spec)) {
    if (!lattice_ || !spec_) {
        throw std::invalid_argument("Configuration: null lattice or spec");
    }
    const int sites = lattice_->site_count();
    hole_.assign(sites, 0);
    disp_.assign(sites, Vec2{});
    filled_.assign(sites, Vec2{});
    jacobian_.assign(lattice_->triangle_count(), Mat2::scaled_identity(spec_->l));
}

Configuration Configuration::standard(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const PotentialSpec> spec) {
    return Configuration(std::move(lattice), std::move(spec));
}

Configuration Configuration::near_standard_sample(std::shared_ptr<const Lattice> lattice,
                                                  std::shared_ptr<const PotentialSpec> spec, double r, Rng& rng) {
    if (!(r >= 0.0 && r < spec->alpha / 4.0)) {
        throw std::invalid_argument("near_standard_sample: need 0 <= r < alpha/4, got r = " + std::to_string(r));
    }
    Configuration c(std::move(lattice), std::move(spec));
    for (int i = 0; i < c.site_count(); ++i) {
        c.disp_[i] = r > 0.0 ? rng.disk(r) : Vec2{};
    }
    c.recompute_caches();
    return c;
}

Configuration Configuration::from_state(std::shared_ptr<const Lattice> lattice,
                                         std::shared_ptr<const PotentialSpec> spec,
                                         const std::vector<std::uint8_t>& present,
                                         const std::vector<Vec2>& displacements) {
    Configuration c(std::move(lattice), std::move(spec));
    const auto sites = static_cast<std::size_t>(c.site_count());
    if (present.size() != sites || displacements.size() != sites) {
        throw std::invalid_argument("from_state: per-site arrays do not match the lattice");
    }
    c.disp_ = displacements;
    for (int i = 0; i < c.site_count(); ++i) {
        c.hole_[i] = present[i] ? 0 : 1;
        if (!present[i]) {
            c.holes_.push_back(i);
        }
    }
    c.recompute_caches();
    return c;
}

Mat2 Configuration::compute_jacobian(int triangle, const Vec2& f0, const Vec2& f1, const Vec2& f2) const {
    const Mat2 d = Mat2::from_columns(f1 - f0, f2 - f0);
    Mat2 m = d * ((triangle % 2 == 0) ? kInvRefUp : kInvRefDown);
    m.a += spec_->l;
    m.d += spec_->l;
    return m;
}

Mat2 Configuration::jacobian_with(int triangle, std::span<const SiteValue> overrides) const {
    const auto& cs = lattice_->corners(triangle);
    std::array<Vec2, 3> f{filled_[cs[0]], filled_[cs[1]], filled_[cs[2]]};
    for (const SiteValue& o : overrides) {
        for (int k = 0; k < 3; ++k) {
            if (cs[k] == o.site) {
                f[k] = o.value;
            }
        }
    }
    return compute_jacobian(triangle, f[0], f[1], f[2]);
}

Vec2 Configuration::neighbour_mean(int site) const {
    Vec2 sum{};
    for (int j = 0; j < 6; ++j) {
        sum += disp_[lattice_->neighbor(site, j)];
    }
    return sum * (1.0 / 6.0);
}

Vec2 Configuration::fill_hole_value(const Site& s) const {
    const int idx = lattice_->index(lattice_->canon(s));
    if (!is_hole(idx)) {
        throw InvariantViolation("fill_hole_value: site is not a hole");
    }
    std::array<Vec2, 6> pts;
    const Vec2 base = embed(lattice_->site(idx));
    for (int j = 0; j < 6; ++j) {
        const int nb = lattice_->neighbor(idx, j);
        if (is_hole(nb)) {
            throw InvariantViolation("fill_hole_value: neighbour " + std::to_string(nb) + " is also a hole");
        }
        // Unwrapped image of the neighbour adjacent to s.
        pts[j] = spec_->l * (base + unit_direction(j)) + disp_[nb];
    }
    return hole_fill(pts);
}

void Configuration::refresh_fill(int site) {
    if (is_hole(site)) {
        filled_[site] = neighbour_mean(site);
    } else {
        filled_[site] = disp_[site];
    }
}

void Configuration::refresh_triangles_around(int site) {
    for (int t : lattice_->incident_triangles(site)) {
        const auto& cs = lattice_->corners(t);
        jacobian_[t] = compute_jacobian(t, filled_[cs[0]], filled_[cs[1]], filled_[cs[2]]);
    }
}

void Configuration::set_displacement(int site, const Vec2& u) {
    disp_[site] = u;
    refresh_fill(site);
    refresh_triangles_around(site);
    for (int j = 0; j < 6; ++j) {
        const int nb = lattice_->neighbor(site, j);
        if (is_hole(nb)) {
            refresh_fill(nb);
            refresh_triangles_around(nb);
        }
    }
}

void Configuration::make_hole(int site) {
    if (is_hole(site)) {
        return;
    }
    hole_[site] = 1;
    holes_.insert(std::lower_bound(holes_.begin(), holes_.end(), site), site);
    disp_[site] = neighbour_mean(site);
    refresh_fill(site);
    refresh_triangles_around(site);
    for (int j = 0; j < 6; ++j) {
        const int nb = lattice_->neighbor(site, j);
        if (is_hole(nb)) {
            refresh_fill(nb);
            refresh_triangles_around(nb);
        }
    }
}

void Configuration::place_particle(int site, const Vec2& u) {
    if (is_hole(site)) {
        hole_[site] = 0;
        holes_.erase(std::lower_bound(holes_.begin(), holes_.end(), site));
    }
    set_displacement(site, u);
}

void Configuration::recompute_caches() {
    for (int i = 0; i < site_count(); ++i) {
        refresh_fill(i);
    }
    for (int t = 0; t < lattice_->triangle_count(); ++t) {
        const auto& cs = lattice_->corners(t);
        jacobian_[t] = compute_jacobian(t, filled_[cs[0]], filled_[cs[1]], filled_[cs[2]]);
    }
}

double Configuration::cache_deviation() const {
    Configuration fresh = *this;
    fresh.recompute_caches();
    double worst = 0.0;
    for (int i = 0; i < site_count(); ++i) {
        worst = std::max(worst, (fresh.filled_[i] - filled_[i]).norm());
    }
    for (std::size_t t = 0; t < jacobian_.size(); ++t) {
        worst = std::max(worst, max_abs(fresh.jacobian_[t] - jacobian_[t]));
    }
    std::vector<int> expected_holes;
    for (int i = 0; i < site_count(); ++i) {
        if (is_hole(i)) {
            expected_holes.push_back(i);
        }
    }
    if (expected_holes != holes_) {
        worst = std::max(worst, 1.0);
    }
    return worst;
}

ConstraintReport Configuration::check_constraints() const {
    ConstraintReport report;
    const double lo = spec_->domain_min();
    const double hi = spec_->domain_max();
    for (int e = 0; e < lattice_->edge_count(); ++e) {
        const auto [x, y] = lattice_->edge_endpoints(e);
        if (is_hole(x) || is_hole(y)) {
            continue;
        }
        const double len = bond(x, e % 3).norm();
        if (!(len > lo && len < hi)) {
            report.omega1 = false;
            report.bad_edges.push_back(e);
        }
    }
    for (int h : holes_) {
        for (int other : lattice_->near_sites(h)) {
            if (other > h && is_hole(other)) {
                report.omega2 = false;
                report.bad_hole_pairs.emplace_back(h, other);
            }
        }
    }
    for (int t = 0; t < lattice_->triangle_count(); ++t) {
        if (!(jacobian_[t].det() > 0.0)) {
            report.omega4 = false;
            report.bad_triangles.push_back(t);
        }
    }
    return report;
}

bool Configuration::triangle_present(int triangle) const {
    const auto& cs = lattice_->corners(triangle);
    return !is_hole(cs[0]) && !is_hole(cs[1]) && !is_hole(cs[2]);
}

std::vector<EdgeClass> Configuration::classify_edges() const {
    std::vector<EdgeClass> out(lattice_->edge_count(), EdgeClass::inner);
    for (int e = 0; e < lattice_->edge_count(); ++e) {
        const auto [x, y] = lattice_->edge_endpoints(e);
        if (is_hole(x) || is_hole(y)) {
            out[e] = EdgeClass::absent;
            continue;
        }
        for (int t : lattice_->edge_triangles(e)) {
            if (!triangle_present(t)) {
                out[e] = EdgeClass::boundary;
            }
        }
    }
    return out;
}

std::vector<int> Configuration::present_triangles() const {
    std::vector<int> out;
    out.reserve(lattice_->triangle_count());
    for (int t = 0; t < lattice_->triangle_count(); ++t) {
        if (triangle_present(t)) {
            out.push_back(t);
        }
    }
    return out;
}

}  // namespace tricrystal
