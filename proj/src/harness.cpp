#include "tricrystal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tricrystal/energy.hpp"
#include "tricrystal/sampler.hpp"
#include "tricrystal/snapshot.hpp"

namespace tricrystal {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

bool isolated_from(const Lattice& lat, int site, std::span<const int> holes) {
    const auto& near = lat.near_sites(site);
    for (int h : holes) {
        if (h == site || std::find(near.begin(), near.end(), h) != near.end()) {
            return false;
        }
    }
    return true;
}

std::string snapshot_text(const Configuration& c) {
    std::ostringstream os;
    write_snapshot(os, c);
    return os.str();
}

// Running extremum of num/den over samples.
struct RatioTracker {
    InequalityResult& r;
    bool upper;  // the check bounds the ratio from above (witness = max)

    // Returns true if this sample became the witness.
    bool add(double num, double den) {
        if (num < 0.0 || !std::isfinite(num) || !std::isfinite(den)) {
            ++r.violations;
            return false;
        }
        if (den == 0.0) {
            if (num == 0.0) {
                ++r.skipped;
            } else if (upper) {
                ++r.violations;
            } else {
                ++r.skipped;  // lower bound holds trivially
            }
            return false;
        }
        const double ratio = num / den;
        ++r.samples;
        bool witness = false;
        if (ratio < r.min_ratio) {
            r.min_ratio = ratio;
            witness = !upper;
        }
        if (ratio > r.max_ratio) {
            r.max_ratio = ratio;
            witness = upper;
        }
        return witness;
    }
};

InequalityResult named(const char* name) {
    InequalityResult r;
    r.name = name;
    return r;
}

void finish(InequalityResult& r) {
    r.passed = r.samples > 0 && r.violations == 0 && std::isfinite(r.min_ratio) && std::isfinite(r.max_ratio) &&
               (!r.require_positive || r.min_ratio > 0.0);
}

// Reference side vectors a1 = E3 - E2, a2 = E1 - E3, a3 = E2 - E1 of the unit triangle 0, 1, tau.
constexpr std::array<Vec2, 3> kRefSides{Vec2{-0.5, 0.8660254037844386}, Vec2{-0.5, -0.8660254037844386},
                                        Vec2{1.0, 0.0}};

// M = scale * R(theta) (id + eps G); redrawn until det > 0 and all side
// images lie in (lo, hi).
Mat2 draw_triangle_map(Rng& rng, double scale, double eps_max, double lo, double hi, std::array<double, 3>& sides) {
    for (;;) {
        const double eps = eps_max * rng.uniform();
        const Mat2 g{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
                     2.0 * rng.uniform() - 1.0};
        const Mat2 m = scale * (Mat2::rotation(2.0 * std::numbers::pi * rng.uniform()) * (Mat2::identity() + eps * g));
        if (!(m.det() > 0.0)) {
            continue;
        }
        bool ok = true;
        for (int j = 0; j < 3; ++j) {
            sides[j] = (m * kRefSides[j]).norm();
            ok = ok && sides[j] > lo && sides[j] < hi;
        }
        if (ok) {
            return m;
        }
    }
}

}  // namespace

std::vector<Configuration> random_valid_configs(std::shared_ptr<const Lattice> lattice,
                                                std::shared_ptr<const PotentialSpec> spec, int count, int max_defects,
                                                Rng& rng) {
    std::vector<Configuration> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        const double r = rng.uniform() * spec->alpha / 4.0;
        Configuration c = Configuration::near_standard_sample(lattice, spec, r, rng);
        const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_defects) + 1));
        std::vector<int> holes;
        for (int attempt = 0; attempt < 64 && static_cast<int>(holes.size()) < k; ++attempt) {
            const int site = static_cast<int>(rng.below(static_cast<std::uint64_t>(c.site_count())));
            if (isolated_from(*lattice, site, holes)) {
                holes.push_back(site);
            }
        }
        for (int h : holes) {
            c.make_hole(h);
        }
        if (c.check_constraints().ok()) {
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<Configuration> sampled_configs(std::shared_ptr<const Lattice> lattice,
                                           std::shared_ptr<const PotentialSpec> spec, int count, int burn_in, int thin,
                                           std::uint64_t seed) {
    RunParams rp;
    rp.burn_in = static_cast<std::uint64_t>(burn_in);
    rp.thin = static_cast<std::uint64_t>(thin);
    rp.sweeps = static_cast<std::uint64_t>(count) * rp.thin;
    return run_snapshots(rp, SamplerParams{}, Configuration::standard(std::move(lattice), std::move(spec)), seed);
}

bool IdentityReport::passed() const {
    return std::all_of(results.begin(), results.end(), [](const IdentityResult& r) { return r.passed; });
}

double area_telescoping_residual(const Configuration& c) {
    const Lattice& lat = c.lattice();
    const double l = c.spec().l;
    double sum = 0.0;
    for (int t = 0; t < lat.triangle_count(); ++t) {
        const auto& cs = lat.corners(t);
        const auto offs = Lattice::corner_offsets(static_cast<Orientation>(t % 2));
        const Vec2 anchor = l * embed(lat.site(cs[0]));
        TrianglePlacement p;
        for (int k = 0; k < 3; ++k) {
            p.corners[k] = anchor + l * embed(offs[k][0], offs[k][1]) + c.extended_displacement(cs[k]);
        }
        sum += signed_area(p);
    }
    const double n = lat.size();
    const double expected = 0.5 * kSqrt3 * (l * n) * (l * n);
    return std::abs(sum - expected) / expected;
}

double boundary_count_residual(const Configuration& c) {
    const auto classes = c.classify_edges();
    const auto boundary = std::count(classes.begin(), classes.end(), EdgeClass::boundary);
    return std::abs(static_cast<double>(boundary) - 6.0 * c.defect_count());
}

double mean_jacobian_residual(const Configuration& c) {
    Mat2 sum{};
    for (const Mat2& j : c.jacobians()) {
        sum += j;
    }
    const double l = c.spec().l;
    const Mat2 mean = sum * (1.0 / c.jacobians().size());
    return (mean - Mat2::scaled_identity(l)).frobenius() / l;
}

IdentityReport verify_identities(std::span<const Configuration> configs, double tolerance, double boundary_sign) {
    IdentityReport report;
    report.tolerance = tolerance;
    report.configs = static_cast<int>(configs.size());
    report.results = {{"energy decomposition"}, {"area telescoping"}, {"boundary edge count"}, {"mean jacobian"}};
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const Configuration& c = configs[i];
        const DecompositionTerms d = decomposition_terms(c, boundary_sign);
        const std::array<double, 4> residuals{std::abs(d.lhs - d.rhs) / (1.0 + std::abs(d.lhs)),
                                              area_telescoping_residual(c), boundary_count_residual(c),
                                              mean_jacobian_residual(c)};
        for (std::size_t k = 0; k < residuals.size(); ++k) {
            IdentityResult& r = report.results[k];
            if (!(residuals[k] <= r.max_residual)) {
                r.max_residual = residuals[k];
                r.witness = static_cast<int>(i);
            }
        }
    }
    for (IdentityResult& r : report.results) {
        r.passed = r.max_residual <= tolerance;
    }
    return report;
}

bool InequalityReport::passed() const {
    return std::all_of(results.begin(), results.end(), [](const InequalityResult& r) { return r.passed; });
}

const InequalityResult* InequalityReport::find(const std::string& name) const {
    for (const InequalityResult& r : results) {
        if (r.name == name) {
            return &r;
        }
    }
    return nullptr;
}

double fit_defect_constant(std::span<const Configuration> configs, double margin) {
    double worst = 0.0;
    for (const Configuration& c : configs) {
        const int d = c.defect_count();
        if (d > 0) {
            worst = std::max(worst, (c.spec().m * d - energy_gap(c)) / d);
        }
    }
    return worst + margin;
}

std::pair<double, double> layer_terms(const Configuration& c, int hole) {
    const Lattice& lat = c.lattice();
    const Site s = lat.site(hole);
    double u0 = 0.0;
    double u1 = 0.0;
    for (const TriangleId& t : lat.layer_u0(s)) {
        const double d = dist_so2(c.jacobian(lat.triangle_index(t)));
        u0 += d * d;
    }
    for (const TriangleId& t : lat.layer_u1(s)) {
        const double d = dist_so2(c.jacobian(lat.triangle_index(t)));
        u1 += d * d;
    }
    return {u0, u1};
}

InequalityReport verify_inequalities(std::span<const Configuration> training, std::span<const Configuration> configs,
                                     const PotentialSpec& spec, const InequalityParams& params) {
    InequalityReport report;
    report.fitted_c9 = fit_defect_constant(training, params.c9_margin);

    InequalityResult lower_energy = named("energy gap vs rotation distance");
    InequalityResult lower_identity = named("energy gap vs identity deviation");
    InequalityResult u0_u1 = named("hole layer U0 vs U1");
    u0_u1.require_positive = false;
    InequalityResult all_present = named("all vs present triangles");
    all_present.require_positive = false;
    RatioTracker t_energy{lower_energy, false};
    RatioTracker t_identity{lower_identity, false};
    RatioTracker t_layers{u0_u1, true};
    RatioTracker t_present{all_present, true};

    for (const Configuration& c : configs) {
        const RigidityTerms rt = rigidity_lower_bound_check(c);
        const double num = rt.energy_gap - (c.spec().m - report.fitted_c9) * rt.defect_count;
        if (t_energy.add(num, rt.rigidity_sum)) {
            lower_energy.witness = snapshot_text(c);
        }
        if (t_identity.add(num, rt.identity_deviation)) {
            lower_identity.witness = snapshot_text(c);
        }
        for (int h : c.holes()) {
            const auto [u0, u1] = layer_terms(c, h);
            if (t_layers.add(u0, u1)) {
                u0_u1.witness = snapshot_text(c);
            }
        }
        if (c.defect_count() > 0) {
            double all = 0.0;
            double present = 0.0;
            for (int t = 0; t < c.lattice().triangle_count(); ++t) {
                const double d = dist_so2(c.jacobian(t));
                all += d * d;
                if (c.triangle_present(t)) {
                    present += d * d;
                }
            }
            if (t_present.add(all, present)) {
                all_present.witness = snapshot_text(c);
            }
        }
    }

    // Per-triangle checks on synthetic affine maps.
    InequalityResult side_energy = named("triangle energy vs side deviation");
    InequalityResult side_dist = named("side deviation vs rotation distance");
    InequalityResult single_triangle = named("triangle energy vs rotation distance");
    RatioTracker t_side_energy{side_energy, false};
    RatioTracker t_side_dist{side_dist, false};
    RatioTracker t_single{single_triangle, false};
    Rng rng(params.seed);
    const double l = spec.l;
    const double v_l = spec.potential.value(l);
    const double p_l = pressure_coefficient(spec);
    const double ref_area = 0.25 * kSqrt3 * l * l;
    std::array<double, 3> a{};
    for (long i = 0; i < params.synthetic_samples; ++i) {
        const Mat2 m = draw_triangle_map(rng, 1.0, 2.0 * params.alpha_tilde, 1.0 - params.alpha_tilde,
                                         1.0 + params.alpha_tilde, a);
        double dev = 0.0;
        for (double x : a) {
            dev += (x - 1.0) * (x - 1.0);
        }
        const double dist = dist_so2(m);
        t_side_dist.add(dev, dist * dist);
    }
    for (long i = 0; i < params.synthetic_samples; ++i) {
        const Mat2 m = draw_triangle_map(rng, l, 2.0 * spec.alpha, spec.domain_min(), spec.domain_max(), a);
        double v_sum = 0.0;
        double dev_l = 0.0;
        for (double x : a) {
            v_sum += spec.potential.value(x);
            dev_l += (x - l) * (x - l);
        }
        const double num = v_sum - 3.0 * v_l - p_l * (heron_area(a[0], a[1], a[2]) - ref_area);
        const double dist = dist_so2(m * (1.0 / l));
        t_side_energy.add(num, dev_l);
        t_single.add(num, dist * dist);
    }

    report.results = {lower_energy, lower_identity, side_energy, side_dist, single_triangle, u0_u1, all_present};
    for (InequalityResult& r : report.results) {
        finish(r);
    }
    // Layer and present-triangle checks only apply when holes occur.
    for (InequalityResult& r : report.results) {
        if ((r.name == u0_u1.name || r.name == all_present.name) && r.samples == 0 && r.violations == 0) {
            r.passed = true;
        }
    }
    return report;
}

double fjm_ratio(std::span<const Mat2> jacobians) {
    std::vector<WeightedJacobian> weighted;
    weighted.reserve(jacobians.size());
    double dist_sq = 0.0;
    for (const Mat2& j : jacobians) {
        weighted.push_back({j, 1.0});
        const double d = dist_so2(j);
        dist_sq += d * d;
    }
    if (dist_sq == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const Mat2 r = best_rotation(weighted);
    double dev_sq = 0.0;
    for (const Mat2& j : jacobians) {
        dev_sq += (j - r).frobenius_sq();
    }
    return std::sqrt(dev_sq / dist_sq);
}

std::vector<FjmRow> estimate_fjm_constant(const FjmParams& params) {
    std::vector<FjmRow> rows;
    auto spec = std::make_shared<PotentialSpec>();
    spec->l = 1.0;
    for (std::size_t idx = 0; idx < params.sizes.size(); ++idx) {
        const int n = params.sizes[idx];
        auto lattice = std::make_shared<const Lattice>(n);
        Rng rng(Rng::derive_seed(params.seed, idx));
        const int sites = lattice->site_count();
        const std::vector<std::uint8_t> present(sites, 1);
        std::vector<Vec2> u(sites);

        // Plane wave with integer wave numbers (n1, n2) in the (1, tau) basis.
        auto add_mode = [&](bool divergence_free, double strain) {
            int n1 = 0;
            int n2 = 0;
            while (n1 == 0 && n2 == 0) {
                n1 = static_cast<int>(rng.below(5)) - 2;
                n2 = static_cast<int>(rng.below(5)) - 2;
            }
            const double kx = 2.0 * std::numbers::pi * n1 / n;
            const double ky = (2.0 * std::numbers::pi * n2 / n - 0.5 * kx) / (0.5 * kSqrt3);
            const double k = std::hypot(kx, ky);
            Vec2 pol;
            if (divergence_free) {
                pol = Vec2{-ky / k, kx / k};
            } else {
                const double angle = 2.0 * std::numbers::pi * rng.uniform();
                pol = Vec2{std::cos(angle), std::sin(angle)};
            }
            const double amp = strain / k;
            const double phase = 2.0 * std::numbers::pi * rng.uniform();
            for (int s = 0; s < sites; ++s) {
                const Site p = lattice->site(s);
                const double arg = 2.0 * std::numbers::pi * (n1 * p.p + n2 * p.q) / n + phase;
                u[s] += amp * std::sin(arg) * pol;
            }
        };

        FjmRow row;
        row.n = n;
        double sum = 0.0;
        for (int i = 0; i < params.samples; ++i) {
            std::fill(u.begin(), u.end(), Vec2{});
            switch (i % 4) {
            case 0: {
                const double amp = params.noise_amplitudes[rng.below(params.noise_amplitudes.size())];
                for (Vec2& v : u) {
                    v = rng.disk(amp);
                }
                break;
            }
            case 1:
                add_mode(false, params.max_strain * rng.uniform());
                break;
            case 2:
                add_mode(true, params.max_strain * rng.uniform());
                break;
            default:
                add_mode(true, 0.5 * params.max_strain * rng.uniform());
                add_mode(true, 0.5 * params.max_strain * rng.uniform());
                for (Vec2& v : u) {
                    v += rng.disk(params.noise_amplitudes.front());
                }
                break;
            }
            const Configuration c = Configuration::from_state(lattice, spec, present, u);
            const double ratio = fjm_ratio(c.jacobians());
            if (std::isnan(ratio)) {
                ++row.skipped;
                continue;
            }
            ++row.samples;
            sum += ratio;
            row.max_ratio = std::max(row.max_ratio, ratio);
        }
        if (params.sampled > 0) {
            auto sampled_spec = std::make_shared<PotentialSpec>(*spec);
            sampled_spec->beta = params.sampled_beta;
            sampled_spec->m = params.sampled_m;
            for (const Configuration& c : sampled_configs(lattice, sampled_spec, params.sampled, 200, 5,
                                                          Rng::derive_seed(params.seed, 1000 + idx))) {
                const double ratio = fjm_ratio(c.jacobians());
                if (std::isnan(ratio)) {
                    ++row.skipped;
                    continue;
                }
                ++row.samples;
                ++row.sampled;
                sum += ratio;
                row.max_ratio = std::max(row.max_ratio, ratio);
                row.sampled_max_ratio = std::max(row.sampled_max_ratio, ratio);
            }
        }
        row.mean_ratio = row.samples ? sum / row.samples : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<int> greedy_hole_packing(const Lattice& lattice) {
    std::vector<int> holes;
    for (int s = 0; s < lattice.site_count(); ++s) {
        if (isolated_from(lattice, s, holes)) {
            holes.push_back(s);
        }
    }
    return holes;
}

DefectProbe defect_energy_probe(std::shared_ptr<const PotentialSpec> spec, int n, std::span<const int> counts) {
    if (n < 5) {
        throw std::invalid_argument("defect_energy_probe: need N >= 5");
    }
    auto lattice = std::make_shared<const Lattice>(n);
    const std::vector<int> packing = greedy_hole_packing(*lattice);
    DefectProbe probe;
    probe.max_feasible = static_cast<int>(packing.size());
    for (int k : counts) {
        if (k < 0 || k > probe.max_feasible) {
            throw std::invalid_argument("defect_energy_probe: cannot place " + std::to_string(k) +
                                        " isolated defects on the " + std::to_string(n) +
                                        "-torus; max feasible is " + std::to_string(probe.max_feasible));
        }
    }
    double sk = 0.0;
    double sa = 0.0;
    for (int k : counts) {
        Configuration c = Configuration::standard(lattice, spec);
        for (int i = 0; i < k; ++i) {
            c.make_hole(packing[i]);
        }
        const DecompositionTerms d = decomposition_terms(c);
        DefectProbeRow row{k, energy_gap(c), d.triangle_part, d.boundary_part, d.boundary_edges};
        probe.rows.push_back(row);
        sk += k;
        sa += row.energy_gap;
    }
    if (probe.rows.size() >= 2) {
        const double mk = sk / probe.rows.size();
        const double ma = sa / probe.rows.size();
        double sxy = 0.0;
        double sxx = 0.0;
        for (const DefectProbeRow& r : probe.rows) {
            sxy += (r.k - mk) * (r.energy_gap - ma);
            sxx += (r.k - mk) * (r.k - mk);
        }
        probe.fitted_cost = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    return probe;
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

std::string to_json(const IdentityReport& r) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "identities";
    j["tolerance"] = r.tolerance;
    j["configs"] = r.configs;
    j["passed"] = r.passed();
    for (const IdentityResult& x : r.results) {
        j["results"].push_back(
            {{"name", x.name}, {"max_residual", x.max_residual}, {"witness_index", x.witness}, {"passed", x.passed}});
    }
    return j.dump(2);
}

std::string to_json(const InequalityReport& r) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "inequalities";
    j["fitted_defect_constant"] = r.fitted_c9;
    j["passed"] = r.passed();
    for (const InequalityResult& x : r.results) {
        j["results"].push_back({{"name", x.name},
                                {"min_ratio", finite_or_null(x.min_ratio)},
                                {"max_ratio", finite_or_null(x.max_ratio)},
                                {"samples", x.samples},
                                {"skipped", x.skipped},
                                {"violations", x.violations},
                                {"require_positive", x.require_positive},
                                {"passed", x.passed},
                                {"witness_snapshot", x.witness}});
    }
    return j.dump(2);
}

std::string to_json(std::span<const FjmRow> rows) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "rigidity_constant";
    j["rows"] = nlohmann::json::array();
    for (const FjmRow& r : rows) {
        j["rows"].push_back({{"N", r.n},
                             {"max_ratio", r.max_ratio},
                             {"mean_ratio", r.mean_ratio},
                             {"samples", r.samples},
                             {"sampled", r.sampled},
                             {"sampled_max_ratio", r.sampled_max_ratio},
                             {"skipped", r.skipped}});
    }
    return j.dump(2);
}

}  // namespace tricrystal
