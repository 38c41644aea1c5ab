#ifndef TRICRYSTAL_HARNESS_HPP
#define TRICRYSTAL_HARNESS_HPP

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tricrystal/configuration.hpp"
#include "tricrystal/rng.hpp"

namespace tricrystal {

inline constexpr int kReportSchemaVersion = 1;

/// Near-standard configurations (displacement radius uniform in
/// [0, alpha/4)) with 0..max_defects isolated holes at random sites. When
/// the torus cannot hold the drawn number of holes, fewer are placed.
std::vector<Configuration> random_valid_configs(std::shared_ptr<const Lattice> lattice,
                                                std::shared_ptr<const PotentialSpec> spec, int count, int max_defects,
                                                Rng& rng);

/// Configurations emitted by a sampler chain started at the standard
/// configuration (`count` snapshots, `thin` sweeps apart after `burn_in`).
std::vector<Configuration> sampled_configs(std::shared_ptr<const Lattice> lattice,
                                           std::shared_ptr<const PotentialSpec> spec, int count, int burn_in, int thin,
                                           std::uint64_t seed);

struct IdentityResult {
    std::string name;
    double max_residual = 0.0;  // relative
    int witness = -1;           // index of the worst configuration
    bool passed = true;
};

struct IdentityReport {
    double tolerance = 1e-9;
    int configs = 0;
    std::vector<IdentityResult> results;

    bool passed() const;
};

/// Energy decomposition, signed-area telescoping, boundary-edge count and
/// mean Jacobian, each as a relative residual. `boundary_sign` is forwarded
/// to the decomposition (fault injection only).
IdentityReport verify_identities(std::span<const Configuration> configs, double tolerance = 1e-9,
                                 double boundary_sign = 1.0);

/// Relative residual of sum of signed image-triangle areas against (sqrt3/2)(lN)^2.
double area_telescoping_residual(const Configuration& c);
/// |boundary edges - 6 |defects||.
double boundary_count_residual(const Configuration& c);
/// |mean Jacobian - l id|_F / l.
double mean_jacobian_residual(const Configuration& c);

struct InequalityResult {
    std::string name;
    double min_ratio = std::numeric_limits<double>::infinity();
    double max_ratio = -std::numeric_limits<double>::infinity();
    long samples = 0;
    long skipped = 0;          // 0/0 cases
    /// Negative numerators, or a positive numerator over a zero denominator
    /// for upper-bound checks.
    long violations = 0;
    bool require_positive = true;
    /// Snapshot text of the configuration attaining the extremal ratio
    /// (config-based checks only).
    std::string witness;
    bool passed = false;
};

struct InequalityParams {
    /// Extra slack added to the fitted defect constant.
    double c9_margin = 1.0;
    long synthetic_samples = 100000;
    double alpha_tilde = 0.05;
    std::uint64_t seed = 1;
};

struct InequalityReport {
    double fitted_c9 = 0.0;
    std::vector<InequalityResult> results;

    bool passed() const;
    const InequalityResult* find(const std::string& name) const;
};

/// Defect constant candidate: max over configs with defects of
/// (m|D| - A)/|D| plus the margin (margin alone if no config has defects).
double fit_defect_constant(std::span<const Configuration> configs, double margin);

/// Lower bounds on the energy gap and the per-triangle estimates, as
/// empirical ratio ranges. `training` fits the defect constant; `configs`
/// are tested. Synthetic per-triangle checks use `spec`.
InequalityReport verify_inequalities(std::span<const Configuration> training, std::span<const Configuration> configs,
                                     const PotentialSpec& spec, const InequalityParams& params);

/// (sum over U0(hole) of dist(J)^2, sum over U1(hole) of dist(J)^2).
std::pair<double, double> layer_terms(const Configuration& c, int hole);

struct FjmParams {
    std::vector<int> sizes{5, 8, 12};
    int samples = 1000;
    std::vector<double> noise_amplitudes{0.005, 0.02, 0.05};
    double max_strain = 0.05;
    /// Hole-filled fields of sampler snapshots added per size (0: synthetic only).
    int sampled = 200;
    double sampled_beta = 100.0;
    double sampled_m = 20.0;
    std::uint64_t seed = 1;
};

struct FjmRow {
    int n = 0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    int samples = 0;  // synthetic plus sampled
    int sampled = 0;
    double sampled_max_ratio = 0.0;
    int skipped = 0;
};

/// |grad v - R*|_L2 / |dist(grad v, SO(2))|_L2 over synthetic periodic fields
/// and hole-filled sampler snapshots on the unit lattice, R* the best
/// rotation. Exactly rigid fields are skipped.
std::vector<FjmRow> estimate_fjm_constant(const FjmParams& params);

/// The ratio for one field given by per-triangle Jacobians (equal areas).
/// Returns NaN for a perfect rotation field.
double fjm_ratio(std::span<const Mat2> jacobians);

struct DefectProbeRow {
    int k = 0;
    double energy_gap = 0.0;
    double triangle_part = 0.0;
    double boundary_part = 0.0;
    int boundary_edges = 0;
};

struct DefectProbe {
    std::vector<DefectProbeRow> rows;
    double fitted_cost = 0.0;  // least-squares slope of A against k
    int max_feasible = 0;
};

/// Greedy isolated packing of holes (in site order). Throws
/// std::invalid_argument naming the max feasible count if it cannot place
/// the largest requested k.
DefectProbe defect_energy_probe(std::shared_ptr<const PotentialSpec> spec, int n, std::span<const int> counts);

/// Site indices of the greedy isolated packing.
std::vector<int> greedy_hole_packing(const Lattice& lattice);

/// JSON text for the reports.
std::string to_json(const IdentityReport& r);
std::string to_json(const InequalityReport& r);
std::string to_json(std::span<const FjmRow> rows);

}  // namespace tricrystal

#endif  // TRICRYSTAL_HARNESS_HPP
