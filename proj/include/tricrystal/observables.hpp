#ifndef TRICRYSTAL_OBSERVABLES_HPP
#define TRICRYSTAL_OBSERVABLES_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tricrystal/configuration.hpp"
#include "tricrystal/sampler.hpp"

namespace tricrystal {

/// Per-sample observables of one configuration.
struct ObservableRecord {
    std::uint64_t step = 0;
    /// Mean over all bonds of |omega_hat(x+z) - omega_hat(x) - l z|^2.
    double bond_dev_sq = 0.0;
    /// Same sum restricted to bonds with both endpoints present, divided by
    /// the total bond count.
    double present_bond_dev_sq = 0.0;
    /// Mean over triangles of |J - l id|_F^2.
    double jac_dev_sq = 0.0;
    /// Separate means over up and down triangles.
    double jac_dev_sq_up = 0.0;
    double jac_dev_sq_down = 0.0;
    /// sum over triangles of area * dist(l^-1 J, SO(2))^2.
    double rigidity_sum = 0.0;
    int defect_count = 0;
    double energy_gap = 0.0;
    /// bond_dev_sq split by the three undirected bond directions.
    std::array<double, 3> bond_dev_sq_by_direction{};
    /// omega_hat(x0 + tau^j) - omega_hat(x0) at the fixed site x0 = 0.
    std::array<Vec2, 6> origin_bonds{};
};

ObservableRecord measure(const Configuration& c, std::uint64_t step = 0);

/// Mean, batch-means standard error and integrated autocorrelation time.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    double tau_int = 1.0;
    std::size_t samples = 0;
};

inline constexpr std::size_t kMinSamples = 100;
inline constexpr std::size_t kBatchCount = 32;

/// Batch means over 32 equal batches (a remainder of fewer than 32 samples
/// is dropped from the batches but kept in the mean). Throws
/// std::invalid_argument for fewer than 100 samples.
Estimate estimate(std::span<const double> samples);

struct ObservableSummary {
    Estimate bond_dev_sq;
    Estimate present_bond_dev_sq;
    Estimate jac_dev_sq;
    Estimate jac_dev_sq_up;
    Estimate jac_dev_sq_down;
    Estimate rigidity_sum;
    Estimate defect_count;
    Estimate energy_gap;
    std::array<Estimate, 3> bond_dev_sq_by_direction;
    /// x and y components of the origin bond in each of the 6 directions.
    std::array<Estimate, 6> origin_bond_x;
    std::array<Estimate, 6> origin_bond_y;
};

ObservableSummary summarize(std::span<const ObservableRecord> records);

struct ScanPoint {
    double beta = 0.0;
    double m = 0.0;
};

struct ScanParams {
    int n = 6;
    PotentialSpec spec;  // beta and m are overridden per grid point
    std::vector<double> betas;
    std::vector<double> ms;  // empty: use spec.m only
    SamplerParams sampler;
    RunParams run;
    std::uint64_t seed = 1;
};

struct ScanRow {
    double beta = 0.0;
    double m = 0.0;
    std::uint64_t seed = 0;
    Estimate bond_dev_sq;
    Estimate jac_dev_sq;
    Estimate defect_density;
    double acceptance_displace = 0.0;
    double acceptance_create = 0.0;
    double acceptance_annihilate = 0.0;
    double step_size = 0.0;
};

struct ScanTable {
    std::vector<ScanRow> rows;
};

/// One chain per (beta, m) grid point, started from the standard
/// configuration with a seed derived from `seed` and the grid index.
/// Requires at least 4 beta values.
ScanTable symmetry_breaking_scan(const ScanParams& params);

/// Rows of `table` at the given m, ordered by beta.
std::vector<ScanRow> rows_at_m(const ScanTable& table, double m);
/// Rows of `table` at the given beta, ordered by m.
std::vector<ScanRow> rows_at_beta(const ScanTable& table, double beta);

bool strictly_decreasing(std::span<const double> values);
bool non_increasing(std::span<const double> values);

/// Least-squares slope of log(y) against log(x). Requires >= 2 points with
/// positive coordinates.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace tricrystal

#endif  // TRICRYSTAL_OBSERVABLES_HPP
