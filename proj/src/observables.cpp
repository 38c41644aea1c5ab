#include "tricrystal/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tricrystal/energy.hpp"

namespace tricrystal {

ObservableRecord measure(const Configuration& c, std::uint64_t step) {
    ObservableRecord r;
    r.step = step;
    const double l = c.spec().l;
    const int sites = c.site_count();
    double all = 0.0;
    double present = 0.0;
    for (int s = 0; s < sites; ++s) {
        for (int d = 0; d < 3; ++d) {
            const double dev = (c.extended_bond(s, d) - l * unit_direction(d)).norm_sq();
            all += dev;
            r.bond_dev_sq_by_direction[d] += dev;
            if (!c.is_hole(s) && !c.is_hole(c.lattice().neighbor(s, d))) {
                present += dev;
            }
        }
    }
    const double bonds = 3.0 * sites;
    r.bond_dev_sq = all / bonds;
    r.present_bond_dev_sq = present / bonds;
    for (double& v : r.bond_dev_sq_by_direction) {
        v /= sites;
    }

    const Mat2 target = Mat2::scaled_identity(l);
    double up = 0.0;
    double down = 0.0;
    double rigidity = 0.0;
    const auto& jac = c.jacobians();
    for (std::size_t t = 0; t < jac.size(); ++t) {
        const double dev = (jac[t] - target).frobenius_sq();
        (t % 2 == 0 ? up : down) += dev;
        const double dist = dist_so2(jac[t] * (1.0 / l));
        rigidity += kUnitTriangleArea * dist * dist;
    }
    r.jac_dev_sq = (up + down) / jac.size();
    r.jac_dev_sq_up = up / sites;
    r.jac_dev_sq_down = down / sites;
    r.rigidity_sum = rigidity;
    r.defect_count = c.defect_count();
    r.energy_gap = energy_gap(c);
    for (int j = 0; j < 6; ++j) {
        r.origin_bonds[j] = c.extended_bond(0, j);
    }
    return r;
}

Estimate estimate(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < kMinSamples) {
        throw std::invalid_argument("estimate: need at least " + std::to_string(kMinSamples) + " samples, got " +
                                    std::to_string(n));
    }
    Estimate e;
    e.samples = n;
    double sum = 0.0;
    for (double v : samples) {
        sum += v;
    }
    e.mean = sum / n;
    double var = 0.0;
    for (double v : samples) {
        var += (v - e.mean) * (v - e.mean);
    }
    var /= static_cast<double>(n - 1);

    const std::size_t b = n / kBatchCount;
    std::array<double, kBatchCount> batch{};
    for (std::size_t k = 0; k < kBatchCount; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < b; ++i) {
            s += samples[k * b + i];
        }
        batch[k] = s / b;
    }
    double bmean = 0.0;
    for (double v : batch) {
        bmean += v;
    }
    bmean /= kBatchCount;
    double bvar = 0.0;
    for (double v : batch) {
        bvar += (v - bmean) * (v - bmean);
    }
    bvar /= kBatchCount - 1;

    if (var > 0.0) {
        e.std_error = std::sqrt(bvar * b / n);
        e.tau_int = b * bvar / var;
    }
    return e;
}

ObservableSummary summarize(std::span<const ObservableRecord> records) {
    std::vector<double> buf(records.size());
    auto column = [&](auto get) {
        std::transform(records.begin(), records.end(), buf.begin(), get);
        return estimate(buf);
    };
    ObservableSummary s;
    s.bond_dev_sq = column([](const ObservableRecord& r) { return r.bond_dev_sq; });
    s.present_bond_dev_sq = column([](const ObservableRecord& r) { return r.present_bond_dev_sq; });
    s.jac_dev_sq = column([](const ObservableRecord& r) { return r.jac_dev_sq; });
    s.jac_dev_sq_up = column([](const ObservableRecord& r) { return r.jac_dev_sq_up; });
    s.jac_dev_sq_down = column([](const ObservableRecord& r) { return r.jac_dev_sq_down; });
    s.rigidity_sum = column([](const ObservableRecord& r) { return r.rigidity_sum; });
    s.defect_count = column([](const ObservableRecord& r) { return static_cast<double>(r.defect_count); });
    s.energy_gap = column([](const ObservableRecord& r) { return r.energy_gap; });
    for (int d = 0; d < 3; ++d) {
        s.bond_dev_sq_by_direction[d] =
            column([d](const ObservableRecord& r) { return r.bond_dev_sq_by_direction[d]; });
    }
    for (int j = 0; j < 6; ++j) {
        s.origin_bond_x[j] = column([j](const ObservableRecord& r) { return r.origin_bonds[j].x; });
        s.origin_bond_y[j] = column([j](const ObservableRecord& r) { return r.origin_bonds[j].y; });
    }
    return s;
}

ScanTable symmetry_breaking_scan(const ScanParams& params) {
    if (params.betas.size() < 4) {
        throw std::invalid_argument("symmetry_breaking_scan: need at least 4 beta values");
    }
    const std::vector<double> ms = params.ms.empty() ? std::vector<double>{params.spec.m} : params.ms;
    auto lattice = std::make_shared<const Lattice>(params.n);
    ScanTable table;
    std::uint64_t index = 0;
    for (double m : ms) {
        for (double beta : params.betas) {
            auto spec = std::make_shared<PotentialSpec>(params.spec);
            spec->beta = beta;
            spec->m = m;
            ScanRow row;
            row.beta = beta;
            row.m = m;
            row.seed = Rng::derive_seed(params.seed, index++);
            Chain chain(Configuration::standard(lattice, spec), params.sampler, row.seed);
            std::vector<double> bond;
            std::vector<double> jac;
            std::vector<double> density;
            run(chain, params.run, [&](const Chain& ch) {
                const ObservableRecord rec = measure(ch.config(), ch.steps());
                bond.push_back(rec.bond_dev_sq);
                jac.push_back(rec.jac_dev_sq);
                density.push_back(static_cast<double>(rec.defect_count) / lattice->site_count());
            });
            row.bond_dev_sq = estimate(bond);
            row.jac_dev_sq = estimate(jac);
            row.defect_density = estimate(density);
            row.acceptance_displace = chain.tallies()[0].acceptance_rate();
            row.acceptance_create = chain.tallies()[1].acceptance_rate();
            row.acceptance_annihilate = chain.tallies()[2].acceptance_rate();
            row.step_size = chain.step_size();
            table.rows.push_back(row);
        }
    }
    return table;
}

std::vector<ScanRow> rows_at_m(const ScanTable& table, double m) {
    std::vector<ScanRow> out;
    std::copy_if(table.rows.begin(), table.rows.end(), std::back_inserter(out),
                 [m](const ScanRow& r) { return r.m == m; });
    std::sort(out.begin(), out.end(), [](const ScanRow& a, const ScanRow& b) { return a.beta < b.beta; });
    return out;
}

std::vector<ScanRow> rows_at_beta(const ScanTable& table, double beta) {
    std::vector<ScanRow> out;
    std::copy_if(table.rows.begin(), table.rows.end(), std::back_inserter(out),
                 [beta](const ScanRow& r) { return r.beta == beta; });
    std::sort(out.begin(), out.end(), [](const ScanRow& a, const ScanRow& b) { return a.m < b.m; });
    return out;
}

bool strictly_decreasing(std::span<const double> values) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] < values[i - 1])) {
            return false;
        }
    }
    return true;
}

bool non_increasing(std::span<const double> values) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] <= values[i - 1])) {
            return false;
        }
    }
    return true;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need two equally sized series with at least 2 points");
    }
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) {
            throw std::invalid_argument("loglog_slope: coordinates must be positive");
        }
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double n = static_cast<double>(x.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("loglog_slope: x values must not all be equal");
    }
    return sxy / sxx;
}

}  // namespace tricrystal
