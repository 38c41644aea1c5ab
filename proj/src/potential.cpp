#include "tricrystal/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tricrystal {

namespace {

// Not-a-knot cubic spline moments via a dense-banded solve. The system is
// small (a few hundred knots at most), so Gaussian elimination on the
// tridiagonal core plus the two modified end rows is adequate.
std::vector<double> spline_moments(const std::vector<std::pair<double, double>>& k) {
    const std::size_t n = k.size();
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = k[i + 1].first - k[i].first;
    }
    // Unknowns M_0..M_{n-1}; rows: not-a-knot at both ends, continuity of V' inside.
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n, 0.0);
    a[0][0] = h[1];
    a[0][1] = -(h[0] + h[1]);
    a[0][2] = h[0];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        a[i][i - 1] = h[i - 1];
        a[i][i] = 2.0 * (h[i - 1] + h[i]);
        a[i][i + 1] = h[i];
        rhs[i] = 6.0 * ((k[i + 1].second - k[i].second) / h[i] - (k[i].second - k[i - 1].second) / h[i - 1]);
    }
    a[n - 1][n - 3] = h[n - 2];
    a[n - 1][n - 2] = -(h[n - 3] + h[n - 2]);
    a[n - 1][n - 1] = h[n - 3];

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < std::min(n, col + 3); ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
                pivot = r;
            }
        }
        std::swap(a[col], a[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t r = col + 1; r < std::min(n, col + 3); ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t c = col; c < std::min(n, col + 4); ++c) {
                a[r][c] -= f * a[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> m(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < std::min(n, i + 4); ++c) {
            s -= a[i][c] * m[c];
        }
        m[i] = s / a[i][i];
    }
    return m;
}

}  // namespace

PairPotential PairPotential::quadratic(double kappa) {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("quadratic potential: kappa must be positive");
    }
    PairPotential v;
    v.kind_ = PotentialKind::quadratic;
    v.kappa_ = kappa;
    return v;
}

PairPotential PairPotential::tabulated(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 4) {
        throw std::invalid_argument("tabulated potential: need at least 4 knots");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first)) {
            throw std::invalid_argument("tabulated potential: r must be strictly increasing");
        }
    }
    PairPotential v;
    v.kind_ = PotentialKind::tabulated;
    v.knots_ = std::move(knots);
    v.moments_ = spline_moments(v.knots_);
    return v;
}

PairPotential PairPotential::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open potential table " + path.string());
    }
    std::vector<std::pair<double, double>> knots;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        double r = 0.0;
        double v = 0.0;
        if (!(ls >> r)) {
            continue;
        }
        if (!(ls >> v)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
        }
        knots.emplace_back(r, v);
    }
    return tabulated(std::move(knots));
}

std::size_t PairPotential::segment(double r) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), r,
                                     [](double x, const auto& k) { return x < k.first; });
    const auto idx = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, knots_.size() - 2);
}

double PairPotential::value(double r) const {
    if (kind_ == PotentialKind::quadratic) {
        const double x = r - 1.0;
        return 0.5 * kappa_ * x * x;
    }
    const std::size_t i = segment(r);
    const double x0 = knots_[i].first;
    const double h = knots_[i + 1].first - x0;
    const double t = r - x0;
    const double u = knots_[i + 1].first - r;
    return (moments_[i] * u * u * u + moments_[i + 1] * t * t * t) / (6.0 * h) +
           (knots_[i].second / h - moments_[i] * h / 6.0) * u + (knots_[i + 1].second / h - moments_[i + 1] * h / 6.0) * t;
}

double PairPotential::derivative(double r) const {
    if (kind_ == PotentialKind::quadratic) {
        return kappa_ * (r - 1.0);
    }
    const std::size_t i = segment(r);
    const double h = knots_[i + 1].first - knots_[i].first;
    const double t = r - knots_[i].first;
    const double u = knots_[i + 1].first - r;
    return (-moments_[i] * u * u + moments_[i + 1] * t * t) / (2.0 * h) +
           (knots_[i + 1].second - knots_[i].second) / h - (moments_[i + 1] - moments_[i]) * h / 6.0;
}

double PairPotential::second_derivative(double r) const {
    if (kind_ == PotentialKind::quadratic) {
        return kappa_;
    }
    const std::size_t i = segment(r);
    const double h = knots_[i + 1].first - knots_[i].first;
    return (moments_[i] * (knots_[i + 1].first - r) + moments_[i + 1] * (r - knots_[i].first)) / h;
}

double PairPotential::lower_bound() const {
    return kind_ == PotentialKind::quadratic ? -std::numeric_limits<double>::infinity() : knots_.front().first;
}

double PairPotential::upper_bound() const {
    return kind_ == PotentialKind::quadratic ? std::numeric_limits<double>::infinity() : knots_.back().first;
}

double eval_v(const PotentialSpec& spec, double r) {
    if (!(r >= spec.domain_min() && r <= spec.domain_max())) {
        throw std::out_of_range("V evaluated outside [1-alpha, 1+alpha] at r = " + std::to_string(r));
    }
    return spec.potential.value(r);
}

double pressure_coefficient(const PotentialSpec& spec) {
    return 2.0 * std::sqrt(3.0) * spec.potential.derivative(spec.l) / spec.l;
}

bool ValidationReport::ok() const { return first_failure() == nullptr; }

const AssumptionCheck* ValidationReport::first_failure() const {
    for (const auto& c : checks) {
        if (!c.passed) {
            return &c;
        }
    }
    return nullptr;
}

ValidationReport validate(const PotentialSpec& spec) {
    ValidationReport report;
    const double lo = spec.domain_min();
    const double hi = spec.domain_max();
    const auto& v = spec.potential;

    report.checks.push_back({"assumption-2: alpha in (0, 1)", spec.alpha > 0.0 && spec.alpha < 1.0, spec.alpha,
                             "alpha = " + std::to_string(spec.alpha)});
    const bool covers = v.lower_bound() <= lo && v.upper_bound() >= hi;
    report.checks.push_back({"assumption-2: V defined on [1-alpha, 1+alpha]", covers, v.upper_bound() - v.lower_bound(),
                             "potential range [" + std::to_string(v.lower_bound()) + ", " +
                                 std::to_string(v.upper_bound()) + "]"});

    // V'' > 0 sampled by central differences on a 1001-point grid.
    constexpr int kGrid = 1001;
    const double h = (hi - lo) / (kGrid - 1);
    double min_curv = std::numeric_limits<double>::infinity();
    if (spec.alpha > 0.0) {
        for (int i = 0; i < kGrid; ++i) {
            const double r = std::clamp(lo + i * h, lo + h, hi - h);
            const double curv = (v.value(r + h) - 2.0 * v.value(r) + v.value(r - h)) / (h * h);
            min_curv = std::min(min_curv, curv);
        }
    }
    report.checks.push_back({"assumption-1: V'' > 0", min_curv > 0.0, min_curv,
                             "min sampled V'' = " + std::to_string(min_curv)});

    const double slope = v.derivative(1.0);
    report.checks.push_back({"assumption-1: V'(1) = 0", std::abs(slope) <= 1e-8, slope,
                             "V'(1) = " + std::to_string(slope)});

    const bool l_ok = spec.l > 1.0 - spec.alpha / 2.0 && spec.l < 1.0 + spec.alpha / 2.0;
    report.checks.push_back({"assumption-3: l in (1-alpha/2, 1+alpha/2)", l_ok, spec.l,
                             "l = " + std::to_string(spec.l)});

    report.checks.push_back({"beta > 0", spec.beta > 0.0, spec.beta, "beta = " + std::to_string(spec.beta)});
    return report;
}

}  // namespace tricrystal
