#ifndef TRICRYSTAL_POTENTIAL_HPP
#define TRICRYSTAL_POTENTIAL_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace tricrystal {

enum class PotentialKind { quadratic, tabulated };

/// Pair potential V(r). Either (kappa/2)(r-1)^2 or a not-a-knot cubic spline
/// through tabulated knots.
class PairPotential {
public:
    static PairPotential quadratic(double kappa);
    /// Knots must have strictly increasing r and at least 4 entries.
    static PairPotential tabulated(std::vector<std::pair<double, double>> knots);
    /// Two whitespace-separated columns (r, V); '#' starts a comment.
    static PairPotential from_file(const std::filesystem::path& path);

    PotentialKind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    /// Unchecked evaluation; the spline extrapolates with its end cubics.
    double value(double r) const;
    double derivative(double r) const;
    double second_derivative(double r) const;

    /// Range on which the potential is defined (tabulated: the knot span).
    double lower_bound() const;
    double upper_bound() const;

private:
    PairPotential() = default;
    std::size_t segment(double r) const;

    PotentialKind kind_ = PotentialKind::quadratic;
    double kappa_ = 0.0;
    std::vector<std::pair<double, double>> knots_;
    std::vector<double> moments_;  // spline second derivatives at knots
};

/// Potential plus model parameters.
struct PotentialSpec {
    PairPotential potential = PairPotential::quadratic(100.0);
    double alpha = 0.1;
    double l = 1.0;
    double m = 20.0;
    double beta = 100.0;

    double domain_min() const { return 1.0 - alpha; }
    double domain_max() const { return 1.0 + alpha; }
};

/// V(r); throws std::out_of_range for r outside [1 - alpha, 1 + alpha].
double eval_v(const PotentialSpec& spec, double r);

/// p(l) = 2 sqrt(3) V'(l) / l.
double pressure_coefficient(const PotentialSpec& spec);

struct AssumptionCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;

    bool ok() const;
    /// First failing check, or nullptr.
    const AssumptionCheck* first_failure() const;
};

/// Checks the standing assumptions on V, alpha, l and beta.
ValidationReport validate(const PotentialSpec& spec);

}  // namespace tricrystal

#endif  // TRICRYSTAL_POTENTIAL_HPP
