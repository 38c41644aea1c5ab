#ifndef TRICRYSTAL_TESTS_FIXTURES_HPP
#define TRICRYSTAL_TESTS_FIXTURES_HPP

#include <memory>

#include "tricrystal/configuration.hpp"
#include "tricrystal/lattice.hpp"
#include "tricrystal/potential.hpp"

namespace fixture {

inline std::shared_ptr<const tricrystal::Lattice> lattice(int n) {
    return std::make_shared<const tricrystal::Lattice>(n);
}

inline std::shared_ptr<const tricrystal::PotentialSpec> spec(double kappa = 100.0, double beta = 100.0,
                                                             double m = 20.0, double l = 1.0, double alpha = 0.1) {
    tricrystal::PotentialSpec s;
    s.potential = tricrystal::PairPotential::quadratic(kappa);
    s.beta = beta;
    s.m = m;
    s.l = l;
    s.alpha = alpha;
    return std::make_shared<const tricrystal::PotentialSpec>(s);
}

inline tricrystal::Configuration standard(int n, double kappa = 100.0, double m = 20.0, double l = 1.0) {
    return tricrystal::Configuration::standard(lattice(n), spec(kappa, 100.0, m, l));
}

}  // namespace fixture

#endif  // TRICRYSTAL_TESTS_FIXTURES_HPP
