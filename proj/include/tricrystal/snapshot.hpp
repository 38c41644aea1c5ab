#ifndef TRICRYSTAL_SNAPSHOT_HPP
#define TRICRYSTAL_SNAPSHOT_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "tricrystal/configuration.hpp"

namespace tricrystal {

inline constexpr int kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Doubles are written as hexadecimal floats so that reading back is bit-exact.
std::string hex_double(double v);
double parse_hex_double(const std::string& token);

void write_spec(std::ostream& os, const PotentialSpec& spec);
PotentialSpec read_spec(std::istream& is);

/// Versioned text record: lattice size, model parameters, and per site
/// (present flag, u_x, u_y).
void write_snapshot(std::ostream& os, const Configuration& c);
Configuration read_snapshot(std::istream& is);

}  // namespace tricrystal

#endif  // TRICRYSTAL_SNAPSHOT_HPP
