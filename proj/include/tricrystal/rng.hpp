#ifndef TRICRYSTAL_RNG_HPP
#define TRICRYSTAL_RNG_HPP

#include <cstdint>
#include <random>
#include <string>

#include "tricrystal/geometry.hpp"

namespace tricrystal {

/// Seedable per-chain generator. Draws are built from raw 64-bit outputs so
/// streams do not depend on the standard library's distribution code, and
/// the full engine state round-trips through text for checkpoints.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);
    /// Uniform point in the open disk of the given radius (rejection from the square).
    Vec2 disk(double radius);
    std::uint64_t raw() { return engine_(); }

    std::string state() const;
    void set_state(const std::string& text);

    /// Independent seed for stream `index` derived from a base seed (splitmix64).
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

    friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace tricrystal

#endif  // TRICRYSTAL_RNG_HPP
