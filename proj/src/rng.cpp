#include "tricrystal/rng.hpp"

#include <sstream>
#include <stdexcept>

namespace tricrystal {

std::uint64_t Rng::below(std::uint64_t n) {
    // Lemire-style rejection keeps the draw exactly uniform.
    const std::uint64_t limit = -n % n;
    for (;;) {
        const std::uint64_t x = engine_();
        if (x >= limit) {
            return x % n;
        }
    }
}

Vec2 Rng::disk(double radius) {
    for (;;) {
        const double x = 2.0 * uniform() - 1.0;
        const double y = 2.0 * uniform() - 1.0;
        if (x * x + y * y < 1.0) {
            return {radius * x, radius * y};
        }
    }
}

std::string Rng::state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void Rng::set_state(const std::string& text) {
    std::istringstream is(text);
    is >> engine_;
    if (!is) {
        throw std::runtime_error("Rng: malformed generator state");
    }
}

std::uint64_t Rng::derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace tricrystal
