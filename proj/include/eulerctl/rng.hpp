//==============================================================================
// rng.hpp
// Deterministic pseudo-random numbers.  splitmix64 with explicit Box-Muller,
// so every "random" quantity in the project is bit-reproducible across
// platforms and standard-library versions.
//==============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace eulerctl {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // sub-stream derivation, so independent consumers cannot collide
    Rng fork(std::uint64_t stream) {
        Rng r(state_ ^ (0x94d049bb133111ebull * (stream + 1)));
        r.next_u64();
        return r;
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace eulerctl
