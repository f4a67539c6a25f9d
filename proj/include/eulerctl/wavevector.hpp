//==============================================================================
// wavevector.hpp
// Integer wavevectors on the dual lattice of the 3-torus.
// Conventions:
//   - |m| (l1) is used for mode-set membership (cutoff balls, fiber radii).
//   - |m|_2 is used for Laplacian / heat-semigroup symbols.
//   - A nonzero m is "canonical" when it is lexicographically positive;
//     exactly one of {m, -m} is canonical, and coefficients are stored on
//     the canonical half-lattice only.
//==============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

namespace eulerctl {

struct WaveVector {
    int m1 = 0;
    int m2 = 0;
    int m3 = 0;

    constexpr bool is_zero() const { return m1 == 0 && m2 == 0 && m3 == 0; }

    constexpr int l1() const { return std::abs(m1) + std::abs(m2) + std::abs(m3); }
    constexpr int linf() const {
        int a = std::abs(m1), b = std::abs(m2), c = std::abs(m3);
        return a > b ? (a > c ? a : c) : (b > c ? b : c);
    }
    constexpr long l2sq() const {
        return static_cast<long>(m1) * m1 + static_cast<long>(m2) * m2 +
               static_cast<long>(m3) * m3;
    }
    double l2() const { return std::sqrt(static_cast<double>(l2sq())); }

    // Lexicographically positive: first nonzero component is > 0.
    constexpr bool is_canonical() const {
        if (m1 != 0) return m1 > 0;
        if (m2 != 0) return m2 > 0;
        return m3 > 0;
    }

    constexpr WaveVector operator-() const { return {-m1, -m2, -m3}; }
    constexpr WaveVector operator+(const WaveVector& o) const {
        return {m1 + o.m1, m2 + o.m2, m3 + o.m3};
    }
    constexpr WaveVector operator-(const WaveVector& o) const {
        return {m1 - o.m1, m2 - o.m2, m3 - o.m3};
    }
    constexpr WaveVector operator*(int s) const { return {s * m1, s * m2, s * m3}; }

    constexpr bool operator==(const WaveVector& o) const {
        return m1 == o.m1 && m2 == o.m2 && m3 == o.m3;
    }
    constexpr bool operator!=(const WaveVector& o) const { return !(*this == o); }
    constexpr bool operator<(const WaveVector& o) const {
        if (m1 != o.m1) return m1 < o.m1;
        if (m2 != o.m2) return m2 < o.m2;
        return m3 < o.m3;
    }

    constexpr WaveVector canonical() const { return is_canonical() ? *this : -*this; }
};

inline bool parallel(const WaveVector& a, const WaveVector& b) {
    // integer cross product vanishes
    long c1 = static_cast<long>(a.m2) * b.m3 - static_cast<long>(a.m3) * b.m2;
    long c2 = static_cast<long>(a.m3) * b.m1 - static_cast<long>(a.m1) * b.m3;
    long c3 = static_cast<long>(a.m1) * b.m2 - static_cast<long>(a.m2) * b.m1;
    return c1 == 0 && c2 == 0 && c3 == 0;
}

// All nonzero lattice points with l1 norm <= radius, sorted.
std::vector<WaveVector> l1_ball(int radius);
// The canonical halves only, sorted.
std::vector<WaveVector> canonical_l1_ball(int radius);

// Rank of a nonzero wavevector in the (l1 norm, lexicographic) enumeration
// of Z^3_*, starting at 1.  Injective by construction.
std::uint64_t lattice_rank(const WaveVector& n);

struct WaveVectorHash {
    std::size_t operator()(const WaveVector& m) const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        };
        mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(m.m1)));
        mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(m.m2)));
        mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(m.m3)));
        return static_cast<std::size_t>(h);
    }
};

// Dense index over the cube [-R, R]^3, for O(1) coefficient lookup.
class LatticeBox {
  public:
    LatticeBox() = default;
    explicit LatticeBox(int radius) : radius_(radius), side_(2 * radius + 1) {}

    int radius() const { return radius_; }
    bool contains(const WaveVector& m) const {
        return std::abs(m.m1) <= radius_ && std::abs(m.m2) <= radius_ &&
               std::abs(m.m3) <= radius_;
    }
    std::size_t index(const WaveVector& m) const {
        return (static_cast<std::size_t>(m.m1 + radius_) * side_ +
                static_cast<std::size_t>(m.m2 + radius_)) *
                   side_ +
               static_cast<std::size_t>(m.m3 + radius_);
    }
    std::size_t size() const {
        return static_cast<std::size_t>(side_) * side_ * side_;
    }

  private:
    int radius_ = 0;
    int side_ = 1;
};

} // namespace eulerctl
