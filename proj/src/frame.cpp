#include "eulerctl/frame.hpp"

#include <stdexcept>

namespace eulerctl {

PolarizationFrame canonical_frame(const WaveVector& m_in) {
    if (m_in.is_zero()) throw std::invalid_argument("canonical_frame: zero wavevector");
    const WaveVector m = m_in.canonical();
    const Vec3 mv = to_vec3(m);

    Vec3 e{0, 0, 1};
    if (parallel(m, WaveVector{0, 0, 1})) e = Vec3{0, 1, 0};

    const Vec3 lp = normalized(cross(e, mv));
    const Vec3 lm = normalized(cross(mv, lp));
    return {m, lp, lm};
}

PolarizationFrame rotated_frame(const WaveVector& m, double theta) {
    PolarizationFrame f = canonical_frame(m);
    const double c = std::cos(theta), s = std::sin(theta);
    const Vec3 lp = f.l_plus * c + f.l_minus * s;
    const Vec3 lm = f.l_plus * (-s) + f.l_minus * c;
    return {f.m, lp, lm};
}

std::vector<WaveVector> l1_ball(int radius) {
    std::vector<WaveVector> out;
    for (int i = -radius; i <= radius; ++i)
        for (int j = -radius; j <= radius; ++j)
            for (int k = -radius; k <= radius; ++k) {
                WaveVector m{i, j, k};
                if (!m.is_zero() && m.l1() <= radius) out.push_back(m);
            }
    return out;
}

std::vector<WaveVector> canonical_l1_ball(int radius) {
    std::vector<WaveVector> out;
    for (const WaveVector& m : l1_ball(radius))
        if (m.is_canonical()) out.push_back(m);
    return out;
}

std::uint64_t lattice_rank(const WaveVector& n) {
    if (n.is_zero()) throw std::invalid_argument("lattice_rank: zero wavevector");
    const int r = n.l1();
    std::uint64_t rank = 0;
    // all shells strictly below r
    for (int s = 1; s < r; ++s) {
        // shell count |{m : |m|_l1 = s}| = 4s^2 + 2
        rank += 4ull * s * s + 2ull;
    }
    // position within the shell, lexicographic
    for (int i = -r; i <= r; ++i)
        for (int j = -r + std::abs(i); j <= r - std::abs(i); ++j) {
            int rem = r - std::abs(i) - std::abs(j);
            for (int k : (rem == 0 ? std::vector<int>{0} : std::vector<int>{-rem, rem})) {
                WaveVector m{i, j, k};
                if (m.l1() != r) continue;
                ++rank;
                if (m == n) return rank;
            }
        }
    throw std::logic_error("lattice_rank: enumeration bug");
}

} // namespace eulerctl
