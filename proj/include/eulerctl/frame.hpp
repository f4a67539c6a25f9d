#pragma once

#include "eulerctl/vec3.hpp"
#include "eulerctl/wavevector.hpp"

namespace eulerctl {

/// Orthonormal pair {l_plus, l_minus} spanning the plane perpendicular to m.
/// The pair carries the two divergence-free degrees of freedom of mode m.
struct PolarizationFrame {
    WaveVector m;
    Vec3 l_plus;
    Vec3 l_minus;
};

// Deterministic frame for the canonical representative of m.  Construction:
// take e = the highest-index standard basis vector not parallel to m,
// l_plus = normalize(e x m), l_minus = normalize(m x l_plus).  Both cross
// products have integer components before normalization, so <l, m> = 0 holds
// exactly in floating point.  frame(m) and frame(-m) return the same frame.
PolarizationFrame canonical_frame(const WaveVector& m);

// Frame rotated by angle theta inside the m-perp plane (used by the
// frame-invariance tests; spans the same plane for every theta).
PolarizationFrame rotated_frame(const WaveVector& m, double theta);

} // namespace eulerctl
