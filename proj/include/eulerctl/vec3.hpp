#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "eulerctl/wavevector.hpp"

namespace eulerctl {

using c64 = std::complex<double>;

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {s * x, s * y, s * z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
};

struct CVec3 {
    c64 x{0.0, 0.0}, y{0.0, 0.0}, z{0.0, 0.0};

    CVec3() = default;
    CVec3(c64 a, c64 b, c64 c) : x(a), y(b), z(c) {}
    explicit CVec3(const Vec3& v) : x(v.x), y(v.y), z(v.z) {}

    CVec3 operator+(const CVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    CVec3 operator-(const CVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    CVec3 operator*(c64 s) const { return {s * x, s * y, s * z}; }
    CVec3 operator*(double s) const { return {s * x, s * y, s * z}; }
    CVec3 operator-() const { return {-x, -y, -z}; }
    CVec3& operator+=(const CVec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    return {a.x / n, a.y / n, a.z / n};
}

inline Vec3 to_vec3(const WaveVector& m) {
    return {static_cast<double>(m.m1), static_cast<double>(m.m2), static_cast<double>(m.m3)};
}

// bilinear pairings (no conjugation)
inline c64 dot_c(const CVec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline c64 dot_c(const CVec3& a, const WaveVector& m) {
    return a.x * static_cast<double>(m.m1) + a.y * static_cast<double>(m.m2) +
           a.z * static_cast<double>(m.m3);
}
inline c64 dot_cc(const CVec3& a, const CVec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// hermitian pairing <a, conj(b)>
inline c64 hdot(const CVec3& a, const CVec3& b) {
    return a.x * std::conj(b.x) + a.y * std::conj(b.y) + a.z * std::conj(b.z);
}

inline CVec3 conj(const CVec3& a) { return {std::conj(a.x), std::conj(a.y), std::conj(a.z)}; }
inline double abs2(const CVec3& a) { return std::norm(a.x) + std::norm(a.y) + std::norm(a.z); }
inline double cnorm(const CVec3& a) { return std::sqrt(abs2(a)); }

} // namespace eulerctl
