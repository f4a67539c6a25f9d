#include "eulerctl/coord_map.hpp"

#include <algorithm>
#include <cmath>

namespace eulerctl {

SparseVec CoordMap::to_sparse(const SpectralField& f) const {
    static const double s = std::sqrt(2.0);
    SparseVec v;
    for (const auto& e : f.entries()) {
        auto it = base_.find(e.m);
        if (it == base_.end()) continue;
        const int b = it->second;
        const double c[6] = {e.a.x.real(), e.a.x.imag(), e.a.y.real(),
                             e.a.y.imag(), e.a.z.real(), e.a.z.imag()};
        for (int i = 0; i < 6; ++i)
            if (c[i] != 0.0) v.nz.push_back({b + i, s * c[i]});
    }
    std::sort(v.nz.begin(), v.nz.end());
    return v;
}

std::vector<double> CoordMap::to_dense(const SpectralField& f) const {
    std::vector<double> d(rows(), 0.0);
    to_sparse(f).axpy(1.0, d);
    return d;
}

SpectralField CoordMap::to_field(const std::vector<double>& dense) const {
    static const double inv = 1.0 / std::sqrt(2.0);
    RawCoeffMap raw;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const double* c = dense.data() + 6 * i;
        CVec3 a{c64{c[0], c[1]}, c64{c[2], c[3]}, c64{c[4], c[5]}};
        if (abs2(a) > 0.0) raw[modes_[i]] = a * inv;
    }
    return leray_project(raw).cleaned(1e-14);
}

double CoordMap::coverage_gap(const SpectralField& f) const {
    double acc = 0.0;
    for (const auto& e : f.entries())
        if (!base_.count(e.m)) acc += 2.0 * abs2(e.a);
    return std::sqrt(acc);
}

std::vector<WaveVector> support_union(const std::vector<const SpectralField*>& fields) {
    std::unordered_map<WaveVector, char, WaveVectorHash> seen;
    for (const auto* f : fields)
        for (const auto& e : f->entries()) seen.emplace(e.m, 1);
    std::vector<WaveVector> out;
    out.reserve(seen.size());
    for (const auto& [m, _] : seen) out.push_back(m);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace eulerctl
