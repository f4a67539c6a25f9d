//==============================================================================
// coord_map.hpp
// Isometric real coordinates for spectral fields over a fixed canonical mode
// list: 6 reals per mode scaled by sqrt(2), so the L2 pairing becomes the
// Euclidean dot product.  Backbone of the certification solves.
//==============================================================================
#pragma once

#include <unordered_map>
#include <vector>

#include "eulerctl/linalg.hpp"
#include "eulerctl/spectral_field.hpp"

namespace eulerctl {

class CoordMap {
  public:
    CoordMap() = default;
    explicit CoordMap(std::vector<WaveVector> modes) : modes_(std::move(modes)) {
        for (std::size_t i = 0; i < modes_.size(); ++i)
            base_[modes_[i]] = 6 * static_cast<int>(i);
    }

    int rows() const { return 6 * static_cast<int>(modes_.size()); }
    const std::vector<WaveVector>& modes() const { return modes_; }

    SparseVec to_sparse(const SpectralField& f) const;
    std::vector<double> to_dense(const SpectralField& f) const;
    // inverse map; applies a Leray projection to shed orthogonalization noise
    SpectralField to_field(const std::vector<double>& dense) const;

    // L2 mass of the part of f outside the mapped modes
    double coverage_gap(const SpectralField& f) const;

  private:
    std::vector<WaveVector> modes_;
    std::unordered_map<WaveVector, int, WaveVectorHash> base_;
};

std::vector<WaveVector> support_union(const std::vector<const SpectralField*>& fields);

} // namespace eulerctl
