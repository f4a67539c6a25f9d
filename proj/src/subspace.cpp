#include "eulerctl/subspace.hpp"

namespace eulerctl {

int fiber_dimension(const ModeSubspace& s, const WaveVector& m, double tol) {
    if (s.dim() == 0) return 0;
    const auto fb = fiber_basis(m.canonical());
    // 4 x d coordinate matrix S; rank = # eigenvalues of S S^T above tol
    Mat ssT(4, 4);
    std::vector<double> row(4);
    for (const SpectralField& b : s.basis()) {
        for (int i = 0; i < 4; ++i) row[i] = inner_k(b, fb[i], 0.0);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) ssT(i, j) += row[i] * row[j];
    }
    std::vector<double> eig;
    Mat vecs;
    jacobi_eigen(ssT, eig, vecs);
    int rank = 0;
    for (double e : eig)
        if (e > tol * tol) ++rank;
    return rank;
}

ModeSubspace generator_subspace(int radius, double theta) {
    return ModeSubspace::span_of(generator_fields(radius, theta));
}

} // namespace eulerctl
