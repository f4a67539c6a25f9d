//==============================================================================
// linalg.hpp
// Minimal dense linear algebra for desk-scale problems: SPD solves, a Jacobi
// eigensolver for small symmetric matrices, and a Lawson-Hanson nonnegative
// least squares solver over sparse columns.
//==============================================================================
#pragma once

#include <cstddef>
#include <vector>

namespace eulerctl {

// row-major dense matrix
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Solve G x = b for symmetric positive definite G (in-place Cholesky on a
// copy).  Throws std::runtime_error if G is not positive definite.
std::vector<double> spd_solve(Mat g, std::vector<double> b);

// Eigendecomposition of a small symmetric matrix by cyclic Jacobi.
// Returns eigenvalues ascending; eigvecs columns correspond.
void jacobi_eigen(const Mat& sym, std::vector<double>& eigenvalues, Mat& eigenvectors);

// sparse column: index/value pairs, indices ascending
struct SparseVec {
    std::vector<std::pair<int, double>> nz;

    double dot(const std::vector<double>& dense) const {
        double s = 0.0;
        for (const auto& [i, v] : nz) s += v * dense[i];
        return s;
    }
    void axpy(double c, std::vector<double>& dense) const {
        for (const auto& [i, v] : nz) dense[i] += c * v;
    }
    double norm2() const {
        double s = 0.0;
        for (const auto& [i, v] : nz) s += v * v;
        return s;
    }
};

struct NnlsResult {
    std::vector<std::pair<int, double>> x; // nonzero coefficients, index ascending
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// min || b - sum_j x_j col_j ||_2  s.t.  x >= 0   (Lawson-Hanson active set).
// column_subset, when nonempty, restricts the candidate columns.
NnlsResult nnls(const std::vector<SparseVec>& columns, const std::vector<double>& b,
                double tol, int max_iter = 0, const std::vector<int>& column_subset = {});

} // namespace eulerctl
