#include "eulerctl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eulerctl {

std::vector<double> spd_solve(Mat g, std::vector<double> b) {
    const std::size_t n = g.rows;
    if (g.cols != n || b.size() != n) throw std::invalid_argument("spd_solve: shape mismatch");

    // Cholesky G = L L^T
    for (std::size_t j = 0; j < n; ++j) {
        double d = g(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= g(j, k) * g(j, k);
        if (d <= 0.0) throw std::runtime_error("spd_solve: matrix not positive definite");
        const double l = std::sqrt(d);
        g(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= g(i, k) * g(j, k);
            g(i, j) = s / l;
        }
    }
    // forward then backward substitution
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= g(i, k) * b[k];
        b[i] = s / g(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= g(k, ii) * b[k];
        b[ii] = s / g(ii, ii);
    }
    return b;
}

void jacobi_eigen(const Mat& sym, std::vector<double>& eigenvalues, Mat& eigenvectors) {
    const std::size_t n = sym.rows;
    Mat a = sym;
    Mat v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-28) break;

        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&a](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    eigenvalues.resize(n);
    eigenvectors = Mat(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        eigenvalues[c] = a(order[c], order[c]);
        for (std::size_t r = 0; r < n; ++r) eigenvectors(r, c) = v(r, order[c]);
    }
}

NnlsResult nnls(const std::vector<SparseVec>& columns, const std::vector<double>& b,
                double tol, int max_iter, const std::vector<int>& column_subset) {
    const std::size_t nb = b.size();
    std::vector<int> cand;
    if (column_subset.empty()) {
        cand.resize(columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) cand[j] = static_cast<int>(j);
    } else {
        cand = column_subset;
    }
    if (max_iter <= 0) max_iter = 8 * static_cast<int>(nb) + 256;

    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);

    std::vector<int> passive;                // active (positive) set
    std::vector<double> x;                   // coefficients for passive columns
    std::vector<double> resid = b;           // b - A_P x
    std::vector<char> in_passive(columns.size(), 0);

    auto residual_norm = [&resid]() {
        double s = 0.0;
        for (double v : resid) s += v * v;
        return std::sqrt(s);
    };

    // least squares on the passive set via normal equations
    auto solve_passive = [&](std::vector<double>& z) {
        const std::size_t k = passive.size();
        Mat g(k, k);
        std::vector<double> rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
            const SparseVec& ci = columns[passive[i]];
            rhs[i] = ci.dot(b);
            for (std::size_t j = i; j < k; ++j) {
                // sparse dot of two ascending-index vectors
                const SparseVec& cj = columns[passive[j]];
                double s = 0.0;
                std::size_t p = 0, q = 0;
                while (p < ci.nz.size() && q < cj.nz.size()) {
                    if (ci.nz[p].first < cj.nz[q].first)
                        ++p;
                    else if (cj.nz[q].first < ci.nz[p].first)
                        ++q;
                    else {
                        s += ci.nz[p].second * cj.nz[q].second;
                        ++p;
                        ++q;
                    }
                }
                g(i, j) = s;
                g(j, i) = s;
            }
            g(i, i) += 1e-13 * (g(i, i) + 1.0); // jitter against exact rank loss
        }
        z = spd_solve(std::move(g), std::move(rhs));
    };

    NnlsResult out;
    int it = 0;
    while (it < max_iter) {
        // gradient w = A^T resid over candidate columns outside the passive set
        int best = -1;
        double best_w = 0.0;
        for (int j : cand) {
            if (in_passive[j]) continue;
            const double w = columns[j].dot(resid);
            if (w > best_w) { // strict, so ties resolve toward the lowest index
                best_w = w;
                best = j;
            }
        }
        const double rn = residual_norm();
        if (rn <= tol || best < 0 || best_w <= 1e-14 * std::max(bnorm, 1e-300)) {
            out.converged = rn <= tol || best < 0 || best_w <= 1e-14 * std::max(bnorm, 1e-300);
            break;
        }

        passive.push_back(best);
        in_passive[best] = 1;

        // inner loop: restore feasibility of the passive-set LS solution
        for (;;) {
            ++it;
            std::vector<double> z;
            solve_passive(z);
            bool feasible = true;
            double alpha = 1.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                if (z[i] <= 0.0) {
                    feasible = false;
                    const double xi = i < x.size() ? x[i] : 0.0;
                    if (xi - z[i] > 0.0) alpha = std::min(alpha, xi / (xi - z[i]));
                }
            }
            if (feasible) {
                x = std::move(z);
                break;
            }
            // step to the boundary and drop zeroed columns
            std::vector<double> xn(passive.size(), 0.0);
            for (std::size_t i = 0; i < passive.size(); ++i) {
                const double xi = i < x.size() ? x[i] : 0.0;
                xn[i] = xi + alpha * (z[i] - xi);
            }
            std::vector<int> keep;
            std::vector<double> xkeep;
            for (std::size_t i = 0; i < passive.size(); ++i) {
                if (xn[i] > 1e-14) {
                    keep.push_back(passive[i]);
                    xkeep.push_back(xn[i]);
                } else {
                    in_passive[passive[i]] = 0;
                }
            }
            passive = std::move(keep);
            x = std::move(xkeep);
            if (passive.empty()) break;
            if (it >= max_iter) break;
        }

        // refresh residual
        resid = b;
        for (std::size_t i = 0; i < passive.size(); ++i) columns[passive[i]].axpy(-x[i], resid);
        ++it;
    }

    out.residual_norm = residual_norm();
    out.iterations = it;
    if (out.residual_norm <= tol) out.converged = true;
    std::vector<std::pair<int, double>> coeffs;
    for (std::size_t i = 0; i < passive.size(); ++i)
        if (x[i] > 0.0) coeffs.push_back({passive[i], x[i]});
    std::sort(coeffs.begin(), coeffs.end());
    out.x = std::move(coeffs);
    return out;
}

} // namespace eulerctl
