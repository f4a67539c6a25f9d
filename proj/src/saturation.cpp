#include "eulerctl/saturation.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eulerctl/bilinear.hpp"

namespace eulerctl {

//------------------------------------------------------------------------------

BImageDictionary::BImageDictionary(const ModeSubspace& e, const SaturationOptions& opt)
    : e_(e) {
    if (opt.combo_depth < 1 || opt.combo_depth > 2)
        throw std::invalid_argument("BImageDictionary: combo_depth must be 1 or 2");
    const auto& gen = e_.basis();
    const std::size_t q = gen.size();

    // depth-1 images, reused by the pair entries
    std::vector<SpectralField> b_single(q);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(q); ++i)
        b_single[i] = bilinear_b(gen[i]);

    struct Combo {
        std::size_t i, j; // j == i marks a singleton entry
        int sign;
    };
    std::vector<Combo> combos;
    for (std::size_t i = 0; i < q; ++i) combos.push_back({i, i, +1});
    if (opt.combo_depth == 2)
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = i + 1; j < q; ++j) {
                combos.push_back({i, j, +1});
                combos.push_back({i, j, -1});
            }

    std::vector<Entry> raw(combos.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(combos.size()); ++c) {
        const auto& cb = combos[c];
        Entry ent;
        if (cb.i == cb.j) {
            ent.zeta = share(gen[cb.i]);
            ent.image = b_single[cb.i];
        } else {
            ent.zeta = share(cb.sign > 0 ? gen[cb.i] + gen[cb.j] : gen[cb.i] - gen[cb.j]);
            const auto sym = bilinear_b_sym(gen[cb.i], gen[cb.j]);
            ent.image = cb.sign > 0 ? b_single[cb.i] + b_single[cb.j] + sym
                                    : b_single[cb.i] + b_single[cb.j] - sym;
        }
        raw[c] = std::move(ent);
    }

    // project out the E component fiber-locally (E's basis is indexed by
    // support so only overlapping basis vectors are dotted)
    std::unordered_map<WaveVector, std::vector<int>, WaveVectorHash> e_at_fiber;
    for (std::size_t i = 0; i < gen.size(); ++i)
        for (const auto& en : gen[i].entries())
            e_at_fiber[en.m].push_back(static_cast<int>(i));
    if (!e_.orthonormalized())
        throw std::invalid_argument("BImageDictionary: E must carry an orthonormal basis");

    auto local_perp = [&](const SpectralField& f) {
        std::vector<int> touched;
        for (const auto& en : f.entries()) {
            auto it = e_at_fiber.find(en.m);
            if (it == e_at_fiber.end()) continue;
            touched.insert(touched.end(), it->second.begin(), it->second.end());
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        SpectralField r = f;
        for (int pass = 0; pass < 2; ++pass)
            for (int i : touched) r = lincomb(1.0, r, -inner_k(r, gen[i], 0.0), gen[i]);
        return r.cleaned(1e-14);
    };

    for (auto& ent : raw) {
        // a capped dictionary discards whole entries: truncating an image
        // would falsify the decomposition identity the certificate asserts
        if (opt.image_l1_cap >= 0 && ent.image.support_l1_radius() > opt.image_l1_cap)
            continue;
        ent.image_perp = local_perp(ent.image);
        entries_.push_back(std::move(ent));
    }

    // solver context: coordinate rows over every fiber any column touches
    std::vector<const SpectralField*> fields;
    fields.reserve(entries_.size());
    for (const auto& ent : entries_) fields.push_back(&ent.image_perp);
    coords_ = CoordMap(support_union(fields));
    cols_.resize(entries_.size());
    for (std::size_t j = 0; j < entries_.size(); ++j) {
        cols_[j] = coords_.to_sparse(entries_[j].image_perp * -1.0);
        for (const auto& en : entries_[j].image_perp.entries())
            fiber_to_cols_[en.m].push_back(static_cast<int>(j));
    }
}

std::vector<int> BImageDictionary::local_columns(const SpectralField& target) const {
    std::vector<int> out;
    for (const auto& en : target.entries()) {
        auto it = fiber_to_cols_.find(en.m);
        if (it == fiber_to_cols_.end()) continue;
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

//------------------------------------------------------------------------------

namespace {

SaturationCertificate assemble_certificate(const SpectralField& xi, const ModeSubspace& e,
                                           const BImageDictionary& dict,
                                           const std::vector<std::pair<int, double>>& alphas) {
    SaturationCertificate cert;
    cert.target = xi;
    SpectralField sum_b;
    for (const auto& [idx, a] : alphas) {
        cert.terms.push_back({a, dict.entries()[idx].zeta});
        sum_b = sum_b + dict.entries()[idx].image * a;
    }
    cert.eta = e.project(xi + sum_b).cleaned(1e-14);
    cert.residual = sobolev_norm(xi - cert.eta + sum_b, 0.0);
    return cert;
}

} // namespace

std::optional<SaturationCertificate> certify_direction(const SpectralField& xi,
                                                       const BImageDictionary& dict,
                                                       const ModeSubspace& e, double tol) {
    const SpectralField xi_perp = e.orth_complement_of(xi).cleaned(1e-14);
    if (sobolev_norm(xi_perp, 0.0) <= tol) {
        SaturationCertificate cert;
        cert.target = xi;
        cert.eta = e.project(xi);
        cert.residual = sobolev_norm(xi - cert.eta, 0.0);
        return cert;
    }
    if (dict.size() == 0) return std::nullopt;

    // fibers no column reaches can never be matched
    if (dict.coords().coverage_gap(xi_perp) > tol) return std::nullopt;
    const std::vector<double> b = dict.coords().to_dense(xi_perp);

    // columns sharing support with the target first, full dictionary second
    NnlsResult sol = nnls(dict.columns(), b, tol, 0, dict.local_columns(xi_perp));
    if (sol.residual_norm > tol) sol = nnls(dict.columns(), b, tol);
    if (sol.residual_norm > tol) return std::nullopt;

    auto cert = assemble_certificate(xi, e, dict, sol.x);
    if (cert.residual > tol) return std::nullopt;
    return cert;
}

double verify_certificate(const SaturationCertificate& cert) {
    SpectralField acc = cert.target - cert.eta;
    for (const auto& [alpha, zeta] : cert.terms)
        acc = acc + ref::bilinear(*zeta, *zeta) * alpha;
    return sobolev_norm(acc, 0.0);
}

SaturationCertificate scale_certificate(const SaturationCertificate& c, double s) {
    if (s <= 0.0) throw std::invalid_argument("scale_certificate: scale must be positive");
    SaturationCertificate out;
    out.target = c.target * s;
    out.eta = c.eta * s;
    for (const auto& [a, z] : c.terms) out.terms.push_back({a * s, z});
    out.residual = c.residual * s;
    return out;
}

SaturationCertificate add_certificates(const SaturationCertificate& a,
                                       const SaturationCertificate& b) {
    SaturationCertificate out;
    out.target = a.target + b.target;
    out.eta = a.eta + b.eta;
    out.terms = a.terms;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    out.residual = a.residual + b.residual; // triangle inequality bound
    return out;
}

//------------------------------------------------------------------------------

namespace {

// Fiber-aligned re-basis of an orthonormal span: directions fully contained
// in single fibers first, misaligned remainder after.  Single-fiber
// generators keep the next step's pairwise B-images sparse.
ModeSubspace fiber_align(const ModeSubspace& v) {
    std::vector<const SpectralField*> ptrs;
    for (const auto& b : v.basis()) ptrs.push_back(&b);
    const auto modes = support_union(ptrs);

    std::vector<SpectralField> aligned;
    for (const WaveVector& m : modes) {
        const auto fb = fiber_basis(m);
        // M = B B^T with B the 4 x d matrix of fiber coordinates; a unit
        // fiber vector y lies in span(V) iff y^T M y = 1
        Mat mm(4, 4);
        for (const auto& bas : v.basis()) {
            double row[4];
            for (int i = 0; i < 4; ++i) row[i] = inner_k(bas, fb[i], 0.0);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) mm(i, j) += row[i] * row[j];
        }
        std::vector<double> eig;
        Mat vec;
        jacobi_eigen(mm, eig, vec);
        for (int c = 0; c < 4; ++c) {
            if (eig[c] < 1.0 - 1e-9) continue;
            SpectralField dir;
            for (int i = 0; i < 4; ++i)
                if (std::abs(vec(i, c)) > 1e-14) dir = dir + fb[i] * vec(i, c);
            aligned.push_back(dir.cleaned(1e-14));
        }
    }

    ModeSubspace out = ModeSubspace::span_of(aligned).extended(v.basis());
    // the re-basis must reproduce the span exactly; otherwise keep the original
    if (out.dim() != v.dim()) return v;
    for (const auto& b : v.basis())
        if (out.projection_residual(b) > 1e-9) return v;
    return out;
}

} // namespace

SaturationStep saturation_step(const ModeSubspace& e, const SaturationOptions& opt) {
    BImageDictionary dict(e, opt);

    SaturationStep out;
    if (dict.size() == 0) {
        out.enlarged = e;
        return out;
    }

    // orthonormal basis of span{B-images} minus E, pivoting on the largest
    // remaining image so candidates come out in decreasing image magnitude
    std::vector<std::size_t> order(dict.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> perp_norm(dict.size());
    for (std::size_t i = 0; i < dict.size(); ++i)
        perp_norm[i] = sobolev_norm(dict.entries()[i].image_perp, 0.0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return perp_norm[a] > perp_norm[b]; });

    const CoordMap& coords = dict.coords();
    std::vector<std::vector<double>> q; // orthonormal complement basis, dense
    for (std::size_t oi : order) {
        if (opt.max_candidates >= 0 &&
            q.size() >= static_cast<std::size_t>(opt.max_candidates))
            break;
        const SparseVec v = coords.to_sparse(dict.entries()[oi].image_perp);
        const double vn2 = v.norm2();
        if (vn2 < 1e-24) continue;
        // cheap screen: residual^2 = ||v||^2 - sum <v, q_j>^2 exactly
        double proj2 = 0.0;
        for (const auto& qj : q) {
            const double s = v.dot(qj);
            proj2 += s * s;
        }
        if (vn2 - proj2 <= opt.pivot_tol * opt.pivot_tol * vn2) continue;

        std::vector<double> r(coords.rows(), 0.0);
        v.axpy(1.0, r);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& qj : q) {
                double d = 0.0;
                for (int i = 0; i < coords.rows(); ++i) d += r[i] * qj[i];
                for (int i = 0; i < coords.rows(); ++i) r[i] -= d * qj[i];
            }
        double rn = 0.0;
        for (double x : r) rn += x * x;
        rn = std::sqrt(rn);
        if (rn <= opt.pivot_tol * std::sqrt(vn2)) continue;
        for (double& x : r) x /= rn;
        q.push_back(std::move(r));
    }

    // attempt two-sided certification of every candidate (independent solves)
    std::vector<std::optional<CertifiedDirection>> results(q.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(q.size()); ++c) {
        const SpectralField dir = coords.to_field(q[c]);
        if (dir.is_zero()) continue;
        auto plus = certify_direction(dir, dict, e, opt.tol);
        if (!plus) continue;
        auto minus = certify_direction(dir * -1.0, dict, e, opt.tol);
        if (!minus) continue;
        results[c] = CertifiedDirection{dir, std::move(*plus), std::move(*minus)};
    }

    std::vector<SpectralField> new_dirs;
    for (auto& r : results)
        if (r) {
            new_dirs.push_back(r->direction);
            out.added.push_back(std::move(*r));
        }

    const ModeSubspace enlarged = e.extended(new_dirs);
    out.enlarged = opt.fiber_align_basis ? fiber_align(enlarged) : enlarged;
    return out;
}

std::vector<FiberRecord> fiber_report(const ModeSubspace& s, int radius) {
    std::vector<FiberRecord> out;
    for (const WaveVector& m : canonical_l1_ball(radius))
        out.push_back({m, fiber_dimension(s, m)});
    return out;
}

SaturationReport saturation_sequence(const ModeSubspace& e, int steps,
                                     const SaturationOptions& opt) {
    if (steps < 0) throw std::invalid_argument("saturation_sequence: steps must be >= 0");
    SaturationReport rep;
    rep.spaces.push_back(e);
    rep.dims.push_back(e.dim());
    for (int s = 0; s < steps; ++s) {
        auto step = saturation_step(rep.spaces.back(), opt);
        rep.spaces.push_back(step.enlarged);
        rep.dims.push_back(step.enlarged.dim());
        rep.added_per_step.push_back(std::move(step.added));
    }

    int radius = 0;
    for (const auto& sp : rep.spaces)
        for (const auto& b : sp.basis()) radius = std::max(radius, b.support_l1_radius());
    rep.fiber_radius = radius;
    for (const auto& sp : rep.spaces) rep.fibers_per_stage.push_back(fiber_report(sp, radius));
    return rep;
}

//------------------------------------------------------------------------------

CertificateBank::CertificateBank(ModeSubspace e, std::vector<CertifiedDirection> directions)
    : e_(std::move(e)), dirs_(std::move(directions)) {}

std::optional<SaturationCertificate> CertificateBank::certify(const SpectralField& xi,
                                                              double tol) const {
    // xi = P_E xi + sum_j c_j d_j + remainder (directions orthonormal, _|_ E)
    SpectralField remainder = e_.orth_complement_of(xi);
    SaturationCertificate cert;
    cert.target = xi;
    cert.eta = e_.project(xi);

    for (const auto& d : dirs_) {
        const double c = inner_k(remainder, d.direction, 0.0);
        if (std::abs(c) < 1e-14) continue;
        remainder = remainder - d.direction * c;
        const SaturationCertificate piece =
            scale_certificate(c > 0 ? d.plus : d.minus, std::abs(c));
        cert.eta = cert.eta + piece.eta;
        for (const auto& t : piece.terms) cert.terms.push_back(t);
    }
    if (sobolev_norm(remainder, 0.0) > tol) return std::nullopt;

    // re-derive the residual on the assembled certificate
    SpectralField sum_b;
    for (const auto& [a, z] : cert.terms) sum_b = sum_b + bilinear_b(*z) * a;
    cert.residual = sobolev_norm(cert.target - cert.eta + sum_b, 0.0);
    if (cert.residual > std::max(tol, 1e-9)) return std::nullopt;
    return cert;
}

} // namespace eulerctl
