#include "eulerctl/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eulerctl {

namespace {

template <class Entry>
void sort_entries(std::vector<Entry>& v) {
    std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) { return a.m < b.m; });
}

} // namespace

SpectralField SpectralField::from_entries(std::vector<FieldEntry> entries) {
    double max_mag = 0.0;
    for (const auto& e : entries) max_mag = std::max(max_mag, cnorm(e.a));

    std::vector<FieldEntry> kept;
    kept.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.m.is_zero()) throw std::invalid_argument("SpectralField: zero-mode entry");
        if (!e.m.is_canonical())
            throw std::invalid_argument("SpectralField: non-canonical wavevector");
        const double mag = cnorm(e.a);
        if (mag <= kCoeffDropTol * max_mag) continue;
        if (std::abs(dot_c(e.a, e.m)) > kDivTol * mag * e.m.l2())
            throw std::invalid_argument("SpectralField: coefficient not divergence-free");
        kept.push_back(e);
    }
    sort_entries(kept);
    for (std::size_t i = 1; i < kept.size(); ++i)
        if (kept[i].m == kept[i - 1].m)
            throw std::invalid_argument("SpectralField: duplicate wavevector");
    SpectralField f;
    f.entries_ = std::move(kept);
    return f;
}

SpectralField SpectralField::from_raw_unchecked(const RawCoeffMap& raw) {
    std::map<WaveVector, std::pair<CVec3, int>> acc;
    double max_mag = 0.0;
    for (const auto& [m, a] : raw) max_mag = std::max(max_mag, cnorm(a));
    for (const auto& [m, a] : raw) {
        if (m.is_zero()) {
            if (cnorm(a) > 1e-10 * std::max(max_mag, 1e-300))
                throw std::invalid_argument("SpectralField: non-negligible zero mode");
            continue;
        }
        const WaveVector mc = m.canonical();
        const CVec3 v = m.is_canonical() ? a : conj(a);
        auto& slot = acc[mc];
        slot.first += v;
        slot.second += 1;
    }
    std::vector<FieldEntry> entries;
    entries.reserve(acc.size());
    for (auto& [m, slot] : acc) {
        CVec3 v = slot.first * (1.0 / slot.second); // average if both halves given
        if (cnorm(v) > kCoeffDropTol * max_mag) entries.push_back({m, v});
    }
    SpectralField f;
    f.entries_ = std::move(entries); // already sorted (map order)
    return f;
}

const CVec3* SpectralField::find(const WaveVector& m) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), m,
                               [](const FieldEntry& e, const WaveVector& w) { return e.m < w; });
    if (it != entries_.end() && it->m == m) return &it->a;
    return nullptr;
}

int SpectralField::support_l1_radius() const {
    int r = 0;
    for (const auto& e : entries_) r = std::max(r, e.m.l1());
    return r;
}

int SpectralField::support_linf_radius() const {
    int r = 0;
    for (const auto& e : entries_) r = std::max(r, e.m.linf());
    return r;
}

double SpectralField::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, cnorm(e.a));
    return m;
}

double SpectralField::max_relative_divergence() const {
    double worst = 0.0;
    for (const auto& e : entries_) {
        const double mag = cnorm(e.a);
        if (mag == 0.0) continue;
        worst = std::max(worst, std::abs(dot_c(e.a, e.m)) / (mag * e.m.l2()));
    }
    return worst;
}

SpectralField lincomb(double ca, const SpectralField& a, double cb, const SpectralField& b) {
    std::vector<FieldEntry> out;
    out.reserve(a.entries_.size() + b.entries_.size());
    std::size_t i = 0, j = 0;
    while (i < a.entries_.size() || j < b.entries_.size()) {
        if (j == b.entries_.size() ||
            (i < a.entries_.size() && a.entries_[i].m < b.entries_[j].m)) {
            out.push_back({a.entries_[i].m, a.entries_[i].a * ca});
            ++i;
        } else if (i == a.entries_.size() || b.entries_[j].m < a.entries_[i].m) {
            out.push_back({b.entries_[j].m, b.entries_[j].a * cb});
            ++j;
        } else {
            out.push_back({a.entries_[i].m, a.entries_[i].a * ca + b.entries_[j].a * cb});
            ++i;
            ++j;
        }
    }
    SpectralField f;
    f.entries_ = std::move(out);
    return f;
}

SpectralField SpectralField::operator+(const SpectralField& o) const {
    return lincomb(1.0, *this, 1.0, o).cleaned();
}
SpectralField SpectralField::operator-(const SpectralField& o) const {
    return lincomb(1.0, *this, -1.0, o).cleaned();
}
SpectralField SpectralField::operator*(double s) const {
    SpectralField f;
    f.entries_ = entries_;
    for (auto& e : f.entries_) e.a = e.a * s;
    f.cutoff_hint_ = cutoff_hint_;
    return f;
}

SpectralField SpectralField::heat(double delta) const {
    if (delta < 0.0) throw std::invalid_argument("heat: negative delta (backward heat)");
    SpectralField f;
    f.entries_ = entries_;
    for (auto& e : f.entries_) e.a = e.a * std::exp(-delta * static_cast<double>(e.m.l2sq()));
    return f;
}

SpectralField SpectralField::truncated_l1(int radius) const {
    SpectralField f;
    for (const auto& e : entries_)
        if (e.m.l1() <= radius) f.entries_.push_back(e);
    return f;
}

SpectralField SpectralField::cleaned(double rel_tol, double abs_floor) const {
    const double cut = std::max(rel_tol * max_abs_coeff(), abs_floor);
    SpectralField f;
    for (const auto& e : entries_)
        if (cnorm(e.a) > cut) f.entries_.push_back(e);
    return f;
}

Vec3 SpectralField::eval(const Vec3& x) const {
    Vec3 v{0, 0, 0};
    for (const auto& e : entries_) {
        const double ph = e.m.m1 * x.x + e.m.m2 * x.y + e.m.m3 * x.z;
        const c64 w = std::polar(1.0, ph);
        v.x += 2.0 * std::real(e.a.x * w);
        v.y += 2.0 * std::real(e.a.y * w);
        v.z += 2.0 * std::real(e.a.z * w);
    }
    return v;
}

double inner_k(const SpectralField& a, const SpectralField& b, double k) {
    // merge over sorted supports
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].m < eb[j].m)
            ++i;
        else if (eb[j].m < ea[i].m)
            ++j;
        else {
            const double w =
                k == 0.0 ? 1.0 : std::pow(static_cast<double>(ea[i].m.l2sq()), k);
            acc += 2.0 * w * std::real(hdot(ea[i].a, eb[j].a));
            ++i;
            ++j;
        }
    }
    return acc;
}

double sobolev_norm(const SpectralField& u, double k) {
    if (k < 0.0) throw std::invalid_argument("sobolev_norm: k must be >= 0");
    double acc = 0.0;
    for (const auto& e : u.entries()) {
        const double w = k == 0.0 ? 1.0 : std::pow(static_cast<double>(e.m.l2sq()), k);
        acc += 2.0 * w * abs2(e.a);
    }
    return std::sqrt(acc);
}

SpectralField leray_project(const RawCoeffMap& raw) {
    RawCoeffMap projected;
    for (const auto& [m, a] : raw) {
        if (m.is_zero()) continue; // zero mode dropped
        const double m2 = static_cast<double>(m.l2sq());
        const c64 along = dot_c(a, m);
        projected[m] = a - CVec3(to_vec3(m)) * (along / m2);
    }
    return SpectralField::from_raw_unchecked(projected);
}

SpectralField leray_project(const SpectralField& u) {
    RawCoeffMap raw;
    for (const auto& e : u.entries()) raw[e.m] = e.a;
    return leray_project(raw);
}

//------------------------------------------------------------------------------

ScalarSpectralField ScalarSpectralField::from_entries(std::vector<ScalarEntry> entries) {
    double max_mag = 0.0;
    for (const auto& e : entries) max_mag = std::max(max_mag, std::abs(e.a));
    std::vector<ScalarEntry> kept;
    for (const auto& e : entries) {
        if (e.m.is_zero()) throw std::invalid_argument("ScalarSpectralField: zero-mode entry");
        if (!e.m.is_canonical())
            throw std::invalid_argument("ScalarSpectralField: non-canonical wavevector");
        if (std::abs(e.a) > kCoeffDropTol * max_mag) kept.push_back(e);
    }
    sort_entries(kept);
    for (std::size_t i = 1; i < kept.size(); ++i)
        if (kept[i].m == kept[i - 1].m)
            throw std::invalid_argument("ScalarSpectralField: duplicate wavevector");
    ScalarSpectralField f;
    f.entries_ = std::move(kept);
    return f;
}

ScalarSpectralField ScalarSpectralField::from_raw(const RawScalarMap& raw) {
    std::map<WaveVector, std::pair<c64, int>> acc;
    double max_mag = 0.0;
    for (const auto& [m, a] : raw) max_mag = std::max(max_mag, std::abs(a));
    for (const auto& [m, a] : raw) {
        if (m.is_zero()) continue; // mean-zero normalization
        const WaveVector mc = m.canonical();
        auto& slot = acc[mc];
        slot.first += m.is_canonical() ? a : std::conj(a);
        slot.second += 1;
    }
    ScalarSpectralField f;
    for (auto& [m, slot] : acc) {
        const c64 v = slot.first / static_cast<double>(slot.second);
        if (std::abs(v) > kCoeffDropTol * max_mag) f.entries_.push_back({m, v});
    }
    return f;
}

const c64* ScalarSpectralField::find(const WaveVector& m) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), m,
                               [](const ScalarEntry& e, const WaveVector& w) { return e.m < w; });
    if (it != entries_.end() && it->m == m) return &it->a;
    return nullptr;
}

namespace {

ScalarSpectralField scalar_lincomb(double ca, const ScalarSpectralField& a, double cb,
                                   const ScalarSpectralField& b) {
    RawScalarMap acc;
    for (const auto& e : a.entries()) acc[e.m] += ca * e.a;
    for (const auto& e : b.entries()) acc[e.m] += cb * e.a;
    return ScalarSpectralField::from_raw(acc);
}

} // namespace

ScalarSpectralField ScalarSpectralField::operator+(const ScalarSpectralField& o) const {
    return scalar_lincomb(1.0, *this, 1.0, o);
}
ScalarSpectralField ScalarSpectralField::operator-(const ScalarSpectralField& o) const {
    return scalar_lincomb(1.0, *this, -1.0, o);
}
ScalarSpectralField ScalarSpectralField::operator*(double s) const {
    ScalarSpectralField f = *this;
    for (auto& e : f.entries_) e.a *= s;
    return f;
}

ScalarSpectralField ScalarSpectralField::truncated_l1(int radius) const {
    ScalarSpectralField f;
    for (const auto& e : entries_)
        if (e.m.l1() <= radius) f.entries_.push_back(e);
    return f;
}

ScalarSpectralField ScalarSpectralField::cleaned(double rel_tol) const {
    const double cut = rel_tol * max_abs_coeff();
    ScalarSpectralField f;
    for (const auto& e : entries_)
        if (std::abs(e.a) > cut) f.entries_.push_back(e);
    return f;
}

double ScalarSpectralField::eval(const Vec3& x) const {
    double v = 0.0;
    for (const auto& e : entries_) {
        const double ph = e.m.m1 * x.x + e.m.m2 * x.y + e.m.m3 * x.z;
        v += 2.0 * std::real(e.a * std::polar(1.0, ph));
    }
    return v;
}

double ScalarSpectralField::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.a));
    return m;
}

double inner_k(const ScalarSpectralField& a, const ScalarSpectralField& b, double k) {
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].m < eb[j].m)
            ++i;
        else if (eb[j].m < ea[i].m)
            ++j;
        else {
            const double w =
                k == 0.0 ? 1.0 : std::pow(static_cast<double>(ea[i].m.l2sq()), k);
            acc += 2.0 * w * std::real(ea[i].a * std::conj(eb[j].a));
            ++i;
            ++j;
        }
    }
    return acc;
}

double sobolev_norm(const ScalarSpectralField& u, double k) {
    if (k < 0.0) throw std::invalid_argument("sobolev_norm: k must be >= 0");
    double acc = 0.0;
    for (const auto& e : u.entries()) {
        const double w = k == 0.0 ? 1.0 : std::pow(static_cast<double>(e.m.l2sq()), k);
        acc += 2.0 * w * std::norm(e.a);
    }
    return std::sqrt(acc);
}

ScalarSpectralField inverse_laplacian(const ScalarSpectralField& f) {
    ScalarSpectralField g = f;
    for (auto& e : g.entries_) e.a /= -static_cast<double>(e.m.l2sq());
    return g;
}

ScalarSpectralField laplacian(const ScalarSpectralField& f) {
    ScalarSpectralField g = f;
    for (auto& e : g.entries_) e.a *= -static_cast<double>(e.m.l2sq());
    return g;
}

//------------------------------------------------------------------------------

SpectralField mode_field(const WaveVector& m_in, Polarization pol, Phase ph, double theta) {
    const PolarizationFrame fr =
        theta == 0.0 ? canonical_frame(m_in) : rotated_frame(m_in, theta);
    const Vec3 l = pol == Polarization::plus ? fr.l_plus : fr.l_minus;
    // cos: coefficient l/2; sin: -i l/2; scaled by sqrt(2) for unit L2 norm
    const c64 phase = ph == Phase::cos ? c64{1.0, 0.0} : c64{0.0, -1.0};
    const CVec3 a = CVec3(l) * (phase * (0.5 * std::sqrt(2.0)));
    return SpectralField::from_entries({{fr.m, a}});
}

std::vector<SpectralField> fiber_basis(const WaveVector& m, double theta) {
    return {mode_field(m, Polarization::plus, Phase::cos, theta),
            mode_field(m, Polarization::plus, Phase::sin, theta),
            mode_field(m, Polarization::minus, Phase::cos, theta),
            mode_field(m, Polarization::minus, Phase::sin, theta)};
}

std::vector<SpectralField> generator_fields(int radius, double theta) {
    std::vector<SpectralField> out;
    for (const WaveVector& m : canonical_l1_ball(radius))
        for (auto& f : fiber_basis(m, theta)) out.push_back(std::move(f));
    return out;
}

} // namespace eulerctl
