#pragma once

// Periodic scalar profiles on s in [0,1), stored as a band-limited Fourier
// spectrum.  These carry the s-dependence of all frame coefficients: the
// vertical direction acts as d/ds and the two remaining frame directions
// annihilate every profile in this class.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace foldhk {

using cdouble = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT.  sign = -1 forward, +1 inverse (unscaled).
inline void fft_pow2(std::vector<cdouble>& a, int sign) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cdouble wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cdouble u = a[i + k];
                const cdouble v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

} // namespace detail

// Real periodic profile of s, band-limited to |k| <= n/2 - 1.
class SField {
public:
    SField() = default;

    explicit SField(std::size_t n_modes) : spec_(check_size(n_modes), cdouble(0.0, 0.0)) {}

    static SField constant(double c, std::size_t n_modes) {
        SField f(n_modes);
        f.spec_[0] = c;
        return f;
    }

    static SField from_function(const std::function<double(double)>& fn, std::size_t n_modes) {
        const std::size_t n = check_size(n_modes);
        std::vector<double> vals(n);
        for (std::size_t j = 0; j < n; ++j) vals[j] = fn(static_cast<double>(j) / static_cast<double>(n));
        return from_values(vals);
    }

    // Collocation values (uniform grid of vals.size() points) -> spectrum.
    static SField from_values(const std::vector<double>& vals) {
        const std::size_t n = check_size(vals.size());
        std::vector<cdouble> buf(vals.begin(), vals.end());
        detail::fft_pow2(buf, -1);
        SField f;
        f.spec_.resize(n);
        for (std::size_t k = 0; k < n; ++k) f.spec_[k] = buf[k] / static_cast<double>(n);
        f.spec_[n / 2] = 0.0; // drop the unpaired Nyquist mode
        return f;
    }

    // Single harmonic cos(2 pi k s + phase) scaled by amp.
    static SField harmonic(std::size_t k, double amp, double phase, std::size_t n_modes) {
        SField f(n_modes);
        if (k == 0) {
            f.spec_[0] = amp * std::cos(phase);
            return f;
        }
        if (k >= n_modes / 2) throw std::invalid_argument("SField::harmonic: frequency outside band");
        const cdouble half = 0.5 * amp * std::exp(cdouble(0.0, phase));
        f.spec_[k] = half;
        f.spec_[n_modes - k] = std::conj(half);
        return f;
    }

    std::size_t n_modes() const { return spec_.size(); }
    bool empty() const { return spec_.empty(); }

    const std::vector<cdouble>& spectrum() const { return spec_; }
    cdouble coeff(std::size_t k) const { return spec_.at(k); }

    // d/ds, exact on the retained band.
    SField derivative() const {
        const std::size_t n = spec_.size();
        SField g(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double freq = (k < n / 2) ? static_cast<double>(k)
                                            : (k == n / 2 ? 0.0 : static_cast<double>(k) - static_cast<double>(n));
            g.spec_[k] = spec_[k] * cdouble(0.0, 2.0 * std::numbers::pi * freq);
        }
        return g;
    }

    // Values on an m-point collocation grid (m a power of two, m >= n).
    std::vector<double> values(std::size_t m = 0) const {
        const std::size_t n = spec_.size();
        if (m == 0) m = n;
        if (m < n || !detail::is_pow2(m)) throw std::invalid_argument("SField::values: bad grid size");
        std::vector<cdouble> buf(m, cdouble(0.0, 0.0));
        for (std::size_t k = 0; k < n; ++k) {
            if (k < n / 2) buf[k] = spec_[k];
            else if (k > n / 2) buf[m - (n - k)] = spec_[k];
        }
        detail::fft_pow2(buf, +1);
        std::vector<double> out(m);
        for (std::size_t j = 0; j < m; ++j) out[j] = buf[j].real();
        return out;
    }

    double sup_abs() const {
        double m = 0.0;
        for (double v : values(2 * spec_.size())) m = std::max(m, std::abs(v));
        return m;
    }

    bool compatible(const SField& o) const { return spec_.size() == o.spec_.size(); }

    SField& operator+=(const SField& o) {
        require_same(o);
        for (std::size_t k = 0; k < spec_.size(); ++k) spec_[k] += o.spec_[k];
        return *this;
    }
    SField& operator-=(const SField& o) {
        require_same(o);
        for (std::size_t k = 0; k < spec_.size(); ++k) spec_[k] -= o.spec_[k];
        return *this;
    }
    SField& operator*=(double c) {
        for (auto& z : spec_) z *= c;
        return *this;
    }

    friend SField operator+(SField a, const SField& b) { return a += b; }
    friend SField operator-(SField a, const SField& b) { return a -= b; }
    friend SField operator*(double c, SField a) { return a *= c; }
    friend SField operator*(SField a, double c) { return a *= c; }
    friend SField operator-(SField a) { return a *= -1.0; }

    // De-aliased product: collocation on a 2n grid with zero padding, then
    // truncation back to the retained band.  Exact for band-limited factors.
    friend SField operator*(const SField& a, const SField& b) {
        a.require_same(b);
        const std::size_t n = a.spec_.size();
        const std::vector<double> va = a.values(2 * n);
        const std::vector<double> vb = b.values(2 * n);
        std::vector<double> vc(2 * n);
        for (std::size_t j = 0; j < 2 * n; ++j) vc[j] = va[j] * vb[j];
        return truncate(from_values(vc), n);
    }

    // Pointwise unary map on the de-aliased grid (for roots, reciprocals, ...).
    SField map(const std::function<double(double)>& op) const {
        const std::size_t n = spec_.size();
        std::vector<double> v = values(2 * n);
        for (double& x : v) x = op(x);
        return truncate(from_values(v), n);
    }

    // Highest frequency carrying more than rel_tol of the sup scale.
    std::size_t band_limit(double rel_tol = 1e-13) const {
        const std::size_t n = spec_.size();
        double scale = 0.0;
        for (const auto& z : spec_) scale = std::max(scale, std::abs(z));
        std::size_t band = 0;
        for (std::size_t k = 1; k < n / 2; ++k) {
            if (std::abs(spec_[k]) > rel_tol * scale || std::abs(spec_[n - k]) > rel_tol * scale) band = k;
        }
        return band;
    }

    // Zero all modes with |frequency| > k_max.
    SField filtered(std::size_t k_max) const {
        const std::size_t n = spec_.size();
        SField g = *this;
        for (std::size_t k = k_max + 1; k < n / 2; ++k) {
            g.spec_[k] = 0.0;
            g.spec_[n - k] = 0.0;
        }
        g.spec_[n / 2] = 0.0;
        return g;
    }

    static SField truncate(const SField& f, std::size_t n) {
        if (f.n_modes() == n) return f;
        if (f.n_modes() < n || !detail::is_pow2(n)) throw std::invalid_argument("SField::truncate: bad target");
        SField g(n);
        const std::size_t m = f.n_modes();
        for (std::size_t k = 0; k + 1 <= n / 2; ++k) g.spec_[k] = f.spec_[k];
        for (std::size_t k = n / 2 + 1; k < n; ++k) g.spec_[k] = f.spec_[m - (n - k)];
        g.spec_[n / 2] = 0.0;
        return g;
    }

private:
    static std::size_t check_size(std::size_t n) {
        if (n < 4 || !detail::is_pow2(n)) throw std::invalid_argument("SField: mode count must be a power of two >= 4");
        return n;
    }
    void require_same(const SField& o) const {
        if (!compatible(o)) throw std::invalid_argument("SField: mismatched mode counts");
    }

    std::vector<cdouble> spec_;
};

inline double sup_abs_diff(const SField& a, const SField& b) { return (a - b).sup_abs(); }

} // namespace foldhk
