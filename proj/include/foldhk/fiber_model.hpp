#pragma once

// The folded model on the disc bundle in the cotangent of a hyperbolic
// surface, reduced to one fiber over a base point.  In the fiber chart
// w = r e^{i phi} the connection form is eta = dphi (the convention
// d eta = -omega_Sigma is a stored sign) and
//
//   omega_1 = A(r) p^* omega_Sigma + B(r) dr ^ eta,
//   A = sqrt(1-r^2), B = r / sqrt(1-r^2).
//
// A frequency-m deformation carries the fiber dependence e^{-i m phi} of a
// holomorphic m-differential; its potential obeys
//   dbar g~ = phi_m(r) g e^{-i m phi} (dr/r - i eta),
//   phi_m(r) = Phi r^m / sqrt(1-r^2),
// and the generating vertical field is xi = 2 i Phi g wbar^{m-1} d/dw.
// The identity dbar g~ = -i_xi omega_1 is exact and is checked pointwise.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "foldhk/quadrature.hpp"

namespace foldhk {

using std::complex;

struct FiberChart {
    QuadratureRule radial;       // Gauss rule for the (1-r^2)^{-1/2} weight
    std::vector<double> phi;     // equispaced angles
    double dphi = 0.0;
    int deta_sign = -1;          // d eta = -omega_Sigma (bookkeeping constant)

    FiberChart(std::size_t n_radial, std::size_t n_angular)
        : radial(radial_fold_rule(n_radial)), phi(n_angular), dphi(2.0 * std::numbers::pi / static_cast<double>(n_angular)) {
        for (std::size_t k = 0; k < n_angular; ++k) phi[k] = dphi * static_cast<double>(k);
    }
};

struct Deformation {
    int m = 2;                   // fiber frequency of the differential
    double phi_norm = 1.0;       // the constant Phi
    complex<double> amplitude{1.0, 0.0}; // chart value of the m-differential

    void validate() const {
        if (m < 0) throw std::invalid_argument("Deformation: frequency m must be >= 0");
        if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
            throw std::invalid_argument("Deformation: amplitude must be finite");
    }
    bool structure_preserving() const { return m <= 1; } // m = 0, 1 act trivially on the Hitchin data
};

// Phi normalization induced by the harmonic extension with unit boundary
// value: Phi_m = 1 / B(m, 1/2).
inline double harmonic_phi_norm(int m) {
    if (m < 1) throw std::invalid_argument("harmonic_phi_norm: m >= 1");
    return 1.0 / std::beta(static_cast<double>(m), 0.5);
}

// ---------------------------------------------------------------------------
// Pointwise model data.

inline std::pair<double, double> omega1_coefficients(double r) {
    if (!(r > 0.0)) throw std::domain_error("omega1_coefficients: r must be positive");
    if (!(r < 1.0)) throw std::domain_error("omega1_coefficients: r = 1 is the fold");
    const double s = std::sqrt(1.0 - r * r);
    return {s, r / s};
}

inline double phi_profile(const Deformation& d, double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("phi_profile: r outside (0,1)");
    return d.phi_norm * std::pow(r, d.m) / std::sqrt(1.0 - r * r);
}

// Coefficient of d/dw: 2 i Phi g r^m / wbar, evaluated through the regular
// rewriting r^m / wbar = wbar^{m-1} (the frequency-m fiber dependence of g
// is absorbed here).  Only m = 0 is singular at r = 0.
inline complex<double> xi_field(const Deformation& d, double r, double phi) {
    if (r < 0.0 || r >= 1.0) throw std::domain_error("xi_field: r outside [0,1)");
    if (d.m == 0 && r == 0.0) throw std::domain_error("xi_field: m = 0 coefficient is singular at r = 0");
    const complex<double> wbar = std::polar(r, -phi);
    const complex<double> pw = (d.m == 0) ? 1.0 / wbar : std::pow(wbar, d.m - 1);
    return complex<double>(0.0, 2.0) * d.phi_norm * d.amplitude * pw;
}

// Components of dbar g~ in the (dr/r, eta) co-basis.
inline std::pair<complex<double>, complex<double>> dbar_potential(const Deformation& d, double r, double phi) {
    const complex<double> c = phi_profile(d, r) * d.amplitude * std::polar(1.0, -static_cast<double>(d.m) * phi);
    return {c, complex<double>(0.0, -1.0) * c};
}

// Components of i_xi omega_1 in the (dr/r, eta) co-basis; only the
// B dr ^ eta part of omega_1 sees the vertical field.
inline std::pair<complex<double>, complex<double>> contraction_xi_omega1(const Deformation& d, double r,
                                                                         double phi) {
    const auto [A, B] = omega1_coefficients(r);
    (void)A;
    const complex<double> zeta = xi_field(d, r, phi);
    const complex<double> ph = std::polar(1.0, -phi);
    // i_xi (B dr ^ eta) = B (i / 2r) zeta dwbar, dwbar = e^{-i phi}(r (dr/r) - i r eta)
    const complex<double> common = complex<double>(0.0, 0.5) * B * zeta * ph;
    return {common, complex<double>(0.0, -1.0) * common};
}

// Max over the fiber grid of |dbar g~ + i_xi omega_1| in both co-basis
// components; the identity is exact, so this is a roundoff-level check.
inline double deformation_identity_residual(const Deformation& d, const FiberChart& chart) {
    d.validate();
    double res = 0.0;
    for (double r : chart.radial.nodes) {
        for (double phi : chart.phi) {
            const auto [a1, a2] = dbar_potential(d, r, phi);
            const auto [b1, b2] = contraction_xi_omega1(d, r, phi);
            res = std::max({res, std::abs(a1 + b1), std::abs(a2 + b2)});
        }
    }
    return res;
}

// Sup over the grid of the fiber coefficient of L_xi omega^c: the
// deformation preserves the holomorphic symplectic form only for m <= 1.
inline double symplectic_derivative_sup(const Deformation& d, const FiberChart& chart) {
    if (d.m <= 1) return 0.0;
    double rmax = 0.0;
    for (double r : chart.radial.nodes) rmax = std::max(rmax, std::pow(r, d.m - 2));
    return 2.0 * d.phi_norm * std::abs(d.amplitude) * static_cast<double>(d.m - 1) * rmax;
}

// ---------------------------------------------------------------------------
// Fiber 2-forms and invariant polynomials.

// Coefficient c(r, phi) of dr ^ eta for the fiber part of a 2-form.
using FiberForm2 = std::function<complex<double>(double, double)>;

inline FiberForm2 standard_omega1_fiber() {
    return [](double r, double) -> complex<double> { return omega1_coefficients(r).second; };
}

// Fiber part of d(eta_1) for eta_1 = dbar g~ of the deformation:
// -i g Phi r^{m+1} (1-r^2)^{-3/2} e^{-i m phi} dr ^ eta.
inline FiberForm2 deformation_deta1_fiber(const Deformation& d) {
    return [d](double r, double phi) -> complex<double> {
        const double radial = d.phi_norm * std::pow(r, d.m + 1) / std::pow(1.0 - r * r, 1.5);
        return complex<double>(0.0, -1.0) * d.amplitude * radial * std::polar(1.0, -static_cast<double>(d.m) * phi);
    };
}

// p_n = int over the fiber disc of w^n c(r,phi) dr ^ eta, full-disc version:
// angular trapezoid (exact on trigonometric polynomials) times the singular
// radial rule; the integrand is de-weighted by sqrt(1-r^2).
inline complex<double> invariant_polynomial(const FiberForm2& form, int n, const FiberChart& chart) {
    if (n <= 0) throw std::invalid_argument("invariant_polynomial: n must be >= 1");
    complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < chart.radial.nodes.size(); ++j) {
        const double r = chart.radial.nodes[j];
        const double deweight = std::sqrt(1.0 - r * r);
        complex<double> ang{0.0, 0.0};
        for (double phi : chart.phi) ang += std::polar(1.0, static_cast<double>(n) * phi) * form(r, phi);
        acc += chart.radial.weights[j] * std::pow(r, n) * deweight * ang * chart.dphi;
    }
    return acc;
}

// Sub-disc version on r <= rho < 1 (plain adaptive quadrature; everything
// is smooth away from the fold circle).
inline complex<double> invariant_polynomial_subdisc(const FiberForm2& form, int n, double rho,
                                                    const FiberChart& chart, double tol = 1e-12) {
    if (n <= 0) throw std::invalid_argument("invariant_polynomial_subdisc: n must be >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("invariant_polynomial_subdisc: rho in (0,1)");
    const auto angular = [&](double r, bool imag_part) {
        complex<double> ang{0.0, 0.0};
        for (double phi : chart.phi) ang += std::polar(1.0, static_cast<double>(n) * phi) * form(r, phi);
        ang *= chart.dphi * std::pow(r, n);
        return imag_part ? ang.imag() : ang.real();
    };
    const double re = adaptive_simpson([&](double r) { return angular(r, false); }, 1e-12, rho, tol);
    const double im = adaptive_simpson([&](double r) { return angular(r, true); }, 1e-12, rho, tol);
    return {re, im};
}

// ---------------------------------------------------------------------------
// First variation of the invariant polynomials.
//
// For the deformation (eta^c = 0, eta_1 = dbar g~) the domain-corrected
// variation of p_n reduces to -int w^n (dw/w) ^ eta_1 over the fiber; the
// fiber integral is normalized by 1/(2 pi i) so that the harmonic Phi
// normalization gives pdot_m = amplitude (kappa = 1).
struct VariationReport {
    std::vector<complex<double>> pdot; // n = 1 .. nmax
};

namespace detail {

// Integrand of -w^n (dw/w) ^ eta_1 against dr dphi, divided by the fold
// weight (so the singular radial rule applies): the wedge collapses to
// -r^{n-1} e^{i n phi} (c_eta - i c_drr) dr dphi.
template <typename Eta1>
complex<double> variation_entry(const Eta1& eta1, int n, const FiberChart& chart, double rho) {
    const auto radial_factor = [&](double r) {
        complex<double> ang{0.0, 0.0};
        for (double phi : chart.phi) {
            const auto [c_drr, c_eta] = eta1(r, phi);
            ang += std::polar(1.0, static_cast<double>(n) * phi) *
                   (c_eta - complex<double>(0.0, 1.0) * c_drr);
        }
        return -std::pow(r, n - 1) * ang * chart.dphi;
    };
    complex<double> acc{0.0, 0.0};
    if (rho >= 1.0) {
        for (std::size_t j = 0; j < chart.radial.nodes.size(); ++j) {
            const double r = chart.radial.nodes[j];
            acc += chart.radial.weights[j] * std::sqrt(1.0 - r * r) * radial_factor(r);
        }
    } else {
        const double re = adaptive_simpson([&](double r) { return radial_factor(r).real(); }, 1e-12, rho);
        const double im = adaptive_simpson([&](double r) { return radial_factor(r).imag(); }, 1e-12, rho);
        acc = {re, im};
    }
    return acc / complex<double>(0.0, 2.0 * std::numbers::pi);
}

} // namespace detail

inline VariationReport variation_of_invariants(const std::vector<Deformation>& defs, int nmax,
                                               const FiberChart& chart, double rho = 1.0) {
    for (const auto& d : defs) {
        d.validate();
        if (d.m > nmax) throw std::invalid_argument("variation_of_invariants: deformation frequency above nmax");
    }
    const auto eta1 = [&](double r, double phi) {
        complex<double> drr{0.0, 0.0}, eta{0.0, 0.0};
        for (const auto& d : defs) {
            const auto [a, b] = dbar_potential(d, r, phi);
            drr += a;
            eta += b;
        }
        return std::pair{drr, eta};
    };
    VariationReport rep;
    rep.pdot.resize(static_cast<std::size_t>(nmax));
    for (int n = 1; n <= nmax; ++n)
        rep.pdot[static_cast<std::size_t>(n - 1)] = detail::variation_entry(eta1, n, chart, rho);
    return rep;
}

// Boundary circle integral of w^n eta_1 at radius rho (only the eta
// component survives the restriction).
inline complex<double> boundary_circle_integral(const std::vector<Deformation>& defs, int n, double rho,
                                                const FiberChart& chart) {
    complex<double> acc{0.0, 0.0};
    for (double phi : chart.phi) {
        complex<double> c_eta{0.0, 0.0};
        for (const auto& d : defs) c_eta += dbar_potential(d, rho, phi).second;
        acc += std::polar(1.0, static_cast<double>(n) * phi) * c_eta;
    }
    return acc * std::pow(rho, n) * chart.dphi;
}

} // namespace foldhk
