#pragma once

// One-dimensional quadrature: Gauss-Legendre, adaptive Simpson, and a
// Gauss rule for the fold weight (1-r^2)^{-1/2} on (0,1) built by the
// discretized Stieltjes procedure + Golub-Welsch.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace foldhk {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <typename F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

// Gauss-Legendre on [a, b] (Newton on the Legendre recurrence).
inline QuadratureRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * static_cast<double>(j) + 1.0) * z * p1 - static_cast<double>(j) * p2) /
                     (static_cast<double>(j) + 1.0);
            }
            pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.nodes[i] = xm - xl * z;
        rule.nodes[n - 1 - i] = xm + xl * z;
        rule.weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

namespace detail {

// Symmetric tridiagonal eigenvalues by implicit QL, tracking the first
// row of the eigenvector matrix (all that Golub-Welsch needs).
inline void tql_first_row(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const std::size_t n = d.size();
    e.push_back(0.0);
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("tql_first_row: too many iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double bb = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * bb;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - bb;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (r == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    // sort ascending, carrying the first-row entries
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t k = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (d[j] < d[k]) k = j;
        if (k != i) {
            std::swap(d[i], d[k]);
            std::swap(z[i], z[k]);
        }
    }
}

} // namespace detail

// Gauss rule for int_0^1 F(r) (1-r^2)^{-1/2} dr, exact for polynomial F of
// degree <= 2n-1.  Recurrence coefficients come from the discretized
// Stieltjes procedure in the t = asin(r) variable, where all inner-product
// integrands are smooth.
inline QuadratureRule radial_fold_rule(std::size_t n) {
    if (n == 0) throw std::invalid_argument("radial_fold_rule: empty rule");
    // dense discretization of int_0^{pi/2} p(sin t) dt
    const std::size_t panels = 8;
    const std::size_t per_panel = std::max<std::size_t>(24, n);
    std::vector<double> tn, tw;
    for (std::size_t k = 0; k < panels; ++k) {
        const double a = 0.5 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(panels);
        const double b = 0.5 * std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(panels);
        const QuadratureRule gl = gauss_legendre(per_panel, a, b);
        tn.insert(tn.end(), gl.nodes.begin(), gl.nodes.end());
        tw.insert(tw.end(), gl.weights.begin(), gl.weights.end());
    }
    const std::size_t npts = tn.size();
    std::vector<double> rpts(npts);
    for (std::size_t i = 0; i < npts; ++i) rpts[i] = std::sin(tn[i]);

    // Stieltjes: three-term recurrence p_{k+1} = (r - a_k) p_k - b_k p_{k-1}
    std::vector<double> alpha(n), beta(n);
    std::vector<double> pk(npts, 1.0), pkm1(npts, 0.0);
    double norm_prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0, ra = 0.0;
        for (std::size_t i = 0; i < npts; ++i) {
            const double w = tw[i] * pk[i] * pk[i];
            norm += w;
            ra += w * rpts[i];
        }
        alpha[k] = ra / norm;
        beta[k] = (k == 0) ? norm : norm / norm_prev;
        norm_prev = norm;
        if (k + 1 < n) {
            std::vector<double> pnext(npts);
            for (std::size_t i = 0; i < npts; ++i)
                pnext[i] = (rpts[i] - alpha[k]) * pk[i] - (k == 0 ? 0.0 : beta[k]) * pkm1[i];
            pkm1.swap(pk);
            pk.swap(pnext);
        }
    }

    // Golub-Welsch on the Jacobi matrix
    std::vector<double> d = alpha;
    std::vector<double> e(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) e[k] = std::sqrt(beta[k + 1]);
    std::vector<double> z(n, 0.0);
    z[0] = 1.0;
    detail::tql_first_row(d, e, z);

    QuadratureRule rule;
    rule.nodes = d;
    rule.weights.resize(n);
    for (std::size_t j = 0; j < n; ++j) rule.weights[j] = beta[0] * z[j] * z[j];
    return rule;
}

// Closed-form moments of the fold weight: int_0^1 r^k (1-r^2)^{-1/2} dr.
inline double radial_fold_moment(int k) {
    if (k < 0) throw std::invalid_argument("radial_fold_moment: k >= 0");
    double v = (k % 2 == 0) ? 0.5 * std::numbers::pi : 1.0;
    for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) v *= static_cast<double>(j - 1) / static_cast<double>(j);
    return v;
}

// Adaptive Simpson (the independent substitution-quadrature oracle).
namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0) return left + right + delta / 15.0;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13, int max_depth = 48) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(a, fa, b, fb, fm);
    return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

} // namespace foldhk
