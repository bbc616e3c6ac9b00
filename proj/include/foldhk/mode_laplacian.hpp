#pragma once

// Mode blocks of the folded Laplacian on [0,1]: L = -d^2/dx^2 + lambda^2
// + n^2 x^2, Dirichlet at x = 1, Dirichlet or Neumann at the fold x = 0.
// Second-order centered differences, ghost-point reflection for Neumann,
// direct tridiagonal solve.  The "folded" variant solves L f = x g, the
// mode form of the full folded equation, and for the (0,0) Neumann block
// enforces the mean-zero normalization in the x dx measure through a
// rank-one correction (g is shifted by the compatibility constant).

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "foldhk/fit.hpp"

namespace foldhk {

enum class BoundaryCondition { Dirichlet, Neumann };

struct ModeProblem {
    double lambda = 0.0;
    int n = 0;
    BoundaryCondition bc0 = BoundaryCondition::Dirichlet;
    std::vector<double> rhs; // values of g at the M+1 grid nodes
    bool folded = false;     // solve L f = x g instead of L f = g

    std::size_t grid_points() const { return rhs.size(); } // M+1
    std::size_t intervals() const { return rhs.size() - 1; }
    double h() const { return 1.0 / static_cast<double>(intervals()); }
    double x(std::size_t i) const { return static_cast<double>(i) * h(); }

    void validate() const {
        if (rhs.size() < 17) throw std::invalid_argument("ModeProblem: need M >= 16");
        if (lambda < 0.0) throw std::invalid_argument("ModeProblem: lambda must be >= 0");
        const bool zero_mode = (lambda == 0.0 && n == 0);
        if (!zero_mode && std::abs(n) > lambda * lambda)
            throw std::invalid_argument("ModeProblem: the frame relation imposes |n| <= lambda^2");
    }
};

struct ModeSolution {
    std::vector<double> f;            // values at the M+1 nodes
    std::array<double, 4> expansion{}; // fitted f0, f1, f2, f3 near x = 0
    bool expansion_defined = false;   // false when the near-fold window is too short
    double expansion_residual = 0.0;
    double energy_lhs = 0.0;
    double energy_rhs = 0.0;
    bool energy_pass = false;
    bool energy_defined = false;      // false for the (0,0) block
    double mean_shift = 0.0;          // compatibility constant of the (0,0) Neumann block
};

namespace detail {

// Thomas algorithm for a tridiagonal system; diagonals are consumed.
inline std::vector<double> solve_tridiag(std::vector<double> lower, std::vector<double> diag,
                                         std::vector<double> upper, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    return x;
}

struct ModeSystem {
    std::vector<double> lower, diag, upper;
    std::size_t offset; // grid index of the first unknown (0 Neumann, 1 Dirichlet)
    std::size_t size;
};

inline ModeSystem assemble(const ModeProblem& p) {
    const std::size_t m = p.intervals();
    const double h = p.h();
    const double ih2 = 1.0 / (h * h);
    ModeSystem s;
    s.offset = (p.bc0 == BoundaryCondition::Dirichlet) ? 1 : 0;
    s.size = m - s.offset;
    s.lower.assign(s.size, -ih2);
    s.upper.assign(s.size, -ih2);
    s.diag.resize(s.size);
    for (std::size_t k = 0; k < s.size; ++k) {
        const double x = p.x(k + s.offset);
        s.diag[k] = 2.0 * ih2 + p.lambda * p.lambda + static_cast<double>(p.n) * static_cast<double>(p.n) * x * x;
    }
    if (p.bc0 == BoundaryCondition::Neumann) {
        // ghost reflection at x = 0, row scaled by 1/2 to keep symmetry
        s.diag[0] = ih2 + 0.5 * p.lambda * p.lambda;
        s.upper[0] = -ih2;
    }
    return s;
}

inline std::vector<double> system_rhs(const ModeProblem& p) {
    const std::size_t m = p.intervals();
    std::vector<double> b;
    const std::size_t off = (p.bc0 == BoundaryCondition::Dirichlet) ? 1 : 0;
    b.reserve(m - off);
    for (std::size_t i = off; i < m; ++i) {
        double v = p.rhs[i];
        if (p.folded) v *= p.x(i);
        b.push_back(v);
    }
    if (p.bc0 == BoundaryCondition::Neumann) b[0] *= 0.5;
    return b;
}

inline std::vector<double> embed(const ModeProblem& p, const std::vector<double>& unknowns) {
    std::vector<double> f(p.grid_points(), 0.0);
    const std::size_t off = (p.bc0 == BoundaryCondition::Dirichlet) ? 1 : 0;
    for (std::size_t k = 0; k < unknowns.size(); ++k) f[k + off] = unknowns[k];
    return f;
}

} // namespace detail

// Discrete operator applied to full-grid values (interior rows only);
// out[i] for i in 1..M-1, plus the Neumann row at i = 0 when applicable.
inline std::vector<double> apply_mode_operator(const ModeProblem& p, const std::vector<double>& f) {
    const std::size_t m = p.intervals();
    const double ih2 = 1.0 / (p.h() * p.h());
    std::vector<double> out(p.grid_points(), 0.0);
    for (std::size_t i = 1; i < m; ++i) {
        const double x = p.x(i);
        out[i] = -(f[i + 1] - 2.0 * f[i] + f[i - 1]) * ih2 +
                 (p.lambda * p.lambda + static_cast<double>(p.n) * static_cast<double>(p.n) * x * x) * f[i];
    }
    if (p.bc0 == BoundaryCondition::Neumann)
        out[0] = -(2.0 * f[1] - 2.0 * f[0]) * ih2 + p.lambda * p.lambda * f[0];
    return out;
}

// Trapezoid rule on the grid.
inline double trapezoid(const std::vector<double>& v, double h) {
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * h;
}

// Energy inequality sides for a solve L f = g_eff with homogeneous bc:
// lhs = int |f'|^2 + (1/2)(lambda^2 + n^2 x^2)|f|^2,
// rhs = (1/2) int |g|^2 / (lambda^2 + n^2 x^2).
inline std::tuple<double, double, bool> energy_check(const ModeProblem& p, const std::vector<double>& f,
                                                     const std::vector<double>& g_eff) {
    if (p.lambda == 0.0 && p.n == 0)
        throw std::invalid_argument("energy_check: weight is singular for the (0,0) block");
    const std::size_t m = p.intervals();
    const double h = p.h();
    std::vector<double> integrand_l(m + 1), integrand_r(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        double df;
        if (i == 0) df = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        else if (i == m) df = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * h);
        else df = (f[i + 1] - f[i - 1]) / (2.0 * h);
        const double x = p.x(i);
        const double w = p.lambda * p.lambda + static_cast<double>(p.n) * static_cast<double>(p.n) * x * x;
        integrand_l[i] = df * df + 0.5 * w * f[i] * f[i];
        integrand_r[i] = 0.5 * g_eff[i] * g_eff[i] / w;
    }
    const double lhs = trapezoid(integrand_l, h);
    const double rhs = trapezoid(integrand_r, h);
    const double slack = 1.0 + 5.0 / static_cast<double>(m);
    return {lhs, rhs, lhs <= rhs * slack};
}

// Least-squares cubic fit of f on the first ceil(M/8) grid points.
inline std::pair<std::array<double, 4>, double> expansion_fit(const ModeProblem& p,
                                                              const std::vector<double>& f) {
    const std::size_t m = p.intervals();
    const std::size_t k = (m + 7) / 8;
    if (k < 5) throw std::invalid_argument("expansion_fit: too few near-fold points for a cubic fit");
    std::vector<double> xs(k + 1), ys(k + 1);
    for (std::size_t i = 0; i <= k; ++i) {
        xs[i] = p.x(i);
        ys[i] = f[i];
    }
    return fit_cubic_guarded(xs, ys);
}

inline ModeSolution solve_mode(const ModeProblem& p) {
    p.validate();
    auto sys = detail::assemble(p);
    std::vector<double> b = detail::system_rhs(p);

    ModeSolution sol;
    const bool zero_neumann_folded =
        p.folded && p.bc0 == BoundaryCondition::Neumann && p.lambda == 0.0 && p.n == 0;
    if (!zero_neumann_folded) {
        sol.f = detail::embed(p, detail::solve_tridiag(sys.lower, sys.diag, sys.upper, std::move(b)));
    } else {
        // Rank-one correction: shift g by the constant that makes the
        // solution mean-zero against x dx (the fold-volume measure).
        std::vector<double> xv;
        for (std::size_t i = sys.offset; i < p.intervals(); ++i) xv.push_back(p.x(i));
        if (p.bc0 == BoundaryCondition::Neumann) xv[0] *= 0.5;
        auto u = detail::solve_tridiag(sys.lower, sys.diag, sys.upper, std::move(b));
        auto z = detail::solve_tridiag(sys.lower, sys.diag, sys.upper, std::move(xv));
        const auto fu = detail::embed(p, u);
        const auto fz = detail::embed(p, z);
        const double h = p.h();
        std::vector<double> wu(p.grid_points()), wz(p.grid_points());
        for (std::size_t i = 0; i < p.grid_points(); ++i) {
            wu[i] = fu[i] * p.x(i);
            wz[i] = fz[i] * p.x(i);
        }
        const double gamma = trapezoid(wu, h) / trapezoid(wz, h);
        sol.mean_shift = gamma;
        sol.f.resize(p.grid_points());
        for (std::size_t i = 0; i < p.grid_points(); ++i) sol.f[i] = fu[i] - gamma * fz[i];
    }

    if ((p.intervals() + 7) / 8 >= 5) {
        auto [coeff, res] = expansion_fit(p, sol.f);
        sol.expansion = coeff;
        sol.expansion_residual = res;
        sol.expansion_defined = true;
    }

    if (!(p.lambda == 0.0 && p.n == 0)) {
        std::vector<double> g_eff(p.grid_points());
        for (std::size_t i = 0; i < p.grid_points(); ++i)
            g_eff[i] = p.folded ? p.x(i) * p.rhs[i] : p.rhs[i];
        auto [lhs, rhs, pass] = energy_check(p, sol.f, g_eff);
        sol.energy_lhs = lhs;
        sol.energy_rhs = rhs;
        sol.energy_pass = pass;
        sol.energy_defined = true;
    }
    return sol;
}

// Residuals of the near-fold expansion laws for the folded equation
// L f = x g: f2 = (1/2) lambda^2 f0 and f3 = (lambda^2 f1 - g(0)) / 6.
struct ExpansionLawResiduals {
    double f2_law = 0.0; // |f2 - lambda^2 f0 / 2| / scale
    double f3_law = 0.0; // |f3 - (lambda^2 f1 - g0) / 6| / scale
};

inline ExpansionLawResiduals expansion_law_residuals(const ModeProblem& p, const ModeSolution& sol) {
    if (!p.folded) throw std::invalid_argument("expansion_law_residuals: laws hold for the folded equation");
    const double l2 = p.lambda * p.lambda;
    const double g0 = p.rhs[0] - sol.mean_shift;
    const auto& e = sol.expansion;
    ExpansionLawResiduals r;
    const double s2 = std::max({std::abs(e[2]), std::abs(0.5 * l2 * e[0]), 1e-12});
    const double s3 = std::max({std::abs(e[3]), std::abs((l2 * e[1] - g0) / 6.0), 1e-12});
    r.f2_law = std::abs(e[2] - 0.5 * l2 * e[0]) / s2;
    r.f3_law = std::abs(e[3] - (l2 * e[1] - g0) / 6.0) / s3;
    return r;
}

// Commuted identity L(x f) = x g - 2 f' evaluated with the discrete
// operator and centered differences; for a discrete solution of L f = g
// the two sides agree to roundoff, for analytic (f, g) pairs the residual
// is the second-order stencil error.
inline double commuted_identity_residual(const ModeProblem& p, const std::vector<double>& f,
                                         const std::vector<double>& g) {
    const std::size_t m = p.intervals();
    const double h = p.h();
    std::vector<double> xf(p.grid_points());
    for (std::size_t i = 0; i <= m; ++i) xf[i] = p.x(i) * f[i];
    ModeProblem q = p;
    q.bc0 = BoundaryCondition::Dirichlet; // x f vanishes at both ends
    const std::vector<double> lhs = apply_mode_operator(q, xf);
    double res = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
        const double df = (f[i + 1] - f[i - 1]) / (2.0 * h);
        res = std::max(res, std::abs(lhs[i] - (p.x(i) * g[i] - 2.0 * df)));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Dirichlet/Neumann assembly for a symmetric trace-free matrix of mode
// profiles: Dirichlet on the diagonal and the lower-right block, Neumann on
// the first row and column off-diagonal entries.

struct DnAssembly {
    std::array<std::array<ModeSolution, 3>, 3> w;
    std::array<std::array<BoundaryCondition, 3>, 3> bc;
};

inline BoundaryCondition dn_condition(int i, int j) {
    return ((i == 0) != (j == 0)) ? BoundaryCondition::Neumann : BoundaryCondition::Dirichlet;
}

inline DnAssembly dn_assemble(const std::array<std::array<std::vector<double>, 3>, 3>& v,
                              double lambda, int n, double tol = 1e-10) {
    const std::size_t pts = v[0][0].size();
    double scale = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (v[i][j].size() != pts) throw std::invalid_argument("dn_assemble: ragged profile matrix");
            for (double t : v[i][j]) scale = std::max(scale, std::abs(t));
        }
    for (std::size_t k = 0; k < pts; ++k) {
        const double tr = v[0][0][k] + v[1][1][k] + v[2][2][k];
        if (std::abs(tr) > tol * std::max(scale, 1.0))
            throw std::invalid_argument("dn_assemble: profile matrix must be trace-free");
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (std::abs(v[i][j][k] - v[j][i][k]) > tol * std::max(scale, 1.0))
                    throw std::invalid_argument("dn_assemble: profile matrix must be symmetric");
    }

    const double h = 1.0 / static_cast<double>(pts - 1);
    DnAssembly out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const BoundaryCondition bc = dn_condition(i, j);
            out.bc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = bc;
            if (bc == BoundaryCondition::Neumann && lambda == 0.0 && n == 0) {
                // mode analogue of the vanishing-pairing compatibility
                std::vector<double> wv(pts);
                for (std::size_t k = 0; k < pts; ++k) wv[k] = v[i][j][k] * (static_cast<double>(k) * h);
                if (std::abs(trapezoid(wv, h)) > tol * std::max(scale, 1.0))
                    throw std::invalid_argument("dn_assemble: (0,0) Neumann entry violates the compatibility integral");
            }
            ModeProblem p;
            p.lambda = lambda;
            p.n = n;
            p.bc0 = bc;
            p.rhs = v[i][j];
            p.folded = true;
            out.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = solve_mode(p);
        }
    }
    return out;
}

} // namespace foldhk
