#pragma once

// Small dense least-squares and convergence-rate helpers shared by the
// verification routines.

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace foldhk {

// Solve A x = b for small dense systems, partial pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) throw std::runtime_error("solve_dense: singular system");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Least-squares fit y ~ sum_j coeff_j basis_j(x); returns coefficients and
// the max-norm fit residual.
inline std::pair<std::vector<double>, double>
fit_linear_ls(const std::vector<double>& xs, const std::vector<double>& ys,
              const std::vector<std::function<double(double)>>& basis) {
    const std::size_t m = xs.size();
    const std::size_t n = basis.size();
    if (m < n) throw std::invalid_argument("fit_linear_ls: underdetermined");
    std::vector<std::vector<double>> ata(n, std::vector<double>(n, 0.0));
    std::vector<double> atb(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = basis[j](xs[r]);
        for (std::size_t i = 0; i < n; ++i) {
            atb[i] += row[i] * ys[r];
            for (std::size_t j = 0; j < n; ++j) ata[i][j] += row[i] * row[j];
        }
    }
    std::vector<double> coeff = solve_dense(std::move(ata), std::move(atb));
    double res = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        double fit = 0.0;
        for (std::size_t j = 0; j < n; ++j) fit += coeff[j] * basis[j](xs[r]);
        res = std::max(res, std::abs(fit - ys[r]));
    }
    return {std::move(coeff), res};
}

// Cubic fit y ~ a0 + a1 x + a2 x^2 + a3 x^3, columns scaled by the window
// size for conditioning.
inline std::pair<std::array<double, 4>, double>
fit_cubic(const std::vector<double>& xs, const std::vector<double>& ys) {
    double xmax = 0.0;
    for (double x : xs) xmax = std::max(xmax, std::abs(x));
    if (xmax == 0.0) throw std::invalid_argument("fit_cubic: degenerate window");
    std::vector<std::function<double(double)>> basis;
    for (int p = 0; p <= 3; ++p)
        basis.emplace_back([p, xmax](double x) { return std::pow(x / xmax, p); });
    auto [c, res] = fit_linear_ls(xs, ys, basis);
    std::array<double, 4> out{};
    for (int p = 0; p <= 3; ++p) out[static_cast<std::size_t>(p)] = c[static_cast<std::size_t>(p)] / std::pow(xmax, p);
    return {out, res};
}

// Cubic coefficients with an x^4 nuisance term absorbing the next Taylor
// order; without it the window tail biases the x^3 coefficient at the
// percent level.
inline std::pair<std::array<double, 4>, double>
fit_cubic_guarded(const std::vector<double>& xs, const std::vector<double>& ys) {
    double xmax = 0.0;
    for (double x : xs) xmax = std::max(xmax, std::abs(x));
    if (xmax == 0.0) throw std::invalid_argument("fit_cubic_guarded: degenerate window");
    std::vector<std::function<double(double)>> basis;
    for (int p = 0; p <= 4; ++p)
        basis.emplace_back([p, xmax](double x) { return std::pow(x / xmax, p); });
    auto [c, res] = fit_linear_ls(xs, ys, basis);
    std::array<double, 4> out{};
    for (int p = 0; p <= 3; ++p) out[static_cast<std::size_t>(p)] = c[static_cast<std::size_t>(p)] / std::pow(xmax, p);
    return {out, res};
}

// Odd fit y ~ c1 x + c3 x^3.
inline std::pair<std::array<double, 2>, double>
fit_odd_cubic(const std::vector<double>& xs, const std::vector<double>& ys) {
    double xmax = 0.0;
    for (double x : xs) xmax = std::max(xmax, std::abs(x));
    if (xmax == 0.0) throw std::invalid_argument("fit_odd_cubic: degenerate window");
    std::vector<std::function<double(double)>> basis = {
        [xmax](double x) { return x / xmax; },
        [xmax](double x) { return std::pow(x / xmax, 3); },
    };
    auto [c, res] = fit_linear_ls(xs, ys, basis);
    return {std::array<double, 2>{c[0] / xmax, c[1] / (xmax * xmax * xmax)}, res};
}

// Slope of log|y| against log x; points with |y| below the floor are
// dropped (they are roundoff, not signal).
inline double fit_power_exponent(const std::vector<double>& xs, const std::vector<double>& ys,
                                 double floor = 1e-14) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] > 0.0 && std::abs(ys[i]) > floor) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(std::abs(ys[i])));
        }
    }
    if (lx.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i]; sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double observed_order(double err_coarse, double err_fine) {
    if (err_fine <= 0.0) return 0.0;
    return std::log2(err_coarse / err_fine);
}

} // namespace foldhk
