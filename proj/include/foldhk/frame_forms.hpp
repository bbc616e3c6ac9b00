#pragma once

// Exterior algebra in the invariant coframe (dx, t1, t2, t3) of the flat
// Heisenberg thickening.  Structure equations: d t1 = t2 ^ t3, d t2 = d t3 = 0.
// Coefficients are SField profiles of s, optionally tabulated on a uniform
// x-grid; x-derivatives use centered second-order stencils with third-order
// one-sided closures at the ends.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "foldhk/fourier_profile.hpp"

namespace foldhk {

// Coframe index convention: 0 = dx, 1 = t1 (contact form), 2 = t2, 3 = t3.
inline constexpr int kFrameDim = 4;

// Heisenberg bracket table and its dual structure equations.
struct FrameAlgebra {
    // c[i][j][k]: X_k-coefficient of [X_i, X_j] for i,j,k in {1,2,3} (0-based here).
    static constexpr double bracket(int i, int j, int k) {
        if (i == 1 && j == 2 && k == 0) return -1.0; // [X2,X3] = -X1
        if (i == 2 && j == 1 && k == 0) return 1.0;
        return 0.0;
    }
    // dt1 = t2 ^ t3 is the only nonzero coframe differential.
    static constexpr bool dtheta_nonzero(int i) { return i == 1; }
};

struct XGrid {
    double x0 = 0.0;
    double h = 0.0;
    std::size_t n = 0;

    double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
    bool operator==(const XGrid&) const = default;
};

namespace detail {

inline int mask_degree(unsigned m) { return std::popcount(m); }

// Masks of given degree in ascending numeric order.
inline const std::vector<unsigned>& masks_of_degree(int k) {
    static const std::array<std::vector<unsigned>, 5> table = [] {
        std::array<std::vector<unsigned>, 5> t;
        for (unsigned m = 0; m < 16; ++m) t[std::popcount(m)].push_back(m);
        return t;
    }();
    return table.at(static_cast<std::size_t>(k));
}

inline int mask_position(int k, unsigned m) {
    const auto& list = masks_of_degree(k);
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] == m) return static_cast<int>(i);
    throw std::logic_error("mask_position: mask/degree mismatch");
}

// Sign of merging ascending factor lists a, b into the canonical order.
inline int merge_sign(unsigned a, unsigned b) {
    int swaps = 0;
    for (int i = 0; i < kFrameDim; ++i) {
        if (b & (1u << i)) swaps += std::popcount(a >> (i + 1));
    }
    return (swaps % 2 == 0) ? 1 : -1;
}

// Position (0-based) of index i among the ascending factors of mask m.
inline int factor_position(unsigned m, int i) {
    return std::popcount(m & ((1u << i) - 1u));
}

} // namespace detail

// Differential k-form with SField coefficients, optionally on an x-grid.
class FormField {
public:
    FormField() = default;

    FormField(int degree, std::size_t n_modes, std::optional<XGrid> grid = std::nullopt)
        : degree_(degree), n_modes_(n_modes), grid_(grid) {
        if (degree < 0 || degree > kFrameDim) throw std::invalid_argument("FormField: degree out of range");
        const std::size_t nx = grid_ ? grid_->n : 1;
        comps_.assign(detail::masks_of_degree(degree).size(), std::vector<SField>(nx, SField(n_modes)));
    }

    int degree() const { return degree_; }
    std::size_t n_modes() const { return n_modes_; }
    const std::optional<XGrid>& grid() const { return grid_; }
    std::size_t n_x() const { return grid_ ? grid_->n : 1; }
    std::size_t n_components() const { return comps_.size(); }

    const std::vector<SField>& component(unsigned mask) const {
        return comps_[static_cast<std::size_t>(detail::mask_position(degree_, mask))];
    }
    std::vector<SField>& component(unsigned mask) {
        return comps_[static_cast<std::size_t>(detail::mask_position(degree_, mask))];
    }
    const SField& at(unsigned mask, std::size_t ix) const { return component(mask).at(ix); }
    SField& at(unsigned mask, std::size_t ix) { return component(mask).at(ix); }

    static const std::vector<unsigned>& masks(int degree) { return detail::masks_of_degree(degree); }

    bool compatible(const FormField& o) const { return n_modes_ == o.n_modes_ && grid_ == o.grid_; }

    FormField& operator+=(const FormField& o) {
        if (degree_ != o.degree_ || !compatible(o)) throw std::invalid_argument("FormField: incompatible sum");
        for (std::size_t c = 0; c < comps_.size(); ++c)
            for (std::size_t i = 0; i < comps_[c].size(); ++i) comps_[c][i] += o.comps_[c][i];
        return *this;
    }
    FormField& operator-=(const FormField& o) {
        if (degree_ != o.degree_ || !compatible(o)) throw std::invalid_argument("FormField: incompatible sum");
        for (std::size_t c = 0; c < comps_.size(); ++c)
            for (std::size_t i = 0; i < comps_[c].size(); ++i) comps_[c][i] -= o.comps_[c][i];
        return *this;
    }
    FormField& operator*=(double a) {
        for (auto& col : comps_)
            for (auto& f : col) f *= a;
        return *this;
    }
    friend FormField operator+(FormField a, const FormField& b) { return a += b; }
    friend FormField operator-(FormField a, const FormField& b) { return a -= b; }
    friend FormField operator*(double a, FormField f) { return f *= a; }

    double sup_abs() const {
        double m = 0.0;
        for (const auto& col : comps_)
            for (const auto& f : col) m = std::max(m, f.sup_abs());
        return m;
    }

private:
    int degree_ = 0;
    std::size_t n_modes_ = 0;
    std::optional<XGrid> grid_;
    std::vector<std::vector<SField>> comps_; // [mask position][x node]
};

// Graded-commutative wedge product.
inline FormField wedge(const FormField& a, const FormField& b) {
    if (a.degree() + b.degree() > kFrameDim) throw std::invalid_argument("wedge: degree overflow");
    if (!a.compatible(b)) throw std::invalid_argument("wedge: mismatched grids");
    FormField r(a.degree() + b.degree(), a.n_modes(), a.grid());
    const std::size_t nx = r.n_x();
    for (unsigned ma : FormField::masks(a.degree())) {
        for (unsigned mb : FormField::masks(b.degree())) {
            if (ma & mb) continue;
            const double sg = detail::merge_sign(ma, mb);
            auto& out = r.component(ma | mb);
            const auto& ca = a.component(ma);
            const auto& cb = b.component(mb);
            for (std::size_t i = 0; i < nx; ++i) out[i] += sg * (ca[i] * cb[i]);
        }
    }
    return r;
}

namespace detail {

// First x-derivative of a tabulated profile column: centered interior,
// third-order one-sided at the ends.
inline std::vector<SField> d_dx(const std::vector<SField>& col, double h) {
    const std::size_t n = col.size();
    if (n < 4) throw std::invalid_argument("d_dx: need at least 4 x-nodes");
    std::vector<SField> out(n, SField(col[0].n_modes()));
    const double ih = 1.0 / h;
    out[0] = (ih / 6.0) * (-11.0 * col[0] + 18.0 * col[1] - 9.0 * col[2] + 2.0 * col[3]);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (0.5 * ih) * (col[i + 1] - col[i - 1]);
    out[n - 1] = (ih / 6.0) * (11.0 * col[n - 1] - 18.0 * col[n - 2] + 9.0 * col[n - 3] - 2.0 * col[n - 4]);
    return out;
}

} // namespace detail

// Exterior derivative.  Forms without an x-grid are x-constant; pass
// require_x_axis = true to insist on a tabulated x-dependence.
inline FormField exterior_derivative(const FormField& a, bool require_x_axis = false) {
    if (require_x_axis && !a.grid()) throw std::invalid_argument("exterior_derivative: form has no x-axis");
    if (a.degree() == kFrameDim) throw std::invalid_argument("exterior_derivative: top-degree form");
    FormField r(a.degree() + 1, a.n_modes(), a.grid());
    const std::size_t nx = a.n_x();

    for (unsigned m : FormField::masks(a.degree())) {
        const auto& col = a.component(m);

        // (d/ds f) t2 ^ e_m
        if (!(m & 0b0100u)) {
            const int sg = detail::merge_sign(0b0100u, m);
            auto& out = r.component(m | 0b0100u);
            for (std::size_t i = 0; i < nx; ++i) out[i] += static_cast<double>(sg) * col[i].derivative();
        }

        // (d/dx f) dx ^ e_m
        if (!(m & 0b0001u) && a.grid()) {
            auto dcol = detail::d_dx(col, a.grid()->h);
            auto& out = r.component(m | 0b0001u);
            for (std::size_t i = 0; i < nx; ++i) out[i] += dcol[i];
        }

        // f d(e_m): each t1 factor contributes t2 ^ t3 in its place.
        if (m & 0b0010u) {
            const unsigned rest = m & ~0b0010u;
            if (!(rest & 0b1100u)) {
                const int pos = detail::factor_position(m, 1);
                const int sg = ((pos % 2 == 0) ? 1 : -1) * detail::merge_sign(0b1100u, rest);
                auto& out = r.component(rest | 0b1100u);
                for (std::size_t i = 0; i < nx; ++i) out[i] += static_cast<double>(sg) * col[i];
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Model metric and inhomogeneous dilations.

// g0 = x (dx^2 + t2^2 + t3^2) + x^{-1} t1^2, diagonal in (dx, t1, t2, t3).
inline std::array<double, 4> model_metric_g0(double x) {
    if (x == 0.0) throw std::domain_error("model_metric_g0: degenerate at the fold x = 0");
    return {x, 1.0 / x, x, x};
}

// Coframe scaling weights of the dilation h_t: dx -> t dx, t1 -> t^2 t1,
// t2 -> t t2, t3 -> t t3 (and the base point moves x -> t x).
inline constexpr std::array<int, 4> kDilationWeight = {1, 2, 1, 1};

inline int dilation_weight(unsigned mask) {
    int w = 0;
    for (int i = 0; i < kFrameDim; ++i)
        if (mask & (1u << i)) w += kDilationWeight[static_cast<std::size_t>(i)];
    return w;
}

// Pullback of a diagonal symmetric 2-tensor given as an analytic component
// evaluator: (h_t^* T)(x) = t^{2 w_i} T_i(t x).
template <typename Eval>
auto dilation_pullback_diag_metric(double t, Eval components) {
    if (t <= 0.0) throw std::domain_error("dilation_pullback: t must be positive");
    return [t, components](double x) {
        std::array<double, 4> c = components(t * x);
        for (int i = 0; i < kFrameDim; ++i) c[static_cast<std::size_t>(i)] *= std::pow(t, 2 * kDilationWeight[static_cast<std::size_t>(i)]);
        return c;
    };
}

// Pullback of an analytic 2-form evaluator returning the six components in
// ascending mask order {3, 5, 6, 9, 10, 12}.
template <typename Eval>
auto dilation_pullback_form2(double t, Eval components) {
    if (t <= 0.0) throw std::domain_error("dilation_pullback: t must be positive");
    return [t, components](double x) {
        std::array<double, 6> c = components(t * x);
        const auto& masks = FormField::masks(2);
        for (std::size_t i = 0; i < 6; ++i) c[i] *= std::pow(t, dilation_weight(masks[i]));
        return c;
    };
}

// Pullback of a tabulated k-form, restricted to the nodes x with t x again
// a grid node.  Those nodes must form a uniform subgrid with at least two
// points; otherwise the dilation is incompatible with the tabulation.
inline FormField dilation_pullback(double t, const FormField& a) {
    if (t <= 0.0) throw std::domain_error("dilation_pullback: t must be positive");
    if (!a.grid()) throw std::invalid_argument("dilation_pullback: tabulated form needs an x-grid");
    const XGrid g = *a.grid();
    std::vector<std::pair<std::size_t, std::size_t>> nodes; // (source i, image j)
    for (std::size_t i = 0; i < g.n; ++i) {
        const double fidx = (g.x(i) * t - g.x0) / g.h;
        const auto j = static_cast<std::ptrdiff_t>(std::llround(fidx));
        if (j >= 0 && j < static_cast<std::ptrdiff_t>(g.n) && std::abs(fidx - static_cast<double>(j)) <= 1e-9)
            nodes.emplace_back(i, static_cast<std::size_t>(j));
    }
    if (nodes.size() < 2) throw std::domain_error("dilation_pullback: t does not map the grid into itself");
    const std::size_t stride = nodes[1].first - nodes[0].first;
    for (std::size_t k = 1; k < nodes.size(); ++k)
        if (nodes[k].first - nodes[k - 1].first != stride)
            throw std::domain_error("dilation_pullback: t does not map the grid into itself");

    const XGrid out_grid{g.x(nodes.front().first), g.h * static_cast<double>(stride), nodes.size()};
    FormField r(a.degree(), a.n_modes(), out_grid);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        for (unsigned m : FormField::masks(a.degree())) {
            const double w = std::pow(t, dilation_weight(m));
            r.at(m, k) = w * a.at(m, nodes[k].second);
        }
    }
    return r;
}

} // namespace foldhk
