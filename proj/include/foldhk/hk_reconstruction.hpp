#pragma once

// From a Nahm trajectory to the folded structure: conformal factor
// mu = vol(V1,V2,V3), the triple of 2-forms and the metric in the fixed
// coframe (dx, t1, t2, t3), plus the structural diagnostics (wedge
// identity, closedness, fold expansion, Bryant coframe of the fold data).
//
// The forms are assembled without dividing by mu:
//   omega_a = dx ^ alpha_a + i_{V_a} vol,   alpha_a = V_b x V_c (cyclic),
// where alpha_a is the cross product of coefficient rows, i.e. the a-th
// column of the adjugate of the coefficient matrix.  This makes the wedge
// identity omega_a ^ omega_b = delta_ab omega_1^2 an algebraic consequence
// of the construction, independent of integration error.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "foldhk/fit.hpp"
#include "foldhk/fourier_profile.hpp"
#include "foldhk/frame_forms.hpp"
#include "foldhk/nahm_flow.hpp"
#include "foldhk/vector_fields.hpp"

namespace foldhk {

inline InvariantVectorField cross_fields(const InvariantVectorField& a, const InvariantVectorField& b) {
    return InvariantVectorField(a.c2 * b.c3 - a.c3 * b.c2,
                                a.c3 * b.c1 - a.c1 * b.c3,
                                a.c1 * b.c2 - a.c2 * b.c1);
}

inline SField dot_fields(const InvariantVectorField& a, const InvariantVectorField& b) {
    return a.c1 * b.c1 + a.c2 * b.c2 + a.c3 * b.c3;
}

// Symmetric metric components in (dx, t1, t2, t3): g00 = mu and the 3x3
// frame block (1/mu) sum_a alpha_a (x) alpha_a; stored upper-triangular.
struct MetricBlock {
    SField g00;
    std::array<SField, 6> theta; // 11,12,13,22,23,33
    bool valid = false;          // false at the fold node where 1/mu blows up
};

struct HKTriple {
    XGrid grid;
    std::size_t n_modes = 0;
    std::vector<SField> mu;            // per x node
    std::array<FormField, 3> omega;    // 2-forms on the grid
    std::vector<MetricBlock> metric;   // per x node
    std::size_t fold_index = 0;
};

inline HKTriple reconstruct(const Trajectory& traj, double mu_floor = 1e-10) {
    const auto& st = traj.states;
    const std::size_t nx = st.size();
    const std::size_t n = st[0].V1.n_modes();
    const XGrid grid = traj.grid();

    HKTriple hk;
    hk.grid = grid;
    hk.n_modes = n;
    hk.fold_index = traj.fold_index();
    hk.mu.resize(nx, SField(n));
    hk.metric.resize(nx);
    for (auto& w : hk.omega) w = FormField(2, n, grid);

    for (std::size_t i = 0; i < nx; ++i) {
        const std::array<const InvariantVectorField*, 3> v = {&st[i].V1, &st[i].V2, &st[i].V3};
        std::array<InvariantVectorField, 3> alpha = {
            cross_fields(*v[1], *v[2]),
            cross_fields(*v[2], *v[0]),
            cross_fields(*v[0], *v[1]),
        };
        const SField mu = dot_fields(*v[0], alpha[0]);
        hk.mu[i] = mu;

        for (int a = 0; a < 3; ++a) {
            FormField& w = hk.omega[static_cast<std::size_t>(a)];
            // dx ^ alpha_a (dx leads, all merge signs +1)
            w.at(0b0011u, i) = alpha[static_cast<std::size_t>(a)].c1;
            w.at(0b0101u, i) = alpha[static_cast<std::size_t>(a)].c2;
            w.at(0b1001u, i) = alpha[static_cast<std::size_t>(a)].c3;
            // i_{V_a} vol
            const FormField iv = interior_volume(*v[static_cast<std::size_t>(a)]);
            w.at(0b1100u, i) += iv.at(0b1100u, 0);
            w.at(0b1010u, i) += iv.at(0b1010u, 0);
            w.at(0b0110u, i) += iv.at(0b0110u, 0);
        }

        MetricBlock mb;
        mb.g00 = mu;
        const bool at_fold = (i == hk.fold_index);
        if (!at_fold) {
            double mu_min = 1e300;
            for (double mv : mu.values(2 * n)) mu_min = std::min(mu_min, std::abs(mv));
            if (mu_min < mu_floor)
                throw std::runtime_error("reconstruct: singular coefficient matrix away from the fold");
            const SField inv_mu = mu.map([](double t) { return 1.0 / t; });
            int slot = 0;
            for (int r = 1; r <= 3; ++r) {
                for (int c = r; c <= 3; ++c) {
                    SField acc(n);
                    for (int a = 0; a < 3; ++a) {
                        const InvariantVectorField& al = alpha[static_cast<std::size_t>(a)];
                        const SField& ar = (r == 1) ? al.c1 : (r == 2 ? al.c2 : al.c3);
                        const SField& ac = (c == 1) ? al.c1 : (c == 2 ? al.c2 : al.c3);
                        acc += ar * ac;
                    }
                    mb.theta[static_cast<std::size_t>(slot++)] = acc * inv_mu;
                }
            }
            mb.valid = true;
        }
        hk.metric[i] = std::move(mb);
    }
    return hk;
}

// Pointwise residual of omega_a ^ omega_b - delta_ab omega_1^2.
inline double wedge_identity_residual(const HKTriple& hk) {
    double res = 0.0;
    const FormField sq = wedge(hk.omega[0], hk.omega[0]);
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            FormField w = wedge(hk.omega[static_cast<std::size_t>(a)], hk.omega[static_cast<std::size_t>(b)]);
            if (a == b) w -= sq;
            res = std::max(res, w.sup_abs());
        }
    }
    return res;
}

inline std::array<double, 3> closedness_residual(const HKTriple& hk) {
    if (hk.grid.n < 5) throw std::invalid_argument("closedness_residual: need at least 5 x-nodes");
    std::array<double, 3> r{};
    for (int a = 0; a < 3; ++a)
        r[static_cast<std::size_t>(a)] = exterior_derivative(hk.omega[static_cast<std::size_t>(a)], true).sup_abs();
    return r;
}

// Per-node sup of a form's components (diagnostic tables).
inline std::vector<double> per_node_sup(const FormField& f) {
    std::vector<double> out(f.n_x(), 0.0);
    for (unsigned m : FormField::masks(f.degree()))
        for (std::size_t i = 0; i < f.n_x(); ++i) out[i] = std::max(out[i], f.at(m, i).sup_abs());
    return out;
}

inline std::array<std::vector<double>, 3> closedness_table(const HKTriple& hk) {
    std::array<std::vector<double>, 3> out;
    for (int a = 0; a < 3; ++a)
        out[static_cast<std::size_t>(a)] = per_node_sup(exterior_derivative(hk.omega[static_cast<std::size_t>(a)], true));
    return out;
}

inline std::vector<double> wedge_identity_table(const HKTriple& hk) {
    std::vector<double> out(hk.grid.n, 0.0);
    const FormField sq = wedge(hk.omega[0], hk.omega[0]);
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            FormField w = wedge(hk.omega[static_cast<std::size_t>(a)], hk.omega[static_cast<std::size_t>(b)]);
            if (a == b) w -= sq;
            const auto t = per_node_sup(w);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], t[i]);
        }
    }
    return out;
}

// mu must vanish at the fold and be odd across it.
inline std::pair<double, double> mu_fold_residuals(const HKTriple& hk) {
    const std::size_t mid = hk.fold_index;
    double odd = 0.0;
    for (std::size_t j = 1; j <= mid && mid + j < hk.grid.n; ++j)
        odd = std::max(odd, (hk.mu[mid + j] + hk.mu[mid - j]).sup_abs());
    return {hk.mu[mid].sup_abs(), odd};
}

// ---------------------------------------------------------------------------
// Bryant coframe of a fold datum (beta2, beta3).

struct BryantCoframe {
    // 1-forms on X: rows of theta_comp give theta~^a = sum_i theta_comp[a][i] t^i.
    std::array<std::array<SField, 3>, 3> comp;
    SField sigma; // the pointwise scale W^{-1/3}
};

// Given closed 2-forms beta2 = i_{B2} vol, beta3 = i_{B3} vol on X whose
// kernels span a (positively oriented) contact distribution, produce the
// unique coframe with beta2 = -t~1 ^ t~3, beta3 = t~1 ^ t~2 and
// d t~1 = t~2 ^ t~3.
inline BryantCoframe bryant_coframe(const FormField& beta2, const FormField& beta3,
                                    double degeneracy_tol = 1e-8) {
    if (beta2.degree() != 2 || beta3.degree() != 2 || beta2.grid() || beta3.grid())
        throw std::invalid_argument("bryant_coframe: expects 2-forms on X");
    const std::size_t n = beta2.n_modes();
    const InvariantVectorField b2 = vector_of_2form(beta2);
    const InvariantVectorField b3 = vector_of_2form(beta3);

    // Annihilator direction of both kernels.
    const InvariantVectorField nvec = cross_fields(b2, b3);
    if (nvec.sup_abs() < degeneracy_tol)
        throw std::domain_error("bryant_coframe: degenerate kernels (forms share a kernel line)");

    // Contact criterion: W = <n, curl-type pairing> must be bounded away
    // from zero; positivity fixes the orientation against t1^t2^t3.
    const SField w = nvec.c1 * nvec.c1 + nvec.c1 * nvec.c3.derivative() - nvec.c3 * nvec.c1.derivative();
    double wmin = 1e300, wmax = -1e300;
    for (double v : w.values(2 * n)) {
        wmin = std::min(wmin, v);
        wmax = std::max(wmax, v);
    }
    if (wmin < degeneracy_tol)
        throw std::domain_error(wmax <= 0.0 ? "bryant_coframe: negatively oriented contact data"
                                            : "bryant_coframe: data violates the contact condition");

    const SField sigma = w.map([](double t) { return std::cbrt(1.0 / t); });

    // Frame vectors: Y2 = sigma B2, Y3 = sigma B3, and Y1 via
    // i_{Y1} vol = sigma d(sigma theta-ring), theta-ring = n . theta.
    const InvariantVectorField y2{sigma * b2.c1, sigma * b2.c2, sigma * b2.c3};
    const InvariantVectorField y3{sigma * b3.c1, sigma * b3.c2, sigma * b3.c3};

    FormField theta1(1, n);
    theta1.at(0b0010u, 0) = sigma * nvec.c1;
    theta1.at(0b0100u, 0) = sigma * nvec.c2;
    theta1.at(0b1000u, 0) = sigma * nvec.c3;
    FormField dtheta1 = exterior_derivative(theta1);
    InvariantVectorField y1 = vector_of_2form(dtheta1);
    y1.c1 = sigma * y1.c1;
    y1.c2 = sigma * y1.c2;
    y1.c3 = sigma * y1.c3;

    // Dual coframe = inverse of the frame coefficient matrix.
    const std::array<const InvariantVectorField*, 3> rows = {&y1, &y2, &y3};
    std::array<InvariantVectorField, 3> adj = {
        cross_fields(*rows[1], *rows[2]),
        cross_fields(*rows[2], *rows[0]),
        cross_fields(*rows[0], *rows[1]),
    };
    const SField det = dot_fields(*rows[0], adj[0]);
    double dmin = 1e300;
    for (double v : det.values(2 * n)) dmin = std::min(dmin, std::abs(v));
    if (dmin < degeneracy_tol) throw std::domain_error("bryant_coframe: frame is singular");
    const SField inv_det = det.map([](double t) { return 1.0 / t; });

    BryantCoframe out;
    out.sigma = sigma;
    for (int a = 0; a < 3; ++a) {
        // theta~^a components: a-th column of the inverse = adj column / det.
        out.comp[static_cast<std::size_t>(a)] = {adj[static_cast<std::size_t>(a)].c1 * inv_det,
                                                 adj[static_cast<std::size_t>(a)].c2 * inv_det,
                                                 adj[static_cast<std::size_t>(a)].c3 * inv_det};
    }
    return out;
}

inline FormField bryant_form(const BryantCoframe& bc, int a) {
    const std::size_t n = bc.sigma.n_modes();
    FormField f(1, n);
    f.at(0b0010u, 0) = bc.comp[static_cast<std::size_t>(a - 1)][0];
    f.at(0b0100u, 0) = bc.comp[static_cast<std::size_t>(a - 1)][1];
    f.at(0b1000u, 0) = bc.comp[static_cast<std::size_t>(a - 1)][2];
    return f;
}

// Residuals of the defining identities, for a-posteriori verification.
inline std::array<double, 3> bryant_identity_residuals(const BryantCoframe& bc,
                                                       const FormField& beta2, const FormField& beta3) {
    const FormField t1 = bryant_form(bc, 1), t2 = bryant_form(bc, 2), t3 = bryant_form(bc, 3);
    const FormField r2 = beta2 + wedge(t1, t3);
    const FormField r3 = beta3 - wedge(t1, t2);
    const FormField r1 = exterior_derivative(t1) - wedge(t2, t3);
    return {r2.sup_abs(), r3.sup_abs(), r1.sup_abs()};
}

// ---------------------------------------------------------------------------
// Fold asymptotics.

struct FoldReport {
    // Odd fit mu ~ c1 x + c3 x^3 (sup over s of coefficient magnitudes).
    double mu_c1_sup = 0.0;
    double mu_c3_sup = 0.0;
    double mu_fit_residual = 0.0;
    // |V1(x) - x W1|, W1 = -[V2(0), V3(0)]: values and fitted exponent.
    double v1_dev_max = 0.0;
    double v1_exponent = 0.0;
    bool v1_exact = false;
    // Frame-adapted remainder of the three 2-forms against the leading
    // fold profile, measured in the scaled basis (dx, t~1/x, t~2, t~3).
    double omega_dev_max = 0.0;
    double omega_exponent = 0.0;
    bool omega_exact = false;
    // Quaternionic frame deviation |J_a e0 - e^a| in the same basis.
    double jframe_dev_max = 0.0;
    double jframe_exponent = 0.0;
    bool jframe_exact = false;
};

namespace detail {

// 3x3 profile-matrix inverse: out[r][c] = (m^{-1})[r][c].
inline std::array<std::array<SField, 3>, 3> invert_matrix(const std::array<std::array<SField, 3>, 3>& m,
                                                          double tol = 1e-10) {
    const InvariantVectorField r0{m[0][0], m[0][1], m[0][2]};
    const InvariantVectorField r1{m[1][0], m[1][1], m[1][2]};
    const InvariantVectorField r2{m[2][0], m[2][1], m[2][2]};
    // Columns of the inverse are cross products of the other two rows.
    std::array<InvariantVectorField, 3> col = {cross_fields(r1, r2), cross_fields(r2, r0), cross_fields(r0, r1)};
    const SField det = dot_fields(r0, col[0]);
    double dmin = 1e300;
    for (double v : det.values(2 * det.n_modes())) dmin = std::min(dmin, std::abs(v));
    if (dmin < tol) throw std::runtime_error("invert_matrix: singular profile matrix");
    const SField inv_det = det.map([](double t) { return 1.0 / t; });
    std::array<std::array<SField, 3>, 3> out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            const InvariantVectorField& cc = col[static_cast<std::size_t>(c)];
            const SField& comp = (r == 0) ? cc.c1 : (r == 1 ? cc.c2 : cc.c3);
            out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = comp * inv_det;
        }
    }
    return out;
}

} // namespace detail

// Expansion report near the fold.  The frame-adapted checks use the Bryant
// coframe computed from the restricted fold data, so the model and any
// normalized datum come out exact.
inline FoldReport fold_asymptotics(const Trajectory& traj, const HKTriple& hk,
                                   double window_fraction = 0.125) {
    const auto& st = traj.states;
    const std::size_t mid = hk.fold_index;
    const std::size_t n = hk.n_modes;
    const double h = hk.grid.h;
    const double x_hi = std::max(5.0 * h, window_fraction * (st.back().x));
    if (mid + 3 >= st.size()) throw std::invalid_argument("fold_asymptotics: grid does not resolve x near 0");

    FoldReport rep;

    // --- mu ~ c1 x + c3 x^3 fitted per s-collocation value.
    {
        std::vector<double> xs;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < st.size(); ++i) {
            if (std::abs(st[i].x) > 1e-14 && std::abs(st[i].x) <= x_hi + 1e-14) {
                xs.push_back(st[i].x);
                idx.push_back(i);
            }
        }
        if (xs.size() < 5) throw std::invalid_argument("fold_asymptotics: too few near-fold nodes");
        const std::size_t m = 2 * n;
        std::vector<std::vector<double>> vals(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) vals[r] = hk.mu[idx[r]].values(m);
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> ys(idx.size());
            for (std::size_t r = 0; r < idx.size(); ++r) ys[r] = vals[r][j];
            auto [c, res] = fit_odd_cubic(xs, ys);
            rep.mu_c1_sup = std::max(rep.mu_c1_sup, std::abs(c[0]));
            rep.mu_c3_sup = std::max(rep.mu_c3_sup, std::abs(c[1]));
            rep.mu_fit_residual = std::max(rep.mu_fit_residual, res);
        }
    }

    // --- V1(x) = x W1 + O(x^3), W1 = -[V2(0), V3(0)].
    {
        const InvariantVectorField w1 = -1.0 * lie_bracket(st[mid].V2, st[mid].V3);
        std::vector<double> xs, ys;
        for (std::size_t i = mid + 1; i < st.size() && st[i].x <= x_hi + 1e-14; ++i) {
            const InvariantVectorField dev = st[i].V1 - st[i].x * w1;
            xs.push_back(st[i].x);
            ys.push_back(dev.sup_abs());
            rep.v1_dev_max = std::max(rep.v1_dev_max, ys.back());
        }
        rep.v1_exact = rep.v1_dev_max <= 1e-12;
        rep.v1_exponent = rep.v1_exact ? 3.0 : fit_power_exponent(xs, ys);
    }

    // --- omega_a against the fold profile in the Bryant-adapted basis.
    {
        const FormField beta2 = interior_volume(st[mid].V2);
        const FormField beta3 = interior_volume(st[mid].V3);
        const BryantCoframe bc = bryant_coframe(beta2, beta3);
        // M[i][a] = component of t~^a on t^i; then t^i = sum_a N[a][i] t~^a
        // with N = M^{-1}.
        std::array<std::array<SField, 3>, 3> mmat;
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 3; ++a) mmat[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] =
                bc.comp[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)];
        const auto ninv = detail::invert_matrix(mmat); // ninv[a][i] = N[a][i]

        // Leading pattern: omega_a = x (e0 ^ ea + eb ^ ec), cyclic.
        std::vector<double> xs, yw, yj;
        for (std::size_t i = 0; i < st.size(); ++i) {
            const double x = st[i].x;
            if (std::abs(x) < 0.5 * h || x < 0.0 || x > x_hi + 1e-14) continue;
            xs.push_back(x);
            double devw = 0.0;

            for (int a = 0; a < 3; ++a) {
                const FormField& w = hk.omega[static_cast<std::size_t>(a)];
                // theta-block components in the Bryant basis.
                std::array<std::array<SField, 3>, 3> ctil; // antisym block [p][q], p<q used
                for (int p = 0; p < 3; ++p)
                    for (int q = 0; q < 3; ++q) ctil[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = SField(n);
                const std::array<std::array<int, 2>, 3> pairs = {{{1, 2}, {1, 3}, {2, 3}}};
                const std::array<unsigned, 3> pair_mask = {0b0110u, 0b1010u, 0b1100u};
                for (std::size_t pm = 0; pm < 3; ++pm) {
                    const int pi = pairs[pm][0], pj = pairs[pm][1];
                    const SField& cij = w.at(pair_mask[pm], i);
                    for (int aa = 0; aa < 3; ++aa) {
                        for (int bb = 0; bb < 3; ++bb) {
                            if (aa == bb) continue;
                            // contribution to tilde component (aa,bb):
                            SField term = cij * (ninv[static_cast<std::size_t>(aa)][static_cast<std::size_t>(pi - 1)] *
                                                 ninv[static_cast<std::size_t>(bb)][static_cast<std::size_t>(pj - 1)]);
                            ctil[static_cast<std::size_t>(aa)][static_cast<std::size_t>(bb)] += term;
                        }
                    }
                }
                // dx ^ theta components in the Bryant basis.
                std::array<SField, 3> cdx;
                for (int aa = 0; aa < 3; ++aa) cdx[static_cast<std::size_t>(aa)] = SField(n);
                const std::array<unsigned, 3> dx_mask = {0b0011u, 0b0101u, 0b1001u};
                for (int ii = 0; ii < 3; ++ii) {
                    const SField& ci = w.at(dx_mask[static_cast<std::size_t>(ii)], i);
                    for (int aa = 0; aa < 3; ++aa)
                        cdx[static_cast<std::size_t>(aa)] += ci * ninv[static_cast<std::size_t>(aa)][static_cast<std::size_t>(ii)];
                }
                // Scale to (e0, e1, e2, e3) = (dx, t~1/x, t~2, t~3) and
                // subtract x * pattern.
                const int b = (a + 1) % 3, c = (a + 2) % 3;
                for (int aa = 0; aa < 3; ++aa) {
                    const double escale = (aa == 0) ? x : 1.0;
                    SField comp = escale * cdx[static_cast<std::size_t>(aa)];
                    if (aa == a) comp -= SField::constant(x, n);
                    devw = std::max(devw, comp.sup_abs());
                }
                for (int p = 0; p < 3; ++p) {
                    for (int q = p + 1; q < 3; ++q) {
                        double escale = 1.0;
                        if (p == 0) escale *= x;
                        if (q == 0) escale *= x;
                        SField comp = escale * (ctil[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] -
                                                ctil[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)]);
                        double pat = 0.0;
                        if (p == b && q == c) pat = x;
                        if (p == c && q == b) pat = -x;
                        comp -= SField::constant(pat, n);
                        devw = std::max(devw, comp.sup_abs());
                    }
                }
            }
            yw.push_back(devw);
            rep.omega_dev_max = std::max(rep.omega_dev_max, devw);

            // J-frame deviation: v^a in the scaled Bryant basis vs delta.
            const std::array<const InvariantVectorField*, 3> v = {&st[i].V1, &st[i].V2, &st[i].V3};
            std::array<InvariantVectorField, 3> alpha = {
                cross_fields(*v[1], *v[2]), cross_fields(*v[2], *v[0]), cross_fields(*v[0], *v[1])};
            const SField inv_mu = hk.mu[i].map([](double t) { return 1.0 / t; });
            double devj = 0.0;
            for (int a = 0; a < 3; ++a) {
                const InvariantVectorField& al = alpha[static_cast<std::size_t>(a)];
                const std::array<const SField*, 3> comps = {&al.c1, &al.c2, &al.c3};
                for (int aa = 0; aa < 3; ++aa) {
                    SField e(n);
                    for (int ii = 0; ii < 3; ++ii)
                        e += (*comps[static_cast<std::size_t>(ii)]) * ninv[static_cast<std::size_t>(aa)][static_cast<std::size_t>(ii)];
                    e = e * inv_mu;
                    if (aa == 0) e = x * e;
                    if (aa == a) e -= SField::constant(1.0, n);
                    devj = std::max(devj, e.sup_abs());
                }
            }
            yj.push_back(devj);
            rep.jframe_dev_max = std::max(rep.jframe_dev_max, devj);
        }
        rep.omega_exact = rep.omega_dev_max <= 1e-12;
        rep.omega_exponent = rep.omega_exact ? 3.0 : fit_power_exponent(xs, yw);
        rep.jframe_exact = rep.jframe_dev_max <= 1e-12;
        rep.jframe_exponent = rep.jframe_exact ? 2.0 : fit_power_exponent(xs, yj);
    }

    return rep;
}

} // namespace foldhk
