#pragma once

// Configuration-driven verification suites.  Each runner executes its
// checks in a fixed order, appends records to a VerificationReport and
// writes CSV tables into the output directory.  All randomness comes from
// one seeded generator so reruns are byte-identical.

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "foldhk/fiber_model.hpp"
#include "foldhk/fit.hpp"
#include "foldhk/fourier_profile.hpp"
#include "foldhk/frame_forms.hpp"
#include "foldhk/hk_reconstruction.hpp"
#include "foldhk/mode_laplacian.hpp"
#include "foldhk/nahm_flow.hpp"
#include "foldhk/quadrature.hpp"
#include "foldhk/report.hpp"

namespace foldhk {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration.

struct HarmonicSpec {
    std::size_t harmonic = 1;
    double amplitude = 0.0;
    bool sine = true; // sin(2 pi k s) vs cos(2 pi k s)

    SField build(std::size_t n_modes) const {
        const double phase = sine ? -0.5 * std::numbers::pi : 0.0;
        return SField::harmonic(harmonic, amplitude, phase, n_modes);
    }
};

struct NahmConfig {
    std::size_t n_modes = 64;
    double x_max = 0.5;
    std::vector<double> h_levels = {1.0 / 50, 1.0 / 100, 1.0 / 200};
    double eps = 0.1;                       // amplitude of the X3 perturbation p
    HarmonicSpec p{1, 1.0, true};
    HarmonicSpec q{1, 0.1, false};
    HarmonicSpec r{1, 0.1, true};
    double residual_window = 0.4;
    double blowup_bound = 1e6;
    std::vector<double> dilation_factors = {0.5, 2.0};

    double tol_model_exact = 1e-12;
    double tol_wedge = 1e-12;
    double tol_parity = 1e-10;
    double tol_dilation = 1e-14;
    double tol_bryant = 1e-10;
    double eq8_order_lo = 3.7, eq8_order_hi = 4.3;
    double domega_order_min = 1.8;
    double v1_exp_lo = 2.7, v1_exp_hi = 3.3;

    void validate() const {
        if (h_levels.size() < 2) throw config_error("nahm: need at least two h levels");
        for (double h : h_levels) {
            if (h <= 0.0) throw config_error("nahm: step sizes must be positive");
            if (x_max / h < 8.0) throw config_error("nahm: x_max too short for the residual stencils (need x_max >= 8 h)");
        }
        if (eps < 0.0) throw config_error("nahm: eps must be >= 0");
        if (!detail::is_pow2(n_modes)) throw config_error("nahm: n_modes must be a power of two");
        for (double t : {tol_model_exact, tol_wedge, tol_parity, tol_dilation})
            if (t <= 0.0) throw config_error("nahm: tolerances must be positive");
    }
};

struct LaplacianConfig {
    std::size_t grid_intervals = 512; // M
    std::vector<std::pair<double, int>> modes = {{3.0, 2}, {1.5, 1}, {5.0, 12}, {2.0, 0}, {4.0, -7}, {0.0, 0}};
    std::size_t energy_trials = 100;
    std::size_t order_trials = 5;

    double order_lo = 1.8, order_hi = 2.2;
    double tol_expansion_law = 0.01;
    double tol_solver_residual = 1e-13;
    double tol_commuted_solution = 1e-9;
    double tol_assembly_zero = 1e-14;
    double tol_trace_vanish = 1e-6;

    void validate() const {
        if (grid_intervals < 16) throw config_error("laplacian: need M >= 16");
        if (modes.empty()) throw config_error("laplacian: mode list must not be empty");
        for (const auto& [lambda, n] : modes) {
            if (lambda < 0.0) throw config_error("laplacian: lambda must be >= 0");
            if (!(lambda == 0.0 && n == 0) && std::abs(n) > lambda * lambda)
                throw config_error("laplacian: mode list violates the constraint |n| <= lambda^2");
        }
        if (tol_expansion_law <= 0.0 || tol_solver_residual <= 0.0)
            throw config_error("laplacian: tolerances must be positive");
    }
};

struct DeformationSpec {
    int m = 2;
    bool harmonic_norm = true; // Phi = 1/B(m, 1/2)
    double phi_norm = 1.0;     // used when harmonic_norm is false
    std::complex<double> amplitude{1.0, 0.0};

    Deformation build() const {
        Deformation d;
        d.m = m;
        d.phi_norm = harmonic_norm ? harmonic_phi_norm(m) : phi_norm;
        d.amplitude = amplitude;
        return d;
    }
};

struct CotangentConfig {
    std::size_t n_radial = 64;
    std::size_t n_angular = 64;
    std::vector<DeformationSpec> deformations = {
        {1, true, 1.0, {1.0, 0.0}}, {2, true, 1.0, {1.0, 0.0}}, {3, true, 1.0, {1.0, 0.0}},
        {4, true, 1.0, {1.0, 0.0}}, {5, true, 1.0, {1.0, 0.0}}, {6, true, 1.0, {1.0, 0.0}}};
    int nmax = 6;
    double rho = 0.9;     // sub-disc radius for the finite-eps consistency check
    double fd_eps = 1e-3; // finite perturbation size

    double tol_ab_identity = 1e-14;
    double tol_deformation_identity = 1e-12;
    double tol_invariant_zero = 1e-10;
    double tol_diagonality = 1e-10;
    double tol_linearity = 1e-10;
    double tol_kappa = 1e-8;
    double tol_consistency = 1e-6;
    double tol_quadrature_cross = 1e-12;
    double tol_symplectic_preserve = 1e-14;

    void validate() const {
        if (n_radial < 8 || n_angular < 8) throw config_error("cotangent: fiber grid too small");
        if (nmax < 1) throw config_error("cotangent: nmax must be >= 1");
        if (!(rho > 0.0 && rho < 1.0)) throw config_error("cotangent: rho must lie in (0,1)");
        for (const auto& d : deformations) {
            if (d.m < 0) throw config_error("cotangent: deformation frequency must be >= 0");
            if (d.m > nmax) throw config_error("cotangent: deformation frequency above nmax");
        }
        for (double t : {tol_ab_identity, tol_deformation_identity, tol_invariant_zero, tol_diagonality,
                         tol_linearity, tol_kappa, tol_consistency, tol_quadrature_cross})
            if (t <= 0.0) throw config_error("cotangent: tolerances must be positive");
    }
};

struct RunConfig {
    std::uint64_t seed = 20250809;
    NahmConfig nahm;
    LaplacianConfig laplacian;
    CotangentConfig cotangent;

    void validate() const {
        nahm.validate();
        laplacian.validate();
        cotangent.validate();
    }
};

// ---------------------------------------------------------------------------
// JSON config I/O (defaults reproduce the verification runs exactly).

namespace detail {

inline void read_harmonic(const nlohmann::json& j, HarmonicSpec& h) {
    if (j.contains("harmonic")) h.harmonic = j["harmonic"].get<std::size_t>();
    if (j.contains("amplitude")) h.amplitude = j["amplitude"].get<double>();
    if (j.contains("sine")) h.sine = j["sine"].get<bool>();
}

inline void read_double(const nlohmann::json& j, const char* key, double& out) {
    if (j.contains(key)) out = j[key].get<double>();
}

} // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    try {
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("nahm")) {
            const auto& a = j["nahm"];
            auto& n = cfg.nahm;
            if (a.contains("n_modes")) n.n_modes = a["n_modes"].get<std::size_t>();
            if (a.contains("x_max")) n.x_max = a["x_max"].get<double>();
            if (a.contains("h_levels")) n.h_levels = a["h_levels"].get<std::vector<double>>();
            if (a.contains("eps")) n.eps = a["eps"].get<double>();
            if (a.contains("p")) detail::read_harmonic(a["p"], n.p);
            if (a.contains("q")) detail::read_harmonic(a["q"], n.q);
            if (a.contains("r")) detail::read_harmonic(a["r"], n.r);
            if (a.contains("residual_window")) n.residual_window = a["residual_window"].get<double>();
            if (a.contains("blowup_bound")) n.blowup_bound = a["blowup_bound"].get<double>();
            if (a.contains("dilation_factors")) n.dilation_factors = a["dilation_factors"].get<std::vector<double>>();
            detail::read_double(a, "tol_model_exact", n.tol_model_exact);
            detail::read_double(a, "tol_wedge", n.tol_wedge);
            detail::read_double(a, "tol_parity", n.tol_parity);
            detail::read_double(a, "tol_dilation", n.tol_dilation);
            detail::read_double(a, "flow_order_lo", n.eq8_order_lo);
            detail::read_double(a, "flow_order_hi", n.eq8_order_hi);
            detail::read_double(a, "closedness_order_min", n.domega_order_min);
            detail::read_double(a, "v1_exponent_lo", n.v1_exp_lo);
            detail::read_double(a, "v1_exponent_hi", n.v1_exp_hi);
            detail::read_double(a, "tol_bryant", n.tol_bryant);
        }
        if (j.contains("laplacian")) {
            const auto& a = j["laplacian"];
            auto& l = cfg.laplacian;
            if (a.contains("grid_intervals")) l.grid_intervals = a["grid_intervals"].get<std::size_t>();
            if (a.contains("modes")) {
                l.modes.clear();
                for (const auto& m : a["modes"])
                    l.modes.emplace_back(m.at(0).get<double>(), m.at(1).get<int>());
            }
            if (a.contains("energy_trials")) l.energy_trials = a["energy_trials"].get<std::size_t>();
            if (a.contains("order_trials")) l.order_trials = a["order_trials"].get<std::size_t>();
            detail::read_double(a, "order_lo", l.order_lo);
            detail::read_double(a, "order_hi", l.order_hi);
            detail::read_double(a, "tol_expansion_law", l.tol_expansion_law);
            detail::read_double(a, "tol_solver_residual", l.tol_solver_residual);
            detail::read_double(a, "tol_commuted_solution", l.tol_commuted_solution);
            detail::read_double(a, "tol_assembly_zero", l.tol_assembly_zero);
            detail::read_double(a, "tol_trace_vanish", l.tol_trace_vanish);
        }
        if (j.contains("cotangent")) {
            const auto& a = j["cotangent"];
            auto& c = cfg.cotangent;
            if (a.contains("n_radial")) c.n_radial = a["n_radial"].get<std::size_t>();
            if (a.contains("n_angular")) c.n_angular = a["n_angular"].get<std::size_t>();
            if (a.contains("nmax")) c.nmax = a["nmax"].get<int>();
            if (a.contains("rho")) c.rho = a["rho"].get<double>();
            if (a.contains("fd_eps")) c.fd_eps = a["fd_eps"].get<double>();
            if (a.contains("deformations")) {
                c.deformations.clear();
                for (const auto& d : a["deformations"]) {
                    DeformationSpec s;
                    s.m = d.at("m").get<int>();
                    if (d.contains("phi")) {
                        if (d["phi"].is_string() && d["phi"].get<std::string>() == "harmonic") {
                            s.harmonic_norm = true;
                        } else {
                            s.harmonic_norm = false;
                            s.phi_norm = d["phi"].get<double>();
                        }
                    }
                    if (d.contains("amplitude")) {
                        const auto& amp = d["amplitude"];
                        s.amplitude = {amp.at(0).get<double>(), amp.at(1).get<double>()};
                    }
                    c.deformations.push_back(s);
                }
            }
            detail::read_double(a, "tol_ab_identity", c.tol_ab_identity);
            detail::read_double(a, "tol_deformation_identity", c.tol_deformation_identity);
            detail::read_double(a, "tol_invariant_zero", c.tol_invariant_zero);
            detail::read_double(a, "tol_diagonality", c.tol_diagonality);
            detail::read_double(a, "tol_linearity", c.tol_linearity);
            detail::read_double(a, "tol_kappa", c.tol_kappa);
            detail::read_double(a, "tol_consistency", c.tol_consistency);
            detail::read_double(a, "tol_quadrature_cross", c.tol_quadrature_cross);
            detail::read_double(a, "tol_symplectic_preserve", c.tol_symplectic_preserve);
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["nahm"] = {{"n_modes", cfg.nahm.n_modes},
                 {"x_max", cfg.nahm.x_max},
                 {"h_levels", cfg.nahm.h_levels},
                 {"eps", cfg.nahm.eps},
                 {"p", {{"harmonic", cfg.nahm.p.harmonic}, {"amplitude", cfg.nahm.p.amplitude}, {"sine", cfg.nahm.p.sine}}},
                 {"q", {{"harmonic", cfg.nahm.q.harmonic}, {"amplitude", cfg.nahm.q.amplitude}, {"sine", cfg.nahm.q.sine}}},
                 {"r", {{"harmonic", cfg.nahm.r.harmonic}, {"amplitude", cfg.nahm.r.amplitude}, {"sine", cfg.nahm.r.sine}}},
                 {"residual_window", cfg.nahm.residual_window},
                 {"dilation_factors", cfg.nahm.dilation_factors},
                 {"tol_model_exact", cfg.nahm.tol_model_exact},
                 {"tol_wedge", cfg.nahm.tol_wedge},
                 {"tol_parity", cfg.nahm.tol_parity},
                 {"tol_dilation", cfg.nahm.tol_dilation},
                 {"flow_order_lo", cfg.nahm.eq8_order_lo},
                 {"flow_order_hi", cfg.nahm.eq8_order_hi},
                 {"closedness_order_min", cfg.nahm.domega_order_min},
                 {"v1_exponent_lo", cfg.nahm.v1_exp_lo},
                 {"v1_exponent_hi", cfg.nahm.v1_exp_hi},
                 {"tol_bryant", cfg.nahm.tol_bryant}};
    nlohmann::ordered_json modes = nlohmann::ordered_json::array();
    for (const auto& [l, n] : cfg.laplacian.modes) modes.push_back({l, n});
    j["laplacian"] = {{"grid_intervals", cfg.laplacian.grid_intervals},
                      {"modes", modes},
                      {"energy_trials", cfg.laplacian.energy_trials},
                      {"order_trials", cfg.laplacian.order_trials},
                      {"order_lo", cfg.laplacian.order_lo},
                      {"order_hi", cfg.laplacian.order_hi},
                      {"tol_expansion_law", cfg.laplacian.tol_expansion_law},
                      {"tol_solver_residual", cfg.laplacian.tol_solver_residual},
                      {"tol_commuted_solution", cfg.laplacian.tol_commuted_solution},
                      {"tol_assembly_zero", cfg.laplacian.tol_assembly_zero},
                      {"tol_trace_vanish", cfg.laplacian.tol_trace_vanish}};
    nlohmann::ordered_json defs = nlohmann::ordered_json::array();
    for (const auto& d : cfg.cotangent.deformations) {
        nlohmann::ordered_json jd;
        jd["m"] = d.m;
        if (d.harmonic_norm) jd["phi"] = "harmonic";
        else jd["phi"] = d.phi_norm;
        jd["amplitude"] = {d.amplitude.real(), d.amplitude.imag()};
        defs.push_back(jd);
    }
    j["cotangent"] = {{"n_radial", cfg.cotangent.n_radial},
                      {"n_angular", cfg.cotangent.n_angular},
                      {"deformations", defs},
                      {"nmax", cfg.cotangent.nmax},
                      {"rho", cfg.cotangent.rho},
                      {"fd_eps", cfg.cotangent.fd_eps},
                      {"tol_ab_identity", cfg.cotangent.tol_ab_identity},
                      {"tol_deformation_identity", cfg.cotangent.tol_deformation_identity},
                      {"tol_invariant_zero", cfg.cotangent.tol_invariant_zero},
                      {"tol_diagonality", cfg.cotangent.tol_diagonality},
                      {"tol_linearity", cfg.cotangent.tol_linearity},
                      {"tol_kappa", cfg.cotangent.tol_kappa},
                      {"tol_consistency", cfg.cotangent.tol_consistency},
                      {"tol_quadrature_cross", cfg.cotangent.tol_quadrature_cross},
                      {"tol_symplectic_preserve", cfg.cotangent.tol_symplectic_preserve}};
    return j;
}

inline std::string config_hash(const RunConfig& cfg) { return fnv1a_hex(config_to_json(cfg).dump()); }

// ---------------------------------------------------------------------------
// Timing helper.

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Nahm suite.

inline VerificationReport run_nahm_suite(const NahmConfig& cfg, const std::filesystem::path& outdir) {
    cfg.validate();
    std::filesystem::create_directories(outdir);
    VerificationReport rep;
    rep.suite = "nahm";
    const std::size_t N = cfg.n_modes;

    // --- exact model
    {
        detail::Stopwatch sw;
        FlowConfig fc;
        fc.h = cfg.h_levels.back();
        fc.x_max = cfg.x_max;
        fc.n_modes = N;
        fc.blowup_bound = cfg.blowup_bound;
        const Trajectory traj = integrate(model_initial(N), fc);
        const HKTriple hk = reconstruct(traj);

        double traj_dev = 0.0;
        const InvariantVectorField x1 = InvariantVectorField::basis(1, N);
        const InvariantVectorField x2 = InvariantVectorField::basis(2, N);
        const InvariantVectorField x3 = InvariantVectorField::basis(3, N);
        for (const auto& s : traj.states) {
            traj_dev = std::max(traj_dev, (s.V1 - s.x * x1).sup_abs());
            traj_dev = std::max(traj_dev, (s.V2 - x2).sup_abs());
            traj_dev = std::max(traj_dev, (s.V3 - x3).sup_abs());
        }
        rep.add("model/trajectory_exact", "residual", traj_dev, cfg.tol_model_exact, traj_dev <= cfg.tol_model_exact, sw.ms());

        // componentwise, relative to the component scale (the t1 block
        // grows like 1/x toward the fold)
        double metric_dev = 0.0;
        for (std::size_t i = 0; i < hk.grid.n; ++i) {
            if (!hk.metric[i].valid) continue;
            const double x = hk.grid.x(i);
            const auto g = model_metric_g0(x);
            const std::array<const SField*, 4> have = {&hk.metric[i].g00, &hk.metric[i].theta[0],
                                                       &hk.metric[i].theta[3], &hk.metric[i].theta[5]};
            for (int c = 0; c < 4; ++c) {
                const double want = g[static_cast<std::size_t>(c)];
                const double dev = sup_abs_diff(*have[static_cast<std::size_t>(c)], SField::constant(want, N));
                metric_dev = std::max(metric_dev, dev / std::max(1.0, std::abs(want)));
            }
            for (int off : {1, 2, 4}) metric_dev = std::max(metric_dev, hk.metric[i].theta[static_cast<std::size_t>(off)].sup_abs());
        }
        rep.add("model/metric_matches_g0", "residual", metric_dev, cfg.tol_model_exact, metric_dev <= cfg.tol_model_exact);

        // forms against their global fold profile
        double form_dev = 0.0;
        for (std::size_t i = 0; i < hk.grid.n; ++i) {
            const double x = hk.grid.x(i);
            for (unsigned m : FormField::masks(2)) {
                double want = 0.0;
                if (m == 0b0011u) want = 1.0; // omega_1: dx ^ t1
                double have = hk.omega[0].at(m, i).sup_abs();
                if (m == 0b1100u) want = x;   // omega_1: x t2 ^ t3
                if (want != 0.0) have = sup_abs_diff(hk.omega[0].at(m, i), SField::constant(want, N));
                form_dev = std::max(form_dev, have);
            }
            form_dev = std::max(form_dev, sup_abs_diff(hk.omega[1].at(0b0101u, i), SField::constant(x, N)));
            form_dev = std::max(form_dev, sup_abs_diff(hk.omega[1].at(0b1010u, i), SField::constant(-1.0, N)));
            form_dev = std::max(form_dev, hk.omega[1].at(0b0011u, i).sup_abs());
            form_dev = std::max(form_dev, hk.omega[1].at(0b1001u, i).sup_abs());
            form_dev = std::max(form_dev, hk.omega[1].at(0b0110u, i).sup_abs());
            form_dev = std::max(form_dev, hk.omega[1].at(0b1100u, i).sup_abs());
            form_dev = std::max(form_dev, sup_abs_diff(hk.omega[2].at(0b1001u, i), SField::constant(x, N)));
            form_dev = std::max(form_dev, sup_abs_diff(hk.omega[2].at(0b0110u, i), SField::constant(1.0, N)));
            form_dev = std::max(form_dev, hk.omega[2].at(0b0011u, i).sup_abs());
            form_dev = std::max(form_dev, hk.omega[2].at(0b0101u, i).sup_abs());
            form_dev = std::max(form_dev, hk.omega[2].at(0b1010u, i).sup_abs());
            form_dev = std::max(form_dev, hk.omega[2].at(0b1100u, i).sup_abs());
        }
        rep.add("model/forms_match_fold_profile", "residual", form_dev, cfg.tol_model_exact, form_dev <= cfg.tol_model_exact);

        const auto cl = closedness_residual(hk);
        const double clmax = std::max({cl[0], cl[1], cl[2]});
        rep.add("model/closedness", "residual", clmax, cfg.tol_model_exact, clmax <= cfg.tol_model_exact);

        const auto [mu0, muodd] = mu_fold_residuals(hk);
        rep.add("model/mu_vanishes_and_odd", "residual", std::max(mu0, muodd), cfg.tol_model_exact,
                std::max(mu0, muodd) <= cfg.tol_model_exact);

        // mu scaling consistency with the cubic-volume dilation law:
        // mu(t x) = t mu(x) on the model.
        double mu_scale_dev = 0.0;
        for (std::size_t i = 0; i < hk.grid.n; ++i) {
            const double x = hk.grid.x(i);
            for (double t : cfg.dilation_factors) {
                const double xi = t * x;
                const double fidx = (xi - hk.grid.x0) / hk.grid.h;
                const auto jn = static_cast<std::ptrdiff_t>(std::llround(fidx));
                if (jn < 0 || jn >= static_cast<std::ptrdiff_t>(hk.grid.n) ||
                    std::abs(fidx - static_cast<double>(jn)) > 1e-9)
                    continue;
                mu_scale_dev = std::max(mu_scale_dev,
                                        sup_abs_diff(hk.mu[static_cast<std::size_t>(jn)], t * hk.mu[i]));
            }
        }
        rep.add("model/mu_dilation_scaling", "residual", mu_scale_dev, cfg.tol_dilation,
                mu_scale_dev <= cfg.tol_dilation);
    }

    // --- dilations on the analytic model data
    {
        detail::Stopwatch sw;
        double dev = 0.0;
        const auto g0 = [](double x) { return model_metric_g0(x); };
        const auto model_forms = [](double x) {
            // components in ascending mask order {3,5,6,9,10,12}
            return std::array<std::array<double, 6>, 3>{
                std::array<double, 6>{1.0, 0.0, 0.0, 0.0, 0.0, x},
                std::array<double, 6>{0.0, x, 0.0, 0.0, -1.0, 0.0},
                std::array<double, 6>{0.0, 0.0, 1.0, x, 0.0, 0.0}};
        };
        for (double t : cfg.dilation_factors) {
            const auto pulled = dilation_pullback_diag_metric(t, g0);
            for (int k = 1; k <= 10; ++k) {
                const double x = 0.1 * static_cast<double>(k);
                const auto lhs = pulled(x);
                const auto ref = g0(x);
                const double t3 = t * t * t;
                for (int c = 0; c < 4; ++c) {
                    const double scale = std::max(1.0, std::abs(t3 * ref[static_cast<std::size_t>(c)]));
                    dev = std::max(dev, std::abs(lhs[static_cast<std::size_t>(c)] - t3 * ref[static_cast<std::size_t>(c)]) / scale);
                }
                for (int a = 0; a < 3; ++a) {
                    const auto fa = [&model_forms, a](double xx) { return model_forms(xx)[static_cast<std::size_t>(a)]; };
                    const auto pf = dilation_pullback_form2(t, fa);
                    const auto lhs_f = pf(x);
                    const auto ref_f = fa(x);
                    for (int c = 0; c < 6; ++c) {
                        const double scale = std::max(1.0, std::abs(t3 * ref_f[static_cast<std::size_t>(c)]));
                        dev = std::max(dev, std::abs(lhs_f[static_cast<std::size_t>(c)] - t3 * ref_f[static_cast<std::size_t>(c)]) / scale);
                    }
                }
            }
            // identity pullback
            const auto ident = dilation_pullback_diag_metric(1.0, g0);
            for (int k = 1; k <= 10; ++k) {
                const double x = 0.1 * static_cast<double>(k);
                const auto lhs = ident(x);
                const auto ref = g0(x);
                for (int c = 0; c < 4; ++c)
                    dev = std::max(dev, std::abs(lhs[static_cast<std::size_t>(c)] - ref[static_cast<std::size_t>(c)]));
            }
        }
        rep.add("dilation/cubic_scaling", "residual", dev, cfg.tol_dilation, dev <= cfg.tol_dilation, sw.ms());
    }

    // --- perturbed datum
    {
        detail::Stopwatch sw;
        const NahmFields init = perturbed_initial(cfg.eps, cfg.p.build(N), cfg.q.build(N), cfg.r.build(N));
        // clamp the comparison window so every refinement level measures the
        // residual over the same x-range (the stencil trims 4 end nodes)
        double h_coarse = 0.0;
        for (double h : cfg.h_levels) h_coarse = std::max(h_coarse, h);
        const double window = std::min(cfg.residual_window, cfg.x_max - 5.0 * h_coarse);
        std::vector<double> eq8(cfg.h_levels.size()), dmg(cfg.h_levels.size());
        double wedge_max = 0.0, parity_max = 0.0;
        FoldReport fold{};
        Trajectory finest;
        HKTriple finest_hk;
        for (std::size_t k = 0; k < cfg.h_levels.size(); ++k) {
            FlowConfig fc;
            fc.h = cfg.h_levels[k];
            fc.x_max = cfg.x_max;
            fc.n_modes = N;
            fc.blowup_bound = cfg.blowup_bound;
            Trajectory traj = integrate(init, fc);
            HKTriple hk = reconstruct(traj);
            eq8[k] = flow_residual_max(traj, window);
            const auto cl = closedness_residual(hk);
            dmg[k] = std::max({cl[0], cl[1], cl[2]});
            wedge_max = std::max(wedge_max, wedge_identity_residual(hk));
            const auto par = parity_check(traj);
            parity_max = std::max({parity_max, par[0], par[1], par[2]});
            if (k + 1 == cfg.h_levels.size()) {
                fold = fold_asymptotics(traj, hk);
                finest = std::move(traj);
                finest_hk = std::move(hk);
            }
        }
        // residuals at the roundoff floor have no measurable order: the
        // datum is integrated exactly (e.g. r = 0), report as exact
        constexpr double kOrderFloor = 1e-13;
        for (std::size_t k = 0; k + 1 < cfg.h_levels.size(); ++k) {
            const std::string name = "perturbed/flow_residual_order_h" + std::to_string(k);
            if (eq8[k] < kOrderFloor && eq8[k + 1] < kOrderFloor) {
                rep.add(name, "exact", eq8[k + 1], kOrderFloor, true);
            } else {
                const double order = observed_order(eq8[k], eq8[k + 1]);
                rep.add(name, "order", order, cfg.eq8_order_lo,
                        order >= cfg.eq8_order_lo && order <= cfg.eq8_order_hi);
            }
        }
        for (std::size_t k = 0; k + 1 < cfg.h_levels.size(); ++k) {
            const std::string name = "perturbed/closedness_order_h" + std::to_string(k);
            if (dmg[k] < kOrderFloor && dmg[k + 1] < kOrderFloor) {
                rep.add(name, "exact", dmg[k + 1], kOrderFloor, true);
            } else {
                const double order = observed_order(dmg[k], dmg[k + 1]);
                rep.add(name, "order", order, cfg.domega_order_min, order >= cfg.domega_order_min);
            }
        }
        rep.add("perturbed/wedge_identity", "residual", wedge_max, cfg.tol_wedge, wedge_max <= cfg.tol_wedge);
        rep.add("perturbed/parity", "residual", parity_max, cfg.tol_parity, parity_max <= cfg.tol_parity);
        rep.add("perturbed/v1_slope_exponent", "exponent", fold.v1_exponent, cfg.v1_exp_lo,
                fold.v1_exponent >= cfg.v1_exp_lo && fold.v1_exponent <= cfg.v1_exp_hi, sw.ms());

        // Bryant coframe identities on the fold datum.
        const FormField beta2 = interior_volume(finest.states[finest.fold_index()].V2);
        const FormField beta3 = interior_volume(finest.states[finest.fold_index()].V3);
        const BryantCoframe bc = bryant_coframe(beta2, beta3);
        const auto br = bryant_identity_residuals(bc, beta2, beta3);
        const double brmax = std::max({br[0], br[1], br[2]});
        rep.add("perturbed/bryant_identities", "residual", brmax, cfg.tol_bryant, brmax <= cfg.tol_bryant);

        // tables
        {
            CsvWriter traj_csv(outdir / "nahm_trajectory.csv",
                               {"x", "V1_X1", "V1_X2", "V1_X3", "V2_X1", "V2_X2", "V2_X3",
                                "V3_X1", "V3_X2", "V3_X3", "mu"});
            for (std::size_t i = 0; i < finest.states.size(); ++i) {
                const auto& s = finest.states[i];
                traj_csv.row({s.x, s.V1.c1.sup_abs(), s.V1.c2.sup_abs(), s.V1.c3.sup_abs(),
                              s.V2.c1.sup_abs(), s.V2.c2.sup_abs(), s.V2.c3.sup_abs(),
                              s.V3.c1.sup_abs(), s.V3.c2.sup_abs(), s.V3.c3.sup_abs(),
                              finest_hk.mu[i].sup_abs()});
            }
        }
        {
            const auto table = flow_residual_table(finest);
            const auto cl_tab = closedness_table(finest_hk);
            const auto wg_tab = wedge_identity_table(finest_hk);
            // odd cubic fit of mu for the per-node fit deviation column
            std::vector<double> xs, ys;
            for (std::size_t i = 0; i < finest.states.size(); ++i) {
                xs.push_back(finest.states[i].x);
                ys.push_back(finest_hk.mu[i].sup_abs() * (finest.states[i].x < 0 ? -1.0 : 1.0));
            }
            auto [muc, mures] = fit_odd_cubic(xs, ys);
            (void)mures;
            CsvWriter res_csv(outdir / "nahm_residuals.csv",
                              {"x", "flow_residual", "domega1", "domega2", "domega3", "wedge_identity",
                               "mu", "mu_fit_deviation"});
            for (const auto& [x, r] : table) {
                const auto i = static_cast<std::size_t>(std::llround((x - finest_hk.grid.x0) / finest_hk.grid.h));
                const double mu_sup = finest_hk.mu[i].sup_abs() * (x < 0 ? -1.0 : 1.0);
                const double fit = muc[0] * x + muc[1] * x * x * x;
                res_csv.row({x, r, cl_tab[0][i], cl_tab[1][i], cl_tab[2][i], wg_tab[i], mu_sup,
                             std::abs(mu_sup - fit)});
            }
        }
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Laplacian suite.

namespace detail {

inline std::vector<double> random_band_limited(std::mt19937_64& rng, std::size_t pts) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, 6> ac{}, bs{};
    for (auto& v : ac) v = u(rng);
    for (auto& v : bs) v = u(rng);
    std::vector<double> g(pts);
    for (std::size_t i = 0; i < pts; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(pts - 1);
        double s = 0.0;
        for (int k = 0; k < 6; ++k)
            s += ac[static_cast<std::size_t>(k)] * std::cos(k * std::numbers::pi * x) +
                 bs[static_cast<std::size_t>(k)] * std::sin(k * std::numbers::pi * x);
        g[i] = s;
    }
    return g;
}

inline std::pair<double, int> random_admissible_mode(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lu(0.8, 6.0);
    const double lambda = lu(rng);
    const int nmax = static_cast<int>(lambda * lambda);
    std::uniform_int_distribution<int> nu(-nmax, nmax);
    return {lambda, nu(rng)};
}

inline double manufactured_error(double lambda, int n, std::size_t m) {
    ModeProblem p;
    p.lambda = lambda;
    p.n = n;
    p.rhs.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(m);
        p.rhs[i] = (std::numbers::pi * std::numbers::pi + lambda * lambda +
                    static_cast<double>(n) * static_cast<double>(n) * x * x) *
                   std::sin(std::numbers::pi * x);
    }
    const ModeSolution s = solve_mode(p);
    double err = 0.0;
    for (std::size_t i = 0; i <= m; ++i)
        err = std::max(err, std::abs(s.f[i] - std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(m))));
    return err;
}

} // namespace detail

inline VerificationReport run_laplacian_suite(const LaplacianConfig& cfg, std::uint64_t seed,
                                              const std::filesystem::path& outdir) {
    cfg.validate();
    std::filesystem::create_directories(outdir);
    VerificationReport rep;
    rep.suite = "laplacian";
    std::mt19937_64 rng(seed);
    const std::size_t M = cfg.grid_intervals;

    // --- manufactured-solution order for random admissible modes
    {
        detail::Stopwatch sw;
        double order_lo = 1e300, order_hi = -1e300;
        for (std::size_t t = 0; t < cfg.order_trials; ++t) {
            const auto [lambda, n] = detail::random_admissible_mode(rng);
            const double e1 = detail::manufactured_error(lambda, n, M);
            const double e2 = detail::manufactured_error(lambda, n, 2 * M);
            const double order = observed_order(e1, e2);
            order_lo = std::min(order_lo, order);
            order_hi = std::max(order_hi, order);
        }
        rep.add("solver/manufactured_order_min", "order", order_lo, cfg.order_lo,
                order_lo >= cfg.order_lo && order_hi <= cfg.order_hi, sw.ms());
        rep.add("solver/manufactured_order_max", "order", order_hi, cfg.order_hi,
                order_lo >= cfg.order_lo && order_hi <= cfg.order_hi);
    }

    // --- energy inequality sweep; the H2/L2 ratio is reported for
    // stability (no sharp constant is asserted, only finiteness)
    {
        detail::Stopwatch sw;
        std::size_t passes = 0;
        double h2_ratio = 0.0;
        const double h = 1.0 / static_cast<double>(M);
        for (std::size_t t = 0; t < cfg.energy_trials; ++t) {
            const auto [lambda, n] = detail::random_admissible_mode(rng);
            ModeProblem p;
            p.lambda = lambda;
            p.n = n;
            p.bc0 = (t % 2 == 0) ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
            p.rhs = detail::random_band_limited(rng, M + 1);
            const ModeSolution s = solve_mode(p);
            if (s.energy_pass) ++passes;

            std::vector<double> sq(M + 1, 0.0);
            for (std::size_t i = 1; i < M; ++i) {
                const double d1 = (s.f[i + 1] - s.f[i - 1]) / (2.0 * h);
                const double d2 = (s.f[i + 1] - 2.0 * s.f[i] + s.f[i - 1]) / (h * h);
                sq[i] = s.f[i] * s.f[i] + d1 * d1 + d2 * d2;
            }
            std::vector<double> gs(M + 1);
            for (std::size_t i = 0; i <= M; ++i) gs[i] = p.rhs[i] * p.rhs[i];
            h2_ratio = std::max(h2_ratio, std::sqrt(trapezoid(sq, h) / std::max(trapezoid(gs, h), 1e-300)));
        }
        rep.add("energy/inequality_sweep", "count", static_cast<double>(passes),
                static_cast<double>(cfg.energy_trials), passes == cfg.energy_trials, sw.ms());
        rep.add("energy/h2_over_l2_ratio", "ratio", h2_ratio, 0.0, std::isfinite(h2_ratio));
    }

    // --- expansion laws (folded equation)
    {
        detail::Stopwatch sw;
        ModeProblem p;
        p.lambda = 2.0;
        p.n = 1;
        p.bc0 = BoundaryCondition::Neumann;
        p.rhs.assign(M + 1, 1.0);
        p.folded = true;
        const ModeSolution s = solve_mode(p);
        const auto laws = expansion_law_residuals(p, s);
        rep.add("expansion/f2_law_neumann", "residual", laws.f2_law, cfg.tol_expansion_law,
                laws.f2_law <= cfg.tol_expansion_law, sw.ms());
        rep.add("expansion/f3_law_neumann", "residual", laws.f3_law, cfg.tol_expansion_law,
                laws.f3_law <= cfg.tol_expansion_law);

        ModeProblem pd;
        pd.lambda = 0.0;
        pd.n = 0;
        pd.rhs.assign(M + 1, 1.0);
        pd.folded = true;
        const ModeSolution sd = solve_mode(pd);
        const double f3_err = std::abs(sd.expansion[3] + 1.0 / 6.0) / (1.0 / 6.0);
        rep.add("expansion/f3_closed_form_dirichlet", "residual", f3_err, cfg.tol_expansion_law,
                f3_err <= cfg.tol_expansion_law);
        const double f0f2 = std::max(std::abs(sd.expansion[0]), std::abs(sd.expansion[2]));
        rep.add("expansion/dirichlet_f0_f2_vanish", "residual", f0f2, cfg.tol_trace_vanish,
                f0f2 <= cfg.tol_trace_vanish);
    }

    // --- commuted identity
    {
        detail::Stopwatch sw;
        const auto manufactured_residual = [](std::size_t m) {
            ModeProblem q;
            q.lambda = 3.0;
            q.n = 2;
            q.rhs.resize(m + 1);
            std::vector<double> f(m + 1);
            for (std::size_t i = 0; i <= m; ++i) {
                const double x = static_cast<double>(i) / static_cast<double>(m);
                f[i] = std::sin(std::numbers::pi * x);
                q.rhs[i] = (std::numbers::pi * std::numbers::pi + 9.0 + 4.0 * x * x) * f[i];
            }
            return commuted_identity_residual(q, f, q.rhs);
        };
        const double r1 = manufactured_residual(M);
        const double r2 = manufactured_residual(2 * M);
        const double order = observed_order(r1, r2);
        rep.add("commuted/identity_order", "order", order, cfg.order_lo,
                order >= cfg.order_lo && order <= cfg.order_hi, sw.ms());

        ModeProblem p;
        p.lambda = 3.0;
        p.n = 3;
        p.rhs = detail::random_band_limited(rng, M + 1);
        const ModeSolution s = solve_mode(p);
        const double rsolve = commuted_identity_residual(p, s.f, p.rhs);
        rep.add("commuted/discrete_solution_exact", "residual", rsolve, cfg.tol_commuted_solution,
                rsolve <= cfg.tol_commuted_solution);
    }

    // --- Dirichlet/Neumann assembly pattern
    {
        detail::Stopwatch sw;
        std::array<std::array<std::vector<double>, 3>, 3> v;
        std::vector<double> g(M + 1);
        for (std::size_t i = 0; i <= M; ++i)
            g[i] = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(M));
        for (auto& row : v)
            for (auto& e : row) e.assign(M + 1, 0.0);
        for (std::size_t i = 0; i <= M; ++i) {
            v[0][0][i] = 2.0 * g[i];
            v[1][1][i] = -g[i];
            v[2][2][i] = -g[i];
        }
        const DnAssembly a = dn_assemble(v, 3.0, 2);
        bool pattern_ok = true;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                pattern_ok = pattern_ok && (a.bc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                                            (((i == 0) != (j == 0)) ? BoundaryCondition::Neumann
                                                                    : BoundaryCondition::Dirichlet));
        double offdiag = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                for (double t : a.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].f)
                    offdiag = std::max(offdiag, std::abs(t));
            }
        rep.add("assembly/bc_pattern", "status", pattern_ok ? 1.0 : 0.0, 1.0, pattern_ok, sw.ms());
        rep.add("assembly/zero_offdiagonal", "residual", offdiag, cfg.tol_assembly_zero,
                offdiag <= cfg.tol_assembly_zero);

        bool threw_trace = false;
        try {
            auto bad = v;
            for (std::size_t i = 0; i <= M; ++i) bad[0][0][i] = 3.0 * g[i];
            dn_assemble(bad, 3.0, 2);
        } catch (const std::invalid_argument&) {
            threw_trace = true;
        }
        rep.add("assembly/trace_violation_rejected", "status", threw_trace ? 1.0 : 0.0, 1.0, threw_trace);

        bool threw_compat = false;
        try {
            auto bad = v;
            for (std::size_t i = 0; i <= M; ++i) {
                bad[0][1][i] = g[i];
                bad[1][0][i] = g[i];
            }
            dn_assemble(bad, 0.0, 0);
        } catch (const std::invalid_argument&) {
            threw_compat = true;
        }
        rep.add("assembly/zero_mode_compatibility_rejected", "status", threw_compat ? 1.0 : 0.0, 1.0, threw_compat);
    }

    // --- per-mode solves from the config list (CSV output)
    {
        detail::Stopwatch sw;
        CsvWriter summary(outdir / "modes.csv",
                          {"lambda", "n", "neumann_at_fold", "f0", "f1", "f2", "f3", "energy_lhs",
                           "energy_rhs", "energy_pass"});
        double residual_max = 0.0;
        int file_index = 0;
        for (const auto& [lambda, n] : cfg.modes) {
            ModeProblem p;
            p.lambda = lambda;
            p.n = n;
            p.bc0 = (file_index % 2 == 1) ? BoundaryCondition::Neumann : BoundaryCondition::Dirichlet;
            p.rhs = detail::random_band_limited(rng, M + 1);
            p.folded = true;
            const ModeSolution s = solve_mode(p);

            // multiply-back residual, normalized by the backward-error
            // scale |A| |f| (the raw residual of a stable direct solve)
            const auto back = apply_mode_operator(p, s.f);
            double mb = 0.0, fn = 0.0;
            const std::size_t lo = (p.bc0 == BoundaryCondition::Neumann) ? 0 : 1;
            for (std::size_t i = lo; i < M; ++i) {
                const double want = p.x(i) * (p.rhs[i] - s.mean_shift);
                mb = std::max(mb, std::abs(back[i] - want));
                fn = std::max(fn, std::abs(s.f[i]));
            }
            const double opnorm = 4.0 * static_cast<double>(M) * static_cast<double>(M) +
                                  lambda * lambda + static_cast<double>(n) * static_cast<double>(n);
            residual_max = std::max(residual_max, mb / std::max(opnorm * fn, 1.0));

            CsvWriter mode_csv(outdir / ("mode_" + std::to_string(file_index) + ".csv"), {"x", "f", "g"});
            for (std::size_t i = 0; i <= M; ++i) mode_csv.row({p.x(i), s.f[i], p.rhs[i]});
            summary.row({lambda, static_cast<double>(n), p.bc0 == BoundaryCondition::Neumann ? 1.0 : 0.0,
                         s.expansion[0], s.expansion[1], s.expansion[2], s.expansion[3], s.energy_lhs,
                         s.energy_rhs, s.energy_pass || !s.energy_defined ? 1.0 : 0.0});
            ++file_index;
        }
        rep.add("solver/multiply_back_residual", "residual", residual_max, cfg.tol_solver_residual,
                residual_max <= cfg.tol_solver_residual, sw.ms());
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Cotangent suite.

inline VerificationReport run_cotangent_suite(const CotangentConfig& cfg, const std::filesystem::path& outdir) {
    cfg.validate();
    std::filesystem::create_directories(outdir);
    VerificationReport rep;
    rep.suite = "cotangent";
    FiberChart chart(cfg.n_radial, cfg.n_angular);

    // --- A B = r and radial profile table
    {
        detail::Stopwatch sw;
        double dev = 0.0;
        std::vector<Deformation> defs;
        for (const auto& s : cfg.deformations) defs.push_back(s.build());
        std::vector<std::string> header = {"r", "A", "B"};
        for (const auto& d : defs) header.push_back("phi_m" + std::to_string(d.m));
        CsvWriter csv(outdir / "radial_profiles.csv", header);
        for (double r : chart.radial.nodes) {
            const auto [A, B] = omega1_coefficients(r);
            dev = std::max(dev, std::abs(A * B - r) / r);
            std::vector<double> row = {r, A, B};
            for (const auto& d : defs) row.push_back(phi_profile(d, r));
            csv.row(row);
        }
        rep.add("fiber/product_identity_AB", "residual", dev, cfg.tol_ab_identity, dev <= cfg.tol_ab_identity, sw.ms());
    }

    // --- deformation identity for every configured frequency
    {
        detail::Stopwatch sw;
        double res = 0.0;
        for (const auto& s : cfg.deformations) res = std::max(res, deformation_identity_residual(s.build(), chart));
        rep.add("fiber/dbar_contraction_identity", "residual", res, cfg.tol_deformation_identity,
                res <= cfg.tol_deformation_identity, sw.ms());
        double m1 = 0.0;
        for (const auto& s : cfg.deformations)
            if (s.m == 1) m1 = std::max(m1, symplectic_derivative_sup(s.build(), chart));
        rep.add("fiber/frequency_one_preserves_omega_c", "residual", m1, cfg.tol_symplectic_preserve,
                m1 <= cfg.tol_symplectic_preserve);
    }

    // --- invariant polynomials of the standard structure vanish
    {
        detail::Stopwatch sw;
        double pmax = 0.0;
        const auto form = standard_omega1_fiber();
        for (int n = 1; n <= cfg.nmax; ++n) pmax = std::max(pmax, std::abs(invariant_polynomial(form, n, chart)));
        rep.add("invariants/standard_vanish", "residual", pmax, cfg.tol_invariant_zero,
                pmax <= cfg.tol_invariant_zero, sw.ms());
    }

    // --- frequency diagonality, linearity, kappa
    {
        detail::Stopwatch sw;
        double offdiag = 0.0, kappa_spread = 0.0, linearity = 0.0;
        std::vector<std::complex<double>> kappas;
        for (const auto& s : cfg.deformations) {
            if (s.m < 1) continue;
            const Deformation d = s.build();
            const auto v = variation_of_invariants({d}, cfg.nmax, chart);
            for (int n = 1; n <= cfg.nmax; ++n)
                if (n != d.m) offdiag = std::max(offdiag, std::abs(v.pdot[static_cast<std::size_t>(n - 1)]));
            if (d.m >= 2) kappas.push_back(v.pdot[static_cast<std::size_t>(d.m - 1)] / d.amplitude);

            Deformation half = d;
            half.amplitude *= 0.5;
            const auto vh = variation_of_invariants({half}, cfg.nmax, chart);
            for (int n = 1; n <= cfg.nmax; ++n)
                linearity = std::max(linearity, std::abs(2.0 * vh.pdot[static_cast<std::size_t>(n - 1)] -
                                                         v.pdot[static_cast<std::size_t>(n - 1)]));
        }
        for (std::size_t i = 0; i + 1 < kappas.size(); ++i)
            kappa_spread = std::max(kappa_spread, std::abs(kappas[i + 1] - kappas[i]));
        rep.add("invariants/frequency_diagonality", "residual", offdiag, cfg.tol_diagonality,
                offdiag <= cfg.tol_diagonality, sw.ms());
        rep.add("invariants/amplitude_linearity", "residual", linearity, cfg.tol_linearity,
                linearity <= cfg.tol_linearity);
        rep.add("invariants/kappa_constant", "residual", kappa_spread, cfg.tol_kappa,
                kappa_spread <= cfg.tol_kappa);

        // superposition of two frequencies
        std::vector<Deformation> pair;
        for (const auto& s : cfg.deformations)
            if (s.m == 2 || s.m == 3) pair.push_back(s.build());
        if (pair.size() == 2) {
            const auto vab = variation_of_invariants(pair, cfg.nmax, chart);
            const auto va = variation_of_invariants({pair[0]}, cfg.nmax, chart);
            const auto vb = variation_of_invariants({pair[1]}, cfg.nmax, chart);
            double sup = 0.0;
            for (int n = 0; n < cfg.nmax; ++n)
                sup = std::max(sup, std::abs(vab.pdot[static_cast<std::size_t>(n)] -
                                             va.pdot[static_cast<std::size_t>(n)] -
                                             vb.pdot[static_cast<std::size_t>(n)]));
            rep.add("invariants/superposition", "residual", sup, cfg.tol_linearity, sup <= cfg.tol_linearity);
        }

        CsvWriter csv(outdir / "variations.csv", {"n", "pdot_re", "pdot_im"});
        std::vector<Deformation> all;
        for (const auto& s : cfg.deformations) all.push_back(s.build());
        const auto vall = variation_of_invariants(all, cfg.nmax, chart);
        for (int n = 1; n <= cfg.nmax; ++n)
            csv.row({static_cast<double>(n), vall.pdot[static_cast<std::size_t>(n - 1)].real(),
                     vall.pdot[static_cast<std::size_t>(n - 1)].imag()});
    }

    // --- first-order consistency of the perturbed invariant with the
    // variation formula (sub-disc, with the boundary-motion correction)
    {
        detail::Stopwatch sw;
        double worst = 0.0;
        for (const auto& s : cfg.deformations) {
            if (s.m < 2) continue;
            const Deformation d = s.build();
            const auto base = standard_omega1_fiber();
            const auto pert = deformation_deta1_fiber(d);
            const double eps = cfg.fd_eps;
            const FiberForm2 combined = [&base, &pert, eps](double r, double phi) {
                return base(r, phi) + eps * pert(r, phi);
            };
            const auto p1 = invariant_polynomial_subdisc(combined, d.m, cfg.rho, chart);
            const auto p0 = invariant_polynomial_subdisc(base, d.m, cfg.rho, chart);
            const auto slope = (p1 - p0) / eps;
            const auto bnd = boundary_circle_integral({d}, d.m, cfg.rho, chart);
            const auto vrho = variation_of_invariants({d}, d.m, chart, cfg.rho);
            const std::complex<double> want = std::complex<double>(0.0, 2.0 * std::numbers::pi * d.m) *
                                              vrho.pdot[static_cast<std::size_t>(d.m - 1)];
            worst = std::max(worst, std::abs((slope - bnd) - want) / std::max(1.0, std::abs(want)));
        }
        rep.add("invariants/first_order_consistency", "residual", worst, cfg.tol_consistency,
                worst <= cfg.tol_consistency, sw.ms());
    }

    // --- singular-weight quadrature cross-check against the substitution oracle
    {
        detail::Stopwatch sw;
        double dev = 0.0;
        for (int k = 0; k <= 12; ++k) {
            const double gauss = chart.radial.integrate([k](double r) { return std::pow(r, k); });
            const double oracle = adaptive_simpson(
                [k](double t) { return std::pow(std::sin(t), k); }, 0.0, 0.5 * std::numbers::pi);
            dev = std::max(dev, std::abs(gauss - oracle) / std::abs(oracle));
        }
        rep.add("quadrature/gauss_vs_substitution", "residual", dev, cfg.tol_quadrature_cross,
                dev <= cfg.tol_quadrature_cross, sw.ms());
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Combined runner.

enum class Suite { Nahm, Laplacian, Cotangent, All };

inline VerificationReport run_suite(Suite which, const RunConfig& cfg, const std::filesystem::path& outdir) {
    cfg.validate();
    std::filesystem::create_directories(outdir);
    VerificationReport rep;
    rep.suite = (which == Suite::All) ? "all"
                : (which == Suite::Nahm) ? "nahm"
                : (which == Suite::Laplacian) ? "laplacian"
                                              : "cotangent";
    rep.seed = cfg.seed;
    rep.config_hash = config_hash(cfg);

    // the effective config is part of the artifacts (the report stores
    // only its hash)
    {
        std::ofstream out(outdir / "config.json");
        out << config_to_json(cfg).dump(2) << "\n";
    }

    const auto run_one = [&](VerificationReport r, const char* name) {
        r.seed = cfg.seed;
        r.config_hash = rep.config_hash;
        write_report(r, outdir / name / "summary.json");
        for (auto& c : r.checks) c.name = std::string(name) + "/" + c.name;
        rep.append(r);
    };
    if (which == Suite::Nahm || which == Suite::All)
        run_one(run_nahm_suite(cfg.nahm, outdir / "nahm"), "nahm");
    if (which == Suite::Laplacian || which == Suite::All)
        run_one(run_laplacian_suite(cfg.laplacian, cfg.seed, outdir / "laplacian"), "laplacian");
    if (which == Suite::Cotangent || which == Suite::All)
        run_one(run_cotangent_suite(cfg.cotangent, outdir / "cotangent"), "cotangent");

    write_report(rep, outdir / "report.json");
    return rep;
}

} // namespace foldhk
