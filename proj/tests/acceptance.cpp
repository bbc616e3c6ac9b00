// Acceptance suite: one line per criterion, each pinned to its stated
// tolerance and runtime budget.  Exits nonzero if any criterion fails.
//
// Usage: foldhk_acceptance [path-to-foldhk-cli]
// The CLI path enables the end-to-end checks of criterion 6.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "foldhk/foldhk.hpp"

using namespace foldhk;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    bool ok = true;
    std::vector<std::string> notes;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void require(bool cond, const std::string& what, double value, double bound) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s: %.6g (bound %.3g)", what.c_str(), value, bound);
        notes.push_back(buf);
        if (!cond) {
            ok = false;
            notes.back() += "  <-- FAIL";
        }
    }

    double elapsed_s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    void finish(double budget_s) {
        const double t = elapsed_s();
        if (t >= budget_s) {
            ok = false;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "runtime %.2fs exceeded budget %.0fs  <-- FAIL", t, budget_s);
            notes.push_back(buf);
        }
        std::printf("[%s] %s (%.2f s)\n", ok ? "PASS" : "FAIL", name.c_str(), t);
        if (!ok) {
            for (const auto& n : notes) std::printf("        %s\n", n.c_str());
            ++g_failures;
        }
    }
};

constexpr std::size_t N = 64;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

void criterion_1_exact_model() {
    Criterion c("criterion 1: exact-model flow and reconstruction");
    FlowConfig cfg;
    cfg.h = 1.0 / 100;
    cfg.x_max = 0.5;
    cfg.n_modes = N;
    const Trajectory traj = integrate(model_initial(N), cfg);
    double traj_dev = 0.0;
    for (const auto& s : traj.states) {
        traj_dev = std::max(traj_dev, (s.V1 - s.x * InvariantVectorField::basis(1, N)).sup_abs());
        traj_dev = std::max(traj_dev, (s.V2 - InvariantVectorField::basis(2, N)).sup_abs());
        traj_dev = std::max(traj_dev, (s.V3 - InvariantVectorField::basis(3, N)).sup_abs());
    }
    c.require(traj_dev <= 1e-12, "trajectory matches (x X1, X2, X3)", traj_dev, 1e-12);

    const HKTriple hk = reconstruct(traj);
    double metric_dev = 0.0;
    for (std::size_t i = 0; i < hk.grid.n; ++i) {
        if (!hk.metric[i].valid) continue;
        const auto g = model_metric_g0(hk.grid.x(i));
        metric_dev = std::max(metric_dev, sup_abs_diff(hk.metric[i].g00, SField::constant(g[0], N)));
        metric_dev = std::max(metric_dev, sup_abs_diff(hk.metric[i].theta[0], SField::constant(g[1], N)));
        metric_dev = std::max(metric_dev, sup_abs_diff(hk.metric[i].theta[3], SField::constant(g[2], N)));
        metric_dev = std::max(metric_dev, sup_abs_diff(hk.metric[i].theta[5], SField::constant(g[3], N)));
        for (int off : {1, 2, 4})
            metric_dev = std::max(metric_dev, hk.metric[i].theta[static_cast<std::size_t>(off)].sup_abs());
    }
    c.require(metric_dev <= 1e-12, "metric components match the fold profile", metric_dev, 1e-12);
    c.finish(1.0);
}

void criterion_2_perturbed() {
    Criterion c("criterion 2: perturbed flow (eps = 0.1, N = 64, x_max = 0.5)");
    const double eps = 0.1;
    const auto p = SField::harmonic(1, 1.0, -0.5 * std::numbers::pi, N); // sin(2 pi s)
    const auto q = SField::harmonic(1, 0.1, 0.0, N);                     // 0.1 cos(2 pi s)
    const auto r = SField::harmonic(1, 0.1, -0.5 * std::numbers::pi, N); // 0.1 sin(2 pi s)
    const NahmFields init = perturbed_initial(eps, p, q, r);

    const double hs[3] = {1.0 / 50, 1.0 / 100, 1.0 / 200};
    double eq8[3], dw[3], wedge_max = 0.0, parity_max = 0.0;
    FoldReport fold{};
    for (int k = 0; k < 3; ++k) {
        FlowConfig cfg;
        cfg.h = hs[k];
        cfg.x_max = 0.5;
        cfg.n_modes = N;
        const Trajectory traj = integrate(init, cfg);
        const HKTriple hk = reconstruct(traj);
        eq8[k] = flow_residual_max(traj, 0.4);
        const auto cl = closedness_residual(hk);
        dw[k] = std::max({cl[0], cl[1], cl[2]});
        wedge_max = std::max(wedge_max, wedge_identity_residual(hk));
        const auto par = parity_check(traj);
        parity_max = std::max({parity_max, par[0], par[1], par[2]});
        if (k == 2) fold = fold_asymptotics(traj, hk);
    }
    for (int k = 0; k < 2; ++k) {
        const double order = observed_order(eq8[k], eq8[k + 1]);
        c.require(order >= 3.7 && order <= 4.3, "flow-equation residual self-convergence order", order, 3.7);
    }
    for (int k = 0; k < 2; ++k) {
        const double order = observed_order(dw[k], dw[k + 1]);
        c.require(order >= 1.8, "closedness residual self-convergence order", order, 1.8);
    }
    c.require(wedge_max <= 1e-12, "pointwise wedge identity", wedge_max, 1e-12);
    c.require(parity_max <= 1e-10, "parity residuals", parity_max, 1e-10);
    c.require(fold.v1_exponent >= 2.7 && fold.v1_exponent <= 3.3, "leading-slope remainder exponent",
              fold.v1_exponent, 2.7);
    c.finish(30.0);
}

void criterion_3_dilation() {
    Criterion c("criterion 3: dilation scaling of the model metric");
    double dev = 0.0;
    const auto g0 = [](double x) { return model_metric_g0(x); };
    for (double t : {0.5, 2.0}) {
        const auto pulled = dilation_pullback_diag_metric(t, g0);
        for (int k = 1; k <= 10; ++k) {
            const double x = 0.1 * static_cast<double>(k);
            const auto lhs = pulled(x);
            const auto ref = g0(x);
            const double t3 = t * t * t;
            for (int i = 0; i < 4; ++i) {
                const double want = t3 * ref[static_cast<std::size_t>(i)];
                dev = std::max(dev, std::abs(lhs[static_cast<std::size_t>(i)] - want) / std::max(1.0, std::abs(want)));
            }
        }
    }
    c.require(dev <= 1e-14, "h_t^* g0 = t^3 g0 on a 10-point grid, t in {1/2, 2}", dev, 1e-14);
    c.finish(1.0);
}

void criterion_4_mode_solver() {
    Criterion c("criterion 4: folded Laplacian mode solver (M = 512)");
    const std::size_t M = 512;
    std::mt19937_64 rng(20250809);

    // manufactured order, 5 random admissible modes
    {
        std::uniform_real_distribution<double> lu(0.8, 6.0);
        for (int t = 0; t < 5; ++t) {
            const double lambda = lu(rng);
            const int nmax = static_cast<int>(lambda * lambda);
            std::uniform_int_distribution<int> nu(-nmax, nmax);
            const int n = nu(rng);
            double errs[2];
            const std::size_t Ms[2] = {M, 2 * M};
            for (int k = 0; k < 2; ++k) {
                ModeProblem pr;
                pr.lambda = lambda;
                pr.n = n;
                pr.rhs.resize(Ms[k] + 1);
                for (std::size_t i = 0; i <= Ms[k]; ++i) {
                    const double x = static_cast<double>(i) / static_cast<double>(Ms[k]);
                    pr.rhs[i] = (std::numbers::pi * std::numbers::pi + lambda * lambda +
                                 static_cast<double>(n) * static_cast<double>(n) * x * x) *
                                std::sin(std::numbers::pi * x);
                }
                const ModeSolution s = solve_mode(pr);
                double e = 0.0;
                for (std::size_t i = 0; i <= Ms[k]; ++i)
                    e = std::max(e, std::abs(s.f[i] - std::sin(std::numbers::pi * static_cast<double>(i) /
                                                               static_cast<double>(Ms[k]))));
                errs[k] = e;
            }
            const double order = observed_order(errs[0], errs[1]);
            c.require(order >= 1.8 && order <= 2.2, "manufactured-solution order", order, 1.8);
        }
    }

    // energy inequality sweep
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0), lu(0.8, 6.0);
        std::size_t passes = 0;
        for (int t = 0; t < 100; ++t) {
            const double lambda = lu(rng);
            const int nmax = static_cast<int>(lambda * lambda);
            std::uniform_int_distribution<int> nu(-nmax, nmax);
            ModeProblem pr;
            pr.lambda = lambda;
            pr.n = nu(rng);
            pr.bc0 = (t % 2 == 0) ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
            pr.rhs.resize(M + 1);
            std::array<double, 6> ac{}, bs{};
            for (auto& v : ac) v = u(rng);
            for (auto& v : bs) v = u(rng);
            for (std::size_t i = 0; i <= M; ++i) {
                const double x = static_cast<double>(i) / static_cast<double>(M);
                double s = 0.0;
                for (int k = 0; k < 6; ++k)
                    s += ac[static_cast<std::size_t>(k)] * std::cos(k * std::numbers::pi * x) +
                         bs[static_cast<std::size_t>(k)] * std::sin(k * std::numbers::pi * x);
                pr.rhs[i] = s;
            }
            if (solve_mode(pr).energy_pass) ++passes;
        }
        c.require(passes == 100, "energy inequality trials passed", static_cast<double>(passes), 100);
    }

    // expansion laws at 1%
    {
        ModeProblem pr;
        pr.lambda = 2.0;
        pr.n = 1;
        pr.bc0 = BoundaryCondition::Neumann;
        pr.rhs.assign(M + 1, 1.0);
        pr.folded = true;
        const ModeSolution s = solve_mode(pr);
        const auto laws = expansion_law_residuals(pr, s);
        c.require(laws.f2_law <= 0.01, "curvature coefficient law f2 = lambda^2 f0 / 2", laws.f2_law, 0.01);
        c.require(laws.f3_law <= 0.01, "cubic coefficient law f3 = (lambda^2 f1 - g0)/6", laws.f3_law, 0.01);

        ModeProblem pz;
        pz.lambda = 0.0;
        pz.n = 0;
        pz.rhs.assign(M + 1, 1.0);
        pz.folded = true;
        const ModeSolution sz = solve_mode(pz);
        const double f3_err = std::abs(sz.expansion[3] + 1.0 / 6.0) / (1.0 / 6.0);
        c.require(f3_err <= 0.01, "closed-form cubic coefficient -1/6", f3_err, 0.01);
    }

    // commuted identity converges at order 2
    {
        const auto res = [](std::size_t m) {
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
        const double order = observed_order(res(M), res(2 * M));
        c.require(order >= 1.8 && order <= 2.2, "commuted identity residual order", order, 1.8);
    }

    // structural Dirichlet/Neumann assembly
    {
        std::array<std::array<std::vector<double>, 3>, 3> v;
        for (auto& row : v)
            for (auto& e : row) e.assign(M + 1, 0.0);
        for (std::size_t i = 0; i <= M; ++i) {
            const double g = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(M));
            v[0][0][i] = 2.0 * g;
            v[1][1][i] = -g;
            v[2][2][i] = -g;
            v[1][2][i] = 0.3 * g;
            v[2][1][i] = 0.3 * g;
            v[0][1][i] = 0.2 * g;
            v[1][0][i] = 0.2 * g;
        }
        const DnAssembly a = dn_assemble(v, 3.0, 2);
        bool pattern = true;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                pattern = pattern && (a.bc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                                      (((i == 0) != (j == 0)) ? BoundaryCondition::Neumann
                                                              : BoundaryCondition::Dirichlet));
        c.require(pattern, "boundary-condition pattern on all 9 entries", pattern ? 1.0 : 0.0, 1.0);
    }
    c.finish(10.0);
}

void criterion_5_cotangent() {
    Criterion c("criterion 5: cotangent fiber model");
    FiberChart chart(64, 64);

    double ab = 0.0;
    for (double r : chart.radial.nodes) {
        const auto [A, B] = omega1_coefficients(r);
        ab = std::max(ab, std::abs(A * B - r) / r);
    }
    c.require(ab <= 1e-14, "product identity A B = r", ab, 1e-14);

    double eq61 = 0.0;
    for (int m = 1; m <= 6; ++m) {
        Deformation d{m, harmonic_phi_norm(m), {1.0, 0.0}};
        eq61 = std::max(eq61, deformation_identity_residual(d, chart));
    }
    c.require(eq61 <= 1e-12, "contraction identity residual, m = 1..6", eq61, 1e-12);

    double pstd = 0.0;
    const auto form = standard_omega1_fiber();
    for (int n = 1; n <= 6; ++n) pstd = std::max(pstd, std::abs(invariant_polynomial(form, n, chart)));
    c.require(pstd <= 1e-10, "standard invariant polynomials vanish, n = 1..6", pstd, 1e-10);

    double offdiag = 0.0, lin = 0.0, kappa_spread = 0.0;
    std::vector<std::complex<double>> kappas;
    for (int m = 2; m <= 6; ++m) {
        Deformation d{m, harmonic_phi_norm(m), {0.8, -0.4}};
        const auto rep = variation_of_invariants({d}, 6, chart);
        for (int n = 1; n <= 6; ++n)
            if (n != m) offdiag = std::max(offdiag, std::abs(rep.pdot[static_cast<std::size_t>(n - 1)]));
        kappas.push_back(rep.pdot[static_cast<std::size_t>(m - 1)] / d.amplitude);
        Deformation dh = d;
        dh.amplitude *= 0.5;
        const auto reph = variation_of_invariants({dh}, 6, chart);
        for (int n = 0; n < 6; ++n)
            lin = std::max(lin, std::abs(2.0 * reph.pdot[static_cast<std::size_t>(n)] -
                                         rep.pdot[static_cast<std::size_t>(n)]));
    }
    for (std::size_t i = 0; i + 1 < kappas.size(); ++i)
        kappa_spread = std::max(kappa_spread, std::abs(kappas[i + 1] - kappas[i]));
    c.require(offdiag <= 1e-10, "frequency diagonality of the variation", offdiag, 1e-10);
    c.require(lin <= 1e-10, "amplitude linearity of the variation", lin, 1e-10);
    c.require(kappa_spread <= 1e-8, "normalization ratio constant across m = 2..6", kappa_spread, 1e-8);

    double consistency = 0.0;
    {
        const double rho = 0.9, eps = 1e-3;
        for (int m : {2, 3, 4}) {
            Deformation d{m, harmonic_phi_norm(m), {1.0, 0.0}};
            const auto pert = deformation_deta1_fiber(d);
            const FiberForm2 combined = [&form, &pert, eps](double r, double phi) {
                return form(r, phi) + eps * pert(r, phi);
            };
            const auto slope = (invariant_polynomial_subdisc(combined, m, rho, chart) -
                                invariant_polynomial_subdisc(form, m, rho, chart)) /
                               eps;
            const auto bnd = boundary_circle_integral({d}, m, rho, chart);
            const auto want = std::complex<double>(0.0, 2.0 * std::numbers::pi * m) *
                              variation_of_invariants({d}, m, chart, rho).pdot[static_cast<std::size_t>(m - 1)];
            consistency = std::max(consistency, std::abs(slope - bnd - want) / std::max(1.0, std::abs(want)));
        }
    }
    c.require(consistency <= 1e-6, "first-order consistency under finite perturbation", consistency, 1e-6);
    c.finish(10.0);
}

void criterion_6_cli(const char* cli_path) {
    Criterion c("criterion 6: command line verify, determinism, config rejection");
    if (cli_path == nullptr) {
        c.require(false, "CLI path not provided to the acceptance binary", 0.0, 1.0);
        c.finish(300.0);
        return;
    }
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "foldhk_acceptance_cli";
    fs::remove_all(base);
    fs::create_directories(base);

    const auto run = [&](const std::string& args) {
        const std::string cmd = std::string(cli_path) + " " + args + " > " + (base / "log.txt").string() + " 2>&1";
        const int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };

    const int rc1 = run("verify --out " + (base / "a").string());
    c.require(rc1 == 0, "verify with default config exits 0", rc1, 0);
    const int rc2 = run("verify --out " + (base / "b").string());
    c.require(rc2 == 0, "second verify exits 0", rc2, 0);

    bool identical = true;
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), base / "a");
        if (slurp(entry.path()) != slurp(base / "b" / rel)) identical = false;
        ++compared;
    }
    c.require(identical && compared > 0, "byte-identical artifacts across reruns",
              static_cast<double>(compared), 1.0);

    const fs::path bad_cfg = base / "bad.json";
    {
        std::ofstream out(bad_cfg);
        out << R"({"laplacian": {"modes": [[1.0, 2]]}})"; // |n| > lambda^2
    }
    const int rc3 = run("laplacian --config " + bad_cfg.string() + " --out " + (base / "c").string());
    c.require(rc3 == 2, "config violating |n| <= lambda^2 is rejected with exit 2", rc3, 2);

    // a valid config whose tolerance cannot be met: check failure -> exit 1
    const fs::path tight_cfg = base / "tight.json";
    {
        std::ofstream out(tight_cfg);
        out << R"({"laplacian": {"tol_expansion_law": 1e-30}})";
    }
    const int rc4 = run("laplacian --config " + tight_cfg.string() + " --out " + (base / "d").string());
    c.require(rc4 == 1, "failing check exits 1", rc4, 1);

    fs::remove_all(base);
    c.finish(300.0);
}

} // namespace

int main(int argc, char** argv) {
    std::printf("== acceptance suite ==\n");
    criterion_1_exact_model();
    criterion_2_perturbed();
    criterion_3_dilation();
    criterion_4_mode_solver();
    criterion_5_cotangent();
    criterion_6_cli(argc > 1 ? argv[1] : nullptr);
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
