#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "foldhk/mode_laplacian.hpp"

using namespace foldhk;

namespace {

ModeProblem make_problem(double lambda, int n, std::size_t M, double g = 1.0) {
    ModeProblem p;
    p.lambda = lambda;
    p.n = n;
    p.rhs.assign(M + 1, g);
    return p;
}

std::vector<double> manufactured_rhs(double lambda, int n, std::size_t M) {
    std::vector<double> g(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(M);
        g[i] = (std::numbers::pi * std::numbers::pi + lambda * lambda +
                static_cast<double>(n) * static_cast<double>(n) * x * x) *
               std::sin(std::numbers::pi * x);
    }
    return g;
}

} // namespace

TEST_CASE("constant forcing has the closed-form parabola solution") {
    const auto p = make_problem(0.0, 0, 512);
    const ModeSolution s = solve_mode(p);
    double err = 0.0;
    for (std::size_t i = 0; i < s.f.size(); ++i) {
        const double x = p.x(i);
        err = std::max(err, std::abs(s.f[i] - 0.5 * x * (1.0 - x)));
    }
    CHECK(err < 1e-12); // stencil exact on quadratics
}

TEST_CASE("zero forcing gives the zero solution") {
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
        auto p = make_problem(2.5, 3, 128, 0.0);
        p.bc0 = bc;
        const ModeSolution s = solve_mode(p);
        for (double v : s.f) CHECK(v == 0.0);
        if (s.energy_defined) {
            CHECK(s.energy_lhs == 0.0);
            CHECK(s.energy_rhs == 0.0);
            CHECK(s.energy_pass);
        }
    }
}

TEST_CASE("manufactured solution converges at second order") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> lu(0.8, 6.0);
    for (int t = 0; t < 5; ++t) {
        const double lambda = lu(rng);
        const int nmax = static_cast<int>(lambda * lambda);
        std::uniform_int_distribution<int> nu(-nmax, nmax);
        const int n = nu(rng);
        double errs[2];
        const std::size_t Ms[2] = {512, 1024};
        for (int k = 0; k < 2; ++k) {
            ModeProblem p;
            p.lambda = lambda;
            p.n = n;
            p.rhs = manufactured_rhs(lambda, n, Ms[k]);
            const ModeSolution s = solve_mode(p);
            double e = 0.0;
            for (std::size_t i = 0; i <= Ms[k]; ++i)
                e = std::max(e, std::abs(s.f[i] - std::sin(std::numbers::pi * static_cast<double>(i) /
                                                           static_cast<double>(Ms[k]))));
            errs[k] = e;
        }
        const double order = observed_order(errs[0], errs[1]);
        CHECK(order > 1.8);
        CHECK(order < 2.2);
    }
}

TEST_CASE("energy inequality") {
    // unconditional for solves of the mode equation
    auto p = make_problem(3.0, 2, 512);
    const ModeSolution s = solve_mode(p);
    CHECK(s.energy_defined);
    CHECK(s.energy_pass);
    CHECK(s.energy_lhs <= s.energy_rhs * (1.0 + 5.0 / 512.0));

    // randomized sweep, both boundary conditions
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0), lu(0.8, 6.0);
    for (int t = 0; t < 25; ++t) {
        const double lambda = lu(rng);
        const int nmax = static_cast<int>(lambda * lambda);
        std::uniform_int_distribution<int> nu(-nmax, nmax);
        ModeProblem q;
        q.lambda = lambda;
        q.n = nu(rng);
        q.bc0 = (t % 2 == 0) ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
        q.rhs.resize(513);
        for (std::size_t i = 0; i < q.rhs.size(); ++i) {
            const double x = q.x(i);
            q.rhs[i] = u(rng) * 0.0 + std::cos(3.0 * x) + u(rng) * 0.2 + 0.5 * std::sin(7.0 * x);
        }
        const ModeSolution s2 = solve_mode(q);
        CHECK(s2.energy_pass);
    }

    // the (0,0) block has a singular energy weight
    const auto z = make_problem(0.0, 0, 64);
    const ModeSolution sz = solve_mode(z);
    CHECK_FALSE(sz.energy_defined);
    CHECK_THROWS_AS(energy_check(z, sz.f, z.rhs), std::invalid_argument);
}

TEST_CASE("near-fold expansion laws of the folded equation") {
    // Neumann, lambda = 2, n = 1, g = 1: f2/f0 = 2 within 1%
    ModeProblem p = make_problem(2.0, 1, 512);
    p.bc0 = BoundaryCondition::Neumann;
    p.folded = true;
    const ModeSolution s = solve_mode(p);
    REQUIRE(s.expansion_defined);
    CHECK(std::abs(s.expansion[2] / s.expansion[0] - 2.0) < 0.01 * 2.0);
    CHECK(std::abs(s.expansion[1]) < 1e-3); // Neumann: fitted f1 ~ 0
    const auto laws = expansion_law_residuals(p, s);
    CHECK(laws.f2_law < 0.01);
    CHECK(laws.f3_law < 0.01);

    // Dirichlet: f0 = 0 exactly, fitted f2 ~ 0
    ModeProblem pd = make_problem(2.0, 1, 512);
    pd.folded = true;
    const ModeSolution sd = solve_mode(pd);
    CHECK(sd.f[0] == 0.0);
    CHECK(std::abs(sd.expansion[0]) < 1e-8);
    CHECK(std::abs(sd.expansion[2]) < 1e-4);

    // (0,0) Dirichlet, g = 1: closed form f = (x - x^3)/6, so f3 = -1/6
    ModeProblem pz = make_problem(0.0, 0, 512);
    pz.folded = true;
    const ModeSolution sz = solve_mode(pz);
    CHECK(std::abs(sz.expansion[3] + 1.0 / 6.0) < 0.01 / 6.0);
    CHECK(std::abs(sz.expansion[1] - 1.0 / 6.0) < 0.01 / 6.0);
}

TEST_CASE("zero-mode Neumann solve carries the weighted mean-zero normalization") {
    ModeProblem p;
    p.lambda = 0.0;
    p.n = 0;
    p.bc0 = BoundaryCondition::Neumann;
    p.folded = true;
    p.rhs.resize(513);
    for (std::size_t i = 0; i < p.rhs.size(); ++i) p.rhs[i] = std::cos(2.0 * p.x(i));
    const ModeSolution s = solve_mode(p);
    std::vector<double> wf(s.f.size());
    for (std::size_t i = 0; i < s.f.size(); ++i) wf[i] = s.f[i] * p.x(i);
    CHECK(std::abs(trapezoid(wf, p.h())) < 1e-12);
    CHECK(std::abs(s.mean_shift) > 1e-3); // a genuine compatibility shift
    // the shifted equation is what the solution satisfies
    const auto back = apply_mode_operator(p, s.f);
    double dev = 0.0;
    for (std::size_t i = 1; i + 1 < s.f.size(); ++i)
        dev = std::max(dev, std::abs(back[i] - p.x(i) * (p.rhs[i] - s.mean_shift)));
    CHECK(dev < 1e-10);
}

TEST_CASE("commuted identity") {
    // discrete solutions satisfy it to roundoff
    ModeProblem p = make_problem(3.0, 3, 512);
    for (std::size_t i = 0; i < p.rhs.size(); ++i) p.rhs[i] = std::cos(5.0 * p.x(i)) + p.x(i);
    const ModeSolution s = solve_mode(p);
    CHECK(commuted_identity_residual(p, s.f, p.rhs) < 1e-10);

    // manufactured pairs show the second-order stencil error
    double r[2];
    const std::size_t Ms[2] = {256, 512};
    for (int k = 0; k < 2; ++k) {
        ModeProblem q;
        q.lambda = 3.0;
        q.n = 2;
        q.rhs = manufactured_rhs(3.0, 2, Ms[k]);
        std::vector<double> f(Ms[k] + 1);
        for (std::size_t i = 0; i <= Ms[k]; ++i)
            f[i] = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(Ms[k]));
        r[k] = commuted_identity_residual(q, f, q.rhs);
    }
    const double ratio = r[0] / r[1];
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("positivity and symmetry of the discretization") {
    // M-matrix property: nonnegative forcing, Dirichlet ends -> f >= 0
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModeProblem p = make_problem(1.3, 1, 256);
    for (auto& v : p.rhs) v = u(rng);
    const ModeSolution s = solve_mode(p);
    for (double v : s.f) CHECK(v >= 0.0);

    // multiply-back residual of the direct solve
    const auto back = apply_mode_operator(p, s.f);
    double mb = 0.0, gn = 0.0;
    for (std::size_t i = 1; i + 1 < s.f.size(); ++i) {
        mb = std::max(mb, std::abs(back[i] - p.rhs[i]));
        gn = std::max(gn, std::abs(p.rhs[i]));
    }
    CHECK(mb <= 1e-11 * std::max(gn, 1.0));
}

TEST_CASE("problem validation") {
    auto p = make_problem(1.0, 2, 64); // |n| > lambda^2
    CHECK_THROWS_AS(solve_mode(p), std::invalid_argument);
    auto tiny = make_problem(1.0, 1, 8); // M < 16
    CHECK_THROWS_AS(solve_mode(tiny), std::invalid_argument);
    auto ok = make_problem(0.0, 0, 64); // the (0,0) block is admissible
    CHECK_NOTHROW(solve_mode(ok));
}

TEST_CASE("dirichlet neumann assembly") {
    const std::size_t M = 64;
    std::array<std::array<std::vector<double>, 3>, 3> v;
    for (auto& row : v)
        for (auto& e : row) e.assign(M + 1, 0.0);
    std::vector<double> g(M + 1);
    for (std::size_t i = 0; i <= M; ++i)
        g[i] = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(M));

    SECTION("diagonal datum solves with Dirichlet everywhere it matters") {
        for (std::size_t i = 0; i <= M; ++i) {
            v[0][0][i] = 2.0 * g[i];
            v[1][1][i] = -g[i];
            v[2][2][i] = -g[i];
        }
        const DnAssembly a = dn_assemble(v, 3.0, 2);
        CHECK(a.bc[0][0] == BoundaryCondition::Dirichlet);
        CHECK(a.bc[1][1] == BoundaryCondition::Dirichlet);
        CHECK(a.bc[2][2] == BoundaryCondition::Dirichlet);
        CHECK(a.bc[0][1] == BoundaryCondition::Neumann);
        CHECK(a.bc[0][2] == BoundaryCondition::Neumann);
        CHECK(a.bc[1][0] == BoundaryCondition::Neumann);
        CHECK(a.bc[2][0] == BoundaryCondition::Neumann);
        CHECK(a.bc[1][2] == BoundaryCondition::Dirichlet);
        CHECK(a.bc[2][1] == BoundaryCondition::Dirichlet);
        double offdiag = 0.0;
        for (double t : a.w[0][1].f) offdiag = std::max(offdiag, std::abs(t));
        CHECK(offdiag == 0.0);
    }

    SECTION("first-row entry gets the Neumann condition") {
        for (std::size_t i = 0; i <= M; ++i) {
            v[0][1][i] = g[i];
            v[1][0][i] = g[i];
        }
        const DnAssembly a = dn_assemble(v, 3.0, 2);
        CHECK(a.bc[0][1] == BoundaryCondition::Neumann);
        CHECK(a.w[0][1].f[1] != 0.0);
        // Neumann solve: fitted slope at the fold vanishes
        REQUIRE(a.w[0][1].expansion_defined);
        CHECK(std::abs(a.w[0][1].expansion[1]) < 1e-3);
    }

    SECTION("zero datum gives zero solutions") {
        const DnAssembly a = dn_assemble(v, 2.0, 1);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (double t : a.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].f) CHECK(t == 0.0);
    }

    SECTION("violations are rejected") {
        auto bad = v;
        for (std::size_t i = 0; i <= M; ++i) bad[0][0][i] = g[i]; // nonzero trace
        CHECK_THROWS_AS(dn_assemble(bad, 3.0, 2), std::invalid_argument);

        auto bad2 = v;
        for (std::size_t i = 0; i <= M; ++i) {
            bad2[0][1][i] = g[i]; // integral of x g is nonzero
            bad2[1][0][i] = g[i];
        }
        CHECK_THROWS_AS(dn_assemble(bad2, 0.0, 0), std::invalid_argument);

        auto bad3 = v;
        for (std::size_t i = 0; i <= M; ++i) bad3[0][1][i] = g[i]; // asymmetric
        CHECK_THROWS_AS(dn_assemble(bad3, 3.0, 2), std::invalid_argument);
    }
}
