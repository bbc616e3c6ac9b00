#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "foldhk/nahm_flow.hpp"
#include "foldhk/fit.hpp"

using namespace foldhk;

namespace {

constexpr std::size_t N = 64;

NahmFields r_perturbed(double amp) {
    const auto zero = SField(N);
    const auto r = SField::harmonic(1, amp, -0.5 * std::numbers::pi, N);
    return perturbed_initial(0.0, zero, zero, r);
}

} // namespace

TEST_CASE("flow right-hand side at the fold datum") {
    const auto s = model_initial(N);
    const auto rhs = nahm_rhs(s);
    CHECK((rhs.V1 - InvariantVectorField::basis(1, N)).sup_abs() < 1e-14);
    CHECK(rhs.V2.sup_abs() < 1e-14);
    CHECK(rhs.V3.sup_abs() < 1e-14);

    NahmFields zero;
    zero.V1 = InvariantVectorField(N);
    zero.V2 = InvariantVectorField(N);
    zero.V3 = InvariantVectorField(N);
    const auto rz = nahm_rhs(zero);
    CHECK(rz.V1.sup_abs() + rz.V2.sup_abs() + rz.V3.sup_abs() == 0.0);

    // the X3 perturbation of V2 contributes no correction: the slot it
    // multiplies carries no X2-component
    const auto p = SField::harmonic(1, 1.0, -0.5 * std::numbers::pi, N);
    const auto sp = perturbed_initial(0.3, p, SField(N), SField(N));
    const auto rp = nahm_rhs(sp);
    CHECK((rp.V1 - InvariantVectorField::basis(1, N)).sup_abs() < 1e-14);
    CHECK(rp.V2.sup_abs() < 1e-14);
    CHECK(rp.V3.sup_abs() < 1e-14);
}

TEST_CASE("model trajectory is exact for any step") {
    for (double h : {0.1, 0.025}) {
        FlowConfig cfg;
        cfg.h = h;
        cfg.x_max = 0.5;
        cfg.n_modes = N;
        const Trajectory traj = integrate(model_initial(N), cfg);
        double dev = 0.0;
        for (const auto& s : traj.states) {
            dev = std::max(dev, (s.V1 - s.x * InvariantVectorField::basis(1, N)).sup_abs());
            dev = std::max(dev, (s.V2 - InvariantVectorField::basis(2, N)).sup_abs());
            dev = std::max(dev, (s.V3 - InvariantVectorField::basis(3, N)).sup_abs());
        }
        CHECK(dev < 1e-12);
        const auto par = parity_check(traj);
        CHECK(std::max({par[0], par[1], par[2]}) < 1e-12);
    }
}

TEST_CASE("zero datum stays zero") {
    NahmFields zero;
    zero.V1 = InvariantVectorField(N);
    zero.V2 = InvariantVectorField(N);
    zero.V3 = InvariantVectorField(N);
    FlowConfig cfg;
    cfg.h = 0.05;
    cfg.x_max = 0.25;
    cfg.n_modes = N;
    const Trajectory traj = integrate(zero, cfg);
    for (const auto& s : traj.states)
        CHECK(s.V1.sup_abs() + s.V2.sup_abs() + s.V3.sup_abs() == 0.0);
}

TEST_CASE("volume-preserving components are conserved bitwise") {
    FlowConfig cfg;
    cfg.h = 1.0 / 40;
    cfg.x_max = 0.5;
    cfg.n_modes = N;
    const auto p = SField::harmonic(1, 1.0, -0.5 * std::numbers::pi, N);
    const auto q = SField::harmonic(1, 0.1, 0.0, N);
    const auto r = SField::harmonic(1, 0.1, -0.5 * std::numbers::pi, N);
    const auto init = perturbed_initial(0.1, p, q, r);
    const Trajectory traj = integrate(init, cfg);
    for (const auto& s : traj.states) {
        for (std::size_t k = 0; k < N; ++k) {
            CHECK(s.V2.c2.coeff(k) == init.V2.c2.coeff(k));
            CHECK(s.V3.c2.coeff(k) == init.V3.c2.coeff(k));
            CHECK(s.V1.c2.coeff(k) == cdouble(0.0, 0.0));
        }
    }
}

TEST_CASE("flow matches the closed-form solution of the r-datum") {
    // For V2(0) = X2, V3(0) = X3 + a sin(2 pi s) X1 the system is linear
    // with constant coefficients and solves in closed form:
    //   V1 = (x - a cos(2 pi s) sinh(2 pi x)) X1,
    //   V3 = (a sin(2 pi s) cosh(2 pi x)) X1 + X3,  V2 frozen.
    const double a = 0.1;
    double err[2];
    const double hs[2] = {1.0 / 100, 1.0 / 200};
    for (int k = 0; k < 2; ++k) {
        FlowConfig cfg;
        cfg.h = hs[k];
        cfg.x_max = 0.5;
        cfg.n_modes = N;
        const Trajectory traj = integrate(r_perturbed(a), cfg);
        double dev = 0.0;
        for (const auto& s : traj.states) {
            const double x = s.x;
            const auto f1 = SField::constant(x, N) -
                            a * std::sinh(2.0 * std::numbers::pi * x) * SField::harmonic(1, 1.0, 0.0, N);
            const auto f3 = a * std::cosh(2.0 * std::numbers::pi * x) *
                            SField::harmonic(1, 1.0, -0.5 * std::numbers::pi, N);
            dev = std::max(dev, sup_abs_diff(s.V1.c1, f1));
            dev = std::max(dev, s.V1.c3.sup_abs());
            dev = std::max(dev, sup_abs_diff(s.V3.c1, f3));
            dev = std::max(dev, sup_abs_diff(s.V3.c3, SField::constant(1.0, N)));
        }
        err[k] = dev;
    }
    CHECK(err[0] < 2e-6); // global error ~ (2 pi)^5 h^4 x cosh(pi) / 120
    // true RK4 convergence against the exact solution
    const double order = observed_order(err[0], err[1]);
    CHECK(order > 3.7);
    CHECK(order < 4.3);
}

TEST_CASE("self-convergence of the flow residual") {
    const auto init = r_perturbed(0.1);
    double res[2];
    const double hs[2] = {1.0 / 20, 1.0 / 40};
    for (int k = 0; k < 2; ++k) {
        FlowConfig cfg;
        cfg.h = hs[k];
        cfg.x_max = 0.5;
        cfg.n_modes = N;
        res[k] = flow_residual_max(integrate(init, cfg), 0.35);
    }
    const double order = observed_order(res[0], res[1]);
    CHECK(order > 3.0);
    CHECK(order < 5.0);
}

TEST_CASE("parity of the perturbed trajectory") {
    FlowConfig cfg;
    cfg.h = 1.0 / 200;
    cfg.x_max = 0.5;
    cfg.n_modes = N;
    const Trajectory traj = integrate(r_perturbed(0.1), cfg);
    const auto par = parity_check(traj);
    CHECK(std::max({par[0], par[1], par[2]}) <= 1e-10);
}

TEST_CASE("blow-up detection aborts with the last valid x") {
    FlowConfig cfg;
    cfg.h = 0.05;
    cfg.x_max = 10.0; // far beyond the e^{2 pi x} growth budget
    cfg.n_modes = N;
    cfg.blowup_bound = 50.0;
    try {
        integrate(r_perturbed(0.5), cfg);
        FAIL("expected blowup_error");
    } catch (const blowup_error& e) {
        CHECK(e.last_valid_x() > 0.0);
        CHECK(e.last_valid_x() < 10.0);
    }
}

TEST_CASE("flow configuration and datum guards") {
    FlowConfig bad;
    bad.h = 0.3;
    bad.x_max = 0.5; // 0.5 / 0.3 is not integral
    bad.n_modes = N;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    FlowConfig cfg;
    cfg.h = 0.1;
    cfg.x_max = 0.5;
    cfg.n_modes = N;
    NahmFields init = model_initial(N);
    init.V1 = InvariantVectorField::basis(1, N); // nonzero at the fold
    CHECK_THROWS_AS(integrate(init, cfg), std::invalid_argument);

    NahmFields nvp = model_initial(N);
    nvp.V2.c2 = SField::harmonic(1, 1.0, 0.0, N); // divergence != 0
    CHECK_THROWS_AS(integrate(nvp, cfg), std::invalid_argument);
}

TEST_CASE("asymmetric trajectories are rejected by the parity check") {
    FlowConfig cfg;
    cfg.h = 0.1;
    cfg.x_max = 0.5;
    cfg.n_modes = N;
    cfg.parity_symmetric = false;
    const Trajectory traj = integrate(model_initial(N), cfg);
    CHECK_THROWS_AS(parity_check(traj), std::invalid_argument);
}
