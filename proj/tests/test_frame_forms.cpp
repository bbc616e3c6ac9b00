#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "foldhk/frame_forms.hpp"

using namespace foldhk;

namespace {

constexpr std::size_t N = 32;

FormField basis_one_form(unsigned bit) {
    FormField f(1, N);
    f.at(bit, 0) = SField::constant(1.0, N);
    return f;
}

// Model 2-forms at a fixed x (no grid): the fold profile evaluated at x.
std::array<FormField, 3> model_forms_at(double x) {
    std::array<FormField, 3> w = {FormField(2, N), FormField(2, N), FormField(2, N)};
    w[0].at(0b0011u, 0) = SField::constant(1.0, N); // dx ^ t1
    w[0].at(0b1100u, 0) = SField::constant(x, N);   // x t2 ^ t3
    w[1].at(0b0101u, 0) = SField::constant(x, N);   // x dx ^ t2
    w[1].at(0b1010u, 0) = SField::constant(-1.0, N); // - t1 ^ t3
    w[2].at(0b1001u, 0) = SField::constant(x, N);   // x dx ^ t3
    w[2].at(0b0110u, 0) = SField::constant(1.0, N); // t1 ^ t2
    return w;
}

FormField random_one_form(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FormField f(1, N);
    for (unsigned m : FormField::masks(1))
        f.at(m, 0) = SField::harmonic(1 + (rng() % 4), u(rng), u(rng), N);
    return f;
}

} // namespace

TEST_CASE("wedge of basis monomials") {
    FormField dxt1(2, N), t2t3(2, N);
    dxt1.at(0b0011u, 0) = SField::constant(1.0, N);
    t2t3.at(0b1100u, 0) = SField::constant(1.0, N);
    const FormField top = wedge(dxt1, t2t3);
    CHECK(sup_abs_diff(top.at(0b1111u, 0), SField::constant(1.0, N)) < 1e-14);
}

TEST_CASE("one-form squares vanish") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        const FormField a = random_one_form(rng);
        CHECK(wedge(a, a).sup_abs() < 1e-13);
    }
}

TEST_CASE("graded commutativity") {
    std::mt19937_64 rng(5);
    const FormField a = random_one_form(rng);
    const FormField b = random_one_form(rng);
    const FormField ab = wedge(a, b);
    const FormField ba = wedge(b, a);
    CHECK((ab + ba).sup_abs() < 1e-13); // odd degrees anticommute
    const FormField c = wedge(a, b);    // 2-form
    CHECK((wedge(c, a) - wedge(a, c)).sup_abs() < 1e-13);
}

TEST_CASE("off-diagonal wedge of the model fold forms vanishes") {
    // Hand expansion at x = 0.3: every term of omega_2 ^ omega_3 repeats a
    // coframe factor.
    const auto w = model_forms_at(0.3);
    CHECK(wedge(w[1], w[2]).sup_abs() < 1e-14);
    CHECK(wedge(w[0], w[1]).sup_abs() < 1e-14);
    // diagonal entries agree with each other
    const FormField d1 = wedge(w[0], w[0]);
    const FormField d2 = wedge(w[1], w[1]);
    CHECK((d1 - d2).sup_abs() < 1e-14);
    CHECK(sup_abs_diff(d1.at(0b1111u, 0), SField::constant(2.0 * 0.3, N)) < 1e-14);
}

TEST_CASE("structure equations of the exterior derivative") {
    // d t1 = t2 ^ t3
    const FormField t1 = basis_one_form(0b0010u);
    const FormField dt1 = exterior_derivative(t1);
    CHECK(sup_abs_diff(dt1.at(0b1100u, 0), SField::constant(1.0, N)) < 1e-14);
    CHECK(dt1.at(0b0110u, 0).sup_abs() + dt1.at(0b1010u, 0).sup_abs() < 1e-14);
    // d t2 = d t3 = 0
    CHECK(exterior_derivative(basis_one_form(0b0100u)).sup_abs() < 1e-14);
    CHECK(exterior_derivative(basis_one_form(0b1000u)).sup_abs() < 1e-14);
    // d of a constant function
    FormField c(0, N);
    c.at(0b0000u, 0) = SField::constant(4.2, N);
    CHECK(exterior_derivative(c).sup_abs() < 1e-14);
}

TEST_CASE("x-dependence enters through dx") {
    // d(x t2 ^ t3) = dx ^ t2 ^ t3 (d(t2^t3) = 0)
    const XGrid grid{0.0, 0.1, 11};
    FormField a(2, N, grid);
    for (std::size_t i = 0; i < grid.n; ++i) a.at(0b1100u, i) = SField::constant(grid.x(i), N);
    const FormField da = exterior_derivative(a, true);
    double dev = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i)
        dev = std::max(dev, sup_abs_diff(da.at(0b1101u, i), SField::constant(1.0, N)));
    CHECK(dev < 1e-12);
    CHECK_THROWS_AS(exterior_derivative(FormField(1, N), true), std::invalid_argument);
}

TEST_CASE("d compose d vanishes on random tabulated forms") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const XGrid grid{-0.5, 0.05, 21};
    for (int trial = 0; trial < 100; ++trial) {
        const int deg = trial % 3; // degrees 0..2 so d^2 stays within top degree
        FormField a(deg, N, grid);
        const double c0 = u(rng), c1 = u(rng), c2 = u(rng);
        const std::size_t band = 1 + (rng() % 3);
        for (unsigned m : FormField::masks(deg)) {
            const double amp = u(rng), ph = u(rng);
            for (std::size_t i = 0; i < grid.n; ++i) {
                const double x = grid.x(i);
                a.at(m, i) = SField::harmonic(band, amp * (c0 + c1 * x + c2 * x * x), ph, N);
            }
        }
        const double scale = std::max(1.0, a.sup_abs());
        CHECK(exterior_derivative(exterior_derivative(a, true), true).sup_abs() < 1e-12 * scale);
    }
}

TEST_CASE("model metric components") {
    const auto g1 = model_metric_g0(1.0);
    CHECK(g1 == std::array<double, 4>{1.0, 1.0, 1.0, 1.0});
    const auto g4 = model_metric_g0(4.0);
    CHECK(g4 == std::array<double, 4>{4.0, 0.25, 4.0, 4.0});
    CHECK_THROWS_AS(model_metric_g0(0.0), std::domain_error);
}

TEST_CASE("dilation pullback scales the model metric by t^3") {
    const auto g0 = [](double x) { return model_metric_g0(x); };
    for (double t : {1.0, 0.5, 2.0}) {
        const auto pulled = dilation_pullback_diag_metric(t, g0);
        for (double x : {0.2, 1.0, 3.7}) {
            const auto lhs = pulled(x);
            const auto ref = g0(x);
            const double t3 = t * t * t;
            for (int c = 0; c < 4; ++c)
                CHECK(std::abs(lhs[static_cast<std::size_t>(c)] - t3 * ref[static_cast<std::size_t>(c)]) <=
                      1e-14 * std::max(1.0, std::abs(t3 * ref[static_cast<std::size_t>(c)])));
        }
    }
    CHECK_THROWS_AS(dilation_pullback_diag_metric(0.0, g0), std::domain_error);
    CHECK_THROWS_AS(dilation_pullback_diag_metric(-2.0, g0), std::domain_error);
}

TEST_CASE("dilation pullback of tabulated forms restricts to compatible nodes") {
    // the fold profile is homogeneous of weight 3 under the coframe scaling
    // combined with x -> t x
    const XGrid fine{0.0, 0.05, 21};
    FormField b(2, N, fine);
    for (std::size_t i = 0; i < fine.n; ++i) {
        b.at(0b0011u, i) = SField::constant(1.0, N);
        b.at(0b1100u, i) = SField::constant(fine.x(i), N);
    }
    const FormField pb = dilation_pullback(2.0, b);
    REQUIRE(pb.grid().has_value());
    double dev = 0.0;
    for (std::size_t k = 0; k < pb.grid()->n; ++k) {
        const double x = pb.grid()->x(k);
        dev = std::max(dev, sup_abs_diff(pb.at(0b0011u, k), SField::constant(8.0, N)));
        dev = std::max(dev, sup_abs_diff(pb.at(0b1100u, k), SField::constant(8.0 * x, N)));
    }
    CHECK(dev < 1e-13);

    // an irrational factor maps no node onto the grid
    FormField c(1, N, XGrid{0.1, 0.1, 8});
    for (std::size_t i = 0; i < 8; ++i) c.at(0b0010u, i) = SField::constant(1.0, N);
    CHECK_THROWS_AS(dilation_pullback(std::numbers::sqrt2, c), std::domain_error);
}

TEST_CASE("wedge guards") {
    FormField a(3, N), b(2, N);
    CHECK_THROWS_AS(wedge(a, b), std::invalid_argument); // degree overflow
    FormField c(1, N), d(1, N, XGrid{0.0, 0.1, 5});
    CHECK_THROWS_AS(wedge(c, d), std::invalid_argument); // mismatched grids
}
