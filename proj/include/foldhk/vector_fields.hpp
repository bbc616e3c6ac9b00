#pragma once

// Vector fields V = c1(s) X1 + c2(s) X2 + c3(s) X3 in the invariant frame.
// X2 acts on profiles as d/ds; X1 and X3 annihilate them, so the bracket
// closes on this class.  The divergence against the reference volume
// t1 ^ t2 ^ t3 is d(c2)/ds: volume preservation means c2 constant in s.

#include <array>
#include <cmath>
#include <stdexcept>

#include "foldhk/fourier_profile.hpp"
#include "foldhk/frame_forms.hpp"

namespace foldhk {

struct InvariantVectorField {
    SField c1, c2, c3; // coefficients on X1, X2, X3

    InvariantVectorField() = default;
    explicit InvariantVectorField(std::size_t n_modes)
        : c1(n_modes), c2(n_modes), c3(n_modes) {}
    InvariantVectorField(SField a, SField b, SField c)
        : c1(std::move(a)), c2(std::move(b)), c3(std::move(c)) {}

    std::size_t n_modes() const { return c1.n_modes(); }

    static InvariantVectorField basis(int i, std::size_t n_modes) {
        InvariantVectorField v(n_modes);
        switch (i) {
            case 1: v.c1 = SField::constant(1.0, n_modes); break;
            case 2: v.c2 = SField::constant(1.0, n_modes); break;
            case 3: v.c3 = SField::constant(1.0, n_modes); break;
            default: throw std::invalid_argument("InvariantVectorField::basis: index in {1,2,3}");
        }
        return v;
    }

    SField divergence() const { return c2.derivative(); }

    bool volume_preserving(double tol = 1e-12) const { return divergence().sup_abs() <= tol; }

    double sup_abs() const {
        return std::max({c1.sup_abs(), c2.sup_abs(), c3.sup_abs()});
    }

    InvariantVectorField& operator+=(const InvariantVectorField& o) {
        c1 += o.c1; c2 += o.c2; c3 += o.c3;
        return *this;
    }
    InvariantVectorField& operator-=(const InvariantVectorField& o) {
        c1 -= o.c1; c2 -= o.c2; c3 -= o.c3;
        return *this;
    }
    InvariantVectorField& operator*=(double a) {
        c1 *= a; c2 *= a; c3 *= a;
        return *this;
    }
    friend InvariantVectorField operator+(InvariantVectorField a, const InvariantVectorField& b) { return a += b; }
    friend InvariantVectorField operator-(InvariantVectorField a, const InvariantVectorField& b) { return a -= b; }
    friend InvariantVectorField operator*(double a, InvariantVectorField v) { return v *= a; }
};

inline InvariantVectorField lie_bracket(const InvariantVectorField& v, const InvariantVectorField& w) {
    InvariantVectorField r(v.n_modes());
    const SField dwf = w.c1.derivative(), dvf = v.c1.derivative();
    const SField dwg = w.c2.derivative(), dvg = v.c2.derivative();
    const SField dwh = w.c3.derivative(), dvh = v.c3.derivative();
    // [X2,X3] = -X1 contributes the (v2 w3 - v3 w2) term on X1.
    r.c1 = v.c2 * dwf - w.c2 * dvf - (v.c2 * w.c3 - v.c3 * w.c2);
    r.c2 = v.c2 * dwg - w.c2 * dvg;
    r.c3 = v.c2 * dwh - w.c2 * dvh;
    return r;
}

// Interior product of V against the reference volume t1 ^ t2 ^ t3, as a
// 2-form on X: i_V vol = c1 t2^t3 + c2 t3^t1 + c3 t1^t2.
inline FormField interior_volume(const InvariantVectorField& v) {
    FormField r(2, v.n_modes());
    r.at(0b1100u, 0) = v.c1;         // t2 ^ t3
    r.at(0b1010u, 0) = -1.0 * v.c2;  // t3 ^ t1 = -(t1 ^ t3)
    r.at(0b0110u, 0) = v.c3;         // t1 ^ t2
    return r;
}

// Inverse of interior_volume: read the vector with i_B vol = beta off a
// 2-form on X.
inline InvariantVectorField vector_of_2form(const FormField& beta, std::size_t ix = 0) {
    if (beta.degree() != 2) throw std::invalid_argument("vector_of_2form: need a 2-form");
    InvariantVectorField b(beta.n_modes());
    b.c1 = beta.at(0b1100u, ix);
    b.c2 = -1.0 * beta.at(0b1010u, ix);
    b.c3 = beta.at(0b0110u, ix);
    return b;
}

} // namespace foldhk
