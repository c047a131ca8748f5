#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "obscert/errors.hpp"

namespace obscert {

// Homogeneous strongly elliptic polynomial a(xi) = sum_{|alpha|=m} a_alpha i^m xi^alpha
// with re a(xi) >= c |xi|^m. The generated semigroup is the Fourier multiplier
// e^{-t a(xi)}.
struct EllipticSymbol {
    struct Term {
        std::array<int, 3> alpha{0, 0, 0};  // multi-index, |alpha|_1 = m
        std::complex<double> coeff;
    };

    int d = 1;
    int m = 2;  // even, >= 2
    std::vector<Term> terms;
    double c = 0.0;  // ellipticity constant, filled by ellipticity_constant()

    std::complex<double> eval(std::span<const double> xi) const {
        // i^m = (-1)^{m/2} for even m
        const double im = (m / 2) % 2 == 0 ? 1.0 : -1.0;
        std::complex<double> acc = 0.0;
        for (const Term& t : terms) {
            double mono = 1.0;
            for (int ax = 0; ax < d; ++ax)
                for (int k = 0; k < t.alpha[ax]; ++k) mono *= xi[ax];
            acc += t.coeff * mono;
        }
        return im * acc;
    }

    void validate() const {
        if (d < 1 || d > 3) throw InvalidParams("EllipticSymbol: d must be 1..3");
        if (m < 2 || m % 2 != 0)
            throw InvalidParams("EllipticSymbol: degree m must be even and >= 2");
        for (const Term& t : terms) {
            int total = 0;
            for (int ax = 0; ax < 3; ++ax) total += t.alpha[ax];
            if (total != m)
                throw InvalidParams("EllipticSymbol: every multi-index must have |alpha|_1 = m");
        }
    }

    // a(xi) = |xi|^2 (negative Laplacian; heat semigroup), c = 1.
    static EllipticSymbol laplacian(int d) {
        EllipticSymbol s;
        s.d = d;
        s.m = 2;
        for (int ax = 0; ax < d; ++ax) {
            Term t;
            t.alpha[ax] = 2;
            t.coeff = -1.0;  // i^2 * (-1) = +1
            s.terms.push_back(t);
        }
        s.c = 1.0;
        return s;
    }

    // a(xi) = sum_i xi_i^4 (fourth order, anisotropic away from the axes).
    static EllipticSymbol axis_quartic(int d) {
        EllipticSymbol s;
        s.d = d;
        s.m = 4;
        for (int ax = 0; ax < d; ++ax) {
            Term t;
            t.alpha[ax] = 4;
            t.coeff = 1.0;  // i^4 = 1
            s.terms.push_back(t);
        }
        s.c = d == 1 ? 1.0 : 0.0;  // multi-d value comes from ellipticity_constant()
        return s;
    }
};

// c = min over the unit sphere of re a(xi) (homogeneity). Throws
// NotStronglyElliptic when the minimum is <= 0. sphere_samples is the sample
// count per angular dimension (>= 1000 recommended).
double ellipticity_constant(EllipticSymbol& symbol, int sphere_samples = 4096);

}  // namespace obscert
