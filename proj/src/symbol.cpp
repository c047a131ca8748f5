#include "obscert/symbol.hpp"

#include <cmath>

namespace obscert {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double ellipticity_constant(EllipticSymbol& symbol, int sphere_samples) {
    symbol.validate();
    if (sphere_samples < 2) throw InvalidParams("ellipticity_constant: too few samples");

    double min_re = std::numeric_limits<double>::infinity();
    double xi[3] = {0, 0, 0};
    auto visit = [&](const double* v) {
        const double re = symbol.eval(std::span<const double>(v, symbol.d)).real();
        if (re < min_re) min_re = re;
    };

    if (symbol.d == 1) {
        xi[0] = 1.0;
        visit(xi);
        xi[0] = -1.0;
        visit(xi);
    } else if (symbol.d == 2) {
        for (int i = 0; i < sphere_samples; ++i) {
            const double phi = 2.0 * kPi * i / sphere_samples;
            xi[0] = std::cos(phi);
            xi[1] = std::sin(phi);
            visit(xi);
        }
    } else {
        // Fibonacci sphere with sphere_samples^2 points.
        const long n = static_cast<long>(sphere_samples) * sphere_samples;
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (long i = 0; i < n; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / n;
            const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = 2.0 * kPi * i / golden;
            xi[0] = rad * std::cos(phi);
            xi[1] = rad * std::sin(phi);
            xi[2] = z;
            visit(xi);
        }
    }

    if (!(min_re > 0.0))
        throw NotStronglyElliptic("not-strongly-elliptic: min re a(xi) = " +
                                  std::to_string(min_re) + " on the unit sphere");
    symbol.c = min_re;
    return min_re;
}

}  // namespace obscert
