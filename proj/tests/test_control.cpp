#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "obscert/control.hpp"

using namespace obscert;
using namespace obscert::control;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

Mask full_mask(const GridSpec& grid) {
    Mask m(grid);
    for (auto& b : m.bits) b = 1;
    return m;
}

}  // namespace

TEST_CASE("zero control reproduces the free evolution") {
    const GridSpec grid(1, 64, 12.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const Mask mask = gen_stripes(grid, 0.5, 4);
    const Field x0 = white_field(grid, 1);
    const std::vector<Field> u(16, Field(grid));
    const Field xT = duhamel_solve(sym, mask, x0, u, 0.5);
    CHECK(max_abs_diff(xT, semigroup_apply(sym, 0.5, x0)) < 1e-12);
}

TEST_CASE("Duhamel map is affine: superposition of x0 and u responses") {
    const GridSpec grid(1, 64, 12.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const Mask mask = gen_stripes(grid, 0.5, 4);
    const double T = 0.5;
    const Field x0 = white_field(grid, 2);
    std::vector<Field> u;
    for (int j = 0; j < 8; ++j) u.push_back(white_field(grid, 100 + j));
    const std::vector<Field> zero_u(8, Field(grid));
    Field zero_x0(grid);

    const Field both = duhamel_solve(sym, mask, x0, u, T);
    const Field only_x0 = duhamel_solve(sym, mask, x0, zero_u, T);
    const Field only_u = duhamel_solve(sym, mask, zero_x0, u, T);
    Field sum = only_x0;
    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += only_u.values[i];
    CHECK(max_abs_diff(both, sum) < 1e-12);
}

TEST_CASE("full-observation Gramian acts diagonally with midpoint-quadrature eigenvalues") {
    const GridSpec grid(1, 64, 12.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const Mask mask = full_mask(grid);
    const double T = 0.5;
    const int n_t = 512;

    for (int k : {1, 3, 7}) {
        Field mode(grid);
        for (int j = 0; j < grid.N; ++j)
            mode.values[j] = std::polar(1.0, grid.xi(k) * grid.x(j));
        const Field lam = gramian_apply(sym, mask, T, n_t, mode);
        // eigenvalue = int_0^T e^{-2 s a} ds = (1 - e^{-2Ta})/(2a), a = xi^2.
        const double a = grid.xi(k) * grid.xi(k);
        const double eig = (1.0 - std::exp(-2.0 * T * a)) / (2.0 * a);
        for (int j = 0; j < grid.N; ++j)
            CHECK(std::abs(lam.values[j] - eig * mode.values[j]) < 1e-4 * eig);
    }
}

TEST_CASE("Gramian is Hermitian and positive semidefinite") {
    const GridSpec grid(1, 64, 12.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const Mask mask = gen_stripes(grid, 0.5, 4);
    const double T = 0.5;
    const int n_t = 24;

    for (int trial = 0; trial < 5; ++trial) {
        const Field phi = white_field(grid, 10 + trial);
        const Field psi = white_field(grid, 50 + trial);
        const std::complex<double> a = inner(gramian_apply(sym, mask, T, n_t, phi), psi);
        const std::complex<double> b = inner(gramian_apply(sym, mask, T, n_t, psi), phi);
        CHECK(std::abs(a - std::conj(b)) < 1e-10 * (1.0 + std::abs(a)));
        CHECK(inner(gramian_apply(sym, mask, T, n_t, phi), phi).real() >= -1e-12);
    }
}

TEST_CASE("minimal-norm control: residual, cost identities, margins") {
    const GridSpec grid(1, 64, 12.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const Mask mask = gen_stripes(grid, 0.5, 4);
    const double T = 0.5;
    const Field x0 = white_field(grid, 33);
    const double x0_norm = std::sqrt(inner(x0, x0).real());

    const cert::CertBundle bundle = cert::elliptic_cobs(
        0.5, {4.0 * grid.dx()}, 1.0, 1.0, 2, 2.0, 1.0, 1.0, T, LrIndex::finite(2.0));
    const ControlResult res = hum_control(sym, mask, x0, T, 32, 1e-9, 400, &bundle);

    // The control steers the discrete system to (numerical) zero.
    CHECK(res.residual <= 1e-9 * x0_norm * 1.000001);
    CHECK(res.residual_rel <= 1e-8);
    CHECK(res.cg_iterations > 0);
    CHECK(res.cg_residual_history.front() > res.cg_residual_history.back());

    // Three-way cost identity: ||u||^2 = <Lambda phi, phi> = -<S_T x0, phi>.
    const double c2 = res.cost * res.cost;
    CHECK(res.cost_sq_gramian == doctest::Approx(c2).epsilon(1e-8));
    CHECK(res.cost_sq_rhs == doctest::Approx(c2).epsilon(1e-8));

    // Certified control-cost margin ln(C_obs ||x0|| / cost) is positive.
    CHECK(res.log_cost_margin > 0.0);
    CHECK(res.log_cobs == bundle.log_cobs_closed);
}

TEST_CASE("trivial initial state needs no control") {
    const GridSpec grid(1, 64, 12.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const Mask mask = gen_stripes(grid, 0.5, 4);
    const ControlResult res = hum_control(sym, mask, Field(grid), 0.5, 16, 1e-8, 100);
    CHECK(res.cost == 0.0);
    CHECK(res.residual == 0.0);
    CHECK(res.cg_iterations == 0);
}

TEST_CASE("enlarging the observation set cannot raise the minimal cost") {
    const GridSpec grid(1, 64, 12.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const Field x0 = white_field(grid, 44);
    const double T = 0.5;
    double prev_cost = std::numeric_limits<double>::infinity();
    for (double duty : {0.25, 0.5, 1.0}) {
        const Mask mask = gen_stripes(grid, duty, 8);
        const ControlResult res = hum_control(sym, mask, x0, T, 32, 1e-10, 600);
        CHECK(res.cost < prev_cost * (1.0 + 1e-6));
        prev_cost = res.cost;
    }

    Mask empty(grid);
    CHECK_THROWS_AS(hum_control(sym, empty, x0, T, 16, 1e-8, 100), InvalidParams);
}
