#include <doctest.h>

#include <cmath>
#include <vector>

#include "obscert/verify.hpp"

using namespace obscert;

TEST_CASE("uncertainty fit on the full mask is trivial") {
    const GridSpec grid(1, 64, 10.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    Mask full(grid);
    for (auto& b : full.bits) b = 1;
    const auto fit =
        verify::fit_uncertainty(sym, grid, full, {1.0, 2.0, 4.0}, 4, 2.0, 17);
    CHECK(fit.d0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.d1 == doctest::Approx(0.0).epsilon(1e-12));
    for (double y : fit.worst_log_ratio) CHECK(std::abs(y) < 1e-12);
}

TEST_CASE("uncertainty fit dominates every observation") {
    const GridSpec grid(1, 128, 10.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const Mask stripes = gen_stripes(grid, 0.5, 16);
    const std::vector<double> lambdas{1.0, 2.0, 3.0, 5.0, 8.0};
    const auto fit = verify::fit_uncertainty(sym, grid, stripes, lambdas, 6, 2.0, 23);

    CHECK(fit.d1 >= 0.0);
    CHECK(fit.residual_max >= -1e-13);
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        CHECK(fit.log_d0 + fit.d1 * lambdas[i] >= fit.worst_log_ratio[i] - 1e-12);

    // Worst observed ratio is monotone in the sample count (max over a superset).
    const auto fit2 = verify::fit_uncertainty(sym, grid, stripes, lambdas, 12, 2.0, 23);
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        CHECK(fit2.worst_log_ratio[i] >= fit.worst_log_ratio[i] - 1e-13);

    CHECK_THROWS_AS(
        verify::fit_uncertainty(sym, grid, stripes, {100.0}, 2, 2.0, 1),  // > Nyquist/4
        InvalidParams);
    Mask empty(grid);
    CHECK_THROWS_AS(verify::fit_uncertainty(sym, grid, empty, lambdas, 2, 2.0, 1),
                    InvalidParams);
}

TEST_CASE("dissipation check: exact multiplier comparison") {
    const GridSpec grid(1, 256, 16.0);
    EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const auto rep = verify::check_dissipation(sym, {4.0, 8.0}, {0.25, 0.5, 1.0}, grid);
    CHECK(rep.ok);
    CHECK(rep.worst_margin >= -1e-12);
    CHECK(rep.entries.size() == 6);
    for (const auto& e : rep.entries) {
        CHECK(e.bound == doctest::Approx(std::exp(-e.t * std::pow(e.lambda / 2.0, 2.0)))
                             .epsilon(1e-13));
        CHECK(e.measured_sup <= e.bound + 1e-12);
        CHECK(e.measured_sup >= 0.0);
    }

    // Fourth-order symbol on a 2-d grid (c = 1/2) passes as well.
    const GridSpec grid2(2, 64, 8.0);
    EllipticSymbol quart = EllipticSymbol::axis_quartic(2);
    ellipticity_constant(quart);
    CHECK(verify::check_dissipation(quart, {2.0, 4.0}, {0.5}, grid2).ok);

    EllipticSymbol unset = EllipticSymbol::axis_quartic(2);  // c not yet computed
    CHECK_THROWS_AS(verify::check_dissipation(unset, {2.0}, {0.5}, grid2), InvalidParams);
}

TEST_CASE("observability ratio: full observation at r = infinity is bounded by 1") {
    const GridSpec grid(1, 64, 10.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    Mask full(grid);
    for (auto& b : full.bits) b = 1;
    const auto rep = verify::estimate_observability_ratio(sym, full, 0.5, LrIndex::inf(),
                                                          2.0, 8, 32, 3);
    CHECK(rep.ratios.size() == 8);
    for (double ratio : rep.ratios) {
        // sup_t ||S_t x0||_2 >= ||S_T x0||_2 since the heat multiplier contracts.
        CHECK(ratio <= 1.0 + 1e-10);
        CHECK(ratio > 0.0);
    }
    CHECK(rep.C_emp <= 1.0 + 1e-10);
    CHECK(std::isnan(rep.log_margin));  // no certificate supplied

    CHECK_THROWS_AS(verify::estimate_observability_ratio(sym, full, 0.0, LrIndex::inf(),
                                                         2.0, 2, 16, 3),
                    InvalidParams);
    Mask empty(grid);
    CHECK_THROWS_AS(verify::estimate_observability_ratio(sym, empty, 0.5, LrIndex::inf(),
                                                         2.0, 2, 16, 3),
                    InvalidParams);
}

TEST_CASE("observability ratio against a certified bound has positive log margin") {
    const GridSpec grid(1, 128, 16.0);
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const Mask stripes = gen_stripes(grid, 0.5, 8);
    const cert::CertBundle bundle = cert::elliptic_cobs(
        0.5, {0.5}, 1.0, 1.0, 2, 2.0, 1.0, 1.0, 0.5, LrIndex::finite(2.0));
    const auto rep = verify::estimate_observability_ratio(
        sym, stripes, 0.5, LrIndex::finite(2.0), 2.0, 6, 48, 5, &bundle);
    CHECK(rep.log_cobs == bundle.log_cobs_closed);
    CHECK(rep.log_margin == doctest::Approx(rep.log_cobs - std::log(rep.C_emp)));
    CHECK(rep.log_margin > 0.0);
}

TEST_CASE("growing holes blow the observability ratio up") {
    const EllipticSymbol sym = EllipticSymbol::laplacian(1);
    const auto rows = verify::counterexample_sweep(sym, {1.0, 2.0, 4.0}, 1.0,
                                                   LrIndex::finite(2.0), 2.0, 8.0, 8.0, 48);
    REQUIRE(rows.size() == 3);
    // The numerator tracks ||p_{T+1}||_p independently of the hole.
    for (const auto& row : rows) {
        CHECK(row.numerator == doctest::Approx(row.kernel_norm).epsilon(1e-6));
        CHECK(row.denominator > 0.0);
    }
    CHECK(rows[1].ratio > rows[0].ratio);
    CHECK(rows[2].ratio > rows[1].ratio);
}
