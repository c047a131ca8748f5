#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "obscert/cert_engine.hpp"
#include "obscert/spectral.hpp"
#include "obscert/thickness.hpp"

namespace obscert::verify {

// Upper-envelope fit of ln||P_l f||/||1_w P_l f|| against lambda (gamma1 = 1):
// ln d0 + d1 * lambda >= worst observed log-ratio for every lambda.
struct FitResult {
    std::vector<double> lambdas;
    std::vector<double> worst_log_ratio;  // per lambda, max over samples
    double log_d0 = 0.0;
    double d0 = 1.0;
    double d1 = 0.0;
    double residual_max = 0.0;  // max of (fit - data), >= 0 by construction
    int samples = 0;
};

FitResult fit_uncertainty(const EllipticSymbol& symbol, const GridSpec& grid,
                          const Mask& mask, const std::vector<double>& lambdas,
                          int samples, double p, std::uint64_t seed);

struct DissipationEntry {
    double lambda;
    double t;
    double measured_sup;  // sup_xi |(1 - chi_lambda(xi)) e^{-t a(xi)}|
    double bound;         // e^{-c t (lambda/2)^m}
    double margin;        // bound - measured
    std::size_t worst_xi_index;
};

struct DissipationReport {
    std::vector<DissipationEntry> entries;
    double worst_margin = 0.0;
    bool ok = false;  // every margin >= -1e-12
};

// Exact multiplier-level check of the L2 dissipation estimate. symbol.c must
// be set (run ellipticity_constant first).
DissipationReport check_dissipation(const EllipticSymbol& symbol,
                                    const std::vector<double>& lambdas,
                                    const std::vector<double>& times,
                                    const GridSpec& grid);

struct ObsRatioReport {
    double T;
    LrIndex r = LrIndex::finite(2.0);
    double p;
    int n_t;
    std::vector<double> ratios;  // per sample
    double C_emp = 0.0;          // max over samples
    // Filled when a certified bound was supplied.
    double log_cobs = std::numeric_limits<double>::quiet_NaN();
    double log_margin = std::numeric_limits<double>::quiet_NaN();  // ln(C_obs/C_emp)
};

// Empirical final-state observability ratio over random initial states.
ObsRatioReport estimate_observability_ratio(const EllipticSymbol& symbol, const Mask& mask,
                                            double T, LrIndex r, double p, int samples,
                                            int n_t, std::uint64_t seed,
                                            const cert::CertBundle* bound = nullptr);

struct CounterexampleRow {
    double radius;  // hole radius n (0 = full mask)
    double box;
    int N;
    double numerator;         // ||S_T f_n||_p on this grid
    double kernel_norm;       // ||p_{T+1}||_p on this grid (oracle for the numerator)
    double denominator;       // ||1_w S_. f_n||_{L_r((0,T);L_p)}
    double ratio;
};

// Non-thick blow-up mechanism: initial state p_1 centered in a growing hole on
// a growing box (box = box_factor * n), ratio vs hole radius.
std::vector<CounterexampleRow> counterexample_sweep(const EllipticSymbol& symbol,
                                                    const std::vector<double>& radii,
                                                    double T, LrIndex r, double p,
                                                    double cells_per_unit = 16.0,
                                                    double box_factor = 8.0,
                                                    int n_t = 128);

}  // namespace obscert::verify
