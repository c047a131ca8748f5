#pragma once

#include <cstdint>
#include <vector>

#include "obscert/grid.hpp"
#include "obscert/lr_index.hpp"
#include "obscert/symbol.hpp"

namespace obscert {

// Smooth frequency cutoff: eta(r) = 1 for r <= 1/2, 0 for r >= 1, and the
// standard C-infinity bump blend in between.
double eta_cutoff(double r);

// Symbol values a(xi_k) over the grid's frequency lattice in FFT order.
std::vector<std::complex<double>> symbol_values(const EllipticSymbol& symbol,
                                                const GridSpec& grid);

// |xi_k| over the frequency lattice in FFT order.
std::vector<double> frequency_radii(const GridSpec& grid);

// S_t f = F^{-1} e^{-t a} F f (adjoint uses the conjugate symbol).
Field semigroup_apply(const EllipticSymbol& symbol, double t, const Field& f,
                      bool adjoint = false);

// P_lambda f = F^{-1} chi_lambda F f with chi_lambda(xi) = eta(|xi|/lambda).
Field projector_apply(double lambda, const Field& f);

// Convolution kernel p_t = (2 pi)^{-d/2} F^{-1} e^{-t a}, sampled on the grid
// (peak at x = 0, wrapping periodically). t = 0 is rejected.
Field kernel_field(const EllipticSymbol& symbol, double t, const GridSpec& grid);

// F^{-1} chi_lambda sampled on the grid (continuum-normalized inverse transform).
Field inverse_fourier_cutoff(double lambda, const GridSpec& grid);

// Riemann-sum L_p norm; p = infinity -> max |f|.
double lp_norm(const Field& f, double p);

// Composite midpoint L_r((0,T)) norm of samples g(t_j) at the n midpoints;
// r = inf -> max.
double lr_time_norm(const std::vector<double>& samples, LrIndex r, double T);

struct SemigroupBounds {
    double M;    // quadrature of ||p_1||_L1, clamped to >= 1
    double M_raw;
    double C_d;  // (2 pi)^{-d/2} ||F^{-1} chi_1||_L1
};

// M via Young + kernel scaling (||S_t||_{p->p} <= ||p_1||_L1), C_d from the
// projector kernel. eta_grid is used for the chi_1 kernel quadrature.
SemigroupBounds estimate_M_and_Cd(const EllipticSymbol& symbol, const GridSpec& grid,
                                  const GridSpec& eta_grid);

// Deterministic test vectors.
Field white_field(const GridSpec& grid, std::uint64_t seed);
Field band_limited_field(const GridSpec& grid, double lambda, std::uint64_t seed);
Field gaussian_bump(const GridSpec& grid, double s, const std::vector<double>& x0);

}  // namespace obscert
