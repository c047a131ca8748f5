#include "obscert/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "obscert/rng.hpp"
#include "obscert/transform.hpp"

namespace obscert {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

double eta_cutoff(double r) {
    if (r <= 0.5) return 1.0;
    if (r >= 1.0) return 0.0;
    const double u = 2.0 * r - 1.0;  // in (0,1)
    const double phi_u = std::exp(-1.0 / u);
    const double phi_1mu = std::exp(-1.0 / (1.0 - u));
    return phi_1mu / (phi_1mu + phi_u);
}

std::vector<std::complex<double>> symbol_values(const EllipticSymbol& symbol,
                                                const GridSpec& grid) {
    if (symbol.d != grid.d) throw InvalidParams("symbol_values: dimension mismatch");
    const std::size_t n = grid.size();
    std::vector<std::complex<double>> out(n);
    int idx[3];
    double xi[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        unflatten(grid, i, idx);
        for (int ax = 0; ax < grid.d; ++ax) xi[ax] = grid.xi(idx[ax]);
        out[i] = symbol.eval(std::span<const double>(xi, grid.d));
    }
    return out;
}

std::vector<double> frequency_radii(const GridSpec& grid) {
    const std::size_t n = grid.size();
    std::vector<double> out(n);
    int idx[3];
    for (std::size_t i = 0; i < n; ++i) {
        unflatten(grid, i, idx);
        double r2 = 0.0;
        for (int ax = 0; ax < grid.d; ++ax) {
            const double xi = grid.xi(idx[ax]);
            r2 += xi * xi;
        }
        out[i] = std::sqrt(r2);
    }
    return out;
}

namespace {

Field multiplier_apply(const Field& f, const std::vector<std::complex<double>>& mult) {
    Field out = f;
    dft_inplace(out, -1);
    const double scale = 1.0 / static_cast<double>(f.grid.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= mult[i] * scale;
    dft_inplace(out, +1);
    return out;
}

}  // namespace

Field semigroup_apply(const EllipticSymbol& symbol, double t, const Field& f, bool adjoint) {
    if (!(t >= 0.0)) throw InvalidParams("semigroup_apply: t must be >= 0");
    const auto a = symbol_values(symbol, f.grid);
    std::vector<std::complex<double>> mult(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::complex<double> ai = adjoint ? std::conj(a[i]) : a[i];
        mult[i] = std::exp(-t * ai);
    }
    return multiplier_apply(f, mult);
}

Field projector_apply(double lambda, const Field& f) {
    if (!(lambda > 0.0)) throw InvalidParams("projector_apply: lambda must be > 0");
    const auto radii = frequency_radii(f.grid);
    std::vector<std::complex<double>> mult(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i)
        mult[i] = eta_cutoff(radii[i] / lambda);
    return multiplier_apply(f, mult);
}

Field kernel_field(const EllipticSymbol& symbol, double t, const GridSpec& grid) {
    if (!(t > 0.0)) throw InvalidParams("kernel_field: t must be > 0 (p_0 is a distribution)");
    const auto a = symbol_values(symbol, grid);
    Field out(grid);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = std::exp(-t * a[i]);
    dft_inplace(out, +1);
    // p_t(x_j) = dxi^d / (2 pi)^d * sum_k e^{-t a(xi_k)} e^{i xi_k x_j}
    const double scale = std::pow(grid.dxi() / kTwoPi, grid.d);
    for (auto& v : out.values) v *= scale;
    return out;
}

Field inverse_fourier_cutoff(double lambda, const GridSpec& grid) {
    if (!(lambda > 0.0)) throw InvalidParams("inverse_fourier_cutoff: lambda must be > 0");
    const auto radii = frequency_radii(grid);
    Field out(grid);
    for (std::size_t i = 0; i < radii.size(); ++i)
        out.values[i] = eta_cutoff(radii[i] / lambda);
    dft_inplace(out, +1);
    const double scale = std::pow(grid.dxi(), grid.d) / std::pow(kTwoPi, grid.d / 2.0);
    for (auto& v : out.values) v *= scale;
    return out;
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw InvalidParams("lp_norm: p must be in [1,inf]");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    for (const auto& v : f.values) acc += std::pow(std::abs(v), p);
    return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

double lr_time_norm(const std::vector<double>& samples, LrIndex r, double T) {
    if (samples.size() < 2) throw InvalidParams("lr_time_norm: need at least 2 samples");
    if (!(T > 0.0)) throw InvalidParams("lr_time_norm: T must be > 0");
    if (r.is_inf()) return *std::max_element(samples.begin(), samples.end());
    const double rv = r.value();
    const double dt = T / static_cast<double>(samples.size());
    double acc = 0.0;
    for (double g : samples) acc += std::pow(g, rv);
    return std::pow(acc * dt, 1.0 / rv);
}

SemigroupBounds estimate_M_and_Cd(const EllipticSymbol& symbol, const GridSpec& grid,
                                  const GridSpec& eta_grid) {
    SemigroupBounds b;
    const Field p1 = kernel_field(symbol, 1.0, grid);
    b.M_raw = lp_norm(p1, 1.0);
    b.M = std::max(1.0, b.M_raw);

    const Field k = inverse_fourier_cutoff(1.0, eta_grid);
    b.C_d = lp_norm(k, 1.0) / std::pow(kTwoPi, eta_grid.d / 2.0);
    return b;
}

Field white_field(const GridSpec& grid, std::uint64_t seed) {
    Field f(grid);
    std::mt19937_64 gen = substream(seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : f.values) {
        const double re = normal(gen);
        const double im = normal(gen);
        v = {re, im};
    }
    return f;
}

Field band_limited_field(const GridSpec& grid, double lambda, std::uint64_t seed) {
    if (!(lambda > 0.0)) throw InvalidParams("band_limited_field: lambda must be > 0");
    Field f = white_field(grid, seed);
    dft_inplace(f, -1);
    const auto radii = frequency_radii(grid);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (std::size_t i = 0; i < radii.size(); ++i)
        f.values[i] = radii[i] <= lambda ? f.values[i] * scale : 0.0;
    dft_inplace(f, +1);
    return f;
}

Field gaussian_bump(const GridSpec& grid, double s, const std::vector<double>& x0) {
    if (!(s > 0.0)) throw InvalidParams("gaussian_bump: s must be > 0");
    if (static_cast<int>(x0.size()) != grid.d)
        throw InvalidParams("gaussian_bump: center must have d entries");
    Field f(grid);
    int idx[3];
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        unflatten(grid, i, idx);
        double r2 = 0.0;
        for (int ax = 0; ax < grid.d; ++ax) {
            const double delta = grid.periodic_delta(grid.x(idx[ax]), x0[ax]);
            r2 += delta * delta;
        }
        f.values[i] = std::exp(-r2 / (4.0 * s));
    }
    return f;
}

}  // namespace obscert
