#include "obscert/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "obscert/parallel.hpp"
#include "obscert/rng.hpp"
#include "obscert/transform.hpp"

namespace obscert::verify {

namespace {

constexpr double kDenomFloor = 1e-300;

Field restrict_to_mask(const Field& f, const Mask& mask) {
    if (f.values.size() != mask.bits.size())
        throw InvalidParams("restrict_to_mask: grid mismatch");
    Field out = f;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (!mask.bits[i]) out.values[i] = 0.0;
    return out;
}

// ||1_w S_{t_j} x0||_p at the n_t midpoints of (0,T), one forward transform.
std::vector<double> observed_norms(const EllipticSymbol& symbol, const Mask& mask,
                                   const Field& x0, double T, int n_t, double p) {
    Field xhat = x0;
    dft_inplace(xhat, -1);
    const auto a = symbol_values(symbol, x0.grid);
    const double scale = 1.0 / static_cast<double>(x0.grid.size());

    std::vector<double> out(n_t);
    Field tmp(x0.grid);
    for (int j = 0; j < n_t; ++j) {
        const double t = (j + 0.5) * T / n_t;
        for (std::size_t i = 0; i < tmp.values.size(); ++i)
            tmp.values[i] = xhat.values[i] * std::exp(-t * a[i]) * scale;
        dft_inplace(tmp, +1);
        for (std::size_t i = 0; i < tmp.values.size(); ++i)
            if (!mask.bits[i]) tmp.values[i] = 0.0;
        out[j] = lp_norm(tmp, p);
    }
    return out;
}

}  // namespace

FitResult fit_uncertainty(const EllipticSymbol& /*symbol*/, const GridSpec& grid,
                          const Mask& mask, const std::vector<double>& lambdas,
                          int samples, double p, std::uint64_t seed) {
    if (mask.count() == 0) throw InvalidParams("fit_uncertainty: mask is empty");
    if (lambdas.empty() || samples < 1)
        throw InvalidParams("fit_uncertainty: need lambdas and samples");
    for (double l : lambdas)
        if (!(l > 0.0) || l > grid.nyquist() / 4.0)
            throw InvalidParams("fit_uncertainty: lambda must be in (0, Nyquist/4]");

    FitResult fit;
    fit.lambdas = lambdas;
    fit.samples = samples;
    fit.worst_log_ratio.resize(lambdas.size());

    const std::size_t total = lambdas.size() * static_cast<std::size_t>(samples);
    std::vector<double> log_ratios(total);
    std::vector<std::exception_ptr> errors(total);
    parallel_for(total, [&](std::size_t id) {
        try {
            const std::size_t li = id / samples;
            const std::size_t s = id % samples;
            // Seed keyed by (lambda, sample) so that enlarging the sample count
            // reuses (a superset of) the same draws.
            Field f = projector_apply(lambdas[li],
                                      white_field(grid, seed + 1000003 * li + 7919 * s));
            const double num = lp_norm(f, p);
            const double den = lp_norm(restrict_to_mask(f, mask), p);
            if (den < kDenomFloor)
                throw NonConvergence("fit_uncertainty: restriction lost all mass at lambda=" +
                                     std::to_string(lambdas[li]) + ", sample " +
                                     std::to_string(id % samples));
            log_ratios[id] = std::log(num / den);
        } catch (...) {
            errors[id] = std::current_exception();
        }
    });
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        double worst = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < samples; ++s)
            worst = std::max(worst, log_ratios[li * samples + s]);
        fit.worst_log_ratio[li] = worst;
    }

    // Envelope fit: among support lines with slope >= 0 dominating every point,
    // pick the one with least total excess.
    const auto& xs = fit.lambdas;
    const auto& ys = fit.worst_log_ratio;
    std::vector<double> slopes{0.0};
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (xs[j] != xs[i])
                slopes.push_back(std::max(0.0, (ys[j] - ys[i]) / (xs[j] - xs[i])));
    double best_obj = std::numeric_limits<double>::infinity();
    for (double a : slopes) {
        double b = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < xs.size(); ++i) b = std::max(b, ys[i] - a * xs[i]);
        double obj = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) obj += b + a * xs[i] - ys[i];
        if (obj < best_obj) {
            best_obj = obj;
            fit.d1 = a;
            fit.log_d0 = b;
        }
    }
    fit.d0 = std::exp(fit.log_d0);
    fit.residual_max = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        fit.residual_max = std::max(fit.residual_max, fit.log_d0 + fit.d1 * xs[i] - ys[i]);
    return fit;
}

DissipationReport check_dissipation(const EllipticSymbol& symbol,
                                    const std::vector<double>& lambdas,
                                    const std::vector<double>& times,
                                    const GridSpec& grid) {
    if (!(symbol.c > 0.0))
        throw InvalidParams("check_dissipation: symbol.c not set (run ellipticity_constant)");
    const auto a = symbol_values(symbol, grid);
    const auto radii = frequency_radii(grid);

    DissipationReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (double lambda : lambdas) {
        if (!(lambda > 0.0)) throw InvalidParams("check_dissipation: lambda must be > 0");
        for (double t : times) {
            if (!(t > 0.0)) throw InvalidParams("check_dissipation: t must be > 0");
            DissipationEntry e;
            e.lambda = lambda;
            e.t = t;
            e.measured_sup = 0.0;
            e.worst_xi_index = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double chi = eta_cutoff(radii[i] / lambda);
                const double v = (1.0 - chi) * std::exp(-t * a[i].real());
                if (v > e.measured_sup) {
                    e.measured_sup = v;
                    e.worst_xi_index = i;
                }
            }
            e.bound = std::exp(-symbol.c * t * std::pow(lambda / 2.0, symbol.m));
            e.margin = e.bound - e.measured_sup;
            rep.worst_margin = std::min(rep.worst_margin, e.margin);
            rep.entries.push_back(e);
        }
    }
    rep.ok = rep.worst_margin >= -1e-12;
    return rep;
}

ObsRatioReport estimate_observability_ratio(const EllipticSymbol& symbol, const Mask& mask,
                                            double T, LrIndex r, double p, int samples,
                                            int n_t, std::uint64_t seed,
                                            const cert::CertBundle* bound) {
    if (!(T > 0.0)) throw InvalidParams("estimate_observability_ratio: T must be > 0");
    if (mask.count() == 0) throw InvalidParams("estimate_observability_ratio: mask is empty");
    if (samples < 1 || n_t < 2)
        throw InvalidParams("estimate_observability_ratio: need samples and n_t >= 2");

    ObsRatioReport rep;
    rep.T = T;
    rep.r = r;
    rep.p = p;
    rep.n_t = n_t;
    rep.ratios.resize(samples);

    std::vector<std::exception_ptr> errors(samples);
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
        try {
            const Field x0 = white_field(mask.grid, seed + 7919 * static_cast<std::uint64_t>(s));
            if (lp_norm(x0, 2.0) == 0.0)
                throw InvalidParams("estimate_observability_ratio: zero initial state");
            const double num = lp_norm(semigroup_apply(symbol, T, x0), p);
            const auto g = observed_norms(symbol, mask, x0, T, n_t, p);
            const double den = lr_time_norm(g, r, T);
            if (den < kDenomFloor)
                throw NonConvergence(
                    "estimate_observability_ratio: denominator underflow at sample " +
                    std::to_string(s));
            rep.ratios[s] = num / den;
        } catch (...) {
            errors[s] = std::current_exception();
        }
    });
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    rep.C_emp = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    if (bound != nullptr) {
        rep.log_cobs = bound->log_cobs_closed;
        rep.log_margin = rep.log_cobs - std::log(rep.C_emp);
    }
    return rep;
}

std::vector<CounterexampleRow> counterexample_sweep(const EllipticSymbol& symbol,
                                                    const std::vector<double>& radii,
                                                    double T, LrIndex r, double p,
                                                    double cells_per_unit, double box_factor,
                                                    int n_t) {
    if (!(T > 0.0)) throw InvalidParams("counterexample_sweep: T must be > 0");
    if (!(box_factor >= 4.0))
        throw InvalidParams("counterexample_sweep: box too small for radius (need box >= 4n)");

    std::vector<CounterexampleRow> rows;
    for (double n : radii) {
        CounterexampleRow row;
        row.radius = n;
        row.box = n > 0.0 ? box_factor * n : box_factor * 2.0;
        int N = 8;
        while (N < row.box * cells_per_unit) N *= 2;
        row.N = N;
        const GridSpec grid(symbol.d, N, row.box);
        const std::vector<double> center(symbol.d, row.box / 2.0);

        // f_n = p_1 centered in the hole: shift the kernel by N/2 cells.
        const Field ker = kernel_field(symbol, 1.0, grid);
        Field f(grid);
        int idx[3];
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            unflatten(grid, i, idx);
            int src[3] = {0, 0, 0};
            for (int ax = 0; ax < grid.d; ++ax) src[ax] = (idx[ax] + N / 2) % N;
            f.values[i] = ker.values[flatten(grid, src)];
        }

        const Mask mask = gen_holed(grid, n, center);
        if (mask.count() == 0) throw InvalidParams("counterexample_sweep: hole fills the box");

        row.numerator = lp_norm(semigroup_apply(symbol, T, f), p);
        row.kernel_norm = lp_norm(kernel_field(symbol, T + 1.0, grid), p);
        const auto g = observed_norms(symbol, mask, f, T, n_t, p);
        row.denominator = lr_time_norm(g, r, T);
        row.ratio = row.numerator / std::max(row.denominator, kDenomFloor);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace obscert::verify
