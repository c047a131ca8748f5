#include "obscert/control.hpp"

#include <cmath>
#include <sstream>

#include "obscert/transform.hpp"

namespace obscert::control {

std::complex<double> inner(const Field& f, const Field& g) {
    f.check_same_grid(g);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        acc += f.values[i] * std::conj(g.values[i]);
    return acc * f.grid.cell_volume();
}

namespace {

void axpy(Field& y, double alpha, const Field& x) {
    for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += alpha * x.values[i];
}

void apply_mask(Field& f, const Mask& mask) {
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (!mask.bits[i]) f.values[i] = 0.0;
}

}  // namespace

Field duhamel_solve(const EllipticSymbol& symbol, const Mask& mask, const Field& x0,
                    const std::vector<Field>& u, double T) {
    if (!(T > 0.0)) throw InvalidParams("duhamel_solve: T must be > 0");
    if (u.empty()) throw InvalidParams("duhamel_solve: empty control time grid");
    if (!(mask.grid == x0.grid)) throw InvalidParams("duhamel_solve: grid mismatch");
    const int n_t = static_cast<int>(u.size());
    const double w = T / n_t;
    const auto a = symbol_values(symbol, x0.grid);
    const double scale = 1.0 / static_cast<double>(x0.grid.size());

    Field acc_hat = x0;
    dft_inplace(acc_hat, -1);
    for (std::size_t i = 0; i < acc_hat.values.size(); ++i)
        acc_hat.values[i] *= std::exp(-T * a[i]);

    for (int j = 0; j < n_t; ++j) {
        x0.check_same_grid(u[j]);
        const double tau = (j + 0.5) * w;
        Field uj = u[j];
        apply_mask(uj, mask);  // B = 1'_w
        dft_inplace(uj, -1);
        for (std::size_t i = 0; i < uj.values.size(); ++i)
            acc_hat.values[i] += w * uj.values[i] * std::exp(-(T - tau) * a[i]);
    }
    for (auto& v : acc_hat.values) v *= scale;
    dft_inplace(acc_hat, +1);
    return acc_hat;
}

Field gramian_apply(const EllipticSymbol& symbol, const Mask& mask, double T, int n_t,
                    const Field& phi) {
    if (!(T > 0.0)) throw InvalidParams("gramian_apply: T must be > 0");
    if (n_t < 1) throw InvalidParams("gramian_apply: n_t must be >= 1");
    if (!(mask.grid == phi.grid)) throw InvalidParams("gramian_apply: grid mismatch");
    const double w = T / n_t;
    const auto a = symbol_values(symbol, phi.grid);
    const double scale = 1.0 / static_cast<double>(phi.grid.size());

    Field phi_hat = phi;
    dft_inplace(phi_hat, -1);

    Field acc_hat(phi.grid);
    Field tmp(phi.grid);
    for (int j = 0; j < n_t; ++j) {
        const double s = (j + 0.5) * w;
        // 1_w S_s^* phi (adjoint semigroup: conjugate symbol)
        for (std::size_t i = 0; i < tmp.values.size(); ++i)
            tmp.values[i] = phi_hat.values[i] * std::exp(-s * std::conj(a[i])) * scale;
        dft_inplace(tmp, +1);
        apply_mask(tmp, mask);
        // S_s 1'_w of that, accumulated in frequency space
        dft_inplace(tmp, -1);
        for (std::size_t i = 0; i < tmp.values.size(); ++i)
            acc_hat.values[i] += w * tmp.values[i] * std::exp(-s * a[i]);
    }
    for (auto& v : acc_hat.values) v *= scale;
    dft_inplace(acc_hat, +1);
    return acc_hat;
}

ControlResult hum_control(const EllipticSymbol& symbol, const Mask& mask, const Field& x0,
                          double T, int n_t, double cg_tol, int cg_maxiter,
                          const cert::CertBundle* bound) {
    if (mask.count() == 0) throw InvalidParams("hum_control: mask is empty");
    ControlResult res;
    res.T = T;
    res.n_t = n_t;

    const double x0_norm = std::sqrt(inner(x0, x0).real());
    const Field sT_x0 = semigroup_apply(symbol, T, x0);

    // rhs = -S_T x0
    Field rhs = sT_x0;
    for (auto& v : rhs.values) v = -v;

    Field phi(x0.grid);
    if (x0_norm > 0.0) {
        // Matrix-free CG on the Hermitian PSD Gramian; stop when the CG
        // residual (which equals ||x(T)||_2 at the discrete level) is below
        // cg_tol * ||x0||_2.
        Field r = rhs;
        Field p = r;
        double rs = inner(r, r).real();
        const double target = cg_tol * x0_norm;
        int it = 0;
        for (; it < cg_maxiter; ++it) {
            res.cg_residual_history.push_back(std::sqrt(rs));
            if (std::sqrt(rs) <= target) break;
            const Field Ap = gramian_apply(symbol, mask, T, n_t, p);
            const double pAp = inner(Ap, p).real();
            if (!(pAp > 0.0)) {
                std::ostringstream msg;
                msg << "hum_control: CG stagnated (Gramian not positive on search direction, "
                    << "<Ap,p> = " << pAp << " at iteration " << it
                    << "; near-degenerate observability?)";
                throw NonConvergence(msg.str());
            }
            const double alpha = rs / pAp;
            axpy(phi, alpha, p);
            axpy(r, -alpha, Ap);
            const double rs_new = inner(r, r).real();
            // p = r + (rs_new/rs) p
            const double beta = rs_new / rs;
            for (std::size_t i = 0; i < p.values.size(); ++i)
                p.values[i] = r.values[i] + beta * p.values[i];
            rs = rs_new;
        }
        res.cg_iterations = it;
        if (std::sqrt(rs) > target) {
            std::ostringstream msg;
            msg << "hum_control: CG did not reach tolerance " << target << " in " << cg_maxiter
                << " iterations; residual history tail:";
            const std::size_t h = res.cg_residual_history.size();
            for (std::size_t i = h > 5 ? h - 5 : 0; i < h; ++i)
                msg << " " << res.cg_residual_history[i];
            throw NonConvergence(msg.str());
        }
    }

    // u(tau_j) = 1_w S^*_{T-tau_j} phi at the Duhamel midpoints
    res.u.reserve(n_t);
    const double w = T / n_t;
    for (int j = 0; j < n_t; ++j) {
        const double tau = (j + 0.5) * w;
        Field uj = semigroup_apply(symbol, T - tau, phi, /*adjoint=*/true);
        apply_mask(uj, mask);
        res.u.push_back(std::move(uj));
    }

    double cost_sq = 0.0;
    for (const auto& uj : res.u) cost_sq += w * inner(uj, uj).real();
    res.cost = std::sqrt(cost_sq);
    res.cost_sq_gramian = inner(gramian_apply(symbol, mask, T, n_t, phi), phi).real();
    res.cost_sq_rhs = -inner(sT_x0, phi).real();

    const Field xT = duhamel_solve(symbol, mask, x0, res.u, T);
    res.residual = std::sqrt(inner(xT, xT).real());
    res.residual_rel = x0_norm > 0.0 ? res.residual / x0_norm : 0.0;

    if (bound != nullptr && x0_norm > 0.0 && res.cost > 0.0) {
        res.log_cobs = bound->log_cobs_closed;
        res.log_cost_margin = res.log_cobs + std::log(x0_norm) - std::log(res.cost);
    }
    return res;
}

}  // namespace obscert::control
