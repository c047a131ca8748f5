#pragma once

#include <optional>
#include <vector>

#include "obscert/cert_engine.hpp"
#include "obscert/spectral.hpp"
#include "obscert/thickness.hpp"

namespace obscert::control {

// L2 grid inner product <f,g> = dx^d sum f conj(g).
std::complex<double> inner(const Field& f, const Field& g);

// Terminal state of the controlled system, midpoint quadrature of Duhamel:
// x(T) = S_T x0 + (T/n_t) sum_j S_{T - tau_j} 1'_w u_j, tau_j the midpoints.
// u holds one masked field per midpoint (entries off the mask are ignored).
Field duhamel_solve(const EllipticSymbol& symbol, const Mask& mask, const Field& x0,
                    const std::vector<Field>& u, double T);

// HUM Gramian: Lambda_T phi = (T/n_t) sum_j S_{s_j} 1'_w 1_w S_{s_j}^* phi,
// s_j the midpoints of (0,T). Self-adjoint and positive semidefinite.
Field gramian_apply(const EllipticSymbol& symbol, const Mask& mask, double T, int n_t,
                    const Field& phi);

struct ControlResult {
    double T;
    int n_t;
    std::vector<Field> u;      // control samples at the Duhamel midpoints
    double cost = 0.0;         // ||u||_{L2((0,T);L2(w))}
    double cost_sq_gramian = 0.0;  // <Lambda phi, phi>
    double cost_sq_rhs = 0.0;      // -<S_T x0, phi>
    double residual = 0.0;         // ||x(T)||_2
    double residual_rel = 0.0;     // ||x(T)||_2 / ||x0||_2
    int cg_iterations = 0;
    std::vector<double> cg_residual_history;
    // Filled when a certified bound was supplied.
    double log_cobs = std::numeric_limits<double>::quiet_NaN();
    double log_cost_margin = std::numeric_limits<double>::quiet_NaN();  // ln(C_obs ||x0|| / cost)
};

// Minimal-norm control (p = r = 2): solve Lambda_T phi = -S_T x0 by matrix-free
// conjugate gradient, then u(tau) = 1_w S^*_{T-tau} phi. Throws NonConvergence
// with the residual history when CG stagnates.
ControlResult hum_control(const EllipticSymbol& symbol, const Mask& mask, const Field& x0,
                          double T, int n_t, double cg_tol = 1e-8, int cg_maxiter = 200,
                          const cert::CertBundle* bound = nullptr);

}  // namespace obscert::control
