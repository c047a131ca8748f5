#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "obscert/errors.hpp"
#include "obscert/lr_index.hpp"

namespace obscert::cert {

// Input tuple of the abstract observability bound: semigroup growth (M, omega),
// uncertainty relation (d0, d1, gamma1) above the threshold lambda_star,
// dissipation estimate (d2, d3, gamma2, gamma3), observation norm, horizon T
// and time index r.
struct AbstractParams {
    double M = 1.0;            // semigroup bound, >= 1
    double omega = 0.0;        // growth rate
    double lambda_star = 0.0;  // spectral threshold, >= 0
    double d0 = 1.0;           // uncertainty prefactor, > 0
    double d1 = 1.0;           // uncertainty exponent coefficient, > 0
    double gamma1 = 1.0;       // uncertainty exponent, > 0
    double d2 = 1.0;           // dissipation prefactor, >= 1
    double d3 = 1.0;           // dissipation rate, > 0
    double gamma2 = 2.0;       // dissipation spectral exponent, > gamma1
    double gamma3 = 1.0;       // dissipation time exponent, > 0
    double norm_C = 1.0;       // operator norm of C, > 0
    double T = 1.0;            // horizon, > 0
    LrIndex r = LrIndex::finite(1.0);

    // ln(d0), kept alongside d0 so that prefactors like (K^d/rho)^{Kd} stay
    // representable when d0 itself overflows double. NaN means "derive from d0".
    double log_d0 = std::numeric_limits<double>::quiet_NaN();

    double logD0() const { return std::isnan(log_d0) ? std::log(d0) : log_d0; }

    // Throws InvalidParams naming the violated field.
    void validate() const;
};

struct DerivedConstants {
    double alpha0 = 0.0;
    double nu0 = 0.0;
    double T0 = 0.0;
    double alpha = 0.0;
    double nu = 0.0;
    bool small_time_branch = false;  // T <= T0 (closed interval as printed)
    double omega_plus = 0.0;
    double log_K1 = 0.0;  // K1 = (d0*||C|| + 1) d2 M^2 e^{5 omega_+ T / 4}
    double K1 = 0.0;
    double K2 = 0.0;
    double K3 = 0.0;
    double decay_base = 0.0;  // alpha^{gamma2} / 4^{gamma3}, >= 2
};

struct CertBundle {
    AbstractParams params;
    DerivedConstants derived;

    double log_C1 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;

    double log_cobs_closed = std::numeric_limits<double>::quiet_NaN();
    double cobs_closed = std::numeric_limits<double>::quiet_NaN();

    double log_cobs_series = std::numeric_limits<double>::quiet_NaN();
    double cobs_series = std::numeric_limits<double>::quiet_NaN();
    int series_terms_used = 0;

    std::string inputs_provenance;

    nlohmann::json to_json() const;
    static CertBundle from_json(const nlohmann::json& j);
};

// alpha0, nu0, T0, the (T <= T0) case split for alpha and nu, and K1..K3.
DerivedConstants derived_constants(const AbstractParams& params);

// Closed-form bound C_obs = C1 / T^{1/r} * exp(C2 / T^{g1 g3/(g2-g1)} + C3 T).
CertBundle cobs_closed_form(const AbstractParams& params);

// Series bound: r=1 value of
//   2 M d0 e^{om+ T} / T * (e^{d1 nu^g1} + e^{K2/(q-1)} sum_k (4K1)^k e^{-K3 q^k})
// scaled by T^{1 - 1/r} for general r. Truncation: term < rel_tol * partial sum
// with terms decreasing; hard cap 10^4 terms.
CertBundle cobs_series_bound(const AbstractParams& params, double rel_tol = 1e-14);

struct ContinuousConstants {
    double d0, log_d0, d1, d2, d3;
    double lambda_star = 0.0;
};

// Discrete family (P_k) to continuous family (P_lambda):
// d0 = d0~ e^{d1~}, d1 = 2^{g1} d1~, d2 = d2~, d3 = d3~, lambda* = 0.
ContinuousConstants discrete_to_continuous(double d0t, double d1t, double d2t,
                                           double d3t, double gamma1);

struct LsConstants {
    double d0;
    double log_d0;
    double d1;
    double gamma1 = 1.0;
};

// Logvinenko-Sereda constants for a (rho,L)-thick set:
// d0 = (K^d/rho)^{Kd}, d1 = -2 K |L|_1 ln(rho/K^d), gamma1 = 1.
LsConstants ls_constants(double rho, const std::vector<double>& L, double K, int d);

struct InterpolationParams {
    double p0;
    double theta;
};

// Riesz-Thorin parameters: 1/p = (1-theta)/p0 + theta/2.
InterpolationParams interpolation_params(double p);

struct DissipationConstants {
    double d2;
    double d3;
    double gamma2;  // = m
    double gamma3 = 1.0;
};

// d2 = (1+C_d)^{1-theta} M^{1-theta}, d3 = c theta / 2^m.
DissipationConstants dissipation_constants(double c, int m, double p, double M, double C_d);

// Full elliptic pipeline: LS + dissipation constants chained into the abstract
// bound with omega = 0, lambda* = 0, ||C|| = 1.
CertBundle elliptic_cobs(double rho, const std::vector<double>& L, double K, double c,
                         int m, double p, double M, double C_d, double T, LrIndex r);

}  // namespace obscert::cert
