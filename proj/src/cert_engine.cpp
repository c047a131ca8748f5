#include "obscert/cert_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace obscert::cert {

namespace {

constexpr double kELn2 = 2.718281828459045235360287 * 0.693147180559945309417232;  // e ln 2

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NonFiniteConstant(std::string("non-finite constant: ") + what);
}

// log(e^a + e^b) without overflow.
double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

void AbstractParams::validate() const {
    auto bad = [](const std::string& field, double v, const char* cond) {
        throw InvalidParams("invalid-params: " + field + " (" + std::to_string(v) +
                            ") violates " + cond);
    };
    if (!(M >= 1.0)) bad("M", M, "M >= 1");
    if (!std::isfinite(omega)) bad("omega", omega, "finite");
    if (!(lambda_star >= 0.0)) bad("lambda_star", lambda_star, "lambda_star >= 0");
    if (!(d0 > 0.0)) bad("d0", d0, "d0 > 0");
    if (!(d1 > 0.0)) bad("d1", d1, "d1 > 0");
    if (!(gamma1 > 0.0)) bad("gamma1", gamma1, "gamma1 > 0");
    if (!(d2 >= 1.0)) bad("d2", d2, "d2 >= 1");
    if (!(d3 > 0.0)) bad("d3", d3, "d3 > 0");
    if (!(gamma2 > gamma1)) bad("gamma2", gamma2, "gamma2 > gamma1");
    if (!(gamma3 > 0.0)) bad("gamma3", gamma3, "gamma3 > 0");
    if (!(norm_C > 0.0)) bad("norm_C", norm_C, "norm_C > 0");
    if (!(T > 0.0)) bad("T", T, "T > 0");
    if (!std::isfinite(logD0())) bad("log_d0", logD0(), "finite");
}

DerivedConstants derived_constants(const AbstractParams& p) {
    p.validate();
    DerivedConstants d;
    d.omega_plus = std::max(p.omega, 0.0);

    const double log_d0 = p.logD0();
    // K1 = (d0 ||C|| + 1) d2 M^2 e^{5 om+ T / 4}; the first factor in log space
    // since d0 may exceed double range.
    const double log_d0C_plus_1 = log_add_exp(log_d0 + std::log(p.norm_C), 0.0);
    d.log_K1 = log_d0C_plus_1 + std::log(p.d2) + 2.0 * std::log(p.M) +
               5.0 * d.omega_plus * p.T / 4.0;
    d.K1 = std::exp(d.log_K1);
    require_finite(d.log_K1, "ln K1");

    const double g21 = p.gamma2 - p.gamma1;
    d.alpha0 = std::pow(2.0 * std::pow(4.0, p.gamma3), 1.0 / g21);
    const double log4K1 = std::log(4.0) + d.log_K1;
    d.nu0 = std::max(std::pow(2.0 * log4K1 / (kELn2 * p.d1), 1.0 / p.gamma1),
                     2.0 * p.lambda_star);
    d.T0 = std::pow(2.0 * p.d1 * std::pow(d.alpha0, p.gamma2) /
                        (p.d3 * std::pow(d.nu0, g21)),
                    1.0 / p.gamma3);
    require_finite(d.alpha0, "alpha0");
    require_finite(d.nu0, "nu0");
    require_finite(d.T0, "T0");

    d.small_time_branch = (p.T <= d.T0);
    if (d.small_time_branch) {
        d.alpha = d.alpha0;
        d.nu = d.nu0 * std::pow(d.T0 / p.T, p.gamma3 / g21);
    } else {
        d.alpha = d.alpha0 * std::pow(p.T / d.T0, p.gamma3 / p.gamma2);
        d.nu = d.nu0;
    }
    require_finite(d.alpha, "alpha");
    require_finite(d.nu, "nu");

    d.decay_base = std::pow(d.alpha, p.gamma2) / std::pow(4.0, p.gamma3);
    require_finite(d.decay_base, "alpha^g2 / 4^g3");

    d.K2 = p.d3 * std::pow(p.T / 4.0, p.gamma3) * std::pow(d.nu, p.gamma2) -
           p.d1 * std::pow(d.nu, p.gamma1);
    d.K3 = d.K2 / (d.decay_base - 1.0) - p.d1 * std::pow(d.nu, p.gamma1);
    require_finite(d.K2, "K2");
    require_finite(d.K3, "K3");
    if (!(d.K2 > d.K3 && d.K3 > 0.0))
        throw NonFiniteConstant("derived constants out of range: expected K2 > K3 > 0");
    return d;
}

CertBundle cobs_closed_form(const AbstractParams& p) {
    CertBundle b;
    b.params = p;
    b.derived = derived_constants(p);

    const double log_d0 = p.logD0();
    // C1 = 4 M d0 max{ (4 d2 M^2 (d0||C||+1))^{8/(e ln 2)}, e^{4 d1 (2 lambda*)^{g1}} }
    const double log_d0C_plus_1 = log_add_exp(log_d0 + std::log(p.norm_C), 0.0);
    const double log_arg1 = (8.0 / kELn2) *
                            (std::log(4.0 * p.d2) + 2.0 * std::log(p.M) + log_d0C_plus_1);
    const double log_arg2 = 4.0 * p.d1 * std::pow(2.0 * p.lambda_star, p.gamma1);
    require_finite(log_arg2, "4 d1 (2 lambda*)^g1");
    b.log_C1 = std::log(4.0 * p.M) + log_d0 + std::max(log_arg1, log_arg2);
    require_finite(b.log_C1, "ln C1");
    b.C1 = std::exp(b.log_C1);

    const double g21 = p.gamma2 - p.gamma1;
    b.C2 = 4.0 * std::pow(std::pow(2.0, p.gamma1) *
                              std::pow(2.0 * std::pow(4.0, p.gamma3),
                                       p.gamma1 * p.gamma2 / g21) *
                              std::pow(p.d1, p.gamma2) / std::pow(p.d3, p.gamma1),
                          1.0 / g21);
    require_finite(b.C2, "C2");
    b.C3 = std::max(p.omega, 0.0) * (1.0 + 10.0 / kELn2);

    const double t_exponent = p.gamma1 * p.gamma3 / g21;
    b.log_cobs_closed = b.log_C1 - p.r.reciprocal() * std::log(p.T) +
                        b.C2 / std::pow(p.T, t_exponent) + b.C3 * p.T;
    require_finite(b.log_cobs_closed, "ln C_obs");
    b.cobs_closed = std::exp(b.log_cobs_closed);
    return b;
}

CertBundle cobs_series_bound(const AbstractParams& p, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw InvalidParams("invalid-params: rel_tol must be in (0,1)");
    CertBundle b = cobs_closed_form(p);
    const DerivedConstants& d = b.derived;

    const double q = d.decay_base;  // >= 2
    const double log_4K1 = std::log(4.0) + d.log_K1;

    // log of S = sum_{k>=1} (4K1)^k exp(-K3 q^k), streamed in log space.
    constexpr int kMaxTerms = 10000;
    double log_sum = -std::numeric_limits<double>::infinity();
    double prev_log_term = std::numeric_limits<double>::infinity();
    int terms = 0;
    const double log_rel_tol = std::log(rel_tol);
    for (int k = 1; k <= kMaxTerms; ++k) {
        const double qk = std::pow(q, static_cast<double>(k));
        double log_term;
        if (std::isinf(qk)) {
            log_term = -std::numeric_limits<double>::infinity();
        } else {
            log_term = k * log_4K1 - d.K3 * qk;
        }
        log_sum = log_add_exp(log_sum, log_term);
        ++terms;
        if (!std::isfinite(log_sum) && log_sum > 0)
            throw NonFiniteConstant("series partial sum overflow");
        const bool decreasing = log_term < prev_log_term;
        if (decreasing && log_term < log_rel_tol + log_sum) break;
        prev_log_term = log_term;
        if (k == kMaxTerms)
            throw NonConvergence("series did not converge within term cap (corrupted derived constants?)");
    }
    b.series_terms_used = terms;

    const double A = p.d1 * std::pow(d.nu, p.gamma1);
    const double B = d.K2 / (q - 1.0);
    // r=1 bound, then Hoelder scaling T^{1-1/r}.
    double log_r1 = std::log(2.0 * p.M) + p.logD0() + d.omega_plus * p.T -
                    std::log(p.T) + log_add_exp(A, B + log_sum);
    require_finite(log_r1, "ln C~_obs (r=1)");
    b.log_cobs_series = log_r1 + (1.0 - p.r.reciprocal()) * std::log(p.T);
    b.cobs_series = std::exp(b.log_cobs_series);
    return b;
}

ContinuousConstants discrete_to_continuous(double d0t, double d1t, double d2t,
                                           double d3t, double gamma1) {
    if (!(d0t > 0.0 && d1t > 0.0 && d3t > 0.0 && gamma1 > 0.0))
        throw InvalidParams("invalid-params: discrete constants must be positive");
    if (!(d2t >= 1.0))
        throw InvalidParams("invalid-params: d2~ must be >= 1");
    ContinuousConstants c;
    c.log_d0 = std::log(d0t) + d1t;
    c.d0 = d0t * std::exp(d1t);
    c.d1 = std::pow(2.0, gamma1) * d1t;
    c.d2 = d2t;
    c.d3 = d3t;
    c.lambda_star = 0.0;
    return c;
}

LsConstants ls_constants(double rho, const std::vector<double>& L, double K, int d) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw InvalidParams("invalid-params: rho must be in (0,1]");
    if (!(K >= 1.0)) throw InvalidParams("invalid-params: K must be >= 1");
    if (d < 1 || static_cast<int>(L.size()) != d)
        throw InvalidParams("invalid-params: L must have d entries");
    double L1 = 0.0;
    for (double Li : L) {
        if (!(Li > 0.0)) throw InvalidParams("invalid-params: L entries must be positive");
        L1 += Li;
    }
    const double ln_rho_over_Kd = std::log(rho) - d * std::log(K);  // <= 0
    LsConstants c;
    c.log_d0 = -K * d * ln_rho_over_Kd;
    c.d0 = std::exp(c.log_d0);
    c.d1 = -2.0 * K * L1 * ln_rho_over_Kd;
    c.gamma1 = 1.0;
    return c;
}

InterpolationParams interpolation_params(double p) {
    if (!(p > 1.0) || std::isinf(p))
        throw InvalidParams("invalid-params: p must be in (1,inf)");
    InterpolationParams ip;
    if (p == 2.0) {
        ip.p0 = 2.0;
        ip.theta = 1.0;
    } else if (p < 2.0) {
        ip.p0 = p * p - 2.0 * p + 2.0;
        ip.theta = (-2.0 * p * p + 6.0 * p - 4.0) / (-p * p * p + 2.0 * p * p);
    } else {
        ip.p0 = 2.0 * p;
        ip.theta = 1.0 / (p - 1.0);
    }
    return ip;
}

DissipationConstants dissipation_constants(double c, int m, double p, double M, double C_d) {
    if (m < 2 || m % 2 != 0)
        throw InvalidParams("invalid-params: degree m must be even and >= 2");
    if (!(c > 0.0)) throw InvalidParams("invalid-params: ellipticity constant c must be > 0");
    if (!(M >= 1.0)) throw InvalidParams("invalid-params: M must be >= 1");
    if (!(C_d > 0.0)) throw InvalidParams("invalid-params: C_d must be > 0");
    const InterpolationParams ip = interpolation_params(p);
    DissipationConstants dc;
    dc.d2 = std::pow((1.0 + C_d) * M, 1.0 - ip.theta);
    dc.d3 = c * ip.theta / std::pow(2.0, m);
    dc.gamma2 = static_cast<double>(m);
    dc.gamma3 = 1.0;
    return dc;
}

CertBundle elliptic_cobs(double rho, const std::vector<double>& L, double K, double c,
                         int m, double p, double M, double C_d, double T, LrIndex r) {
    const LsConstants ls = ls_constants(rho, L, K, static_cast<int>(L.size()));
    const DissipationConstants dc = dissipation_constants(c, m, p, M, C_d);

    AbstractParams ap;
    ap.M = M;
    ap.omega = 0.0;
    ap.lambda_star = 0.0;
    ap.d0 = ls.d0;
    ap.log_d0 = ls.log_d0;
    // d1 = 0 is possible for rho = 1, K = 1 (full observation). The abstract
    // engine needs d1 > 0, and nu0 ~ 1/d1 must stay representable; 1e-18
    // keeps nu0^gamma2 finite for m <= 4 while leaving C2 ~ d1^{m/(m-1)}
    // numerically zero. The bound is monotone in d1, so it remains valid.
    ap.d1 = std::max(ls.d1, 1e-18);
    ap.gamma1 = ls.gamma1;
    ap.d2 = dc.d2;
    ap.d3 = dc.d3;
    ap.gamma2 = dc.gamma2;
    ap.gamma3 = dc.gamma3;
    ap.norm_C = 1.0;
    ap.T = T;
    ap.r = r;

    CertBundle b = cobs_closed_form(ap);
    std::ostringstream prov;
    prov << "elliptic pipeline: LS(rho=" << rho << ", K=" << K << ", |L|_1 sum of " << L.size()
         << " windows) -> (d0,d1); dissipation(c=" << c << ", m=" << m << ", p=" << p
         << ", M=" << M << ", C_d=" << C_d << ") -> (d2,d3); omega=0, lambda*=0, ||C||=1";
    b.inputs_provenance = prov.str();
    return b;
}

namespace {

nlohmann::json params_to_json(const AbstractParams& p) {
    return nlohmann::json{
        {"M", p.M},         {"omega", p.omega},   {"lambda_star", p.lambda_star},
        {"d0", p.d0},       {"log_d0", p.logD0()}, {"d1", p.d1},
        {"gamma1", p.gamma1}, {"d2", p.d2},       {"d3", p.d3},
        {"gamma2", p.gamma2}, {"gamma3", p.gamma3}, {"norm_C", p.norm_C},
        {"T", p.T},         {"r", p.r.is_inf() ? nlohmann::json("inf") : nlohmann::json(p.r.value())},
    };
}

AbstractParams params_from_json(const nlohmann::json& j) {
    AbstractParams p;
    p.M = j.at("M");
    p.omega = j.at("omega");
    p.lambda_star = j.at("lambda_star");
    p.d0 = j.at("d0");
    p.log_d0 = j.at("log_d0");
    p.d1 = j.at("d1");
    p.gamma1 = j.at("gamma1");
    p.d2 = j.at("d2");
    p.d3 = j.at("d3");
    p.gamma2 = j.at("gamma2");
    p.gamma3 = j.at("gamma3");
    p.norm_C = j.at("norm_C");
    p.T = j.at("T");
    if (j.at("r").is_string())
        p.r = LrIndex::inf();
    else
        p.r = LrIndex::finite(j.at("r").get<double>());
    return p;
}

}  // namespace

nlohmann::json CertBundle::to_json() const {
    return nlohmann::json{
        {"schema", "obscert.cert_bundle.v1"},
        {"params", params_to_json(params)},
        {"derived",
         {{"alpha0", derived.alpha0},
          {"nu0", derived.nu0},
          {"T0", derived.T0},
          {"alpha", derived.alpha},
          {"nu", derived.nu},
          {"small_time_branch", derived.small_time_branch},
          {"omega_plus", derived.omega_plus},
          {"log_K1", derived.log_K1},
          {"K1", derived.K1},
          {"K2", derived.K2},
          {"K3", derived.K3},
          {"decay_base", derived.decay_base}}},
        {"C1", C1},
        {"log_C1", log_C1},
        {"C2", C2},
        {"C3", C3},
        {"cobs_closed", cobs_closed},
        {"log_cobs_closed", log_cobs_closed},
        {"cobs_series", cobs_series},
        {"log_cobs_series", log_cobs_series},
        {"series_terms_used", series_terms_used},
        {"inputs_provenance", inputs_provenance},
    };
}

CertBundle CertBundle::from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "obscert.cert_bundle.v1")
        throw IoError("cert bundle: unknown or missing schema tag");
    CertBundle b = cobs_closed_form(params_from_json(j.at("params")));
    // NaN round-trips as JSON null (closed-form-only bundles have no series value).
    const auto num_or_nan = [&](const char* key) {
        const auto& v = j.at(key);
        return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
    };
    b.cobs_series = num_or_nan("cobs_series");
    b.log_cobs_series = num_or_nan("log_cobs_series");
    b.series_terms_used = j.at("series_terms_used");
    b.inputs_provenance = j.at("inputs_provenance");
    return b;
}

}  // namespace obscert::cert
