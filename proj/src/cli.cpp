#include "obscert/cli.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "obscert/cert_engine.hpp"
#include "obscert/control.hpp"
#include "obscert/io.hpp"
#include "obscert/parallel.hpp"
#include "obscert/verify.hpp"

namespace obscert::cli {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& context) {
    if (!obj.is_object()) throw InvalidParams(context + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw InvalidParams(context + ": unknown field '" + key + "'");
}

LrIndex parse_lr(const json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return LrIndex::inf();
        throw InvalidParams("r: expected a number or \"inf\"");
    }
    return LrIndex::finite(v.get<double>());
}

EllipticSymbol parse_symbol(const json& j) {
    require_keys(j, {"kind", "d"}, "symbol");
    const std::string kind = j.at("kind");
    const int d = j.at("d");
    EllipticSymbol s;
    if (kind == "laplacian")
        s = EllipticSymbol::laplacian(d);
    else if (kind == "axis_quartic")
        s = EllipticSymbol::axis_quartic(d);
    else
        throw InvalidParams("symbol.kind: expected laplacian or axis_quartic");
    ellipticity_constant(s);
    return s;
}

GridSpec parse_grid(const json& j, int d) {
    require_keys(j, {"N", "box"}, "grid");
    return GridSpec(d, j.at("N").get<int>(), j.at("box").get<double>());
}

Mask parse_mask(const json& j, const GridSpec& grid, std::uint64_t seed) {
    require_keys(j, {"family", "duty", "period_cells", "density", "radius", "center"}, "mask");
    const std::string family = j.at("family");
    if (family == "full") return gen_stripes(grid, 1.0, 1);
    if (family == "stripes")
        return gen_stripes(grid, j.at("duty").get<double>(), j.at("period_cells").get<int>());
    if (family == "random") return gen_random(grid, j.at("density").get<double>(), seed);
    if (family == "holed") {
        std::vector<double> center(grid.d, grid.box / 2.0);
        if (j.contains("center")) center = j.at("center").get<std::vector<double>>();
        return gen_holed(grid, j.at("radius").get<double>(), center);
    }
    throw InvalidParams("mask.family: expected full, stripes, random or holed");
}

cert::AbstractParams parse_abstract_params(const json& j) {
    require_keys(j,
                 {"M", "omega", "lambda_star", "d0", "log_d0", "d1", "gamma1", "d2", "d3",
                  "gamma2", "gamma3", "norm_C", "T", "r"},
                 "params");
    cert::AbstractParams p;
    p.M = j.at("M");
    p.omega = j.value("omega", 0.0);
    p.lambda_star = j.value("lambda_star", 0.0);
    p.d0 = j.at("d0");
    if (j.contains("log_d0")) p.log_d0 = j.at("log_d0");
    p.d1 = j.at("d1");
    p.gamma1 = j.at("gamma1");
    p.d2 = j.at("d2");
    p.d3 = j.at("d3");
    p.gamma2 = j.at("gamma2");
    p.gamma3 = j.at("gamma3");
    p.norm_C = j.value("norm_C", 1.0);
    p.T = j.at("T");
    p.r = parse_lr(j.at("r"));
    return p;
}

std::string config_hash(const json& config) {
    const std::size_t h = std::hash<std::string>{}(config.dump());
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << j.dump(2) << "\n";
    if (!os) throw IoError("write failed: " + path.string());
}

struct RunContext {
    json config;
    std::filesystem::path out;
    std::uint64_t seed;
    json manifest_extra = json::object();
    std::vector<std::string> artifacts;
};

// One experiment per process; returns the exit code for this command.
int dispatch(RunContext& ctx) {
    const std::string command = ctx.config.at("command");
    const json params = ctx.config.value("params", json::object());

    if (command == "cert") {
        require_keys(params, {"abstract", "rel_tol"}, "params");
        const auto ap = parse_abstract_params(params.at("abstract"));
        const double rel_tol = params.value("rel_tol", 1e-14);
        cert::CertBundle b = cert::cobs_series_bound(ap, rel_tol);
        b.inputs_provenance = "abstract params from config (hash " + config_hash(ctx.config) + ")";
        write_json(ctx.out / "cert_bundle.json", b.to_json());
        ctx.artifacts.push_back("cert_bundle.json");
        ctx.manifest_extra["log_cobs_closed"] = b.log_cobs_closed;
        ctx.manifest_extra["log_cobs_series"] = b.log_cobs_series;
        return kOk;
    }

    if (command == "elliptic-cert") {
        require_keys(params, {"rho", "L", "K", "c", "m", "p", "M", "C_d", "T", "r"}, "params");
        cert::CertBundle b = cert::elliptic_cobs(
            params.at("rho"), params.at("L").get<std::vector<double>>(), params.at("K"),
            params.at("c"), params.at("m"), params.at("p"), params.at("M"), params.at("C_d"),
            params.at("T"), parse_lr(params.at("r")));
        write_json(ctx.out / "cert_bundle.json", b.to_json());
        ctx.artifacts.push_back("cert_bundle.json");
        ctx.manifest_extra["log_cobs_closed"] = b.log_cobs_closed;
        return kOk;
    }

    if (command == "verify-ur") {
        require_keys(params, {"symbol", "grid", "mask", "lambdas", "samples", "p"}, "params");
        EllipticSymbol sym = parse_symbol(params.at("symbol"));
        const GridSpec grid = parse_grid(params.at("grid"), sym.d);
        const Mask mask = parse_mask(params.at("mask"), grid, ctx.seed);
        const auto fit = verify::fit_uncertainty(sym, grid, mask,
                                                 params.at("lambdas").get<std::vector<double>>(),
                                                 params.at("samples"), params.at("p"), ctx.seed);
        io::CsvWriter csv({"lambda", "worst_log_ratio", "fitted_log_bound"});
        for (std::size_t i = 0; i < fit.lambdas.size(); ++i)
            csv.add_row({fit.lambdas[i], fit.worst_log_ratio[i],
                         fit.log_d0 + fit.d1 * fit.lambdas[i]});
        csv.write(ctx.out / "ur_fit.csv");
        write_json(ctx.out / "ur_fit.json",
                   json{{"log_d0", fit.log_d0},
                        {"d0", fit.d0},
                        {"d1", fit.d1},
                        {"gamma1", 1.0},
                        {"residual_max", fit.residual_max},
                        {"samples", fit.samples},
                        {"seed", ctx.seed}});
        ctx.artifacts = {"ur_fit.csv", "ur_fit.json"};
        ctx.manifest_extra["fitted_d0"] = fit.d0;
        ctx.manifest_extra["fitted_d1"] = fit.d1;
        return kOk;
    }

    if (command == "verify-diss") {
        require_keys(params, {"symbol", "grid", "lambdas", "times"}, "params");
        EllipticSymbol sym = parse_symbol(params.at("symbol"));
        const GridSpec grid = parse_grid(params.at("grid"), sym.d);
        const auto rep = verify::check_dissipation(sym,
                                                   params.at("lambdas").get<std::vector<double>>(),
                                                   params.at("times").get<std::vector<double>>(),
                                                   grid);
        io::CsvWriter csv({"lambda", "t", "measured_sup", "bound", "margin"});
        for (const auto& e : rep.entries)
            csv.add_row({e.lambda, e.t, e.measured_sup, e.bound, e.margin});
        csv.write(ctx.out / "dissipation.csv");
        ctx.artifacts = {"dissipation.csv"};
        ctx.manifest_extra["worst_margin"] = rep.worst_margin;
        ctx.manifest_extra["ok"] = rep.ok;
        if (!rep.ok) {
            std::cerr << "dissipation check failed: worst margin " << rep.worst_margin << "\n";
            return kHypothesisViolation;
        }
        return kOk;
    }

    if (command == "verify-obs") {
        require_keys(params, {"symbol", "grid", "mask", "T", "r", "p", "samples", "n_t", "bound"},
                     "params");
        EllipticSymbol sym = parse_symbol(params.at("symbol"));
        const GridSpec grid = parse_grid(params.at("grid"), sym.d);
        const Mask mask = parse_mask(params.at("mask"), grid, ctx.seed);
        cert::CertBundle bundle;
        const cert::CertBundle* bound = nullptr;
        if (params.contains("bound")) {
            std::ifstream is(params.at("bound").get<std::string>());
            if (!is) throw IoError("cannot open bound file");
            json bj;
            is >> bj;
            bundle = cert::CertBundle::from_json(bj);
            bound = &bundle;
        }
        const auto rep = verify::estimate_observability_ratio(
            sym, mask, params.at("T"), parse_lr(params.at("r")), params.at("p"),
            params.at("samples"), params.at("n_t"), ctx.seed, bound);
        io::CsvWriter csv({"sample_id", "ratio"});
        for (std::size_t i = 0; i < rep.ratios.size(); ++i)
            csv.add_row({static_cast<double>(i), rep.ratios[i]});
        csv.write(ctx.out / "obs_ratios.csv");
        write_json(ctx.out / "obs_summary.json",
                   json{{"C_emp", rep.C_emp},
                        {"log_cobs", rep.log_cobs},
                        {"log_margin", rep.log_margin},
                        {"samples", rep.ratios.size()},
                        {"n_t", rep.n_t},
                        {"seed", ctx.seed}});
        ctx.artifacts = {"obs_ratios.csv", "obs_summary.json"};
        ctx.manifest_extra["C_emp"] = rep.C_emp;
        if (bound != nullptr) {
            ctx.manifest_extra["log_margin"] = rep.log_margin;
            if (!(rep.log_margin >= 0.0)) {
                std::cerr << "certified bound does not dominate the empirical ratio: log margin "
                          << rep.log_margin << "\n";
                return kHypothesisViolation;
            }
        }
        return kOk;
    }

    if (command == "counterexample") {
        require_keys(params,
                     {"symbol", "radii", "T", "r", "p", "cells_per_unit", "box_factor", "n_t"},
                     "params");
        EllipticSymbol sym = parse_symbol(params.at("symbol"));
        const auto rows = verify::counterexample_sweep(
            sym, params.at("radii").get<std::vector<double>>(), params.at("T"),
            parse_lr(params.at("r")), params.at("p"), params.value("cells_per_unit", 16.0),
            params.value("box_factor", 8.0), params.value("n_t", 128));
        io::CsvWriter csv({"radius", "box", "N", "numerator", "kernel_norm", "denominator",
                           "ratio"});
        for (const auto& row : rows)
            csv.add_row({row.radius, row.box, static_cast<double>(row.N), row.numerator,
                         row.kernel_norm, row.denominator, row.ratio});
        csv.write(ctx.out / "counterexample.csv");
        ctx.artifacts = {"counterexample.csv"};
        return kOk;
    }

    if (command == "thickness") {
        require_keys(params, {"d", "grid", "mask", "L"}, "params");
        const int d = params.at("d");
        const GridSpec grid = parse_grid(params.at("grid"), d);
        const Mask mask = parse_mask(params.at("mask"), grid, ctx.seed);
        const auto rep = thickness_rho(mask, params.at("L").get<std::vector<double>>());
        write_json(ctx.out / "thickness.json",
                   json{{"L", rep.L},
                        {"rho", rep.rho},
                        {"argmin_anchor", rep.argmin_anchor},
                        {"is_thick", rep.is_thick},
                        {"snapped", rep.snapped},
                        {"mask_measure", mask.measure()}});
        io::write_mask(ctx.out / (d == 3 ? "mask.obsf" : "mask.pbm"), mask);
        ctx.artifacts = {"thickness.json", d == 3 ? "mask.obsf" : "mask.pbm"};
        ctx.manifest_extra["rho"] = rep.rho;
        return kOk;
    }

    if (command == "control") {
        require_keys(params,
                     {"symbol", "grid", "mask", "T", "n_t", "cg_tol", "cg_maxiter", "bound",
                      "dump_trajectory"},
                     "params");
        EllipticSymbol sym = parse_symbol(params.at("symbol"));
        const GridSpec grid = parse_grid(params.at("grid"), sym.d);
        const Mask mask = parse_mask(params.at("mask"), grid, ctx.seed);
        const Field x0 = white_field(grid, ctx.seed);
        cert::CertBundle bundle;
        const cert::CertBundle* bound = nullptr;
        if (params.contains("bound")) {
            std::ifstream is(params.at("bound").get<std::string>());
            if (!is) throw IoError("cannot open bound file");
            json bj;
            is >> bj;
            bundle = cert::CertBundle::from_json(bj);
            bound = &bundle;
        }
        const auto res = control::hum_control(sym, mask, x0, params.at("T"), params.at("n_t"),
                                              params.value("cg_tol", 1e-8),
                                              params.value("cg_maxiter", 200), bound);
        write_json(ctx.out / "control.json",
                   json{{"T", res.T},
                        {"n_t", res.n_t},
                        {"cost", res.cost},
                        {"cost_sq_gramian", res.cost_sq_gramian},
                        {"cost_sq_rhs", res.cost_sq_rhs},
                        {"residual", res.residual},
                        {"residual_rel", res.residual_rel},
                        {"cg_iterations", res.cg_iterations},
                        {"log_cobs", res.log_cobs},
                        {"log_cost_margin", res.log_cost_margin},
                        {"seed", ctx.seed}});
        ctx.artifacts = {"control.json"};
        if (params.value("dump_trajectory", false)) {
            for (int j = 0; j < res.n_t; ++j) {
                std::ostringstream name;
                name << "u_" << j << ".obsf";
                io::write_field(ctx.out / name.str(), res.u[j]);
            }
        }
        ctx.manifest_extra["cost"] = res.cost;
        ctx.manifest_extra["residual_rel"] = res.residual_rel;
        return kOk;
    }

    throw InvalidParams("unknown command: " + command);
}

}  // namespace

int run_experiment(const json& config, const RunOptions& opts) {
    try {
        require_keys(config, {"command", "seed", "params"}, "config");
        if (!config.contains("command")) throw InvalidParams("config: missing 'command'");

        RunContext ctx;
        ctx.config = config;
        ctx.out = opts.out_dir.empty() ? std::filesystem::path(".") : opts.out_dir;
        ctx.seed = opts.seed_override ? opts.seed : config.value("seed", 0ULL);
        if (opts.threads > 0) set_thread_count(opts.threads);

        std::error_code ec;
        std::filesystem::create_directories(ctx.out, ec);
        if (ec) throw IoError("cannot create output directory: " + ctx.out.string());

        const int code = dispatch(ctx);

        json manifest{{"schema", "obscert.manifest.v1"},
                      {"command", config.at("command")},
                      {"config_hash", config_hash(ctx.config)},
                      {"seed", ctx.seed},
                      {"threads", thread_count()},
                      {"exit_code", code},
                      {"artifacts", ctx.artifacts}};
        for (const auto& [k, v] : ctx.manifest_extra.items()) manifest[k] = v;
        write_json(ctx.out / "manifest.json", manifest);
        return code;
    } catch (const InvalidParams& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const NotStronglyElliptic& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return kHypothesisViolation;
    } catch (const NonConvergence& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const NonFiniteConstant& e) {
        std::cerr << "non-finite constant: " << e.what() << "\n";
        return kHypothesisViolation;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
}

int run_experiment_file(const std::filesystem::path& config_path, const RunOptions& opts) {
    json config;
    try {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "cannot open config: " << config_path << "\n";
            return kIoError;
        }
        is >> config;
    } catch (const std::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kInvalidConfig;
    }
    return run_experiment(config, opts);
}

}  // namespace obscert::cli
