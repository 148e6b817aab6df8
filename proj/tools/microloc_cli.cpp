// microloc command-line front door: synthesize paths, print closed-form
// frontiers, run estimators and covariance checks, and execute the
// verification suite. Exit codes: 0 ok, 1 usage, 2 bad config, 3 numeric
// failure, 4 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "microloc/acceptance.hpp"
#include "microloc/microloc.hpp"

namespace {

using microloc::json;

json load_json_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{') return json::parse(arg);
    std::ifstream is(arg);
    if (!is) throw microloc::IoError("cannot open json file: " + arg);
    json j;
    is >> j;
    return j;
}

// --config values act as defaults: apply only when the flag was not given
template <typename T>
void config_default(const CLI::App& app, const json& cfg, const std::string& flag,
                    const char* key, T& value) {
    if (cfg.contains(key) && app.count(flag) == 0) value = cfg.at(key).get<T>();
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::string token;
    std::istringstream is(text);
    while (std::getline(is, token, ',')) {
        if (!token.empty()) out.push_back(std::stod(token));
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw microloc::IoError("cannot open for writing: " + path);
    os << text;
}

struct SynthArgs {
    std::string config, spec_arg, out = "path.mlp", format = "bin";
    double fbm_h = -1.0;
    std::uint64_t n = 16384, seed = 0;
    double dt = 1.0 / 16384.0;
    std::uint64_t stream = 0;
};

int run_synth(const CLI::App& cmd, SynthArgs& a) {
    if (!a.config.empty()) {
        const json cfg = load_json_arg(a.config);
        config_default(cmd, cfg, "--n", "n", a.n);
        config_default(cmd, cfg, "--dt", "dt", a.dt);
        config_default(cmd, cfg, "--seed", "seed", a.seed);
        config_default(cmd, cfg, "--out", "out", a.out);
        config_default(cmd, cfg, "--format", "format", a.format);
        config_default(cmd, cfg, "--stream", "stream", a.stream);
        if (cfg.contains("spec") && cmd.count("--spec") == 0 && cmd.count("--fbm-h") == 0) {
            a.spec_arg = cfg.at("spec").dump();
        }
    }
    microloc::ProcessSpec spec = microloc::FBmSpec{0.5};
    if (a.fbm_h > 0.0) {
        spec = microloc::FBmSpec{a.fbm_h};
    } else if (!a.spec_arg.empty()) {
        spec = microloc::process_spec_from_json(load_json_arg(a.spec_arg));
    } else {
        throw microloc::ParameterError("synth needs --fbm-h or --spec");
    }
    const microloc::SampledPath path =
        microloc::synthesize(spec, static_cast<std::size_t>(a.n), a.dt, a.seed, a.stream);
    if (a.format == "csv") {
        microloc::write_path_csv(path, a.out);
        if (path.meta) {
            std::ofstream ms(a.out + ".meta.json");
            ms << microloc::to_json(*path.meta).dump(2) << "\n";
        }
    } else {
        microloc::write_path_binary(path, a.out);
    }
    std::fprintf(stderr, "wrote %zu samples to %s\n", path.size(), a.out.c_str());
    return 0;
}

struct FrontierArgs {
    std::vector<double> chirp, power, fbm, weier;
    std::string spec_arg, out, report_out;
    double translate = 0.0;
    double mbm_h = -1.0;
};

int run_frontier(FrontierArgs& a) {
    std::optional<microloc::Frontier> f;
    if (a.chirp.size() == 2) f = microloc::chirp_frontier(a.chirp[0], a.chirp[1]);
    if (a.power.size() == 1) f = microloc::power_frontier(a.power[0]);
    if (a.fbm.size() == 1) f = microloc::fbm_frontier(a.fbm[0]);
    if (a.weier.size() == 1) f = microloc::weierstrass_frontier(a.weier[0]);
    if (!a.spec_arg.empty()) {
        // pseudo-frontier of a scalar function at its own center
        const auto spec = microloc::scalar_spec_from_json(load_json_arg(a.spec_arg));
        double t0 = 0.0;
        std::visit(
            [&](const auto& s) {
                if constexpr (requires { s.t0; }) t0 = s.t0;
                (void)s;
            },
            spec);
        f = microloc::pseudo_frontier(spec, t0);
    }
    if (a.mbm_h > 0.0 && f) f = microloc::mbm_frontier(a.mbm_h, *f);
    if (!f) throw microloc::ParameterError("frontier needs one of --chirp/--power/--fbm/--weier/--spec");
    if (a.translate != 0.0) f = microloc::translate_frontier(*f, a.translate);

    write_text(a.out, microloc::frontier_to_csv(*f));
    if (!a.report_out.empty()) {
        write_text(a.report_out, microloc::to_json(microloc::report(*f)).dump(2) + "\n");
    }
    return 0;
}

struct EstimateArgs {
    std::string in, out, field, s_grid_text;
    double t0 = 0.5;
    int n_min = microloc::kDefaultNMin;
    int n_max = 0;
    bool pointwise = false, local = false, concave = false;
    std::string diagnostics;
};

int run_estimate(EstimateArgs& a) {
    const microloc::SampledPath path = (a.in.size() > 4 && a.in.substr(a.in.size() - 4) == ".csv")
                                           ? microloc::read_path_csv(a.in)
                                           : microloc::read_path_binary(a.in);
    const int n_max = a.n_max > 0 ? a.n_max : microloc::default_n_max(path.size());
    const std::vector<double> grid =
        a.s_grid_text.empty() ? microloc::default_s_grid() : parse_grid(a.s_grid_text);

    json diag;
    diag["n_min"] = a.n_min;
    diag["n_max"] = n_max;
    std::string csv;
    if (!a.field.empty()) {
        const auto t0s = parse_grid(a.field);
        const auto field = microloc::estimate_field(path, t0s, grid, a.n_min, n_max);
        std::ostringstream os;
        os << "t0,s_prime,sigma_hat,stderr\n";
        json errors = json::array();
        for (const auto& fp : field) {
            if (!fp.estimate) {
                errors.push_back({{"t0", fp.t0}, {"error", fp.error}});
                continue;
            }
            const auto body = microloc::estimate_to_csv(*fp.estimate, true);
            os << body.substr(body.find('\n') + 1);
        }
        diag["errors"] = errors;
        csv = os.str();
    } else {
        const auto est = microloc::estimate_frontier(path, a.t0, grid, a.n_min, n_max);
        csv = microloc::estimate_to_csv(est);
        diag["t0"] = a.t0;
        diag["fit_residual"] = est.fit_residual;
        if (a.concave) {
            const auto proj = est.concave_projection();
            json arr = json::array();
            for (std::size_t i = 0; i < proj.size(); ++i) {
                arr.push_back(json::array({grid[i], proj[i]}));
            }
            diag["concave_projection"] = arr;
        }
        if (a.pointwise) {
            const auto e = microloc::estimate_pointwise_exponent(path, a.t0, a.n_min, n_max);
            diag["pointwise"] = {{"value", e.value}, {"stderr", e.stderr_}, {"saturated", e.saturated}};
        }
        if (a.local) {
            const auto e = microloc::estimate_local_exponent(path, a.t0, a.n_min, n_max);
            diag["local"] = {{"value", e.value}, {"stderr", e.stderr_}, {"saturated", e.saturated}};
        }
    }
    write_text(a.out, csv);
    if (!a.diagnostics.empty()) write_text(a.diagnostics, diag.dump(2) + "\n");
    return 0;
}

struct FracArgs {
    std::string in, out = "fracdiff.mlp";
    double eps = 0.0;
    std::uint64_t window = 0;
};

int run_fracdiff(FracArgs& a) {
    const microloc::SampledPath path = (a.in.size() > 4 && a.in.substr(a.in.size() - 4) == ".csv")
                                           ? microloc::read_path_csv(a.in)
                                           : microloc::read_path_binary(a.in);
    const auto out = microloc::frac_diff(path, {a.eps, static_cast<std::size_t>(a.window)});
    microloc::write_path_binary(out, a.out);
    std::fprintf(stderr, "wrote %zu samples to %s (burn-in %zu)\n", out.size(), a.out.c_str(),
                 out.meta && out.meta->burn_in ? *out.meta->burn_in : 0);
    return 0;
}

struct CovlabArgs {
    std::string check, config, out;
    std::uint64_t seed = 0;
};

int run_covlab(const CLI::App& cmd, CovlabArgs& a) {
    (void)cmd;
    json cfg;
    if (!a.config.empty()) cfg = load_json_arg(a.config);
    json rep;
    rep["check"] = a.check;

    auto spec_from_cfg = [&]() {
        if (!cfg.contains("spec")) throw microloc::ParameterError("config needs a 'spec' entry");
        return microloc::process_spec_from_json(cfg.at("spec"));
    };

    if (a.check == "variance-exact") {
        const auto spec = spec_from_cfg();
        const double t = cfg.at("t").get<double>();
        const double u = cfg.at("u").get<double>();
        rep["t"] = t;
        rep["u"] = u;
        rep["value"] = microloc::incremental_variance_exact(spec, t, u);
    } else if (a.check == "variance-mc") {
        const auto spec = spec_from_cfg();
        const auto mc = microloc::incremental_variance_mc(
            spec, cfg.at("t").get<double>(), cfg.at("u").get<double>(),
            cfg.value("n_paths", std::size_t{1000}), a.seed, cfg.value("n_grid", std::size_t{2048}));
        rep["t"] = mc.t_used;
        rep["u"] = mc.u_used;
        rep["estimate"] = mc.estimate;
        rep["stderr"] = mc.stderr_;
    } else if (a.check == "det-frontier") {
        const auto spec = spec_from_cfg();
        const auto grid = cfg.contains("s_grid") ? cfg.at("s_grid").get<std::vector<double>>()
                                                 : microloc::default_s_grid();
        const auto det = microloc::deterministic_frontier(
            spec, cfg.value("t0", 0.5), grid, cfg.value("n_min", 2), cfg.value("n_max", 8),
            cfg.value("j_floor", 14));
        std::ostringstream os;
        os << "s_prime,sigma_hat,stderr\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            os << grid[i] << "," << det.sigma_hat[i] << "," << det.stderr_[i] << "\n";
        }
        rep["csv"] = os.str();
        rep["max_concavity_violation"] = det.max_concavity_violation();
    } else if (a.check == "moment") {
        const auto spec = spec_from_cfg();
        microloc::MomentCondition cond;
        cond.eta_order = cfg.at("eta_order").get<double>();
        cond.mu = cfg.at("mu").get<double>();
        cond.nu = cfg.at("nu").get<double>();
        cond.c = cfg.value("C", 1.0);
        cond.rho0 = cfg.value("rho0", 0.25);
        const auto r = microloc::check_moment_condition(spec, cfg.value("t0", 0.5), cond,
                                                        cfg.value("n_paths", std::size_t{1000}),
                                                        cfg.value("n_grid", std::size_t{1024}),
                                                        a.seed);
        rep["max_ratio"] = r.max_ratio;
        rep["implied_s_prime"] = r.implied_s_prime;
        rep["implied_sigma"] = r.implied_sigma;
        rep["cells"] = r.cells;
    } else if (a.check == "gaussian-moments") {
        microloc::CounterRng rng(a.seed, 0);
        const std::size_t n = cfg.value("n", std::size_t{100000});
        std::vector<double> y(n);
        for (auto& v : y) v = rng.next_gaussian();
        rep["lambda2"] = microloc::gaussian_moment_ratio_from_samples(y, 2);
        rep["lambda3"] = microloc::gaussian_moment_ratio_from_samples(y, 3);
    } else if (a.check == "mbm-expansion") {
        const auto h = microloc::scalar_spec_from_json(cfg.at("h"));
        const auto scales = cfg.contains("scales") ? cfg.at("scales").get<std::vector<int>>()
                                                   : std::vector<int>{3, 4, 5};
        const auto r = microloc::mbm_expansion_check(h, cfg.value("t0", 0.5), scales,
                                                     cfg.value("n_paths", std::size_t{400}),
                                                     cfg.value("n_grid", std::size_t{512}), a.seed);
        rep["K"] = r.k_hat;
        rep["L"] = r.l_hat;
        rep["L_identifiable"] = r.l_identifiable;
        rep["rel_residual"] = r.rel_residual;
        rep["pass"] = r.pass;
    } else if (a.check == "gw-bounds") {
        const auto spec = spec_from_cfg();
        const auto* gw = std::get_if<microloc::GWSpec>(&spec);
        if (!gw) throw microloc::ParameterError("gw-bounds needs a gw spec");
        const auto r = microloc::gw_covariance_bounds_check(
            *gw, cfg.value("t0", 0.4), cfg.value("a", 0.25), cfg.value("b", 0.75),
            cfg.value("n_pairs", std::size_t{1000}), cfg.value("n_seq", 20), a.seed);
        rep["K"] = r.k_fit;
        rep["L"] = r.l_fit;
        rep["upper_holds"] = r.upper_holds;
        rep["min_seq_ratio"] = r.min_seq_ratio;
        std::ostringstream os;
        os << "n,abs_sin,ratio\n";
        for (std::size_t i = 0; i < r.seq_ratio.size(); ++i) {
            os << (i + 1) << "," << r.seq_abs_sin[i] << "," << r.seq_ratio[i] << "\n";
        }
        rep["csv"] = os.str();
    } else {
        throw microloc::ParameterError("unknown covlab check: " + a.check);
    }
    write_text(a.out, rep.dump(2) + "\n");
    return 0;
}

int run_verify(const std::string& suite, unsigned workers) {
    const auto results = microloc::acceptance::run_suite(suite, workers);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %-4s %s -- %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                    r.title.c_str(), r.detail.c_str());
        all = all && r.pass;
    }
    std::printf("%zu criteria, %s\n", results.size(), all ? "all passed" : "FAILURES present");
    return all ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"microloc: local-regularity laboratory for fractal-type processes"};
    app.require_subcommand(1);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "synthesize a sample path");
    synth->add_option("--config", sa.config, "JSON config file (flags override)");
    synth->add_option("--fbm-h", sa.fbm_h, "fractional Brownian motion Hurst index");
    synth->add_option("--spec", sa.spec_arg, "process spec as JSON (inline or file)");
    synth->add_option("--n", sa.n, "sample count");
    synth->add_option("--dt", sa.dt, "time step");
    synth->add_option("--seed", sa.seed, "RNG seed (required: no silent entropy)");
    synth->add_option("--stream", sa.stream, "ensemble stream index");
    synth->add_option("--out", sa.out, "output file");
    synth->add_option("--format", sa.format, "bin or csv");

    FrontierArgs fa;
    auto* frontier = app.add_subcommand("frontier", "print a closed-form frontier");
    frontier->add_option("--chirp", fa.chirp, "gamma beta")->expected(2);
    frontier->add_option("--power", fa.power, "gamma")->expected(1);
    frontier->add_option("--fbm", fa.fbm, "H")->expected(1);
    frontier->add_option("--weier", fa.weier, "h")->expected(1);
    frontier->add_option("--spec", fa.spec_arg, "scalar function spec JSON (pseudo-frontier)");
    frontier->add_option("--mbm-h", fa.mbm_h, "compose: min with the line H+s'");
    frontier->add_option("--translate", fa.translate, "fractional differentiation order");
    frontier->add_option("--out", fa.out, "CSV output file (default stdout)");
    frontier->add_option("--report", fa.report_out, "also write a regularity report JSON");

    EstimateArgs ea;
    auto* estimate = app.add_subcommand("estimate", "estimate the empirical frontier");
    estimate->add_option("--in", ea.in, "input path file (.mlp binary or .csv)")->required();
    estimate->add_option("--t0", ea.t0, "base point");
    estimate->add_option("--s-grid", ea.s_grid_text, "comma-separated s' values");
    estimate->add_option("--n-min", ea.n_min, "coarsest dyadic scale");
    estimate->add_option("--n-max", ea.n_max, "finest dyadic scale (default from n)");
    estimate->add_option("--field", ea.field, "comma-separated t0 grid (batch mode)");
    estimate->add_flag("--pointwise", ea.pointwise, "also estimate the pointwise exponent");
    estimate->add_flag("--local", ea.local, "also estimate the local exponent");
    estimate->add_flag("--concave", ea.concave, "include the concave projection");
    estimate->add_option("--out", ea.out, "CSV output (default stdout)");
    estimate->add_option("--diagnostics", ea.diagnostics, "diagnostics JSON file");

    FracArgs fra;
    auto* frac = app.add_subcommand("fracdiff", "fractional differentiation/integration");
    frac->add_option("--in", fra.in, "input path file")->required();
    frac->add_option("--eps", fra.eps, "order (positive differentiates)")->required();
    frac->add_option("--window", fra.window, "scheme window (0 = full history)");
    frac->add_option("--out", fra.out, "output file");

    CovlabArgs ca;
    auto* covlab = app.add_subcommand("covlab", "covariance laboratory checks");
    covlab->add_option("--check", ca.check, "variance-exact|variance-mc|det-frontier|moment|gaussian-moments|mbm-expansion|gw-bounds")->required();
    covlab->add_option("--config", ca.config, "check parameters as JSON (inline or file)");
    covlab->add_option("--seed", ca.seed, "RNG seed for stochastic checks");
    covlab->add_option("--out", ca.out, "report JSON output (default stdout)");

    std::string suite = "all";
    unsigned workers = 0;
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--suite", suite, "all|fbm|mbm|gw|wiener|translation|stable|oracle|algebra|bridge|moments");
    verify->add_option("--workers", workers, "worker threads (default: all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) {
            if (synth->count("--seed") == 0 && sa.config.empty()) {
                throw microloc::ParameterError("--seed is required (no silent entropy)");
            }
            return run_synth(*synth, sa);
        }
        if (frontier->parsed()) return run_frontier(fa);
        if (estimate->parsed()) return run_estimate(ea);
        if (frac->parsed()) return run_fracdiff(fra);
        if (covlab->parsed()) return run_covlab(*covlab, ca);
        if (verify->parsed()) return run_verify(suite, workers);
    } catch (const microloc::ParameterError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const microloc::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 1;
}
