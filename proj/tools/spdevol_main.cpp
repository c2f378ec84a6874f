#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spdevol/io.hpp"

namespace {

using namespace spdevol;

int thread_cap() {
    if (const char* env = std::getenv("SPDEVOL_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return static_cast<int>(std::thread::hardware_concurrency());
}

void emit_json(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_text_file(out_path, j.dump(2) + "\n");
}

struct SimulateArgs {
    std::string config_path, params_path, vol_path, out_path;
    int n = 1000, m = 9, K = 10000, refinement = 1;
    std::uint64_t seed = 1;
    std::string init = "zero";
};

int run_simulate(const SimulateArgs& a) {
    ExperimentConfig cfg; // reuse the config schema for simulation inputs
    if (!a.config_path.empty()) cfg = experiment_config_from_json(load_json_file(a.config_path));
    else {
        cfg.n = a.n;
        cfg.m = a.m;
        cfg.K = a.K;
        cfg.refinement = a.refinement;
        cfg.seed = a.seed;
        if (!a.params_path.empty()) cfg.params = params_from_json(load_json_file(a.params_path));
        if (!a.vol_path.empty()) cfg.vol = vol_from_json(load_json_file(a.vol_path));
        if (a.init == "stationary") cfg.initial_condition = InitialCondition::stationary;
        else if (a.init != "zero")
            throw std::invalid_argument("--init must be zero or stationary");
    }

    SimulationConfig sim;
    sim.cutoff_K = cfg.K;
    sim.seed = cfg.seed;
    sim.refinement = cfg.refinement;
    sim.initial_condition = cfg.initial_condition;
    const SamplingGrid grid = cfg.grid();
    for (const auto& note : simulation_advisories(grid, sim))
        std::cerr << "warning: " << note << '\n';

    const FieldSample field =
        synthesize_field(cfg.params, cfg.vol, grid, sim, thread_cap());
    if (a.out_path.empty())
        std::cout << field_to_csv(field);
    else
        field_to_csv_file(field, a.out_path);
    return 0;
}

nlohmann::json estimate_report(const FieldSample& field, const OperatorParams& params,
                               double level) {
    for (const auto& note : estimation_advisories(field)) std::cerr << "warning: " << note << '\n';
    const double s2 = sigma2_multi(field, params);
    const double q = quarticity(field, params);
    const EstimateWithCI ci = feasible_ci(s2, q, field.n(), field.m(), level);
    nlohmann::json per_point = nlohmann::json::array();
    for (int j = 0; j < field.m(); ++j) {
        per_point.push_back({{"y", field.grid.y[static_cast<std::size_t>(j)]},
                             {"rv", realized_volatility(field, j)},
                             {"sigma2", sigma2_single(field, j, params)}});
    }
    nlohmann::json out{{"sigma2", s2},
                       {"quarticity", q},
                       {"ci", {{"lo", ci.lo}, {"hi", ci.hi}, {"level", ci.level}}},
                       {"stderr", ci.stderr_},
                       {"per_point", per_point}};
    if (field.m() >= 2) out["curvature_logratio"] = curvature_logratio(field);
    return out;
}

int run_estimate(const std::string& field_path, const std::string& params_path, double level,
                 const std::string& out_path) {
    const FieldSample field = field_from_csv_file(field_path);
    const OperatorParams params = params_from_json(load_json_file(params_path));
    emit_json(estimate_report(field, params, level), out_path);
    return 0;
}

int run_fit(const std::string& field_path, const std::string& params_path,
            const std::string& out_path) {
    const FieldSample field = field_from_csv_file(field_path);
    const RegressionData data = build_regression_data(field);
    FitOptions opts;
    if (!params_path.empty()) {
        const OperatorParams params = params_from_json(load_json_file(params_path));
        opts.theta2 = params.theta2;
        opts.quart_integral = quarticity(field, params);
    }
    const RegressionFit fit = fit_least_squares(data, opts, field.n());
    nlohmann::json out{{"iv0_hat", fit.iv0_hat},
                       {"kappa_hat", fit.kappa_hat},
                       {"converged", fit.converged},
                       {"iterations", fit.iterations},
                       {"rss", fit.rss}};
    if (fit.asym_cov) out["cov"] = matrix2_to_json(*fit.asym_cov);
    if (fit.stderrs) out["stderr"] = {(*fit.stderrs)[0], (*fit.stderrs)[1]};
    emit_json(out, out_path);
    return 0;
}

struct OracleArgs {
    std::string what = "acf";
    std::string params_path;
    double sigma = 0.25;
    int n = 1000, K = 100, i = 1, j = 2, lag = 1;
    double y = 0.5;
    std::string init = "zero";
    std::string out_path;
};

int run_oracle(const OracleArgs& a) {
    OperatorParams params(0.0, 1.0, 0.2);
    if (!a.params_path.empty()) params = params_from_json(load_json_file(a.params_path));
    const double delta = 1.0 / static_cast<double>(a.n);
    const InitialCondition init =
        a.init == "stationary" ? InitialCondition::stationary : InitialCondition::zero;
    nlohmann::json out;
    if (a.what == "acf") {
        nlohmann::json vals = nlohmann::json::array();
        for (int h = 1; h <= a.lag; ++h) vals.push_back(theoretical_autocorrelation(h));
        out = {{"what", "acf"}, {"lags", a.lag}, {"values", vals}};
    } else if (a.what == "sq-increment") {
        const KernelParams kp(params, a.sigma, delta, a.K);
        out = {{"what", "sq-increment"},
               {"i", a.i},
               {"y", a.y},
               {"exact", expected_sq_increment_exact(kp, a.i, a.y)},
               {"first_order",
                first_order_sq_increment(params, a.sigma * a.sigma, a.y, delta)}};
    } else if (a.what == "cov") {
        const KernelParams kp(params, a.sigma, delta, a.K);
        out = {{"what", "cov"},
               {"i", a.i},
               {"j", a.j},
               {"y", a.y},
               {"exact", increment_cov_exact(kp, a.i, a.j, a.y, init)}};
        if (a.i != a.j)
            out["first_order"] = first_order_cov(params, a.sigma * a.sigma, a.y, delta,
                                                 std::abs(a.j - a.i));
    } else if (a.what == "kernels") {
        const KernelParams kp(params, a.sigma, delta, a.K);
        out = {{"what", "kernels"},
               {"i", a.i},
               {"j", a.j},
               {"mode", a.K},
               {"B", kernel_B(kp, a.i, a.j, a.K)},
               {"C", kernel_C(kp, a.i, a.j, a.K)},
               {"BC", kernel_BC(kp, a.i, a.j, a.K)}};
        if (eigenvalue(params, a.K) > 0.0)
            out["B_stationary"] = kernel_B_stationary(kp, a.i, a.j, a.K);
    } else {
        throw std::invalid_argument("oracle: unknown --what '" + a.what + "'");
    }
    emit_json(out, a.out_path);
    return 0;
}

int run_gamma(double tol, const std::string& out_path) {
    const GammaSeries g = gamma_series(tol);
    emit_json(nlohmann::json{{"S", g.series_sum},
                             {"gamma", g.gamma},
                             {"tail_bound", g.tail_bound},
                             {"terms", g.terms}},
              out_path);
    return 0;
}

struct McArgs {
    std::string config_path, params_path, vol_path, out_path, emit;
    std::optional<int> n, m, K, reps, refinement;
    std::optional<std::uint64_t> seed;
    std::optional<double> level;
};

int run_mc(const McArgs& a) {
    ExperimentConfig cfg;
    if (!a.config_path.empty()) cfg = experiment_config_from_json(load_json_file(a.config_path));
    if (!a.params_path.empty()) cfg.params = params_from_json(load_json_file(a.params_path));
    if (!a.vol_path.empty()) cfg.vol = vol_from_json(load_json_file(a.vol_path));
    if (a.n) cfg.n = *a.n;
    if (a.m) cfg.m = *a.m;
    if (a.K) cfg.K = *a.K;
    if (a.reps) cfg.replications = *a.reps;
    if (a.refinement) cfg.refinement = *a.refinement;
    if (a.seed) cfg.seed = *a.seed;
    if (a.level) cfg.ci_level = *a.level;
    cfg.workers = thread_cap();

    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentReport report = run_experiment(cfg);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "mc: " << cfg.replications << " replications in " << elapsed << " s\n";

    nlohmann::json j = report_to_json(report);
    j["elapsed_seconds"] = elapsed;
    emit_json(j, a.out_path);

    if (!a.emit.empty()) {
        std::stringstream ss(a.emit);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.find("qq") != std::string::npos) {
                if (report.qq.standardized.empty())
                    throw std::invalid_argument("mc: no Q-Q data (needs sigma2 + quarticity)");
                write_text_file(item, qq_to_csv(report.qq));
            } else if (item.find("profile") != std::string::npos) {
                write_text_file(item, profile_to_csv(report.profile));
            } else if (item.find("ratios") != std::string::npos) {
                write_text_file(item, ratios_to_csv(report));
            } else {
                throw std::invalid_argument("mc: cannot infer kind of emit target '" + item +
                                            "'");
            }
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and estimation for the parabolic SPDE volatility model"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* sc_sim = app.add_subcommand("simulate", "simulate a field and write it as CSV");
    sc_sim->add_option("--config", sim.config_path, "simulation config JSON");
    sc_sim->add_option("--params", sim.params_path, "operator params JSON");
    sc_sim->add_option("--vol", sim.vol_path, "volatility spec JSON");
    sc_sim->add_option("--n", sim.n, "time steps");
    sc_sim->add_option("--m", sim.m, "equispaced spatial points");
    sc_sim->add_option("--K", sim.K, "spectral cutoff");
    sc_sim->add_option("--seed", sim.seed, "RNG seed");
    sc_sim->add_option("--refinement", sim.refinement, "sub-steps per observation step");
    sc_sim->add_option("--init", sim.init, "initial condition: zero|stationary");
    sc_sim->add_option("-o,--output", sim.out_path, "output CSV path (default stdout)");

    std::string est_field, est_params, est_out;
    double est_level = 0.95;
    auto* sc_est = app.add_subcommand("estimate", "volatility estimates from a field CSV");
    sc_est->add_option("field", est_field, "field CSV")->required();
    sc_est->add_option("--params", est_params, "operator params JSON")->required();
    sc_est->add_option("--level", est_level, "confidence level");
    sc_est->add_option("-o,--output", est_out, "output JSON path (default stdout)");

    std::string fit_field, fit_params, fit_out;
    auto* sc_fit = app.add_subcommand("fit", "least-squares fit of (IV0, kappa)");
    sc_fit->add_option("field", fit_field, "field CSV")->required();
    sc_fit->add_option("--params", fit_params,
                       "operator params JSON (enables the plug-in covariance)");
    sc_fit->add_option("-o,--output", fit_out, "output JSON path (default stdout)");

    OracleArgs ora;
    auto* sc_ora = app.add_subcommand("oracle", "closed-form moments of the K-mode model");
    sc_ora->add_option("--what", ora.what, "acf|sq-increment|cov|kernels");
    sc_ora->add_option("--params", ora.params_path, "operator params JSON");
    sc_ora->add_option("--sigma", ora.sigma, "constant volatility");
    sc_ora->add_option("--n", ora.n, "time steps (delta = 1/n)");
    sc_ora->add_option("--K", ora.K, "mode cutoff / mode index for kernels");
    sc_ora->add_option("--i", ora.i, "first time index");
    sc_ora->add_option("--j", ora.j, "second time index");
    sc_ora->add_option("--lag", ora.lag, "autocorrelation lag");
    sc_ora->add_option("--y", ora.y, "spatial point");
    sc_ora->add_option("--init", ora.init, "zero|stationary");
    sc_ora->add_option("-o,--output", ora.out_path, "output JSON path (default stdout)");

    double gamma_tol = 1e-8;
    std::string gamma_out;
    auto* sc_gamma = app.add_subcommand("gamma", "the asymptotic-variance constant");
    sc_gamma->add_option("--tol", gamma_tol, "series tail tolerance");
    sc_gamma->add_option("-o,--output", gamma_out, "output JSON path (default stdout)");

    McArgs mc;
    auto* sc_mc = app.add_subcommand("mc", "Monte Carlo experiment");
    sc_mc->add_option("--config", mc.config_path, "experiment config JSON");
    sc_mc->add_option("--params", mc.params_path, "operator params JSON");
    sc_mc->add_option("--vol", mc.vol_path, "volatility spec JSON");
    sc_mc->add_option("--n", mc.n, "time steps");
    sc_mc->add_option("--m", mc.m, "spatial points");
    sc_mc->add_option("--K", mc.K, "spectral cutoff");
    sc_mc->add_option("--reps", mc.reps, "replications");
    sc_mc->add_option("--refinement", mc.refinement, "sub-steps per observation step");
    sc_mc->add_option("--seed", mc.seed, "master seed");
    sc_mc->add_option("--level", mc.level, "confidence level");
    sc_mc->add_option("--emit", mc.emit, "comma list of qq/profile/ratios CSV paths");
    sc_mc->add_option("-o,--output", mc.out_path, "report JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 1;
    }

    try {
        if (sc_sim->parsed()) return run_simulate(sim);
        if (sc_est->parsed()) return run_estimate(est_field, est_params, est_level, est_out);
        if (sc_fit->parsed()) return run_fit(fit_field, fit_params, fit_out);
        if (sc_ora->parsed()) return run_oracle(ora);
        if (sc_gamma->parsed()) return run_gamma(gamma_tol, gamma_out);
        if (sc_mc->parsed()) return run_mc(mc);
    } catch (const spdevol::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
