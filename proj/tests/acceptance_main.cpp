// Acceptance suite: one pass/fail line per criterion.
//
// The heavyweight Monte Carlo studies reproduce the reference experiments at
// their published sizes (3,000 replications at n = 1,000, K = 10,000), so a
// full run takes tens of minutes on a laptop. Criteria can be selected by
// number on the command line, e.g. `acceptance 1 7 8`.

#include <Eigen/Dense>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spdevol/harness.hpp"

using namespace spdevol;

namespace {

int thread_cap() {
    if (const char* env = std::getenv("SPDEVOL_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct Line {
    bool pass;
    std::string text;
};

std::vector<Line> results;

void record(bool pass, const std::string& text) {
    results.push_back({pass, text});
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << text << std::endl;
}

std::string fmt(double x, int digits = 6) {
    std::ostringstream ss;
    ss.precision(digits);
    ss << x;
    return ss.str();
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- shared Monte Carlo runs ------------------------------------------------

const OperatorParams headline_params(0.0, 1.0, 0.2); // kappa = 5, sigma0^2 = sqrt(5)/16
const OperatorParams profile_params(0.0, 1.0, 0.5);

ExperimentConfig headline_config(int m, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.params = headline_params;
    cfg.vol = VolatilitySpec::constant(0.25);
    cfg.n = 1000;
    cfg.m = m;
    cfg.K = 10000;
    cfg.replications = 3000;
    cfg.seed = seed;
    cfg.workers = thread_cap();
    return cfg;
}

std::optional<ExperimentReport> run_m9, run_m19, run_m29, run_m99, run_tv;

// Mean-level checks (criteria 5 and 6) run with a stationary start and
// K = 40,000. At the plotting-era configuration (zero start, K = 10,000) the
// simulated K-mode model itself sits about -0.2% below the continuous model
// (spectral truncation plus start-up deficit, verified against the exact
// moment oracle), which 3,000 replications resolve; the larger cutoff and the
// stationary increments push that gap an order of magnitude below the Monte
// Carlo resolution, so these criteria measure the estimators rather than the
// simulator. Variance-level checks (criterion 4) stay at the original
// configuration.
constexpr int mean_level_K = 40000;

const ExperimentReport& report_m9() {
    if (!run_m9) {
        ExperimentConfig cfg = headline_config(9, 20260810);
        cfg.estimators = {EstimatorKind::sigma2_multi};
        std::cerr << "  [run] m=9 variance study (3000 reps)..." << std::endl;
        run_m9 = run_experiment(cfg);
    }
    return *run_m9;
}

std::optional<ExperimentReport> run_f9;

const ExperimentReport& report_fit(int m) {
    auto& slot = (m == 9) ? run_f9 : (m == 19) ? run_m19 : run_m29;
    if (!slot) {
        ExperimentConfig cfg = headline_config(m, 660000 + m);
        cfg.K = mean_level_K;
        cfg.initial_condition = InitialCondition::stationary;
        if (m != 9) cfg.estimators = {EstimatorKind::fit_least_squares};
        std::cerr << "  [run] m=" << m
                  << " least-squares study (3000 reps, stationary, K=40000)..." << std::endl;
        slot = run_experiment(cfg);
    }
    return *slot;
}

const ExperimentReport& report_m99() {
    if (!run_m99) {
        ExperimentConfig cfg = headline_config(99, 777001);
        cfg.estimators = {EstimatorKind::sigma2_multi};
        std::cerr << "  [run] m=99 variance-degradation study (3000 reps)..." << std::endl;
        run_m99 = run_experiment(cfg);
    }
    return *run_m99;
}

const ExperimentReport& report_timevarying() {
    if (!run_tv) {
        ExperimentConfig cfg = headline_config(9, 31415926);
        cfg.vol = VolatilitySpec::sine_intraday();
        cfg.K = mean_level_K;
        cfg.initial_condition = InitialCondition::stationary;
        cfg.estimators = {EstimatorKind::sigma2_multi, EstimatorKind::quarticity};
        std::cerr << "  [run] time-varying sigma study (3000 reps, stationary, K=40000)..."
                  << std::endl;
        run_tv = run_experiment(cfg);
    }
    return *run_tv;
}

// mean and MC standard error of a record field
std::pair<double, double> mean_and_se(const std::vector<ReplicationRecord>& recs,
                                      double ReplicationRecord::* field) {
    double sum = 0.0;
    for (const auto& r : recs) sum += r.*field;
    const double mean = sum / static_cast<double>(recs.size());
    double ss = 0.0;
    for (const auto& r : recs) ss += (r.*field - mean) * (r.*field - mean);
    const double sd = std::sqrt(ss / static_cast<double>(recs.size() - 1));
    return {mean, sd / std::sqrt(static_cast<double>(recs.size()))};
}

// ---- criteria ---------------------------------------------------------------

void criterion1_gamma() {
    const auto t0 = std::chrono::steady_clock::now();
    const GammaSeries g = gamma_series(1e-8);
    const double secs = elapsed_since(t0);
    const bool pass = std::abs(g.series_sum - 0.357487) <= 1e-5 &&
                      std::abs(g.gamma - 0.75) <= 0.005 && secs < 1.0;
    record(pass, "1. Gamma constant: S=" + fmt(g.series_sum, 8) +
                     " (0.357487 +- 1e-5), Gamma=" + fmt(g.gamma, 6) +
                     " (0.75 +- 0.005), " + fmt(secs, 3) + " s");
}

void criterion2_autocorrelation() {
    const auto t0 = std::chrono::steady_clock::now();
    const int reps = 200;
    const SamplingGrid grid(1000, {0.8});
    const auto vol = VolatilitySpec::constant(0.25);

    std::vector<std::array<double, 3>> acf(reps);
    std::vector<double> single_estimates(reps);
    std::atomic<int> next{0};
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < thread_cap(); ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const int rep = next.fetch_add(1);
                    if (rep >= reps) return;
                    SimulationConfig sim;
                    sim.cutoff_K = 10000;
                    sim.seed = derive_seed(88001, static_cast<std::uint64_t>(rep));
                    const FieldSample f = synthesize_field(profile_params, vol, grid, sim, 1);
                    const auto r = empirical_autocorrelation(f, 0, 3);
                    acf[static_cast<std::size_t>(rep)] = {r[0], r[1], r[2]};
                    single_estimates[static_cast<std::size_t>(rep)] =
                        sigma2_single(f, 0, profile_params);
                }
            });
    }
    double mean[3] = {0, 0, 0};
    for (const auto& a : acf)
        for (int h = 0; h < 3; ++h) mean[h] += a[static_cast<std::size_t>(h)];
    for (double& mh : mean) mh /= reps;

    const double targets[3] = {-0.2929, -0.0478, -0.0245};
    bool pass = true;
    std::string detail;
    for (int h = 0; h < 3; ++h) {
        pass = pass && std::abs(mean[h] - targets[h]) <= 0.02;
        detail += (h ? ", " : "") + std::string("lag") + std::to_string(h + 1) + "=" +
                  fmt(mean[h], 4);
    }
    record(pass, "2. increment autocorrelations (200 reps): " + detail +
                     " (targets -0.2929/-0.0478/-0.0245 +- 0.02), " +
                     fmt(elapsed_since(t0), 1) + " s");

    // supplementary: the single-point estimator is centred on sigma^2
    double s = 0.0, ss = 0.0;
    for (double v : single_estimates) s += v;
    const double m1 = s / reps;
    for (double v : single_estimates) ss += (v - m1) * (v - m1);
    const double se = std::sqrt(ss / (reps - 1.0) / reps);
    record(std::abs(m1 - 0.0625) <= 3.0 * se,
           "x1. single-point estimator mean " + fmt(m1, 6) + " within 3 SE (" + fmt(se, 2) +
               ") of 0.0625");
}

void criterion3_spatial_profile() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.params = profile_params;
    cfg.vol = VolatilitySpec::constant(0.25);
    cfg.n = 1000;
    cfg.m = 9;
    cfg.K = 10000;
    cfg.replications = 1000;
    cfg.seed = 424243;
    cfg.workers = thread_cap();
    cfg.estimators = {};
    std::cerr << "  [run] spatial profile study (1000 reps)..." << std::endl;
    const ExperimentReport rep = run_experiment(cfg);

    bool pass = true;
    double worst = 0.0;
    for (const auto& row : rep.profile) {
        const double rel = std::abs(row.mean_rv / row.theory - 1.0);
        worst = std::max(worst, rel);
        pass = pass && rel <= 0.05;
    }
    record(pass, "3. spatial RV profile (1000 reps): max relative deviation " +
                     fmt(worst * 100.0, 3) + "% (<= 5%), " + fmt(elapsed_since(t0), 1) + " s");

    // supplementary: mean RV at y = 0.5 against the Fig 2 level
    const int mid = 4; // y = 0.5
    std::vector<double> rv_mid;
    rv_mid.reserve(rep.records.size());
    for (const auto& r : rep.records) rv_mid.push_back(r.rv[mid]);
    double s = 0.0, ss = 0.0;
    for (double v : rv_mid) s += v;
    const double mean = s / static_cast<double>(rv_mid.size());
    for (double v : rv_mid) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (rv_mid.size() - 1.0) / static_cast<double>(rv_mid.size()));
    record(std::abs(mean - 0.0183453329) <= 3.0 * se,
           "x2. mean RV(0.5) = " + fmt(mean, 6) + " within 3 SE of 0.018345");
}

void criterion4_clt_variance() {
    const auto t0 = std::chrono::steady_clock::now();
    const double ratio9 = report_m9().summary.at("sigma2_multi").ratio;
    const bool pass9 = ratio9 >= 0.85 && ratio9 <= 1.15;
    record(pass9, "4a. mn*Var(sigma2_hat)/(pi Gamma sigma^4) at m=9: " + fmt(ratio9, 4) +
                      " (in [0.85, 1.15]), " + fmt(elapsed_since(t0), 1) + " s");

    const auto t1 = std::chrono::steady_clock::now();
    const double ratio99 = report_m99().summary.at("sigma2_multi").ratio;
    record(ratio99 > 1.2, "4b. variance ratio degrades by m=99: " + fmt(ratio99, 4) +
                              " (> 1.2), " + fmt(elapsed_since(t1), 1) + " s");
}

void criterion5_feasible_clt() {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentReport& rep = report_timevarying();
    const bool cover_ok = rep.coverage >= 0.93 && rep.coverage <= 0.97;
    record(cover_ok, "5a. 95% feasible CI coverage of integrated sigma^2 (3000 reps, "
                     "sine-intraday): " +
                         fmt(rep.coverage, 4) + " (in [0.93, 0.97]), " +
                         fmt(elapsed_since(t0), 1) + " s");

    const double scaled_ks =
        std::sqrt(static_cast<double>(rep.records.size())) * rep.qq.ks_stat;
    record(scaled_ks < 1.628, "5b. KS of standardized errors: sqrt(R)*D = " +
                                  fmt(scaled_ks, 4) + " (< 1.628, the 1% level)");
}

void criterion6_least_squares() {
    const double iv0_true = std::sqrt(5.0) / 16.0;
    const double kappa_true = 5.0;
    for (int m : {9, 19, 29}) {
        const auto t0 = std::chrono::steady_clock::now();
        const ExperimentReport& rep = report_fit(m);
        const auto [iv0_mean, iv0_se] = mean_and_se(rep.records, &ReplicationRecord::iv0);
        const auto [kap_mean, kap_se] = mean_and_se(rep.records, &ReplicationRecord::kappa);
        const bool means_ok = std::abs(iv0_mean - iv0_true) <= 3.0 * iv0_se &&
                              std::abs(kap_mean - kappa_true) <= 3.0 * kap_se;

        const Eigen::Matrix2d mc = *rep.fit_mc_cov_scaled;
        const Eigen::Matrix2d th = *rep.fit_theory_cov;
        bool cov_ok = true;
        double worst = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const double rel = std::abs(mc(a, b) / th(a, b) - 1.0);
                worst = std::max(worst, rel);
                cov_ok = cov_ok && rel <= 0.25;
            }
        record(means_ok && cov_ok,
               "6. least squares m=" + std::to_string(m) + ": mean IV0=" + fmt(iv0_mean, 5) +
                   " (true " + fmt(iv0_true, 5) + "), mean kappa=" + fmt(kap_mean, 4) +
                   " (true 5); cov worst rel dev " + fmt(worst * 100.0, 2) +
                   "% (<= 25%), " + fmt(elapsed_since(t0), 1) + " s");
    }

    // supplementary: the log-ratio curvature estimator is centred on kappa
    const auto [curv_mean, curv_se] =
        mean_and_se(report_fit(9).records, &ReplicationRecord::curvature);
    record(std::abs(curv_mean - kappa_true) <= 3.0 * curv_se,
           "x3. log-ratio curvature mean " + fmt(curv_mean, 4) + " within 3 SE (" +
               fmt(curv_se, 2) + ") of 5");

    // supplementary: quarticity consistency and constant-sigma coverage
    const auto [q_mean, q_se] =
        mean_and_se(report_fit(9).records, &ReplicationRecord::quarticity);
    record(std::abs(q_mean - 0.00390625) <= 3.0 * q_se,
           "x4. quarticity mean " + fmt(q_mean, 7) + " within 3 SE of sigma^4 = 0.0039062");
    const double cov_const = report_fit(9).coverage;
    record(cov_const >= 0.93 && cov_const <= 0.97,
           "x5. 95% CI coverage under constant sigma: " + fmt(cov_const, 4) +
               " (in [0.93, 0.97])");
}

void criterion7_oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = 50, K = 100, reps = 100000;
    const double y = 0.3;
    const KernelParams kp(headline_params, 0.25, 1.0 / n, K);
    const SamplingGrid grid(n, {y});
    const auto vol = VolatilitySpec::constant(0.25);

    // exact covariance of the K-mode model
    Eigen::MatrixXd exact(n, n);
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            const double v = increment_cov_exact(kp, i, j, y, InitialCondition::zero);
            exact(i - 1, j - 1) = v;
            exact(j - 1, i - 1) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(exact);
    const bool psd = eig.eigenvalues().minCoeff() >= -1e-10 * exact.trace();

    // Monte Carlo covariance, one partial sum per worker
    const int workers = thread_cap();
    std::vector<Eigen::MatrixXd> partials(static_cast<std::size_t>(workers),
                                          Eigen::MatrixXd::Zero(n, n));
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                const int lo = static_cast<int>(static_cast<long>(w) * reps / workers);
                const int hi = static_cast<int>(static_cast<long>(w + 1) * reps / workers);
                Eigen::VectorXd d(n);
                for (int rep = lo; rep < hi; ++rep) {
                    SimulationConfig sim;
                    sim.cutoff_K = K;
                    sim.seed = derive_seed(909090, static_cast<std::uint64_t>(rep));
                    const FieldSample f = synthesize_field(headline_params, vol, grid, sim, 1);
                    for (int i = 1; i <= n; ++i) d[i - 1] = f.values(i, 0) - f.values(i - 1, 0);
                    partials[static_cast<std::size_t>(w)].noalias() += d * d.transpose();
                }
            });
    }
    Eigen::MatrixXd mc = Eigen::MatrixXd::Zero(n, n);
    for (const auto& p : partials) mc += p;
    mc /= static_cast<double>(reps);

    int violations = 0;
    double worst_z = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double se = std::sqrt(
                (exact(i, i) * exact(j, j) + exact(i, j) * exact(i, j)) / reps);
            const double z = std::abs(mc(i, j) - exact(i, j)) / se;
            worst_z = std::max(worst_z, z);
            if (z > 4.0) ++violations;
        }
    const double secs = elapsed_since(t0);
    record(violations == 0 && psd && secs < 300.0,
           "7. oracle equivalence (n=50, K=100, 1e5 reps): worst |z| = " + fmt(worst_z, 3) +
               " (<= 4), PSD=" + (psd ? "yes" : "no") + ", " + fmt(secs, 1) + " s (< 300)");
}

void extra_ratio_consistency() {
    // |ratio - 1| should not grow as n increases at fixed m, within joint
    // Monte Carlo error bars
    const auto t0 = std::chrono::steady_clock::now();
    const int reps = 800;
    std::vector<double> ratios, ses;
    for (int n : {250, 500, 1000}) {
        ExperimentConfig cfg;
        cfg.params = headline_params;
        cfg.vol = VolatilitySpec::constant(0.25);
        cfg.n = n;
        cfg.m = 9;
        cfg.K = 10 * n;
        cfg.replications = reps;
        cfg.seed = 650000 + static_cast<std::uint64_t>(n);
        cfg.workers = thread_cap();
        cfg.estimators = {EstimatorKind::sigma2_multi};
        const ExperimentReport rep = run_experiment(cfg);
        const double ratio = rep.summary.at("sigma2_multi").ratio;
        ratios.push_back(ratio);
        ses.push_back(ratio * std::sqrt(2.0 / (reps - 1.0)));
    }
    bool pass = true;
    for (std::size_t i = 0; i + 1 < ratios.size(); ++i) {
        const double gap_i = std::abs(ratios[i] - 1.0);
        const double gap_j = std::abs(ratios[i + 1] - 1.0);
        const double joint = 3.0 * std::sqrt(ses[i] * ses[i] + ses[i + 1] * ses[i + 1]);
        pass = pass && (gap_j <= gap_i + joint);
    }
    record(pass, "x6. |variance ratio - 1| non-increasing over n=250/500/1000: " +
                     fmt(ratios[0], 3) + "/" + fmt(ratios[1], 3) + "/" + fmt(ratios[2], 3) +
                     " (800 reps each), " + fmt(elapsed_since(t0), 1) + " s");
}

void criterion8_invariants() {
    const auto t0 = std::chrono::steady_clock::now();
    bool all = true;
    std::string fails;

    // eigenfunction orthonormality at 1e-6
    {
        bool ok = true;
        std::mt19937 gen(8);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int trial = 0; trial < 5 && ok; ++trial) {
            const double theta2 = 0.1 + 0.9 * u01(gen);
            const double ratio = -6.0 + 12.0 * u01(gen);
            const OperatorParams p(-0.5 + u01(gen), ratio * theta2, theta2);
            for (int a = 1; a <= 8 && ok; ++a)
                for (int b = a; b <= 8 && ok; ++b) {
                    const double g = inner_product_theta(
                        p, [&](double z) { return eigenfunction(p, a, z); },
                        [&](double z) { return eigenfunction(p, b, z); }, 4096);
                    ok = std::abs(g - (a == b ? 1.0 : 0.0)) <= 1e-6;
                }
        }
        all = all && ok;
        if (!ok) fails += " orthonormality";
    }

    // analytic Jacobian vs central differences at 1e-6 relative
    {
        bool ok = true;
        std::mt19937 gen(9);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int trial = 0; trial < 100 && ok; ++trial) {
            const double iv0 = 0.05 + 2.0 * u01(gen);
            const double kappa = -2.0 + 10.0 * u01(gen);
            const double yy = u01(gen);
            const double h = 1e-6;
            const Eigen::Vector2d g = model_f_gradient(iv0, kappa, yy);
            const double fd_s =
                (model_f(iv0 + h, kappa, yy) - model_f(iv0 - h, kappa, yy)) / (2 * h);
            const double fd_k =
                (model_f(iv0, kappa + h, yy) - model_f(iv0, kappa - h, yy)) / (2 * h);
            ok = std::abs(g[0] - fd_s) <= 1e-6 * std::max(1.0, std::abs(fd_s)) &&
                 std::abs(g[1] - fd_k) <= 1e-6 * std::max(1.0, std::abs(fd_k));
        }
        all = all && ok;
        if (!ok) fails += " jacobian";
    }

    // scale equivariance at 1e-12
    {
        const SamplingGrid grid = SamplingGrid::equispaced(100, 4);
        SimulationConfig sim;
        sim.cutoff_K = 200;
        sim.seed = 1010;
        const FieldSample f =
            synthesize_field(headline_params, VolatilitySpec::constant(0.25), grid, sim, 1);
        FieldSample g{3.0 * f.values, f.grid, std::nullopt};
        const double s_f = sigma2_multi(f, headline_params);
        const double s_g = sigma2_multi(g, headline_params);
        const double q_f = quarticity(f, headline_params);
        const double q_g = quarticity(g, headline_params);
        const double c_f = curvature_logratio(f);
        const double c_g = curvature_logratio(g);
        bool ok = std::abs(s_g - 9.0 * s_f) <= 1e-12 * std::abs(s_g) &&
                  std::abs(q_g - 81.0 * q_f) <= 1e-12 * std::abs(q_g) &&
                  std::abs(c_g - c_f) <= 1e-12 * std::max(1.0, std::abs(c_f));
        all = all && ok;
        if (!ok) fails += " scale-equivariance";
    }

    // telescoping autocorrelation identity at 1e-12
    {
        bool ok = true;
        for (int H : {1, 10, 1000}) {
            double sum = 0.0;
            for (int h = 1; h <= H; ++h) sum += theoretical_autocorrelation(h);
            const double closed =
                -(1.0 + std::sqrt(static_cast<double>(H)) - std::sqrt(H + 1.0)) / 2.0;
            ok = ok && std::abs(sum - closed) <= 1e-12;
        }
        all = all && ok;
        if (!ok) fails += " telescoping";
    }

    // bit-exact reproducibility across worker counts
    {
        ExperimentConfig cfg;
        cfg.params = headline_params;
        cfg.vol = VolatilitySpec::constant(0.25);
        cfg.n = 100;
        cfg.m = 3;
        cfg.K = 200;
        cfg.replications = 12;
        cfg.seed = 2024;
        cfg.workers = 1;
        const ExperimentReport a = run_experiment(cfg);
        cfg.workers = 4;
        const ExperimentReport b = run_experiment(cfg);
        bool ok = true;
        for (std::size_t i = 0; i < a.records.size(); ++i)
            ok = ok && a.records[i].sigma2 == b.records[i].sigma2 &&
                 a.records[i].kappa == b.records[i].kappa &&
                 a.records[i].rv == b.records[i].rv;
        const FieldSample f1 = synthesize_field(headline_params, VolatilitySpec::constant(0.25),
                                                cfg.grid(), SimulationConfig{500, 5}, 1);
        const FieldSample f2 = synthesize_field(headline_params, VolatilitySpec::constant(0.25),
                                                cfg.grid(), SimulationConfig{500, 5}, 3);
        ok = ok && f1.values == f2.values;
        all = all && ok;
        if (!ok) fails += " reproducibility";
    }

    record(all, std::string("8. invariant suites (orthonormality, jacobian, scaling, "
                            "telescoping, reproducibility): ") +
                    (all ? "all green" : "failing:" + fails) + ", " +
                    fmt(elapsed_since(t0), 1) + " s");
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    auto wanted = [&](int c) { return selected.empty() || selected.count(c) > 0; };

    const auto t0 = std::chrono::steady_clock::now();
    if (wanted(1)) criterion1_gamma();
    if (wanted(2)) criterion2_autocorrelation();
    if (wanted(3)) criterion3_spatial_profile();
    if (wanted(4)) criterion4_clt_variance();
    if (wanted(5)) criterion5_feasible_clt();
    if (wanted(6)) criterion6_least_squares();
    if (wanted(7)) criterion7_oracle_equivalence();
    if (wanted(8)) criterion8_invariants();
    if (wanted(9)) extra_ratio_consistency();

    int failed = 0;
    for (const auto& line : results) failed += line.pass ? 0 : 1;
    std::cout << "----\n"
              << (results.size() - static_cast<std::size_t>(failed)) << "/" << results.size()
              << " checks passed in " << fmt(elapsed_since(t0), 1) << " s" << std::endl;
    return failed == 0 ? 0 : 1;
}
