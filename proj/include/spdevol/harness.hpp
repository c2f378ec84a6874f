#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "spdevol/estimate.hpp"
#include "spdevol/regress.hpp"
#include "spdevol/simulate.hpp"

namespace spdevol {

enum class EstimatorKind { sigma2_multi, quarticity, curvature_logratio, fit_least_squares };

inline const char* estimator_name(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::sigma2_multi: return "sigma2_multi";
        case EstimatorKind::quarticity: return "quarticity";
        case EstimatorKind::curvature_logratio: return "curvature_logratio";
        default: return "fit_least_squares";
    }
}

struct ExperimentConfig {
    OperatorParams params{0.0, 1.0, 0.2};
    VolatilitySpec vol = VolatilitySpec::constant(0.25);
    int n = 1000;
    int m = 9;
    int K = 10000;
    int refinement = 1;
    int replications = 3000;
    std::uint64_t seed = 1;
    std::vector<double> explicit_y; // empty: y_j = j/(m+1)
    std::vector<EstimatorKind> estimators = {EstimatorKind::sigma2_multi,
                                             EstimatorKind::quarticity,
                                             EstimatorKind::curvature_logratio,
                                             EstimatorKind::fit_least_squares};
    InitialCondition initial_condition = InitialCondition::zero;
    double ci_level = 0.95;
    int workers = 0; // 0: hardware concurrency

    void validate() const {
        if (replications < 1)
            throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
        if (n < 1 || m < 1 || K < 1 || refinement < 1)
            throw std::invalid_argument("ExperimentConfig: n, m, K, refinement must be >= 1");
    }

    SamplingGrid grid() const {
        return explicit_y.empty() ? SamplingGrid::equispaced(n, m) : SamplingGrid(n, explicit_y);
    }

    bool wants(EstimatorKind k) const {
        return std::find(estimators.begin(), estimators.end(), k) != estimators.end();
    }
};

struct ReplicationRecord {
    double sigma2 = std::numeric_limits<double>::quiet_NaN();
    double quarticity = std::numeric_limits<double>::quiet_NaN();
    double curvature = std::numeric_limits<double>::quiet_NaN();
    double iv0 = std::numeric_limits<double>::quiet_NaN();
    double kappa = std::numeric_limits<double>::quiet_NaN();
    bool fit_converged = false;
    std::vector<double> rv; // realized volatility per spatial point
};

struct SummaryStats {
    double mean = 0.0;
    double mc_variance = 0.0;
    double mn_scaled_variance = 0.0;
    double theory_variance = 0.0; // 0 when no first-order theory applies
    double ratio = 0.0;           // mn_scaled_variance / theory_variance
};

struct QQTable {
    std::vector<double> standardized; // sorted
    std::vector<double> normal_quantiles;
    double ks_stat = 0.0;
};

struct ProfileRow {
    double y;
    double mean_rv;
    double theory;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<ReplicationRecord> records;
    std::map<std::string, SummaryStats> summary;
    // joint least-squares block
    std::optional<Eigen::Vector2d> fit_mean;
    std::optional<Eigen::Matrix2d> fit_mc_cov_scaled; // mn * MC covariance
    std::optional<Eigen::Matrix2d> fit_theory_cov;
    long fit_converged_count = 0;
    // feasible-CLT block
    double truth_sigma2 = 0.0;  // sigma^2 or integrated sigma^2
    double truth_quart = 0.0;   // sigma^4 or integrated sigma^4
    double coverage = -1.0;     // -1 when CIs were not evaluated
    QQTable qq;
    std::vector<ProfileRow> profile;
};

/// Kolmogorov-Smirnov distance between sorted values and the standard normal.
inline double ks_statistic(const std::vector<double>& sorted_values) {
    const std::size_t r = sorted_values.size();
    if (r == 0) throw std::invalid_argument("ks_statistic: empty sample");
    double d = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        const double cdf = normal_cdf(sorted_values[i]);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(r) - cdf;
        const double lo = cdf - static_cast<double>(i) / static_cast<double>(r);
        d = std::max({d, hi, lo});
    }
    return d;
}

enum class Standardization { feasible, fixed_truth };

/// Standardized estimation errors sqrt(mn) (sigma2_hat - truth) / sqrt(pi G q)
/// paired with normal quantiles at plotting positions (i - 0.5)/R. The
/// denominator uses the per-replication quarticity (feasible) or the true
/// fourth-power integral.
inline QQTable qq_standardized_errors(const std::vector<ReplicationRecord>& records, int n,
                                      int m, double truth_sigma2, double truth_quart,
                                      Standardization against = Standardization::feasible) {
    if (records.size() < 30)
        throw std::invalid_argument("qq_standardized_errors: need at least 30 replications");
    const double mn = static_cast<double>(m) * static_cast<double>(n);
    const double pig = std::numbers::pi * gamma_constant_default();
    QQTable table;
    table.standardized.reserve(records.size());
    for (const auto& rec : records) {
        const double q =
            against == Standardization::feasible ? rec.quarticity : truth_quart;
        table.standardized.push_back(std::sqrt(mn) * (rec.sigma2 - truth_sigma2) /
                                     std::sqrt(pig * q));
    }
    std::sort(table.standardized.begin(), table.standardized.end());
    const double r = static_cast<double>(records.size());
    table.normal_quantiles.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        table.normal_quantiles.push_back(
            normal_quantile((static_cast<double>(i) + 0.5) / r));
    table.ks_stat = ks_statistic(table.standardized);
    return table;
}

namespace detail {

struct Accumulator {
    double sum = 0.0, sumsq = 0.0;
    long count = 0;
    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++count;
    }
    double mean() const { return sum / static_cast<double>(count); }
    double variance() const {
        if (count < 2) return 0.0;
        const double mu = mean();
        return (sumsq - static_cast<double>(count) * mu * mu) / static_cast<double>(count - 1);
    }
};

} // namespace detail

/// Runs the Monte Carlo study described by `cfg`. Replication r simulates
/// with seed derive_seed(cfg.seed, r); records are aggregated by replication
/// index, so the report is identical for any worker count.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const SamplingGrid grid = cfg.grid();
    const int R = cfg.replications;
    const int m = grid.m();
    const double mn = static_cast<double>(m) * static_cast<double>(cfg.n);

    ExperimentReport report;
    report.config = cfg;
    report.truth_sigma2 = cfg.vol.integral_power(2);
    report.truth_quart = cfg.vol.integral_power(4);
    report.records.resize(static_cast<std::size_t>(R));

    const bool want_sigma2 = cfg.wants(EstimatorKind::sigma2_multi);
    const bool want_quart = cfg.wants(EstimatorKind::quarticity);
    const bool want_curv = cfg.wants(EstimatorKind::curvature_logratio) && m >= 2;
    const bool want_fit = cfg.wants(EstimatorKind::fit_least_squares) && m >= 2;

    const int workers = [&] {
        int w = cfg.workers > 0 ? cfg.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
        return std::max(1, std::min(w, R));
    }();

    auto run_rep = [&](int rep) {
        SimulationConfig sim;
        sim.cutoff_K = cfg.K;
        sim.refinement = cfg.refinement;
        sim.initial_condition = cfg.initial_condition;
        sim.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
        const FieldSample field = synthesize_field(cfg.params, cfg.vol, grid, sim, 1);

        ReplicationRecord rec;
        if (want_sigma2) rec.sigma2 = sigma2_multi(field, cfg.params);
        if (want_quart) rec.quarticity = quarticity(field, cfg.params);
        if (want_curv) rec.curvature = curvature_logratio(field);
        if (want_fit) {
            const RegressionData data = build_regression_data(field);
            const RegressionFit fit = fit_least_squares(data);
            rec.iv0 = fit.iv0_hat;
            rec.kappa = fit.kappa_hat;
            rec.fit_converged = fit.converged;
        }
        rec.rv.resize(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
            rec.rv[static_cast<std::size_t>(j)] = realized_volatility(field, j);
        report.records[static_cast<std::size_t>(rep)] = std::move(rec);
    };

    if (workers == 1) {
        for (int rep = 0; rep < R; ++rep) run_rep(rep);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const int rep = next.fetch_add(1);
                    if (rep >= R) return;
                    run_rep(rep);
                }
            });
    }

    // deterministic aggregation over replication index
    detail::Accumulator acc_sigma2, acc_quart, acc_curv;
    long covered = 0, ci_count = 0;
    for (const auto& rec : report.records) {
        if (want_sigma2) acc_sigma2.add(rec.sigma2);
        if (want_quart) acc_quart.add(rec.quarticity);
        if (want_curv) acc_curv.add(rec.curvature);
        if (want_sigma2 && want_quart) {
            const EstimateWithCI ci =
                feasible_ci(rec.sigma2, rec.quarticity, cfg.n, m, cfg.ci_level);
            covered += (ci.lo <= report.truth_sigma2 && report.truth_sigma2 <= ci.hi) ? 1 : 0;
            ++ci_count;
        }
    }

    const double pig = std::numbers::pi * gamma_constant_default();
    if (want_sigma2) {
        SummaryStats s;
        s.mean = acc_sigma2.mean();
        s.mc_variance = acc_sigma2.variance();
        s.mn_scaled_variance = mn * s.mc_variance;
        s.theory_variance = pig * report.truth_quart;
        s.ratio = s.theory_variance > 0.0 ? s.mn_scaled_variance / s.theory_variance : 0.0;
        report.summary[estimator_name(EstimatorKind::sigma2_multi)] = s;
    }
    if (want_quart) {
        SummaryStats s;
        s.mean = acc_quart.mean();
        s.mc_variance = acc_quart.variance();
        s.mn_scaled_variance = mn * s.mc_variance;
        report.summary[estimator_name(EstimatorKind::quarticity)] = s;
    }
    if (want_curv) {
        SummaryStats s;
        s.mean = acc_curv.mean();
        s.mc_variance = acc_curv.variance();
        s.mn_scaled_variance = mn * s.mc_variance;
        report.summary[estimator_name(EstimatorKind::curvature_logratio)] = s;
    }
    if (want_fit) {
        Eigen::Vector2d mean = Eigen::Vector2d::Zero();
        for (const auto& rec : report.records) {
            mean[0] += rec.iv0;
            mean[1] += rec.kappa;
            report.fit_converged_count += rec.fit_converged ? 1 : 0;
        }
        mean /= static_cast<double>(R);
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        for (const auto& rec : report.records) {
            const Eigen::Vector2d d(rec.iv0 - mean[0], rec.kappa - mean[1]);
            cov += d * d.transpose();
        }
        if (R > 1) cov /= static_cast<double>(R - 1);
        report.fit_mean = mean;
        report.fit_mc_cov_scaled = mn * cov;
        const double iv0_true = report.truth_sigma2 / std::sqrt(cfg.params.theta2);
        report.fit_theory_cov =
            asymptotic_cov(iv0_true, cfg.params.curvature(), cfg.params.theta2,
                           report.truth_quart, grid.y,
                           m < 50 ? MomentMode::discrete : MomentMode::integral);
    }
    if (ci_count > 0) report.coverage = static_cast<double>(covered) / ci_count;
    if (want_sigma2 && want_quart && R >= 30)
        report.qq = qq_standardized_errors(report.records, cfg.n, m, report.truth_sigma2,
                                           report.truth_quart);

    // spatial profile of mean realized volatility vs. the first-order curve
    Eigen::VectorXd rv_mean = Eigen::VectorXd::Zero(m);
    for (const auto& rec : report.records)
        for (int j = 0; j < m; ++j) rv_mean[j] += rec.rv[static_cast<std::size_t>(j)];
    rv_mean /= static_cast<double>(R);
    report.profile.reserve(static_cast<std::size_t>(m));
    const double delta = grid.delta();
    for (int j = 0; j < m; ++j) {
        const double theory = first_order_sq_increment(cfg.params, report.truth_sigma2,
                                                       grid.y[static_cast<std::size_t>(j)],
                                                       delta) /
                              std::sqrt(delta);
        report.profile.push_back({grid.y[static_cast<std::size_t>(j)], rv_mean[j], theory});
    }
    return report;
}

/// Per-point Monte Carlo mean of RV_n(y_j) with the first-order theory curve.
inline std::vector<ProfileRow> spatial_profile(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    c.estimators = {};
    return run_experiment(c).profile;
}

} // namespace spdevol
