#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdevol/oracle.hpp"
#include "spdevol/simulate.hpp"

namespace spdevol {

/// Point estimate with a normal-approximation confidence interval.
struct EstimateWithCI {
    double point;
    double stderr_;
    double level;
    double lo;
    double hi;
    long n_obs;
};

inline std::vector<std::string> estimation_advisories(const FieldSample& field) {
    std::vector<std::string> notes;
    const double n = static_cast<double>(field.n());
    if (static_cast<double>(field.m()) > std::sqrt(n))
        notes.push_back("m exceeds sqrt(n); the mn-rate theory degrades in this regime");
    return notes;
}

/// RV_n(y_j) = (1/(n sqrt(delta))) sum_i (Delta_i X)^2(y_j).
inline double realized_volatility(const FieldSample& field, int j) {
    if (j < 0 || j >= field.m())
        throw std::invalid_argument("realized_volatility: spatial index out of range");
    const int n = field.n();
    double sum = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double d = field.values(i, j) - field.values(i - 1, j);
        sum += d * d;
    }
    const double delta = field.grid.delta();
    return sum / (static_cast<double>(n) * std::sqrt(delta));
}

/// Method-of-moments estimator from a single spatial point:
/// sqrt(pi theta2) e^{y theta1/theta2} RV_n(y_j).
inline double sigma2_single(const FieldSample& field, int j, const OperatorParams& params) {
    if (j < 0 || j >= field.m())
        throw std::invalid_argument("sigma2_single: spatial index out of range");
    const double y = field.grid.y[static_cast<std::size_t>(j)];
    return std::sqrt(std::numbers::pi * params.theta2) * std::exp(y * params.curvature()) *
           realized_volatility(field, j);
}

/// Spatial average of the single-point estimators.
inline double sigma2_multi(const FieldSample& field, const OperatorParams& params) {
    const int m = field.m();
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += sigma2_single(field, j, params);
    return sum / static_cast<double>(m);
}

/// Quarticity statistic (theta2 pi / (3m)) sum_j sum_i (Delta_i X)^4(y_j)
/// e^{2 y_j theta1/theta2}; consistent for sigma^4, or for the integrated
/// fourth power under time-varying volatility.
inline double quarticity(const FieldSample& field, const OperatorParams& params) {
    const int n = field.n();
    const int m = field.m();
    const double kappa = params.curvature();
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
        double sum = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double d = field.values(i, j) - field.values(i - 1, j);
            const double d2 = d * d;
            sum += d2 * d2;
        }
        total += sum * std::exp(2.0 * field.grid.y[static_cast<std::size_t>(j)] * kappa);
    }
    return params.theta2 * std::numbers::pi / (3.0 * static_cast<double>(m)) * total;
}

/// Normal confidence interval for sigma^2 with the plug-in standard error
/// sqrt(pi Gamma quart_hat / (m n)).
inline EstimateWithCI feasible_ci(double sigma2_hat, double quart_hat, int n, int m,
                                  double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("feasible_ci: level must lie in (0, 1)");
    if (quart_hat < 0.0)
        throw std::invalid_argument("feasible_ci: quarticity must be non-negative");
    const long n_obs = static_cast<long>(n) * m;
    const double se =
        std::sqrt(std::numbers::pi * gamma_constant_default() * quart_hat /
                  static_cast<double>(n_obs));
    const double z = normal_quantile(1.0 - 0.5 * (1.0 - level));
    return {sigma2_hat, se, level, sigma2_hat - z * se, sigma2_hat + z * se, n_obs};
}

/// Log-ratio curvature estimator between two spatial points,
/// [log S(y_{j1}) - log S(y_{j2})] / (y_{j2} - y_{j1}) with S the sum of
/// squared increments. Symmetric in (j1, j2).
inline double curvature_logratio(const FieldSample& field, int j1, int j2) {
    const int m = field.m();
    if (j1 < 0 || j1 >= m || j2 < 0 || j2 >= m)
        throw std::invalid_argument("curvature_logratio: spatial index out of range");
    if (j1 == j2)
        throw std::invalid_argument("curvature_logratio: needs two distinct spatial points");
    const int n = field.n();
    auto sq_sum = [&](int j) {
        double s = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double d = field.values(i, j) - field.values(i - 1, j);
            s += d * d;
        }
        return s;
    };
    const double s1 = sq_sum(j1);
    const double s2 = sq_sum(j2);
    if (!(s1 > 0.0) || !(s2 > 0.0))
        throw std::domain_error("curvature_logratio: degenerate increments");
    const double y1 = field.grid.y[static_cast<std::size_t>(j1)];
    const double y2 = field.grid.y[static_cast<std::size_t>(j2)];
    return (std::log(s1) - std::log(s2)) / (y2 - y1);
}

/// Default spatial pair: first and last grid points.
inline double curvature_logratio(const FieldSample& field) {
    return curvature_logratio(field, 0, field.m() - 1);
}

/// Sample autocorrelation of the increment series at y_j for lags 1..max_lag.
inline std::vector<double> empirical_autocorrelation(const FieldSample& field, int j,
                                                     int max_lag) {
    if (j < 0 || j >= field.m())
        throw std::invalid_argument("empirical_autocorrelation: spatial index out of range");
    const int n = field.n();
    if (max_lag < 1 || max_lag >= n)
        throw std::invalid_argument("empirical_autocorrelation: need 1 <= max_lag < n");
    std::vector<double> d(static_cast<std::size_t>(n));
    double mean = 0.0;
    for (int i = 1; i <= n; ++i) {
        d[static_cast<std::size_t>(i - 1)] = field.values(i, j) - field.values(i - 1, j);
        mean += d[static_cast<std::size_t>(i - 1)];
    }
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : d) denom += (v - mean) * (v - mean);
    std::vector<double> acf(static_cast<std::size_t>(max_lag));
    for (int h = 1; h <= max_lag; ++h) {
        double num = 0.0;
        for (int i = 0; i + h < n; ++i)
            num += (d[static_cast<std::size_t>(i)] - mean) *
                   (d[static_cast<std::size_t>(i + h)] - mean);
        acf[static_cast<std::size_t>(h - 1)] = num / denom;
    }
    return acf;
}

} // namespace spdevol
