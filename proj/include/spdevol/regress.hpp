#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spdevol/estimate.hpp"

namespace spdevol {

/// Rescaled realized volatilities Z_j paired with their spatial points.
struct RegressionData {
    std::vector<double> z;
    std::vector<double> y;
};

inline RegressionData build_regression_data(const FieldSample& field) {
    if (field.m() < 2)
        throw std::invalid_argument(
            "build_regression_data: curvature not identifiable from one spatial point");
    RegressionData data;
    data.z.reserve(static_cast<std::size_t>(field.m()));
    for (int j = 0; j < field.m(); ++j) data.z.push_back(realized_volatility(field, j));
    data.y = field.grid.y;
    return data;
}

/// Regression function f_{s,k}(y) = (s / sqrt(pi)) e^{-k y}.
inline double model_f(double iv0, double kappa, double y) {
    return iv0 / std::sqrt(std::numbers::pi) * std::exp(-kappa * y);
}

/// Analytic gradient of model_f in (iv0, kappa).
inline Eigen::Vector2d model_f_gradient(double iv0, double kappa, double y) {
    const double e = std::exp(-kappa * y) / std::sqrt(std::numbers::pi);
    return {e, -y * iv0 * e};
}

enum class MomentMode { integral, discrete };

namespace detail {

// int_a^b y^p e^{-c y} dy for p in {0, 1, 2}; power series for small |c|,
// where the closed form cancels.
inline double exp_moment(int p, double c, double a, double b) {
    if (std::abs(c) * std::max(std::abs(a), std::abs(b)) < 1e-4) {
        double sum = 0.0;
        double coeff = 1.0; // (-c)^j / j!
        for (int j = 0; j < 12; ++j) {
            const int q = p + j + 1;
            sum += coeff * (std::pow(b, q) - std::pow(a, q)) / static_cast<double>(q);
            coeff *= -c / static_cast<double>(j + 1);
        }
        return sum;
    }
    auto F = [&](double y) {
        const double e = std::exp(-c * y);
        switch (p) {
            case 0: return -e / c;
            case 1: return -e * (c * y + 1.0) / (c * c);
            default: return -e * (c * c * y * y + 2.0 * c * y + 2.0) / (c * c * c);
        }
    };
    return F(b) - F(a);
}

// moment of y^p against e^{-c y}: integral over [y_1, y_m] or the discrete
// average (1/m) sum_j
inline double moment(int p, double c, const std::vector<double>& y, MomentMode mode) {
    if (mode == MomentMode::integral) return exp_moment(p, c, y.front(), y.back());
    double s = 0.0;
    for (double yj : y) s += std::pow(yj, p) * std::exp(-c * yj);
    return s / static_cast<double>(y.size());
}

inline Eigen::Matrix2d uv_matrix(double iv0, double kappa, const std::vector<double>& y,
                                 MomentMode mode, double rate) {
    if (y.size() < 2) throw std::invalid_argument("moment matrix: need at least two points");
    Eigen::Matrix2d m;
    const double m0 = moment(0, rate * kappa, y, mode);
    const double m1 = moment(1, rate * kappa, y, mode);
    const double m2 = moment(2, rate * kappa, y, mode);
    m << m0, -iv0 * m1, -iv0 * m1, iv0 * iv0 * m2;
    return m;
}

} // namespace detail

/// Fourth-power moment matrix U(eta) with decay e^{-4 kappa y}.
inline Eigen::Matrix2d matrix_U(double iv0, double kappa, const std::vector<double>& y,
                                MomentMode mode) {
    return detail::uv_matrix(iv0, kappa, y, mode, 4.0);
}

/// Second-power moment matrix V(eta) with decay e^{-2 kappa y}.
inline Eigen::Matrix2d matrix_V(double iv0, double kappa, const std::vector<double>& y,
                                MomentMode mode) {
    return detail::uv_matrix(iv0, kappa, y, mode, 2.0);
}

/// Asymptotic covariance (Gamma pi / theta2) int sigma^4 V^{-1} U V^{-1} of
/// the least-squares estimator, not yet divided by mn.
inline Eigen::Matrix2d asymptotic_cov(double iv0, double kappa, double theta2,
                                      double quart_integral, const std::vector<double>& y,
                                      MomentMode mode) {
    if (!(theta2 > 0.0)) throw std::invalid_argument("asymptotic_cov: theta2 must be positive");
    const Eigen::Matrix2d U = matrix_U(iv0, kappa, y, mode);
    const Eigen::Matrix2d V = matrix_V(iv0, kappa, y, mode);
    const double det = V(0, 0) * V(1, 1) - V(0, 1) * V(1, 0);
    const double det_scale =
        std::max(std::abs(V(0, 0) * V(1, 1)), std::abs(V(0, 1) * V(1, 0)));
    if (!(std::abs(det) > 1e-12 * det_scale))
        throw std::domain_error("asymptotic_cov: V is singular (coincident spatial points)");
    Eigen::Matrix2d Vinv;
    Vinv << V(1, 1), -V(0, 1), -V(1, 0), V(0, 0);
    Vinv /= det;
    Eigen::Matrix2d cov = Vinv * U * Vinv;
    cov = 0.5 * (cov + cov.transpose().eval()); // exact symmetry
    return gamma_constant_default() * std::numbers::pi / theta2 * quart_integral * cov;
}

struct FitOptions {
    int max_iterations = 100;
    double rel_rss_tol = 1e-10;
    double gradient_tol = 1e-12;
    double initial_damping = 1e-3;
    std::optional<std::pair<double, double>> start; // default: log-linear warm start
    // when provided, the fit also reports the plug-in asymptotic covariance
    std::optional<double> theta2;
    std::optional<double> quart_integral;
    std::optional<MomentMode> moment_mode; // default: discrete below 50 points
};

struct RegressionFit {
    double iv0_hat = 0.0;
    double kappa_hat = 0.0;
    bool converged = false;
    int iterations = 0;
    double rss = 0.0;
    std::optional<Eigen::Matrix2d> asym_cov; // scaled by 1/(mn) when n supplied
    std::optional<Eigen::Vector2d> stderrs;
};

namespace detail {

inline double rss_at(const RegressionData& data, double iv0, double kappa) {
    double rss = 0.0;
    for (std::size_t j = 0; j < data.z.size(); ++j) {
        const double r = data.z[j] - model_f(iv0, kappa, data.y[j]);
        rss += r * r;
    }
    return rss;
}

// warm start from ordinary regression of log z on y; (1, 1) when degenerate
inline Eigen::Vector2d log_linear_init(const RegressionData& data) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (std::size_t j = 0; j < data.z.size(); ++j) {
        if (!(data.z[j] > 0.0)) continue;
        const double ly = std::log(data.z[j]);
        sx += data.y[j];
        sy += ly;
        sxx += data.y[j] * data.y[j];
        sxy += data.y[j] * ly;
        ++cnt;
    }
    if (cnt < 2) return {1.0, 1.0};
    const double denom = cnt * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) return {1.0, 1.0};
    const double slope = (cnt * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / cnt;
    const double iv0 = std::sqrt(std::numbers::pi) * std::exp(intercept);
    return {iv0, -slope};
}

} // namespace detail

/// Least-squares fit of (IV0, kappa) by Levenberg-Marquardt with the analytic
/// Jacobian. Accepted steps never increase the residual sum of squares; iv0
/// is kept positive by projection.
inline RegressionFit fit_least_squares(const RegressionData& data, const FitOptions& opts = {},
                                       int n_time = 0) {
    const std::size_t m = data.z.size();
    if (m < 2 || data.y.size() != m)
        throw std::invalid_argument("fit_least_squares: need at least two matched points");
    for (std::size_t j = 1; j < m; ++j)
        if (!(data.y[j] > data.y[j - 1]))
            throw std::invalid_argument("fit_least_squares: spatial points must increase");
    bool any_positive = false;
    for (double z : data.z) any_positive = any_positive || z > 0.0;
    if (!any_positive)
        throw std::invalid_argument("fit_least_squares: all responses are non-positive");

    constexpr double iv0_floor = 1e-12;
    Eigen::Vector2d eta = opts.start
                              ? Eigen::Vector2d(opts.start->first, opts.start->second)
                              : detail::log_linear_init(data);
    eta[0] = std::max(eta[0], iv0_floor);

    RegressionFit fit;
    double rss = detail::rss_at(data, eta[0], eta[1]);
    double damping = opts.initial_damping;
    bool converged = false;
    int iter = 0;

    for (; iter < opts.max_iterations; ++iter) {
        // J^T J and J^T r at the current iterate
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (std::size_t j = 0; j < m; ++j) {
            const Eigen::Vector2d g = model_f_gradient(eta[0], eta[1], data.y[j]);
            const double r = data.z[j] - model_f(eta[0], eta[1], data.y[j]);
            jtj += g * g.transpose();
            jtr += g * r;
        }
        if (jtr.lpNorm<Eigen::Infinity>() < opts.gradient_tol) {
            converged = true;
            break;
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::Matrix2d lhs = jtj;
            lhs(0, 0) += damping * jtj(0, 0);
            lhs(1, 1) += damping * jtj(1, 1);
            const double det = lhs(0, 0) * lhs(1, 1) - lhs(0, 1) * lhs(1, 0);
            if (!(std::abs(det) > 0.0)) {
                damping *= 10.0;
                continue;
            }
            Eigen::Vector2d step;
            step[0] = (lhs(1, 1) * jtr[0] - lhs(0, 1) * jtr[1]) / det;
            step[1] = (lhs(0, 0) * jtr[1] - lhs(1, 0) * jtr[0]) / det;
            Eigen::Vector2d trial = eta + step;
            trial[0] = std::max(trial[0], iv0_floor);
            const double trial_rss = detail::rss_at(data, trial[0], trial[1]);
            if (trial_rss <= rss) {
                const double decrease = rss - trial_rss;
                const double denom = std::max(rss, 1e-300);
                eta = trial;
                rss = trial_rss;
                damping = std::max(damping / 10.0, 1e-15);
                accepted = true;
                if (decrease / denom < opts.rel_rss_tol) converged = true;
                break;
            }
            damping *= 10.0;
        }
        if (!accepted) break; // stalled: report best iterate, converged stays false
        if (converged) {
            ++iter;
            break;
        }
    }

    fit.iv0_hat = eta[0];
    fit.kappa_hat = eta[1];
    fit.rss = rss;
    fit.iterations = iter;
    fit.converged = converged;

    if (opts.theta2 && opts.quart_integral) {
        const MomentMode mode =
            opts.moment_mode.value_or(m < 50 ? MomentMode::discrete : MomentMode::integral);
        Eigen::Matrix2d cov =
            asymptotic_cov(eta[0], eta[1], *opts.theta2, *opts.quart_integral, data.y, mode);
        if (n_time > 0) {
            cov /= static_cast<double>(m) * static_cast<double>(n_time);
            fit.stderrs = Eigen::Vector2d(std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)));
        }
        fit.asym_cov = cov;
    }
    return fit;
}

} // namespace spdevol
