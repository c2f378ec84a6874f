#pragma once

#include <cmath>
#include <stdexcept>

#include "spdevol/model.hpp"

namespace spdevol {

enum class InitialCondition { zero, stationary };

/// Inputs to the closed-form moment formulas of the K-mode model with
/// constant volatility on the time grid with step delta_n.
struct KernelParams {
    OperatorParams params;
    double sigma;
    double delta_n;
    int K;

    KernelParams(OperatorParams p, double sigma_, double delta, int K_)
        : params(p), sigma(sigma_), delta_n(delta), K(K_) {
        if (!(delta_n > 0.0)) throw std::invalid_argument("KernelParams: delta_n must be > 0");
        if (K < 1) throw std::invalid_argument("KernelParams: K must be >= 1");
        if (!(sigma >= 0.0)) throw std::invalid_argument("KernelParams: sigma must be >= 0");
    }
};

namespace detail {

// (1 - e^{-x}) computed without cancellation for small x
inline double one_minus_exp(double x) { return -std::expm1(-x); }

} // namespace detail

/// cov(B_i, B_j) for mode k: the shared-past part of two increments started
/// from zero.
inline double kernel_B(const KernelParams& kp, int i, int j, int mode_k) {
    if (i < 1 || j < 1) throw std::invalid_argument("kernel_B: indices must be >= 1");
    const double lam = eigenvalue(kp.params, mode_k);
    const double d = kp.delta_n;
    if (lam == 0.0) return 0.0;
    const double gap = std::abs(i - j) * d;
    const double age = static_cast<double>(i + j - 2) * d;
    // e^{-lam*gap} - e^{-lam*age} = -e^{-lam*gap} expm1(-lam*(age-gap))
    const double diff = -std::exp(-lam * gap) * std::expm1(-lam * (age - gap));
    const double om = detail::one_minus_exp(lam * d);
    return diff * om * om * kp.sigma * kp.sigma / (2.0 * lam);
}

/// cov(C_i, C_j): the fresh-noise part, diagonal only.
inline double kernel_C(const KernelParams& kp, int i, int j, int mode_k) {
    if (i < 1 || j < 1) throw std::invalid_argument("kernel_C: indices must be >= 1");
    if (i != j) return 0.0;
    const double lam = eigenvalue(kp.params, mode_k);
    const double d = kp.delta_n;
    const double var_unit = (lam == 0.0) ? d : detail::one_minus_exp(2.0 * lam * d) / (2.0 * lam);
    return kp.sigma * kp.sigma * var_unit;
}

/// cov(C_i, B_j), non-zero only for i < j. Evaluated in the form with
/// non-positive exponents so that large lambda*delta cannot overflow.
inline double kernel_BC(const KernelParams& kp, int i, int j, int mode_k) {
    if (i < 1 || j < 1) throw std::invalid_argument("kernel_BC: indices must be >= 1");
    if (i >= j) return 0.0;
    const double lam = eigenvalue(kp.params, mode_k);
    const double d = kp.delta_n;
    if (lam == 0.0) return 0.0;
    // e^{-lam(j-i-1)d} - e^{-lam(j-i+1)d}, then times (e^{-lam d} - 1)
    const double lead = -std::exp(-lam * (j - i - 1) * d) * std::expm1(-2.0 * lam * d);
    return lead * (-detail::one_minus_exp(lam * d)) * kp.sigma * kp.sigma / (2.0 * lam);
}

/// cov(B~_i, B~_j) under the stationary initial law; requires lambda_k > 0.
inline double kernel_B_stationary(const KernelParams& kp, int i, int j, int mode_k) {
    if (i < 1 || j < 1)
        throw std::invalid_argument("kernel_B_stationary: indices must be >= 1");
    const double lam = eigenvalue(kp.params, mode_k);
    if (!(lam > 0.0))
        throw std::domain_error("kernel_B_stationary: requires lambda_k > 0");
    const double d = kp.delta_n;
    const double om = detail::one_minus_exp(lam * d);
    return om * om * std::exp(-lam * std::abs(i - j) * d) * kp.sigma * kp.sigma / (2.0 * lam);
}

/// Exact cov(Delta_i X(y), Delta_j X(y)) of the K-mode model, assembled from
/// the per-mode kernels with zero or stationary initial condition.
inline double increment_cov_exact(const KernelParams& kp, int i, int j, double y,
                                  InitialCondition init) {
    if (i < 1 || j < 1)
        throw std::invalid_argument("increment_cov_exact: indices must be >= 1");
    if (!(y > 0.0 && y < 1.0))
        throw std::domain_error("increment_cov_exact: y must lie in (0, 1)");
    double total = 0.0;
    for (int k = 1; k <= kp.K; ++k) {
        const double ek = eigenfunction(kp.params, k, y);
        const double base = (init == InitialCondition::stationary)
                                ? kernel_B_stationary(kp, i, j, k)
                                : kernel_B(kp, i, j, k);
        total += (base + kernel_BC(kp, i, j, k) + kernel_BC(kp, j, i, k) +
                  kernel_C(kp, i, j, k)) *
                 ek * ek;
    }
    return total;
}

/// E[(Delta_i X)^2(y)] of the K-mode model with zero initial condition:
/// sigma^2 sum_k (1-e^{-lam d})/lam (1 - (1-e^{-lam d})/2 e^{-2 lam t_{i-1}}) e_k^2(y).
inline double expected_sq_increment_exact(const KernelParams& kp, int i, double y) {
    if (i < 1) throw std::invalid_argument("expected_sq_increment_exact: i must be >= 1");
    if (!(y > 0.0 && y < 1.0))
        throw std::domain_error("expected_sq_increment_exact: y must lie in (0, 1)");
    const double d = kp.delta_n;
    double total = 0.0;
    for (int k = 1; k <= kp.K; ++k) {
        const double lam = eigenvalue(kp.params, k);
        const double ek = eigenfunction(kp.params, k, y);
        double term;
        if (lam == 0.0) {
            term = d; // limit of (1 - e^{-lam d})/lam
        } else {
            const double om = detail::one_minus_exp(lam * d);
            term = om / lam * (1.0 - 0.5 * om * std::exp(-2.0 * lam * (i - 1) * d));
        }
        total += term * ek * ek;
    }
    return total * kp.sigma * kp.sigma;
}

/// First-order term of E[(Delta_i X)^2(y)]:
/// sqrt(delta) e^{-y theta1/theta2} sigma^2 / sqrt(theta2 pi).
inline double first_order_sq_increment(const OperatorParams& p, double sigma2, double y,
                                       double delta_n) {
    return std::sqrt(delta_n) * std::exp(-y * p.curvature()) * sigma2 /
           std::sqrt(p.theta2 * std::numbers::pi);
}

/// First-order cov(Delta_i X(y), Delta_j X(y)) at lag |j-i| >= 1.
inline double first_order_cov(const OperatorParams& p, double sigma2, double y, double delta_n,
                              int lag) {
    if (lag < 1) throw std::invalid_argument("first_order_cov: lag must be >= 1");
    const double h = static_cast<double>(lag);
    const double bracket = 2.0 * std::sqrt(h) - std::sqrt(h - 1.0) - std::sqrt(h + 1.0);
    return -std::sqrt(delta_n) * sigma2 * std::exp(-y * p.curvature()) /
           (2.0 * std::sqrt(p.theta2 * std::numbers::pi)) * bracket;
}

/// Lag-h autocorrelation of the increment series at first order,
/// -(2 sqrt(h) - sqrt(h-1) - sqrt(h+1))/2. Independent of y and theta.
inline double theoretical_autocorrelation(int lag) {
    if (lag < 1) throw std::invalid_argument("theoretical_autocorrelation: lag must be >= 1");
    const double h = static_cast<double>(lag);
    return -0.5 * (2.0 * std::sqrt(h) - std::sqrt(h - 1.0) - std::sqrt(h + 1.0));
}

/// The series constant Gamma = (sum_r I(r)^2 + 2) / pi with
/// I(r) = 2 sqrt(r+1) - sqrt(r+2) - sqrt(r).
struct GammaSeries {
    double series_sum;  // sum_{r=0}^{terms-1} I(r)^2
    double gamma;       // (series_sum + 2) / pi
    double tail_bound;  // analytic bound on the truncated remainder
    long terms;
};

/// Sums I(r)^2 until the tail bound R^{-2}/32 drops below tol.
/// I(r)^2 <= r^{-3}/16 for r >= 1, so the remainder past R is below R^{-2}/32.
inline GammaSeries gamma_series(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("gamma_series: tol must be positive");
    double sum = 0.0;
    long r = 0;
    double bound;
    for (;;) {
        const double rd = static_cast<double>(r);
        // I(r) via difference-of-inverses form; the naive expression cancels
        // catastrophically for large r
        const double ir = 1.0 / (std::sqrt(rd + 1.0) + std::sqrt(rd)) -
                          1.0 / (std::sqrt(rd + 2.0) + std::sqrt(rd + 1.0));
        sum += ir * ir;
        ++r;
        bound = 1.0 / (32.0 * static_cast<double>(r) * static_cast<double>(r));
        if (r >= 2 && bound < tol) break;
    }
    return {sum, (sum + 2.0) / std::numbers::pi, bound, r};
}

inline double gamma_constant(double tol) { return gamma_series(tol).gamma; }

/// Gamma at working precision, evaluated once.
inline double gamma_constant_default() {
    static const double value = gamma_constant(1e-12);
    return value;
}

} // namespace spdevol
