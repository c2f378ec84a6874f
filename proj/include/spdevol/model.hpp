#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "spdevol/numeric.hpp"

namespace spdevol {

/// Coefficients of the differential operator
///   A = theta2 d²/dy² + theta1 d/dy + theta0
/// on [0, 1] with zero Dirichlet boundaries.
struct OperatorParams {
    double theta0;
    double theta1;
    double theta2;

    OperatorParams(double t0, double t1, double t2)
        : theta0(t0), theta1(t1), theta2(t2) {
        if (!(theta2 > 0.0))
            throw std::invalid_argument("OperatorParams: theta2 must be positive");
        if (!std::isfinite(theta0) || !std::isfinite(theta1) || !std::isfinite(theta2))
            throw std::invalid_argument("OperatorParams: coefficients must be finite");
        if (!std::isfinite(theta1 / theta2))
            throw std::invalid_argument("OperatorParams: theta1/theta2 overflows");
    }

    /// Curvature parameter theta1/theta2; the identifiable spatial decay rate.
    double curvature() const { return theta1 / theta2; }
};

/// lambda_k = -theta0 + theta1^2/(4 theta2) + pi^2 k^2 theta2, the negated
/// eigenvalue of the operator for mode k. Strictly increasing in k.
inline double eigenvalue(const OperatorParams& p, int k) {
    if (k < 1) throw std::invalid_argument("eigenvalue: k must be >= 1");
    const double pik = std::numbers::pi * static_cast<double>(k);
    return -p.theta0 + p.theta1 * p.theta1 / (4.0 * p.theta2) + pik * pik * p.theta2;
}

struct EigenMode {
    int k;
    double lambda;
};

inline EigenMode eigen_mode(const OperatorParams& p, int k) {
    return {k, eigenvalue(p, k)};
}

/// e_k(y) = sqrt(2) sin(pi k y) exp(-theta1 y / (2 theta2)); vanishes at both
/// boundaries.
inline double eigenfunction(const OperatorParams& p, int k, double y) {
    if (k < 1) throw std::invalid_argument("eigenfunction: k must be >= 1");
    if (!(y >= 0.0 && y <= 1.0))
        throw std::domain_error("eigenfunction: y outside [0, 1]");
    return std::numbers::sqrt2 * std::sin(std::numbers::pi * static_cast<double>(k) * y) *
           std::exp(-0.5 * p.curvature() * y);
}

/// <f, g> = int_0^1 exp(y theta1/theta2) f(y) g(y) dy, evaluated with
/// composite Simpson on `quad_nodes` panels. The eigenfunctions are
/// orthonormal under this product.
inline double inner_product_theta(const OperatorParams& p,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& g,
                                  std::size_t quad_nodes) {
    if (quad_nodes < 16)
        throw std::invalid_argument("inner_product_theta: need at least 16 nodes");
    const double kappa = p.curvature();
    return composite_simpson(
        [&](double y) { return std::exp(kappa * y) * f(y) * g(y); }, 0.0, 1.0, quad_nodes);
}

/// Standard deviation sqrt(sigma^2 / (2 lambda_k)) of the k-th coefficient
/// under the stationary law. Requires a dissipative mode, lambda_k > 0.
inline double stationary_coeff_std(const OperatorParams& p, double sigma, int k) {
    if (sigma < 0.0)
        throw std::invalid_argument("stationary_coeff_std: sigma must be >= 0");
    if (sigma == 0.0) return 0.0;
    const double lambda = eigenvalue(p, k);
    if (!(lambda > 0.0))
        throw std::domain_error(
            "stationary_coeff_std: non-dissipative mode, stationary law undefined");
    return sigma / std::sqrt(2.0 * lambda);
}

/// Volatility over [0, 1]: a constant, or a strictly positive deterministic
/// function of time with declared Hoelder regularity.
class VolatilitySpec {
public:
    enum class Kind { constant, time_varying };

    // sigma = 0 is admitted as the degenerate noise-free model
    static VolatilitySpec constant(double sigma) {
        if (!(sigma >= 0.0))
            throw std::invalid_argument("VolatilitySpec: sigma must be non-negative");
        VolatilitySpec v;
        v.kind_ = Kind::constant;
        v.sigma_ = sigma;
        return v;
    }

    static VolatilitySpec time_varying(std::function<double(double)> fn, double holder_alpha,
                                       std::string name = "") {
        if (!(holder_alpha > 0.5 && holder_alpha <= 1.0))
            throw std::invalid_argument("VolatilitySpec: Hoelder index must lie in (1/2, 1]");
        VolatilitySpec v;
        v.kind_ = Kind::time_varying;
        v.fn_ = std::move(fn);
        v.holder_ = holder_alpha;
        v.name_ = std::move(name);
        // positivity probe at grid resolution
        for (int i = 0; i <= 1024; ++i) {
            const double t = static_cast<double>(i) / 1024.0;
            if (!(v.fn_(t) > 0.0))
                throw std::invalid_argument(
                    "VolatilitySpec: sigma(t) must be strictly positive on [0, 1]");
        }
        return v;
    }

    /// sigma_t = 1 - 0.2 sin(3 pi t / 4), the intraday-shaped test pattern.
    static VolatilitySpec sine_intraday() {
        return time_varying(
            [](double t) { return 1.0 - 0.2 * std::sin(0.75 * std::numbers::pi * t); }, 1.0,
            "sine-intraday");
    }

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::constant; }
    double constant_sigma() const {
        if (!is_constant())
            throw std::logic_error("VolatilitySpec: not a constant specification");
        return sigma_;
    }
    double holder_index() const { return is_constant() ? 1.0 : holder_; }
    const std::string& name() const { return name_; }

    double at(double t) const { return is_constant() ? sigma_ : fn_(t); }

    /// int_0^1 sigma_t^p dt by composite Simpson.
    double integral_power(int p, std::size_t panels = 16384) const {
        if (is_constant()) return std::pow(sigma_, p);
        return composite_simpson([&](double t) { return std::pow(fn_(t), p); }, 0.0, 1.0,
                                 panels);
    }

private:
    VolatilitySpec() = default;

    Kind kind_ = Kind::constant;
    double sigma_ = 1.0;
    double holder_ = 1.0;
    std::function<double(double)> fn_;
    std::string name_;
};

} // namespace spdevol
