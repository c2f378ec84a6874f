#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "spdevol/model.hpp"
#include "spdevol/oracle.hpp"
#include "spdevol/rng.hpp"

namespace spdevol {

/// Observation grid: times i/n for i = 0..n and ordered interior spatial
/// points y_1 < ... < y_m.
struct SamplingGrid {
    int n;
    std::vector<double> y;
    double delta_margin;

    SamplingGrid(int n_, std::vector<double> y_) : n(n_), y(std::move(y_)) {
        if (n < 1) throw std::invalid_argument("SamplingGrid: n must be >= 1");
        if (y.empty()) throw std::invalid_argument("SamplingGrid: need at least one point");
        double margin = 1.0;
        double prev = 0.0;
        for (double yj : y) {
            if (!(yj > prev && yj < 1.0))
                throw std::invalid_argument(
                    "SamplingGrid: spatial points must be strictly increasing inside (0, 1)");
            margin = std::min({margin, yj, 1.0 - yj});
            prev = yj;
        }
        delta_margin = margin;
    }

    /// y_j = j/(m+1), j = 1..m.
    static SamplingGrid equispaced(int n, int m) {
        if (m < 1) throw std::invalid_argument("SamplingGrid: m must be >= 1");
        std::vector<double> pts(m);
        for (int j = 1; j <= m; ++j)
            pts[j - 1] = static_cast<double>(j) / static_cast<double>(m + 1);
        return SamplingGrid(n, std::move(pts));
    }

    int m() const { return static_cast<int>(y.size()); }
    double delta() const { return 1.0 / static_cast<double>(n); }
};

struct SimulationConfig {
    int cutoff_K = 10000;
    std::uint64_t seed = 1;
    InitialCondition initial_condition = InitialCondition::zero;
    int refinement = 1;

    void validate() const {
        if (cutoff_K < 1) throw std::invalid_argument("SimulationConfig: cutoff_K must be >= 1");
        if (refinement < 1)
            throw std::invalid_argument("SimulationConfig: refinement must be >= 1");
    }
};

struct FieldProvenance {
    OperatorParams params;
    VolatilitySpec vol;
    SimulationConfig config;
};

/// Observed field X_{t_i}(y_j) as an (n+1) x m matrix, row i = time i/n.
struct FieldSample {
    Eigen::MatrixXd values;
    SamplingGrid grid;
    std::optional<FieldProvenance> provenance;

    int n() const { return grid.n; }
    int m() const { return grid.m(); }
};

/// Advisory (non-fatal) checks on a simulation configuration.
inline std::vector<std::string> simulation_advisories(const SamplingGrid& grid,
                                                      const SimulationConfig& config) {
    std::vector<std::string> notes;
    if (config.cutoff_K < 10 * grid.n)
        notes.push_back("cutoff K below 10*n; spectral truncation can bias estimates low");
    return notes;
}

/// One exact Ornstein-Uhlenbeck path with decay rate `lambda`, observed at
/// times i/n for i = 0..n. Internally iterates n*refinement sub-steps of size
/// tau = 1/(n*refinement),
///   x(t+tau) = x(t) e^{-lambda tau} + sigma(t) sqrt((1-e^{-2 lambda tau})/(2 lambda)) N,
/// freezing sigma at the left endpoint of each sub-step; the transition scale
/// degrades gracefully to sigma(t) sqrt(tau) as lambda -> 0. Consumes exactly
/// n*refinement normals from `stream` in order.
inline std::vector<double> ou_exact_path(double lambda, const VolatilitySpec& vol, int n,
                                         int refinement, double x0, NormalStream& stream) {
    if (n < 1) throw std::invalid_argument("ou_exact_path: n must be >= 1");
    if (refinement < 1) throw std::invalid_argument("ou_exact_path: refinement must be >= 1");
    const long total = static_cast<long>(n) * refinement;
    const double tau = 1.0 / static_cast<double>(total);
    const double a = std::exp(-lambda * tau);
    const double c = (lambda == 0.0)
                         ? std::sqrt(tau)
                         : std::sqrt(-std::expm1(-2.0 * lambda * tau) / (2.0 * lambda));

    std::vector<double> path(static_cast<std::size_t>(n) + 1);
    path[0] = x0;
    double x = x0;
    if (vol.is_constant()) {
        const double s = vol.constant_sigma() * c;
        for (long step = 0; step < total; ++step) {
            x = x * a + s * stream.next();
            if ((step + 1) % refinement == 0)
                path[static_cast<std::size_t>((step + 1) / refinement)] = x;
        }
    } else {
        for (long step = 0; step < total; ++step) {
            const double s = vol.at(static_cast<double>(step) * tau) * c;
            x = x * a + s * stream.next();
            if ((step + 1) % refinement == 0)
                path[static_cast<std::size_t>((step + 1) / refinement)] = x;
        }
    }
    return path;
}

namespace detail {

// Fills one path column at observation times; same recursion as
// ou_exact_path but writing into preallocated storage.
inline void ou_path_into(double lambda, const std::vector<double>& sigma_at, double sigma_const,
                         bool constant_vol, int n, int refinement, double x0,
                         NormalStream& stream, double* out) {
    const long total = static_cast<long>(n) * refinement;
    const double tau = 1.0 / static_cast<double>(total);
    const double a = std::exp(-lambda * tau);
    const double c = (lambda == 0.0)
                         ? std::sqrt(tau)
                         : std::sqrt(-std::expm1(-2.0 * lambda * tau) / (2.0 * lambda));
    out[0] = x0;
    double x = x0;
    if (constant_vol) {
        const double s = sigma_const * c;
        for (long step = 0; step < total; ++step) {
            x = x * a + s * stream.next();
            if ((step + 1) % refinement == 0) out[(step + 1) / refinement] = x;
        }
    } else {
        for (long step = 0; step < total; ++step) {
            x = x * a + sigma_at[static_cast<std::size_t>(step)] * c * stream.next();
            if ((step + 1) % refinement == 0) out[(step + 1) / refinement] = x;
        }
    }
}

} // namespace detail

/// Spectral synthesis X_{t_i}(y_j) = sum_{k=1}^K x_k(t_i) e_k(y_j) with one
/// independent exact OU path per mode. Mode k draws from a counter-based
/// stream keyed by (seed, k); the accumulation order over modes is fixed, so
/// the result is bit-identical for any `threads` value.
inline FieldSample synthesize_field(const OperatorParams& params, const VolatilitySpec& vol,
                                    const SamplingGrid& grid, const SimulationConfig& config,
                                    int threads = 1) {
    config.validate();
    const int n = grid.n;
    const int m = grid.m();
    const int K = config.cutoff_K;
    const int refinement = config.refinement;

    if (config.initial_condition == InitialCondition::stationary &&
        !(eigenvalue(params, 1) > 0.0))
        throw std::domain_error(
            "synthesize_field: stationary initial condition requires lambda_1 > 0");

    // sigma at the left endpoint of every sub-step, shared by all modes
    const long total_steps = static_cast<long>(n) * refinement;
    const double tau = 1.0 / static_cast<double>(total_steps);
    std::vector<double> sigma_at;
    if (!vol.is_constant()) {
        sigma_at.resize(static_cast<std::size_t>(total_steps));
        for (long s = 0; s < total_steps; ++s) {
            sigma_at[static_cast<std::size_t>(s)] = vol.at(static_cast<double>(s) * tau);
            if (!(sigma_at[static_cast<std::size_t>(s)] > 0.0))
                throw std::invalid_argument(
                    "synthesize_field: sigma(t) must be positive on the simulation grid");
        }
    }
    const double sigma0 = vol.at(0.0);
    const double sigma_const = vol.is_constant() ? vol.constant_sigma() : 0.0;

    Eigen::MatrixXd basis(K, m); // e_k(y_j)
    for (int k = 1; k <= K; ++k)
        for (int j = 0; j < m; ++j) basis(k - 1, j) = eigenfunction(params, k, grid.y[j]);

    // Modes are processed in blocks; blocks are grouped into a fixed number of
    // chunks whose partial fields are reduced in chunk order. The summation
    // order therefore never depends on the thread count.
    constexpr int block = 64;
    const int nblocks = (K + block - 1) / block;
    const int nchunks = std::min(32, nblocks);
    std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(nchunks),
                                         Eigen::MatrixXd::Zero(n + 1, m));

    const int workers = std::max(1, std::min(threads, nchunks));
    std::atomic<int> next_chunk{0};
    auto run_chunk = [&](int c) {
        const int b_begin = static_cast<int>(static_cast<long>(c) * nblocks / nchunks);
        const int b_end = static_cast<int>(static_cast<long>(c + 1) * nblocks / nchunks);
        Eigen::MatrixXd paths(n + 1, block);
        for (int b = b_begin; b < b_end; ++b) {
            const int k0 = b * block;                    // zero-based first mode
            const int bw = std::min(block, K - k0);      // modes in this block
            for (int kk = 0; kk < bw; ++kk) {
                const int mode = k0 + kk + 1;
                const double lambda = eigenvalue(params, mode);
                NormalStream stream(config.seed, static_cast<std::uint64_t>(mode));
                double x0 = 0.0;
                if (config.initial_condition == InitialCondition::stationary)
                    x0 = stationary_coeff_std(params, sigma0, mode) * stream.next();
                detail::ou_path_into(lambda, sigma_at, sigma_const, vol.is_constant(), n,
                                     refinement, x0, stream, paths.col(kk).data());
            }
            partial[static_cast<std::size_t>(c)].noalias() +=
                paths.leftCols(bw) * basis.middleRows(k0, bw);
        }
    };

    if (workers == 1) {
        for (int c = 0; c < nchunks; ++c) run_chunk(c);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const int c = next_chunk.fetch_add(1);
                    if (c >= nchunks) return;
                    run_chunk(c);
                }
            });
    }

    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n + 1, m);
    for (int c = 0; c < nchunks; ++c) values += partial[static_cast<std::size_t>(c)];

    if (!values.allFinite())
        throw std::runtime_error("synthesize_field: non-finite values generated");

    return FieldSample{std::move(values), grid, FieldProvenance{params, vol, config}};
}

/// Time increments Delta_i X(y_j) = X_{t_i}(y_j) - X_{t_{i-1}}(y_j), an n x m
/// matrix with row i-1 holding increment i.
inline Eigen::MatrixXd increments(const FieldSample& field) {
    const auto rows = field.values.rows();
    if (rows < 2) throw std::invalid_argument("increments: field needs at least two rows");
    return field.values.bottomRows(rows - 1) - field.values.topRows(rows - 1);
}

} // namespace spdevol
