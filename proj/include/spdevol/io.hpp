#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdevol/harness.hpp"

namespace spdevol {

/// Raised for filesystem-level failures; the CLI maps this to exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// shortest decimal that round-trips the double exactly
inline std::string full_precision(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string fixed6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

} // namespace detail

/// Field CSV: header `t,<y_1>,...,<y_m>` with the spatial coordinates printed
/// to six decimals, then one row per observation time in round-trip-safe
/// precision.
inline std::string field_to_csv(const FieldSample& field) {
    std::ostringstream out;
    out << "t";
    for (int j = 0; j < field.m(); ++j)
        out << ',' << detail::fixed6(field.grid.y[static_cast<std::size_t>(j)]);
    out << '\n';
    const int n = field.n();
    for (int i = 0; i <= n; ++i) {
        out << detail::full_precision(static_cast<double>(i) / n);
        for (int j = 0; j < field.m(); ++j)
            out << ',' << detail::full_precision(field.values(i, j));
        out << '\n';
    }
    return out.str();
}

inline void field_to_csv_file(const FieldSample& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << field_to_csv(field);
    if (!out) throw IoError("write failed: " + path);
}

inline FieldSample field_from_csv_stream(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(origin + ": empty CSV");
    std::vector<double> y;
    {
        std::istringstream header(line);
        std::string cell;
        if (!std::getline(header, cell, ',') || cell != "t")
            throw std::invalid_argument(origin + ": header must start with 't'");
        while (std::getline(header, cell, ',')) y.push_back(std::stod(cell));
    }
    if (y.empty()) throw std::invalid_argument(origin + ": no spatial columns");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != y.size() + 1)
            throw std::invalid_argument(origin + ": ragged row in CSV");
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw std::invalid_argument(origin + ": need at least two rows");

    const int n = static_cast<int>(rows.size()) - 1;
    SamplingGrid grid(n, y);
    Eigen::MatrixXd values(n + 1, static_cast<int>(y.size()));
    for (int i = 0; i <= n; ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            values(i, static_cast<int>(j)) = rows[static_cast<std::size_t>(i)][j + 1];
    return FieldSample{std::move(values), std::move(grid), std::nullopt};
}

inline FieldSample field_from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    return field_from_csv_stream(in, path);
}

// ---- JSON serialization ----------------------------------------------------

inline nlohmann::json params_to_json(const OperatorParams& p) {
    return {{"theta0", p.theta0}, {"theta1", p.theta1}, {"theta2", p.theta2}};
}

inline OperatorParams params_from_json(const nlohmann::json& j) {
    return OperatorParams(j.at("theta0").get<double>(), j.at("theta1").get<double>(),
                          j.at("theta2").get<double>());
}

inline nlohmann::json vol_to_json(const VolatilitySpec& v) {
    if (v.is_constant()) return {{"kind", "constant"}, {"sigma", v.constant_sigma()}};
    if (v.name() == "sine-intraday") return {{"kind", "sine-intraday"}};
    throw std::invalid_argument("vol_to_json: only named volatility specs serialize");
}

inline VolatilitySpec vol_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return VolatilitySpec::constant(j.at("sigma").get<double>());
    if (kind == "sine-intraday") return VolatilitySpec::sine_intraday();
    throw std::invalid_argument("vol_from_json: unknown kind '" + kind + "'");
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

inline std::vector<EstimatorKind> estimators_from_json(const nlohmann::json& arr) {
    std::vector<EstimatorKind> out;
    for (const auto& e : arr) {
        const std::string s = e.get<std::string>();
        if (s == "sigma2_multi") out.push_back(EstimatorKind::sigma2_multi);
        else if (s == "quarticity") out.push_back(EstimatorKind::quarticity);
        else if (s == "curvature_logratio") out.push_back(EstimatorKind::curvature_logratio);
        else if (s == "fit_least_squares") out.push_back(EstimatorKind::fit_least_squares);
        else throw std::invalid_argument("unknown estimator '" + s + "'");
    }
    return out;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("params")) cfg.params = params_from_json(j.at("params"));
    if (j.contains("vol")) cfg.vol = vol_from_json(j.at("vol"));
    if (j.contains("n")) cfg.n = j.at("n").get<int>();
    if (j.contains("m")) cfg.m = j.at("m").get<int>();
    if (j.contains("K")) cfg.K = j.at("K").get<int>();
    if (j.contains("refinement")) cfg.refinement = j.at("refinement").get<int>();
    if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("level")) cfg.ci_level = j.at("level").get<double>();
    if (j.contains("estimators")) cfg.estimators = estimators_from_json(j.at("estimators"));
    if (j.contains("initial_condition")) {
        const std::string ic = j.at("initial_condition").get<std::string>();
        if (ic == "zero") cfg.initial_condition = InitialCondition::zero;
        else if (ic == "stationary") cfg.initial_condition = InitialCondition::stationary;
        else throw std::invalid_argument("unknown initial_condition '" + ic + "'");
    }
    if (j.contains("spatial_layout")) {
        const auto& sl = j.at("spatial_layout");
        if (sl.is_string()) {
            if (sl.get<std::string>() != "equispaced")
                throw std::invalid_argument("spatial_layout string must be 'equispaced'");
        } else {
            cfg.explicit_y = sl.at("points").get<std::vector<double>>();
            cfg.m = static_cast<int>(cfg.explicit_y.size());
        }
    }
    return cfg;
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j{{"params", params_to_json(cfg.params)},
                     {"vol", vol_to_json(cfg.vol)},
                     {"n", cfg.n},
                     {"m", cfg.m},
                     {"K", cfg.K},
                     {"refinement", cfg.refinement},
                     {"replications", cfg.replications},
                     {"seed", cfg.seed},
                     {"level", cfg.ci_level},
                     {"initial_condition",
                      cfg.initial_condition == InitialCondition::zero ? "zero" : "stationary"}};
    nlohmann::json est = nlohmann::json::array();
    for (auto k : cfg.estimators) est.push_back(estimator_name(k));
    j["estimators"] = est;
    if (!cfg.explicit_y.empty()) j["spatial_layout"] = {{"points", cfg.explicit_y}};
    else j["spatial_layout"] = "equispaced";
    return j;
}

inline nlohmann::json matrix2_to_json(const Eigen::Matrix2d& m) {
    return nlohmann::json::array(
        {nlohmann::json::array({m(0, 0), m(0, 1)}), nlohmann::json::array({m(1, 0), m(1, 1)})});
}

inline nlohmann::json report_to_json(const ExperimentReport& report, bool include_records = true) {
    nlohmann::json j;
    j["config"] = experiment_config_to_json(report.config);
    j["truth"] = {{"sigma2", report.truth_sigma2}, {"quarticity", report.truth_quart}};
    nlohmann::json summary;
    for (const auto& [name, s] : report.summary) {
        summary[name] = {{"mean", s.mean},
                         {"mc_variance", s.mc_variance},
                         {"mn_scaled_variance", s.mn_scaled_variance},
                         {"theory_variance", s.theory_variance},
                         {"ratio", s.ratio}};
    }
    j["summary"] = summary;
    if (report.fit_mean) {
        j["fit"] = {{"mean", {(*report.fit_mean)[0], (*report.fit_mean)[1]}},
                    {"mn_scaled_cov", matrix2_to_json(*report.fit_mc_cov_scaled)},
                    {"theory_cov", matrix2_to_json(*report.fit_theory_cov)},
                    {"converged", report.fit_converged_count}};
    }
    if (report.coverage >= 0.0) j["coverage"] = report.coverage;
    if (!report.qq.standardized.empty()) {
        j["ks_stat"] = report.qq.ks_stat;
        j["qq"] = {{"standardized", report.qq.standardized},
                   {"normal_quantiles", report.qq.normal_quantiles}};
    }
    nlohmann::json prof = nlohmann::json::array();
    for (const auto& row : report.profile)
        prof.push_back({{"y", row.y}, {"mean_rv", row.mean_rv}, {"theory", row.theory}});
    j["profile"] = prof;
    if (include_records) {
        nlohmann::json recs = nlohmann::json::array();
        for (const auto& r : report.records) {
            nlohmann::json rec;
            if (std::isfinite(r.sigma2)) rec["sigma2"] = r.sigma2;
            if (std::isfinite(r.quarticity)) rec["quarticity"] = r.quarticity;
            if (std::isfinite(r.curvature)) rec["curvature"] = r.curvature;
            if (std::isfinite(r.iv0)) {
                rec["iv0"] = r.iv0;
                rec["kappa"] = r.kappa;
                rec["fit_converged"] = r.fit_converged;
            }
            recs.push_back(std::move(rec));
        }
        j["records"] = recs;
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

inline std::string qq_to_csv(const QQTable& qq) {
    std::ostringstream out;
    out << "normal_quantile,standardized_error\n";
    for (std::size_t i = 0; i < qq.standardized.size(); ++i)
        out << detail::full_precision(qq.normal_quantiles[i]) << ','
            << detail::full_precision(qq.standardized[i]) << '\n';
    return out.str();
}

inline std::string profile_to_csv(const std::vector<ProfileRow>& rows) {
    std::ostringstream out;
    out << "y,mean_rv,theory\n";
    for (const auto& r : rows)
        out << detail::fixed6(r.y) << ',' << detail::full_precision(r.mean_rv) << ','
            << detail::full_precision(r.theory) << '\n';
    return out.str();
}

inline std::string ratios_to_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "estimator,mean,mc_variance,mn_scaled_variance,theory_variance,ratio\n";
    for (const auto& [name, s] : report.summary)
        out << name << ',' << detail::full_precision(s.mean) << ','
            << detail::full_precision(s.mc_variance) << ','
            << detail::full_precision(s.mn_scaled_variance) << ','
            << detail::full_precision(s.theory_variance) << ','
            << detail::full_precision(s.ratio) << '\n';
    return out.str();
}

} // namespace spdevol
