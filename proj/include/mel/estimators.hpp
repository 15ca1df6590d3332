#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mel/entropy.hpp"
#include "mel/metric.hpp"
#include "mel/models.hpp"

namespace mel {

/// Deterministic tuning of the truncated kernel regressor. The kernel is
/// hard-wired to the indicator 1_[0,1) (ball membership rho < h).
struct RegressionTuning {
    double h = 0.0;        // bandwidth
    double delta_n = 0.0;  // ridge level for the denominator truncation
    double eta = 0.0;
    double d = 0.0;
    double gamma = 0.0;
};

/// Bandwidth selector h = (d log n)^(-1/gamma). Needs no smoothness input.
inline double select_bandwidth(double n, double gamma, double d) {
    if (!(gamma > 0.0)) throw std::invalid_argument("select_bandwidth: gamma must be positive");
    if (!(d > 0.0)) throw std::invalid_argument("select_bandwidth: d must be positive");
    if (!(n > 1.0))
        throw std::invalid_argument("select_bandwidth: need n > 1 so that log n is positive");
    return std::pow(d * std::log(n), -1.0 / gamma);
}

/// Ridge selector delta_n = n^(-eta) with eta in (0, 1/2).
inline double select_ridge(double n, double eta) {
    if (!(eta > 0.0 && eta < 0.5))
        throw std::invalid_argument("select_ridge: eta must lie in (0, 1/2)");
    if (!(n >= 1.0)) throw std::invalid_argument("select_ridge: need n >= 1");
    return std::pow(n, -eta);
}

inline RegressionTuning select_tuning(double n, double gamma, double d, double eta) {
    return RegressionTuning{select_bandwidth(n, gamma, d), select_ridge(n, eta), eta, d, gamma};
}

/// Whether d respects the constraint d < eta c_high^{-1} 4^{-gamma} against a
/// fitted envelope. Violations are reported, not fatal: the true envelope
/// constant is unknowable from data.
inline bool tuning_within_envelope(const RegressionTuning& t, const EntropyEnvelope& env) {
    return t.d < t.eta / (env.c_high * std::pow(4.0, env.gamma));
}

struct NwFit {
    double a_hat = 0.0;     // (1/n) sum Y_j 1[rho < h]
    double b_hat = 0.0;     // (1/n) sum 1[rho < h]
    double estimate = 0.0;  // a_hat/b_hat when b_hat > delta_n, else 0
};

namespace detail {

inline NwFit nw_accumulate(double sum, std::size_t count, std::size_t n, double delta_n) {
    NwFit f;
    f.a_hat = sum / static_cast<double>(n);
    f.b_hat = static_cast<double>(count) / static_cast<double>(n);
    // sum/count equals a_hat/b_hat exactly and keeps the in-ball mean exact
    f.estimate = (f.b_hat > delta_n) ? sum / static_cast<double>(count) : 0.0;
    return f;
}

}  // namespace detail

/// Truncated Nadaraya-Watson fit at x: the mean of in-ball responses when the
/// empirical ball mass exceeds delta_n, zero otherwise.
inline NwFit nw_fit(const std::vector<std::pair<SampledFunction, double>>& train,
                    const SampledFunction& x, double h, double delta_n, const MetricSpec& metric) {
    if (train.empty()) throw std::invalid_argument("nw_fit: empty training sample");
    if (!(h > 0.0)) throw std::invalid_argument("nw_fit: h must be positive");
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [xj, yj] : train)
        if (distance(x, xj, metric) < h) {
            sum += yj;
            ++count;
        }
    return detail::nw_accumulate(sum, count, train.size(), delta_n);
}

inline double nw_estimate(const std::vector<std::pair<SampledFunction, double>>& train,
                          const SampledFunction& x, const RegressionTuning& tuning,
                          const MetricSpec& metric) {
    return nw_fit(train, x, tuning.h, tuning.delta_n, metric).estimate;
}

/// Index-based fit over a PointSet (uses the cached distance matrix).
inline NwFit nw_fit_at(const PointSet& ps, std::span<const RegressionDatum> train, std::size_t x,
                       double h, double delta_n) {
    if (train.empty()) throw std::invalid_argument("nw_fit_at: empty training sample");
    if (!(h > 0.0)) throw std::invalid_argument("nw_fit_at: h must be positive");
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& d : train)
        if (ps.dist(x, d.point) < h) {
            sum += d.y;
            ++count;
        }
    return detail::nw_accumulate(sum, count, train.size(), delta_n);
}

struct PluginFit {
    int label = 0;
    double p_hat_x = 0.0;
    double p_hat_y = 0.0;
};

namespace detail {

inline PluginFit plugin_decide(std::size_t in_x, std::size_t n_x, std::size_t in_y,
                               std::size_t n_y) {
    PluginFit f;
    f.p_hat_x = n_x == 0 ? 0.0 : static_cast<double>(in_x) / static_cast<double>(n_x);
    f.p_hat_y = n_y == 0 ? 0.0 : static_cast<double>(in_y) / static_cast<double>(n_y);
    f.label = (f.p_hat_x >= f.p_hat_y) ? 0 : 1;  // ties go to group 0
    return f;
}

}  // namespace detail

/// Plug-in kernel classifier: group 0 iff p_hat_X(z) >= p_hat_Y(z), where each
/// p_hat is the fraction of that group's points strictly within h of z. An
/// empty group contributes p_hat = 0 by convention.
inline PluginFit plugin_fit(const std::vector<std::pair<SampledFunction, int>>& train,
                            const SampledFunction& z, double h, const MetricSpec& metric) {
    if (train.empty()) throw std::invalid_argument("plugin_fit: empty training sample");
    if (!(h > 0.0)) throw std::invalid_argument("plugin_fit: h must be positive");
    std::size_t in_x = 0, n_x = 0, in_y = 0, n_y = 0;
    for (const auto& [zj, wj] : train) {
        if (wj != 0 && wj != 1) throw std::invalid_argument("plugin_fit: labels must be 0 or 1");
        const bool inside = distance(z, zj, metric) < h;
        if (wj == 0) {
            ++n_x;
            in_x += inside;
        } else {
            ++n_y;
            in_y += inside;
        }
    }
    return detail::plugin_decide(in_x, n_x, in_y, n_y);
}

inline int plugin_classify(const std::vector<std::pair<SampledFunction, int>>& train,
                           const SampledFunction& z, double h, const MetricSpec& metric) {
    return plugin_fit(train, z, h, metric).label;
}

inline PluginFit plugin_fit_at(const PointSet& ps, std::span<const ClassificationDatum> train,
                               std::size_t z, double h) {
    if (train.empty()) throw std::invalid_argument("plugin_fit_at: empty training sample");
    if (!(h > 0.0)) throw std::invalid_argument("plugin_fit_at: h must be positive");
    std::size_t in_x = 0, n_x = 0, in_y = 0, n_y = 0;
    for (const auto& d : train) {
        const bool inside = ps.dist(z, d.point) < h;
        if (d.label == 0) {
            ++n_x;
            in_x += inside;
        } else {
            ++n_y;
            in_y += inside;
        }
    }
    return detail::plugin_decide(in_x, n_x, in_y, n_y);
}

/// Oracle Bayes rule: group 0 iff p_X(z) >= 1/2.
inline int bayes_classify(double px_value) {
    if (!(px_value >= 0.0 && px_value <= 1.0))
        throw std::invalid_argument("bayes_classify: p_X value must lie in [0,1]");
    return px_value >= 0.5 ? 0 : 1;
}

}  // namespace mel
