#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "mel/divergences.hpp"
#include "mel/entropy.hpp"
#include "mel/estimators.hpp"
#include "mel/models.hpp"
#include "mel/rng.hpp"

namespace mel {

/// Per-replication values of a Monte Carlo estimate. Values are stored by
/// replication index, so parallel runs reduce to the same numbers as
/// sequential ones.
struct McSummary {
    std::vector<double> values;

    double mean() const {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc / static_cast<double>(values.size());
    }

    /// Standard error of the mean (sample sd / sqrt(reps)).
    double se() const {
        const double m = mean();
        double acc = 0.0;
        for (double v : values) acc += (v - m) * (v - m);
        const auto n = static_cast<double>(values.size());
        return std::sqrt(acc / (n - 1.0) / n);
    }

    double median() const {
        std::vector<double> sorted(values);
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        if (n % 2 == 1) return sorted[n / 2];
        return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }
};

using TuningRule = std::function<RegressionTuning(std::size_t)>;
using BandwidthRule = std::function<double(std::size_t)>;

namespace detail {

/// Run reps independent replications, one derived seed each, optionally on a
/// thread pool. values[rep] is written in place, so the reduction order never
/// depends on the schedule.
inline McSummary run_replications(std::size_t reps, unsigned threads,
                                  const std::function<double(std::size_t, std::uint64_t)>& body,
                                  std::uint64_t seed) {
    if (reps < 2) throw std::invalid_argument("run_replications: need at least 2 replications");
    McSummary out;
    out.values.assign(reps, 0.0);
    if (threads <= 1) {
        for (std::size_t r = 0; r < reps; ++r) out.values[r] = body(r, child_seed(seed, r));
        return out;
    }
    std::vector<std::thread> pool;
    const unsigned used = std::min<unsigned>(threads, static_cast<unsigned>(reps));
    for (unsigned t = 0; t < used; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t r = t; r < reps; r += used)
                out.values[r] = body(r, child_seed(seed, r));
        });
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace detail

/// Monte Carlo integrated squared risk: per replication, draw a training
/// sample of size n and evaluate the exact design-weighted sum
/// sum_x P_X(x) |ghat(x) - g(x)|^2 over the finite design support. The only
/// randomness is the training draw.
inline McSummary integrated_sq_risk(const RegressionInstance& inst, const TuningRule& rule,
                                    std::size_t n, std::size_t reps, std::uint64_t seed,
                                    unsigned threads = 1) {
    const RegressionTuning tuning = rule(n);
    inst.points().distance_matrix();  // fill before sharing across threads
    auto body = [&](std::size_t, std::uint64_t child) {
        Rng rng(child);
        const auto sample = draw_regression_sample(inst, n, rng);
        double acc = 0.0;
        const auto& design = inst.design();
        for (std::size_t k = 0; k < design.size(); ++k) {
            const double w = design.weights()[k];
            if (w <= 0.0) continue;
            const std::size_t x = design.support()[k];
            const double fit = nw_fit_at(inst.points(), sample, x, tuning.h, tuning.delta_n).estimate;
            const double diff = fit - inst.g_value(x);
            acc += w * diff * diff;
        }
        return acc;
    };
    return detail::run_replications(reps, threads, body, seed);
}

/// As integrated_sq_risk but for an n-indexed instance sequence (lower-bound
/// designs rebuild with n).
inline McSummary integrated_sq_risk(const std::function<RegressionInstance(std::size_t)>& factory,
                                    const TuningRule& rule, std::size_t n, std::size_t reps,
                                    std::uint64_t seed, unsigned threads = 1) {
    const RegressionInstance inst = factory(n);
    return integrated_sq_risk(inst, rule, n, reps, seed, threads);
}

/// Monte Carlo pointwise risk E|ghat(x) - g(x)|^2 at one support point.
inline McSummary pointwise_risk(const RegressionInstance& inst, const TuningRule& rule,
                                std::size_t x_index, std::size_t n, std::size_t reps,
                                std::uint64_t seed, unsigned threads = 1) {
    const RegressionTuning tuning = rule(n);
    const double g_x = inst.g_value(x_index);  // also validates membership
    inst.points().distance_matrix();
    auto body = [&](std::size_t, std::uint64_t child) {
        Rng rng(child);
        const auto sample = draw_regression_sample(inst, n, rng);
        const double fit =
            nw_fit_at(inst.points(), sample, x_index, tuning.h, tuning.delta_n).estimate;
        return (fit - g_x) * (fit - g_x);
    };
    return detail::run_replications(reps, threads, body, seed);
}

struct RiskBoundTerms {
    double bias = 0.0;      // 2 C^2 h^{2 beta}
    double variance = 0.0;  // (2 c_v + C^2) / (n delta_n^2)
    double tail = 0.0;      // C^2 P[psi(X,h) <= 2 delta_n]
    double total = 0.0;
};

/// Closed-form upper bound on the integrated squared risk of the truncated
/// kernel regressor at a given tuning:
///   2 C^2 h^{2 beta} + (2 c_v + C^2) n^{-1} delta_n^{-2} + C^2 tail.
inline RiskBoundTerms regression_risk_bound(const RegressionTuning& tuning, double n,
                                            const SmoothnessSpec& spec, double c_v,
                                            double smallball_tail) {
    validate(spec);
    if (!(n >= 1.0)) throw std::invalid_argument("regression_risk_bound: need n >= 1");
    if (!(smallball_tail >= 0.0 && smallball_tail <= 1.0))
        throw std::invalid_argument("regression_risk_bound: tail must be a probability");
    RiskBoundTerms t;
    t.bias = 2.0 * spec.C * spec.C * std::pow(tuning.h, 2.0 * spec.beta);
    t.variance = (2.0 * c_v + spec.C * spec.C) / (n * tuning.delta_n * tuning.delta_n);
    t.tail = spec.C * spec.C * smallball_tail;
    t.total = t.bias + t.variance + t.tail;
    return t;
}

/// P[psi(X,h) <= threshold], computed exactly over the design support.
inline double small_ball_tail_probability(const PointSet& ps, const DiscreteMeasure& design,
                                          double h, double threshold) {
    double acc = 0.0;
    for (std::size_t k = 0; k < design.size(); ++k) {
        if (design.weights()[k] <= 0.0) continue;
        if (small_ball(ps, design, design.support()[k], h) <= threshold)
            acc += design.weights()[k];
    }
    return std::min(acc, 1.0);  // weight sums carry ~1e-16 of accumulation dust
}

/// Excess risk of a fixed decision rule, by exact enumeration of the discrete
/// supports: P_X[decide = 1] + P_Y[decide = 0] - 1 + TV(P_X, P_Y).
inline double exact_excess_risk(const ClassificationInstance& inst,
                                const std::function<int(std::size_t)>& decide) {
    double err = 0.0;
    for (std::size_t z : inst.joint_support()) {
        const int label = decide(z);
        if (label == 1)
            err += inst.px().weight_at(z);
        else
            err += inst.py().weight_at(z);
    }
    return err - 1.0 + inst.total_variation();
}

/// Excess risk of the oracle Bayes rule on the true densities; zero on every
/// discrete instance.
inline double bayes_excess_risk(const ClassificationInstance& inst) {
    return exact_excess_risk(inst,
                             [&](std::size_t z) { return bayes_classify(inst.density_px(z)); });
}

/// Monte Carlo excess risk of the plug-in classifier: per replication, draw a
/// training sample and enumerate both supports exactly under the trained rule.
inline McSummary excess_risk(const ClassificationInstance& inst, const BandwidthRule& h_rule,
                             std::size_t n, std::size_t reps, std::uint64_t seed,
                             unsigned threads = 1) {
    const double h = h_rule(n);
    inst.points().distance_matrix();
    auto body = [&](std::size_t, std::uint64_t child) {
        Rng rng(child);
        const auto sample = draw_classification_sample(inst, n, rng);
        return exact_excess_risk(inst, [&](std::size_t z) {
            return plugin_fit_at(inst.points(), sample, z, h).label;
        });
    };
    return detail::run_replications(reps, threads, body, seed);
}

/// Lower small-ball envelope P(B(y,delta)) >= c_scale delta exp(-c_rate delta^-gamma).
struct SmallBallLowerEnvelope {
    double c_scale = 0.0;  // c_{x,3}
    double c_rate = 0.0;   // c_{x,4}
    double gamma = 0.0;
};

struct SmallBallLowerReport {
    bool pass = false;
    double worst_margin = 0.0;  // min over (y, delta) of P(ball) - required
    std::size_t worst_point = 0;
    double worst_delta = 0.0;
    std::size_t checks = 0;
};

/// Check the lower small-ball envelope at every support point and every delta.
inline SmallBallLowerReport small_ball_lower_check(const PointSet& ps, const DiscreteMeasure& P,
                                                   const SmallBallLowerEnvelope& env,
                                                   std::span<const double> deltas) {
    if (!(env.c_scale > 0.0 && env.c_rate > 0.0 && env.gamma > 0.0))
        throw std::invalid_argument("small_ball_lower_check: envelope constants must be positive");
    SmallBallLowerReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (double delta : deltas) {
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("small_ball_lower_check: deltas must lie in (0,1)");
        const double required =
            env.c_scale * delta * std::exp(-env.c_rate * std::pow(delta, -env.gamma));
        for (std::size_t y : P.support()) {
            const double margin = small_ball(ps, P, y, delta) - required;
            ++report.checks;
            if (margin < report.worst_margin) {
                report.worst_margin = margin;
                report.worst_point = y;
                report.worst_delta = delta;
            }
        }
    }
    report.pass = report.worst_margin >= 0.0;
    return report;
}

enum class RiskKind { Regression, Classification };

struct RiskCell {
    std::size_t n = 0;
    McSummary mc;
    double h = 0.0;
    double delta_n = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double se = 0.0;
    double target = 0.0;  // -2 beta/gamma (regression) or -beta/gamma (classification)
    std::size_t used = 0;
    std::vector<std::size_t> excluded;  // indices of nonpositive-risk points
};

struct RiskReport {
    RiskKind kind = RiskKind::Regression;
    std::vector<RiskCell> cells;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::optional<RateFit> rate;  // attached only when at least 3 cells fit
};

/// Diagnostic slope of log(risk) against log(log n), reported next to the
/// theoretical target without asserting equality (log n spans too little at
/// desk scale for the slope to be an acceptance quantity).
inline RateFit rate_fit(std::span<const std::pair<double, double>> n_and_risk, double beta,
                        double gamma, RiskKind kind) {
    RateFit fit;
    fit.target = (kind == RiskKind::Regression ? -2.0 : -1.0) * beta / gamma;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n_and_risk.size(); ++i) {
        const auto& [n, risk] = n_and_risk[i];
        if (!(risk > 0.0) || !(n > 1.0)) {  // log log n needs log n > 0
            fit.excluded.push_back(i);
            continue;
        }
        x.push_back(std::log(std::log(n)));
        y.push_back(std::log(risk));
    }
    fit.used = x.size();
    if (fit.used < 3)
        throw std::invalid_argument(
            "rate_fit: need at least 3 usable (n, risk) points with positive risk");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("rate_fit: all n values coincide");
    fit.slope = sxy / sxx;
    const double intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (intercept + fit.slope * x[i]);
        rss += e * e;
    }
    const auto k = static_cast<double>(x.size());
    fit.se = k > 2 ? std::sqrt(rss / (k - 2.0) / sxx) : 0.0;
    return fit;
}

inline RateFit rate_fit(const RiskReport& report, double beta, double gamma) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(report.cells.size());
    for (const auto& cell : report.cells)
        pts.emplace_back(static_cast<double>(cell.n), cell.mc.mean());
    return rate_fit(pts, beta, gamma, report.kind);
}

/// Fill report.rate when enough cells are usable; otherwise leave it empty.
inline void attach_rate_fit(RiskReport& report, double beta, double gamma) {
    report.rate.reset();
    if (report.cells.size() < 3) return;
    try {
        report.rate = rate_fit(report, beta, gamma);
    } catch (const std::invalid_argument&) {
    }
}

}  // namespace mel
