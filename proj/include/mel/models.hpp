#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mel/discrete_measure.hpp"
#include "mel/divergences.hpp"
#include "mel/metric.hpp"
#include "mel/rng.hpp"

namespace mel {

/// Hölder class parameters: |g(y) - g(z)| <= C rho(y,z)^beta with sup bound C.
struct SmoothnessSpec {
    double beta = 1.0;  // in (0, 1]
    double C = 1.0;     // > 0
};

inline void validate(const SmoothnessSpec& s) {
    if (!(s.beta > 0.0 && s.beta <= 1.0))
        throw std::invalid_argument("SmoothnessSpec: beta must lie in (0,1]");
    if (!(s.C > 0.0)) throw std::invalid_argument("SmoothnessSpec: C must be positive");
}

/// Mean-zero regression noise with an explicit variance bound c_v.
class NoiseSpec {
public:
    enum class Family { Gaussian, Uniform };

    static NoiseSpec gaussian(double sd, double variance_bound = -1.0) {
        return NoiseSpec(Family::Gaussian, sd, sd * sd, variance_bound);
    }

    /// Uniform on [-halfwidth, halfwidth].
    static NoiseSpec uniform(double halfwidth, double variance_bound = -1.0) {
        return NoiseSpec(Family::Uniform, halfwidth, halfwidth * halfwidth / 3.0, variance_bound);
    }

    Family family() const { return family_; }
    double param() const { return param_; }  // sd or halfwidth
    double variance() const { return variance_; }
    double variance_bound() const { return c_v_; }

    double sample(Rng& rng) const {
        if (family_ == Family::Gaussian) return param_ * rng.gaussian();
        return rng.uniform(-param_, param_);
    }

private:
    NoiseSpec(Family f, double param, double variance, double c_v)
        : family_(f), param_(param), variance_(variance), c_v_(c_v < 0.0 ? variance : c_v) {
        if (!(param >= 0.0)) throw std::invalid_argument("NoiseSpec: scale must be nonnegative");
        if (!(variance_ <= c_v_))
            throw std::invalid_argument("NoiseSpec: variance exceeds the bound c_v");
    }

    Family family_;
    double param_;
    double variance_;
    double c_v_;
};

// --- curve generators ------------------------------------------------------

/// Piecewise-linear curve from an explicit start value and per-interval
/// slopes, clipped to [-M, M]. Clipping is 1-Lipschitz, so the result stays
/// M-Lipschitz whenever |slopes| <= M.
inline SampledFunction lipschitz_from_slopes(const std::vector<double>& grid, double start,
                                             std::span<const double> slopes, double M) {
    if (grid.size() < 1) throw std::invalid_argument("lipschitz_from_slopes: empty grid");
    if (slopes.size() + 1 != grid.size())
        throw std::invalid_argument("lipschitz_from_slopes: need one slope per interval");
    if (!(M >= 0.0)) throw std::invalid_argument("lipschitz_from_slopes: M must be nonnegative");
    std::vector<double> v(grid.size());
    v[0] = std::clamp(start, -M, M);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        v[i + 1] = std::clamp(v[i] + slopes[i] * (grid[i + 1] - grid[i]), -M, M);
    return SampledFunction(grid, std::move(v));
}

/// Random M-Lipschitz curve: start uniform in [-M/2, M/2], i.i.d. slopes
/// uniform in [-M, M].
inline SampledFunction sample_lipschitz_curve(double M, const std::vector<double>& grid,
                                              Rng& rng) {
    const double start = rng.uniform(-M / 2.0, M / 2.0);
    std::vector<double> slopes(grid.empty() ? 0 : grid.size() - 1);
    for (double& s : slopes) s = rng.uniform(-M, M);
    return lipschitz_from_slopes(grid, start, slopes, M);
}

/// Nondecreasing curve from nonnegative per-interval increments, normalised
/// to run from 0 to at most 1. Increments proportional to the grid spacing
/// give the linear ramp.
inline SampledFunction monotone_from_increments(const std::vector<double>& grid,
                                                std::span<const double> increments) {
    if (grid.size() < 1) throw std::invalid_argument("monotone_from_increments: empty grid");
    if (increments.size() + 1 != grid.size())
        throw std::invalid_argument("monotone_from_increments: need one increment per interval");
    std::vector<double> v(grid.size(), 0.0);
    for (std::size_t i = 0; i < increments.size(); ++i) {
        if (!(increments[i] >= 0.0))
            throw std::invalid_argument("monotone_from_increments: increments must be nonnegative");
        v[i + 1] = v[i] + increments[i];
    }
    const double total = v.back();
    if (total > 0.0)
        for (double& x : v) x /= total;
    return SampledFunction(grid, std::move(v));
}

/// Random monotone curve: cumulative sum of Exp(1) increments weighted by the
/// grid spacing, rescaled to [0,1].
inline SampledFunction sample_monotone_curve(const std::vector<double>& grid, Rng& rng) {
    std::vector<double> inc(grid.empty() ? 0 : grid.size() - 1);
    for (std::size_t i = 0; i < inc.size(); ++i)
        inc[i] = rng.exponential() * (grid[i + 1] - grid[i]);
    return monotone_from_increments(grid, inc);
}

// --- instances --------------------------------------------------------------

using RegressionMap = std::function<double(const SampledFunction&)>;

/// Regression data-generating process on a finite design: X ~ design,
/// Y = g(X) + eps. Construction audits |g| <= C on the support and the Hölder
/// pair bound |g(y)-g(z)| <= C rho(y,z)^beta over all support pairs, exactly
/// as stated; membership in the class is checked, never trusted.
class RegressionInstance {
public:
    RegressionInstance(PointSet points, DiscreteMeasure design, RegressionMap g, NoiseSpec noise,
                       SmoothnessSpec smoothness)
        : points_(std::move(points)),
          design_(std::move(design)),
          g_(std::move(g)),
          noise_(std::move(noise)),
          smoothness_(smoothness) {
        validate(smoothness_);
        if (!g_) throw std::invalid_argument("RegressionInstance: missing regression map");
        const auto& sup = design_.support();
        if (!sup.empty() && sup.back() >= points_.size())
            throw std::invalid_argument("RegressionInstance: design support index out of range");
        g_values_.resize(sup.size());
        for (std::size_t k = 0; k < sup.size(); ++k) {
            g_values_[k] = g_(points_.point(sup[k]));
            if (!std::isfinite(g_values_[k]))
                throw std::invalid_argument("RegressionInstance: g is not finite on the support");
            if (!(std::abs(g_values_[k]) <= smoothness_.C))
                throw std::invalid_argument(
                    "RegressionInstance: |g| exceeds the sup bound C on the support");
        }
        for (std::size_t a = 0; a < sup.size(); ++a)
            for (std::size_t b = a + 1; b < sup.size(); ++b) {
                const double lhs = std::abs(g_values_[a] - g_values_[b]);
                const double rhs =
                    smoothness_.C * std::pow(points_.dist(sup[a], sup[b]), smoothness_.beta);
                if (!(lhs <= rhs))
                    throw std::invalid_argument(
                        "RegressionInstance: Hölder pair-check failed on support pair (" +
                        std::to_string(sup[a]) + "," + std::to_string(sup[b]) + ")");
            }
    }

    const PointSet& points() const { return points_; }
    const DiscreteMeasure& design() const { return design_; }
    const NoiseSpec& noise() const { return noise_; }
    const SmoothnessSpec& smoothness() const { return smoothness_; }
    const RegressionMap& map() const { return g_; }

    /// g at a design support point.
    double g_value(std::size_t point_index) const {
        const auto& sup = design_.support();
        auto it = std::lower_bound(sup.begin(), sup.end(), point_index);
        if (it == sup.end() || *it != point_index)
            throw std::invalid_argument("RegressionInstance: point is not in the design support");
        return g_values_[static_cast<std::size_t>(it - sup.begin())];
    }

private:
    PointSet points_;
    DiscreteMeasure design_;
    RegressionMap g_;
    NoiseSpec noise_;
    SmoothnessSpec smoothness_;
    std::vector<double> g_values_;
};

/// Supervised-classification data-generating process: labels Bernoulli(w),
/// features from pX (label 0) or pY (label 1). Construction audits
/// TV(pX, pY) >= kappa and the Hölder bound on the Radon-Nikodym density
/// p_X = dP_X/d(P_X + P_Y) over all joint-support pairs.
class ClassificationInstance {
public:
    ClassificationInstance(PointSet points, DiscreteMeasure px, DiscreteMeasure py, double kappa,
                           double w, SmoothnessSpec smoothness)
        : points_(std::move(points)),
          px_(std::move(px)),
          py_(std::move(py)),
          kappa_(kappa),
          w_(w),
          smoothness_(smoothness) {
        validate(smoothness_);
        if (!(kappa_ >= 0.0)) throw std::invalid_argument("ClassificationInstance: kappa < 0");
        if (!(w_ > 0.0 && w_ < 1.0))
            throw std::invalid_argument("ClassificationInstance: w must lie in (0,1)");
        if ((!px_.support().empty() && px_.support().back() >= points_.size()) ||
            (!py_.support().empty() && py_.support().back() >= points_.size()))
            throw std::invalid_argument("ClassificationInstance: support index out of range");
        tv_ = tv(px_, py_);
        if (!(tv_ >= kappa_))
            throw std::invalid_argument(
                "ClassificationInstance: TV(pX,pY) is below the declared kappa");
        joint_support_.reserve(px_.size() + py_.size());
        std::size_t i = 0, j = 0;
        const auto& sx = px_.support();
        const auto& sy = py_.support();
        while (i < sx.size() || j < sy.size()) {
            std::size_t z;
            if (j == sy.size() || (i < sx.size() && sx[i] < sy[j]))
                z = sx[i++];
            else if (i == sx.size() || sy[j] < sx[i])
                z = sy[j++];
            else {
                z = sx[i++];
                ++j;
            }
            joint_support_.push_back(z);
        }
        density_values_.reserve(joint_support_.size());
        for (std::size_t z : joint_support_) {
            const double a = px_.weight_at(z);
            const double b = py_.weight_at(z);
            if (a + b <= 0.0) {
                density_values_.push_back(0.5);  // unreachable: union support has positive Q-mass
                continue;
            }
            density_values_.push_back(a / (a + b));
        }
        for (std::size_t a = 0; a < joint_support_.size(); ++a)
            for (std::size_t b = a + 1; b < joint_support_.size(); ++b) {
                const double lhs = std::abs(density_values_[a] - density_values_[b]);
                const double rhs =
                    smoothness_.C *
                    std::pow(points_.dist(joint_support_[a], joint_support_[b]), smoothness_.beta);
                if (!(lhs <= rhs))
                    throw std::invalid_argument(
                        "ClassificationInstance: density Hölder pair-check failed on pair (" +
                        std::to_string(joint_support_[a]) + "," +
                        std::to_string(joint_support_[b]) + ")");
            }
    }

    const PointSet& points() const { return points_; }
    const DiscreteMeasure& px() const { return px_; }
    const DiscreteMeasure& py() const { return py_; }
    double kappa() const { return kappa_; }
    double label_probability() const { return w_; }
    const SmoothnessSpec& smoothness() const { return smoothness_; }
    const std::vector<std::size_t>& joint_support() const { return joint_support_; }
    double total_variation() const { return tv_; }

    /// Radon-Nikodym density p_X(z) = pX(z) / (pX(z) + pY(z)), in [0,1].
    double density_px(std::size_t point_index) const {
        const double a = px_.weight_at(point_index);
        const double b = py_.weight_at(point_index);
        if (a + b <= 0.0)
            throw std::invalid_argument("ClassificationInstance: point has zero Q-mass");
        return a / (a + b);
    }

private:
    PointSet points_;
    DiscreteMeasure px_;
    DiscreteMeasure py_;
    double kappa_;
    double w_;
    SmoothnessSpec smoothness_;
    double tv_ = 0.0;
    std::vector<std::size_t> joint_support_;
    std::vector<double> density_values_;
};

// --- sampling ----------------------------------------------------------------

/// Categorical draw from a discrete measure.
inline std::size_t sample_index(const DiscreteMeasure& m, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    std::size_t last_positive = m.support().front();
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double w = m.weights()[k];
        if (w <= 0.0) continue;
        last_positive = m.support()[k];
        acc += w;
        if (u < acc) return last_positive;
    }
    return last_positive;  // normalisation slack
}

struct RegressionDatum {
    std::size_t point;  // index into the instance's PointSet
    double y;
};

inline std::vector<RegressionDatum> draw_regression_sample(const RegressionInstance& inst,
                                                           std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("draw_regression_sample: n must be positive");
    std::vector<RegressionDatum> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t x = sample_index(inst.design(), rng);
        out.push_back({x, inst.g_value(x) + inst.noise().sample(rng)});
    }
    return out;
}

struct ClassificationDatum {
    std::size_t point;
    int label;  // 0 -> drawn from pX, 1 -> drawn from pY
};

inline std::vector<ClassificationDatum> draw_classification_sample(
    const ClassificationInstance& inst, std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("draw_classification_sample: n must be positive");
    std::vector<ClassificationDatum> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const int label = rng.bernoulli(inst.label_probability()) ? 1 : 0;
        const std::size_t z = sample_index(label == 1 ? inst.py() : inst.px(), rng);
        out.push_back({z, label});
    }
    return out;
}

}  // namespace mel
