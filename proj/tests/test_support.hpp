#pragma once

// Shared generators for randomized tests. Everything is driven by an explicit
// Rng, so every test is a fixed function of its seed.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "mel/mel.hpp"

namespace test_support {

using namespace mel;

inline PointSet constant_set(const std::vector<double>& values, MetricSpec m,
                             std::size_t grid_points = 2) {
    const auto grid = uniform_grid(grid_points);
    std::vector<SampledFunction> pts;
    pts.reserve(values.size());
    for (double v : values) pts.push_back(constant_function(v, grid));
    return PointSet(std::move(pts), m);
}

inline MetricSpec random_metric(Rng& rng) {
    switch (rng.below(4)) {
        case 0: return MetricSpec::supremum();
        case 1: return MetricSpec::lp(1.0);
        case 2: return MetricSpec::lp(2.0);
        default: return MetricSpec::lp(1.7);
    }
}

inline PointSet random_curve_set(std::size_t n, const MetricSpec& m, Rng& rng,
                                 std::size_t grid_points = 17, double lipschitz_amplitude = 1.0) {
    const auto grid = uniform_grid(grid_points);
    std::vector<SampledFunction> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back(rng.bernoulli(0.5) ? sample_lipschitz_curve(lipschitz_amplitude, grid, rng)
                                         : sample_monotone_curve(grid, rng));
    return PointSet(std::move(pts), m);
}

inline DiscreteMeasure random_measure(std::size_t n_points, Rng& rng) {
    std::vector<std::size_t> support(n_points);
    std::iota(support.begin(), support.end(), std::size_t{0});
    std::vector<double> w(n_points);
    double sum = 0.0;
    for (double& x : w) {
        x = rng.exponential();
        sum += x;
    }
    for (double& x : w) x /= sum;
    return DiscreteMeasure(std::move(support), std::move(w));
}

/// Rescale a raw functional so that the audited Hölder class membership holds
/// with margin: factor = 0.9 / worst constraint ratio over the support.
inline RegressionMap scaled_to_class(const std::function<double(const SampledFunction&)>& raw,
                                     const PointSet& ps, const std::vector<std::size_t>& support,
                                     const SmoothnessSpec& spec) {
    std::vector<double> v(support.size());
    double ratio = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
        v[k] = raw(ps.point(support[k]));
        ratio = std::max(ratio, std::abs(v[k]) / spec.C);
    }
    for (std::size_t a = 0; a < support.size(); ++a)
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            const double rhs = spec.C * std::pow(ps.dist(support[a], support[b]), spec.beta);
            if (rhs > 0.0)
                ratio = std::max(ratio, std::abs(v[a] - v[b]) / rhs);
            else if (std::abs(v[a] - v[b]) > 0.0)
                ratio = std::numeric_limits<double>::infinity();
        }
    const double factor = (ratio > 0.0 && std::isfinite(ratio)) ? 0.9 / ratio : 0.0;
    return [raw, factor](const SampledFunction& x) { return factor * raw(x); };
}

inline RegressionInstance random_regression_instance(PointSet ps, const SmoothnessSpec& spec,
                                                     const NoiseSpec& noise, Rng& rng) {
    auto design = random_measure(ps.size(), rng);
    const std::size_t anchor = rng.below(ps.size());
    const MetricSpec metric = ps.metric();
    const SampledFunction anchor_point = ps.point(anchor);
    const double beta = spec.beta;
    std::function<double(const SampledFunction&)> raw;
    if (rng.bernoulli(0.5)) {
        raw = [anchor_point, metric, beta](const SampledFunction& x) {
            return std::pow(distance(x, anchor_point, metric), beta);
        };
    } else {
        raw = [](const SampledFunction& x) {
            const auto& t = x.grid();
            const auto& v = x.values();
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < t.size(); ++i)
                acc += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1]);
            return acc / (t.back() - t.front());
        };
    }
    auto g = scaled_to_class(raw, ps, design.support(), spec);
    return RegressionInstance(std::move(ps), std::move(design), std::move(g), noise, spec);
}

/// Random classification instance with an exactly-Hölder density: the density
/// p_X = 1/2 + s (phi - mean phi) is built from the distance profile to a
/// random anchor, so both marginals normalise by construction.
inline ClassificationInstance random_classification_instance(PointSet ps,
                                                             const SmoothnessSpec& spec, Rng& rng,
                                                             double kappa_fraction = -1.0) {
    const std::size_t n = ps.size();
    auto mu = random_measure(n, rng);
    const std::size_t anchor = rng.below(n);
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = std::pow(ps.dist(i, anchor), spec.beta);
    double mean_phi = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_phi += mu.weights()[i] * phi[i];
    double maxdev = 0.0;
    for (std::size_t i = 0; i < n; ++i) maxdev = std::max(maxdev, std::abs(phi[i] - mean_phi));
    const double s_cap = maxdev > 0.0 ? std::min(spec.C, 0.49 / maxdev) : 0.0;
    const double s = 0.95 * s_cap * rng.uniform(0.5, 1.0);
    std::vector<double> px_w(n), py_w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = 0.5 + s * (phi[i] - mean_phi);
        px_w[i] = 2.0 * mu.weights()[i] * p;
        py_w[i] = 2.0 * mu.weights()[i] * (1.0 - p);
    }
    std::vector<std::size_t> support(mu.support());
    DiscreteMeasure px(support, std::move(px_w));
    DiscreteMeasure py(std::move(support), std::move(py_w));
    const double gap = tv(px, py);
    const double frac = kappa_fraction >= 0.0 ? kappa_fraction : rng.uniform01();
    const double kappa = gap * frac;
    const double w = rng.uniform(0.2, 0.8);
    return ClassificationInstance(std::move(ps), std::move(px), std::move(py), kappa, w, spec);
}

/// Random classification family with delta_n below 2^{-1/beta} M_0 and a
/// small point pool (8..13 points), so the packing stays at d_n <= 10 and
/// exhaustive bit-vector audits are affordable.
inline AssouadClassificationFamily random_classification_family(Rng& rng) {
    for (;;) {
        const auto metric = random_metric(rng);
        auto ps = random_curve_set(8 + rng.below(6), metric, rng);
        const SmoothnessSpec spec{rng.bernoulli(0.5) ? 1.0 : 0.5, rng.uniform(0.5, 3.0)};
        double m0 = 0.0;
        try {
            const auto probe = build_classification_family(ps, 1e-12, spec, 1e-7);
            m0 = probe.m0();
        } catch (const std::invalid_argument&) {
            continue;  // degenerate draw
        }
        const double kappa_cap = std::pow(m0, spec.beta) * spec.C / 8.0;
        const double kappa = kappa_cap * rng.uniform(0.05, 0.95);
        double delta_n = rng.uniform(0.3, 0.9) * std::pow(2.0, -1.0 / spec.beta) * m0;
        for (int attempt = 0; attempt < 60; ++attempt) {
            try {
                return build_classification_family(ps, kappa, spec, delta_n);
            } catch (const std::invalid_argument&) {
                delta_n *= 0.5;  // packing too small at this separation
            }
        }
    }
}

}  // namespace test_support
