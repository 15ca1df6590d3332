#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mel {

/// A functional datum: finite values sampled on a strictly increasing grid of
/// abscissae inside [0,1].
class SampledFunction {
public:
    SampledFunction(std::vector<double> grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (grid_.empty() || grid_.size() != values_.size())
            throw std::invalid_argument(
                "SampledFunction: grid and values must have equal, nonzero length");
        if (grid_.front() < 0.0 || grid_.back() > 1.0)
            throw std::invalid_argument("SampledFunction: grid must lie inside [0,1]");
        for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
            if (!(grid_[i] < grid_[i + 1]))
                throw std::invalid_argument("SampledFunction: grid must be strictly increasing");
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("SampledFunction: values must be finite");
    }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return grid_.size(); }

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

/// Uniform grid of m abscissae spanning [0,1].
inline std::vector<double> uniform_grid(std::size_t m) {
    if (m == 0) throw std::invalid_argument("uniform_grid: need at least one point");
    std::vector<double> g(m);
    if (m == 1) return g;  // {0}
    for (std::size_t i = 0; i < m; ++i) g[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    return g;
}

inline SampledFunction constant_function(double value, const std::vector<double>& grid) {
    return SampledFunction(grid, std::vector<double>(grid.size(), value));
}

/// Which metric to put on sampled curves: the supremum metric or the L_p
/// integral metric approximated by trapezoidal quadrature on the shared grid.
struct MetricSpec {
    enum class Kind { Supremum, LpIntegral };

    Kind kind = Kind::Supremum;
    double p = 1.0;  // exponent, only read when kind == LpIntegral

    static MetricSpec supremum() { return MetricSpec{Kind::Supremum, 1.0}; }

    static MetricSpec lp(double p) {
        if (!(p >= 1.0)) throw std::invalid_argument("MetricSpec: Lp exponent must satisfy p >= 1");
        return MetricSpec{Kind::LpIntegral, p};
    }
};

namespace detail {

inline void require_shared_grid(const SampledFunction& f, const SampledFunction& g) {
    if (f.grid() != g.grid())
        throw std::invalid_argument(
            "distance: functions are sampled on different grids; resample inputs explicitly");
}

}  // namespace detail

/// Distance between two functions on a shared grid. Supremum -> max |f-g|;
/// LpIntegral -> (trapezoidal quadrature of |f-g|^p)^(1/p). Symmetric, zero
/// iff the value vectors coincide.
inline double distance(const SampledFunction& f, const SampledFunction& g, const MetricSpec& m) {
    detail::require_shared_grid(f, g);
    const auto& t = f.grid();
    const auto& a = f.values();
    const auto& b = g.values();
    if (m.kind == MetricSpec::Kind::Supremum) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
        return d;
    }
    if (t.size() < 2)
        throw std::invalid_argument(
            "distance: the L_p metric needs at least two grid points (quadrature degenerates)");
    double acc = 0.0;
    if (m.p == 1.0) {
        for (std::size_t i = 0; i + 1 < t.size(); ++i)
            acc += 0.5 * (t[i + 1] - t[i]) * (std::abs(a[i] - b[i]) + std::abs(a[i + 1] - b[i + 1]));
        return acc;
    }
    if (m.p == 2.0) {
        for (std::size_t i = 0; i + 1 < t.size(); ++i) {
            const double lo = (a[i] - b[i]) * (a[i] - b[i]);
            const double hi = (a[i + 1] - b[i + 1]) * (a[i + 1] - b[i + 1]);
            acc += 0.5 * (t[i + 1] - t[i]) * (lo + hi);
        }
        return std::sqrt(acc);
    }
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double lo = std::pow(std::abs(a[i] - b[i]), m.p);
        const double hi = std::pow(std::abs(a[i + 1] - b[i + 1]), m.p);
        acc += 0.5 * (t[i + 1] - t[i]) * (lo + hi);
    }
    return std::pow(acc, 1.0 / m.p);
}

/// Finite ordered collection of functions on one shared grid together with the
/// metric, plus a lazily cached distance matrix. Fill the cache (first call of
/// dist() or distance_matrix()) before sharing a set across threads.
class PointSet {
public:
    PointSet(std::vector<SampledFunction> points, MetricSpec metric)
        : points_(std::move(points)), metric_(metric) {
        for (std::size_t i = 1; i < points_.size(); ++i)
            if (points_[i].grid() != points_[0].grid())
                throw std::invalid_argument("PointSet: all points must share one grid");
    }

    std::size_t size() const { return points_.size(); }
    const SampledFunction& point(std::size_t i) const { return points_.at(i); }
    const std::vector<SampledFunction>& points() const { return points_; }
    const MetricSpec& metric() const { return metric_; }

    /// Entry (i,j) of the symmetric distance matrix.
    double dist(std::size_t i, std::size_t j) const {
        if (!filled_) fill_cache();
        return cache_[i * points_.size() + j];
    }

    /// Full distance matrix, row-major, zero diagonal.
    const std::vector<double>& distance_matrix() const {
        if (!filled_) fill_cache();
        return cache_;
    }

    bool has_distance_matrix() const { return filled_; }

private:
    void fill_cache() const {
        const std::size_t n = points_.size();
        cache_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = distance(points_[i], points_[j], metric_);
                cache_[i * n + j] = d;
                cache_[j * n + i] = d;
            }
        filled_ = true;
    }

    std::vector<SampledFunction> points_;
    MetricSpec metric_;
    mutable std::vector<double> cache_;
    mutable bool filled_ = false;
};

}  // namespace mel
