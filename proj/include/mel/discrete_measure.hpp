#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mel {

inline constexpr double kWeightTolerance = 1e-12;

/// Finite-support probability measure over point indices of a PointSet.
/// Support indices are kept sorted and unique; weights are nonnegative and
/// sum to one within kWeightTolerance.
class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<std::size_t> support, std::vector<double> weights) {
        if (support.empty() || support.size() != weights.size())
            throw std::invalid_argument(
                "DiscreteMeasure: support and weights must have equal, nonzero length");
        std::vector<std::size_t> order(support.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
        support_.reserve(support.size());
        weights_.reserve(weights.size());
        double sum = 0.0;
        for (std::size_t k : order) {
            if (!support_.empty() && support_.back() == support[k])
                throw std::invalid_argument("DiscreteMeasure: duplicate support index");
            if (!(weights[k] >= 0.0) || !std::isfinite(weights[k]))
                throw std::invalid_argument("DiscreteMeasure: weights must be nonnegative finite");
            support_.push_back(support[k]);
            weights_.push_back(weights[k]);
            sum += weights[k];
        }
        if (std::abs(sum - 1.0) > kWeightTolerance)
            throw std::invalid_argument("DiscreteMeasure: weights must sum to one");
    }

    static DiscreteMeasure uniform(std::vector<std::size_t> support) {
        const double w = 1.0 / static_cast<double>(support.size());
        std::vector<double> weights(support.size(), w);
        return DiscreteMeasure(std::move(support), std::move(weights));
    }

    const std::vector<std::size_t>& support() const { return support_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return support_.size(); }

    bool contains(std::size_t point) const {
        return std::binary_search(support_.begin(), support_.end(), point);
    }

    /// Weight of a point index; zero when the point is outside the support.
    double weight_at(std::size_t point) const {
        auto it = std::lower_bound(support_.begin(), support_.end(), point);
        if (it == support_.end() || *it != point) return 0.0;
        return weights_[static_cast<std::size_t>(it - support_.begin())];
    }

private:
    std::vector<std::size_t> support_;
    std::vector<double> weights_;
};

}  // namespace mel
