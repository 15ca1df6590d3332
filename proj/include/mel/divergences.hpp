#pragma once

#include <cmath>
#include <limits>

#include "mel/discrete_measure.hpp"

namespace mel {

namespace detail {

/// Visit (p_i, q_i) over the union of two sorted supports.
template <class F>
void for_each_weight_pair(const DiscreteMeasure& P, const DiscreteMeasure& Q, F&& f) {
    const auto& sp = P.support();
    const auto& sq = Q.support();
    std::size_t i = 0, j = 0;
    while (i < sp.size() || j < sq.size()) {
        if (j == sq.size() || (i < sp.size() && sp[i] < sq[j])) {
            f(P.weights()[i], 0.0);
            ++i;
        } else if (i == sp.size() || sq[j] < sp[i]) {
            f(0.0, Q.weights()[j]);
            ++j;
        } else {
            f(P.weights()[i], Q.weights()[j]);
            ++i;
            ++j;
        }
    }
}

}  // namespace detail

/// Total variation distance (1/2) sum_i |p_i - q_i|, in [0,1].
inline double tv(const DiscreteMeasure& P, const DiscreteMeasure& Q) {
    double acc = 0.0;
    detail::for_each_weight_pair(P, Q, [&](double p, double q) { acc += std::abs(p - q); });
    return 0.5 * acc;
}

/// Squared Hellinger distance sum_i (sqrt(p_i) - sqrt(q_i))^2, in [0,2].
inline double hellinger_sq(const DiscreteMeasure& P, const DiscreteMeasure& Q) {
    double acc = 0.0;
    detail::for_each_weight_pair(P, Q, [&](double p, double q) {
        const double d = std::sqrt(p) - std::sqrt(q);
        acc += d * d;
    });
    return acc;
}

/// Kullback-Leibler divergence sum_{p_i > 0} p_i log(p_i / q_i), with the
/// 0 log(0/q) = 0 convention; +infinity off absolute continuity.
inline double kl(const DiscreteMeasure& P, const DiscreteMeasure& Q) {
    double acc = 0.0;
    bool infinite = false;
    detail::for_each_weight_pair(P, Q, [&](double p, double q) {
        if (p <= 0.0) return;
        if (q <= 0.0) {
            infinite = true;
            return;
        }
        acc += p * std::log(p / q);
    });
    if (infinite) return std::numeric_limits<double>::infinity();
    return acc;
}

}  // namespace mel
