#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mel/discrete_measure.hpp"
#include "mel/metric.hpp"

namespace mel {

/// Exhaustive set-cover / max-clique searches are combinatorial; above this
/// point-set size only greedy bounds are offered.
inline constexpr std::size_t kExactSearchThreshold = 14;

enum class CountMode { Exact, GreedyUpper, GreedyLower };

inline const char* to_string(CountMode m) {
    switch (m) {
        case CountMode::Exact: return "exact";
        case CountMode::GreedyUpper: return "greedy-upper";
        case CountMode::GreedyLower: return "greedy-lower";
    }
    return "?";
}

inline CountMode count_mode_from_string(const std::string& s) {
    if (s == "exact") return CountMode::Exact;
    if (s == "greedy-upper") return CountMode::GreedyUpper;
    if (s == "greedy-lower") return CountMode::GreedyLower;
    throw std::invalid_argument("unknown count mode: " + s);
}

/// Radii (strictly decreasing) versus ball counts, with the provenance of
/// each count.
struct EntropyProfile {
    std::vector<double> radii;
    std::vector<std::size_t> counts;
    std::vector<CountMode> modes;
};

/// Fitted two-sided envelope c_low s^{-gamma} <= log N(s) <= c_high s^{-gamma}
/// on a radius window (0, s0).
struct EntropyEnvelope {
    double gamma = 0.0;
    double c_low = 0.0;
    double c_high = 0.0;
    double s0 = 0.0;
    double fit_residual = 0.0;
};

namespace detail {

inline void require_exact_size(std::size_t n, std::size_t threshold, const char* op) {
    if (n > threshold || n > 24)  // 24 caps the 2^n search state
        throw std::invalid_argument(std::string(op) +
                                    ": point set exceeds the exact-search threshold (" +
                                    std::to_string(std::min<std::size_t>(threshold, 24)) +
                                    "); use greedy_net bounds instead");
}

/// Minimum number of candidate masks whose union covers all n points.
inline std::size_t min_set_cover(const std::vector<std::uint32_t>& masks, std::size_t n) {
    const std::uint32_t full = (n >= 32) ? ~0u : ((1u << n) - 1u);
    std::uint32_t reachable = 0;
    for (std::uint32_t m : masks) reachable |= m;
    if (reachable != full)
        throw std::invalid_argument(
            "covering_number_exact: some point is covered by no candidate ball; enlarge the "
            "center pool or the radius");
    std::vector<std::uint8_t> best(std::size_t{1} << n, 255);
    best[0] = 0;
    for (std::uint32_t state = 0; state < (1u << n); ++state) {
        if (best[state] == 255) continue;
        if (state == full) break;  // states are visited in increasing order of coverage cost
        const unsigned first = static_cast<unsigned>(std::countr_one(state));
        for (std::uint32_t m : masks) {
            if (!(m & (1u << first))) continue;
            const std::uint32_t next = state | m;
            if (best[next] > best[state] + 1) best[next] = static_cast<std::uint8_t>(best[state] + 1);
        }
    }
    return best[full];
}

}  // namespace detail

/// Minimal number of open delta-balls with centers in `centers` covering all
/// of ps, by exhaustive set-cover search. Centers must share ps's grid.
inline std::size_t covering_number_exact(const PointSet& ps, const PointSet& centers, double delta,
                                         std::size_t exact_threshold = kExactSearchThreshold) {
    if (!(delta > 0.0)) throw std::invalid_argument("covering_number_exact: delta must be positive");
    if (ps.size() == 0) throw std::invalid_argument("covering_number_exact: empty point set");
    detail::require_exact_size(ps.size(), exact_threshold, "covering_number_exact");
    std::vector<std::uint32_t> masks;
    masks.reserve(centers.size());
    for (std::size_t c = 0; c < centers.size(); ++c) {
        std::uint32_t m = 0;
        for (std::size_t i = 0; i < ps.size(); ++i)
            if (distance(centers.point(c), ps.point(i), ps.metric()) < delta) m |= (1u << i);
        if (m) masks.push_back(m);
    }
    return detail::min_set_cover(masks, ps.size());
}

/// Intrinsic covering number: centers restricted to the set itself.
inline std::size_t covering_number_exact(const PointSet& ps, double delta,
                                         std::size_t exact_threshold = kExactSearchThreshold) {
    if (!(delta > 0.0)) throw std::invalid_argument("covering_number_exact: delta must be positive");
    if (ps.size() == 0) throw std::invalid_argument("covering_number_exact: empty point set");
    detail::require_exact_size(ps.size(), exact_threshold, "covering_number_exact");
    std::vector<std::uint32_t> masks;
    masks.reserve(ps.size());
    for (std::size_t c = 0; c < ps.size(); ++c) {
        std::uint32_t m = 0;
        for (std::size_t i = 0; i < ps.size(); ++i)
            if (ps.dist(c, i) < delta) m |= (1u << i);
        masks.push_back(m);
    }
    return detail::min_set_cover(masks, ps.size());
}

/// Maximal cardinality of a subset with all pairwise distances strictly
/// greater than delta (exhaustive search on the >delta graph).
inline std::size_t packing_number_exact(const PointSet& ps, double delta,
                                        std::size_t exact_threshold = kExactSearchThreshold) {
    if (!(delta > 0.0)) throw std::invalid_argument("packing_number_exact: delta must be positive");
    if (ps.size() == 0) throw std::invalid_argument("packing_number_exact: empty point set");
    detail::require_exact_size(ps.size(), exact_threshold, "packing_number_exact");
    const std::size_t n = ps.size();
    std::vector<std::uint32_t> adj(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && ps.dist(i, j) > delta) adj[i] |= (1u << j);
    std::size_t best = 0;
    for (std::uint32_t s = 1; s < (1u << n); ++s) {
        const auto size = static_cast<std::size_t>(std::popcount(s));
        if (size <= best) continue;
        bool ok = true;
        for (std::uint32_t rest = s; rest != 0 && ok; rest &= rest - 1) {
            const unsigned i = static_cast<unsigned>(std::countr_zero(rest));
            const std::uint32_t others = s & ~(1u << i);
            if ((adj[i] & others) != others) ok = false;
        }
        if (ok) best = size;
    }
    return best;
}

namespace detail {

inline std::vector<std::size_t> greedy_separated(const PointSet& ps,
                                                 std::span<const std::size_t> candidates,
                                                 double delta, bool strict) {
    if (!(delta > 0.0)) throw std::invalid_argument("greedy_net: delta must be positive");
    if (candidates.empty()) throw std::invalid_argument("greedy_net: empty point set");
    std::vector<std::size_t> centers{candidates[0]};
    std::vector<double> min_dist(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k)
        min_dist[k] = ps.dist(candidates[0], candidates[k]);
    for (;;) {
        std::size_t far = 0;
        for (std::size_t k = 1; k < candidates.size(); ++k)
            if (min_dist[k] > min_dist[far]) far = k;  // ties keep the smallest index
        const double best = min_dist[far];
        if (strict ? !(best > delta) : !(best >= delta)) break;
        centers.push_back(candidates[far]);
        for (std::size_t k = 0; k < candidates.size(); ++k)
            min_dist[k] = std::min(min_dist[k], ps.dist(candidates[far], candidates[k]));
    }
    return centers;
}

}  // namespace detail

/// Farthest-point-first delta-net over a candidate index subset, starting
/// from the first candidate. Centers end up pairwise >= delta apart and every
/// candidate lies strictly within delta of some center, so the cardinality is
/// at once a covering witness at delta and a lower bound for covering at
/// delta/2.
inline std::vector<std::size_t> greedy_net(const PointSet& ps,
                                           std::span<const std::size_t> candidates, double delta) {
    return detail::greedy_separated(ps, candidates, delta, /*strict=*/false);
}

inline std::vector<std::size_t> greedy_net(const PointSet& ps, double delta) {
    std::vector<std::size_t> all(ps.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return detail::greedy_separated(ps, all, delta, /*strict=*/false);
}

/// Farthest-point-first packing: centers pairwise strictly > delta apart
/// (the separation the lower-bound grids require).
inline std::vector<std::size_t> greedy_packing(const PointSet& ps,
                                               std::span<const std::size_t> candidates,
                                               double delta) {
    return detail::greedy_separated(ps, candidates, delta, /*strict=*/true);
}

inline std::vector<std::size_t> greedy_packing(const PointSet& ps, double delta) {
    std::vector<std::size_t> all(ps.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return detail::greedy_separated(ps, all, delta, /*strict=*/true);
}

struct ProfileOptions {
    bool intrinsic = true;
    std::size_t exact_threshold = kExactSearchThreshold;
    /// When the set is too large for exact search: false -> counts are greedy
    /// net sizes at the radius (upper covering witnesses); true -> greedy net
    /// sizes at twice the radius (lower covering bounds).
    bool greedy_lower = false;
};

/// Ball counts at every radius. Exact set-cover counts when the set is small
/// enough, greedy bounds otherwise; the mode column records which.
inline EntropyProfile entropy_profile(const PointSet& ps, std::span<const double> radii,
                                      const ProfileOptions& opts = {}) {
    if (ps.size() == 0) throw std::invalid_argument("entropy_profile: empty point set");
    if (radii.empty()) throw std::invalid_argument("entropy_profile: no radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw std::invalid_argument("entropy_profile: radii must be positive");
        if (i + 1 < radii.size() && !(radii[i] > radii[i + 1]))
            throw std::invalid_argument("entropy_profile: radii must be strictly decreasing");
    }
    EntropyProfile profile;
    const bool exact = ps.size() <= opts.exact_threshold;
    for (double s : radii) {
        profile.radii.push_back(s);
        if (exact) {
            // on a finite sample the ambient pool is the sample itself, so the
            // two variants coincide; the flag picks which search runs
            profile.counts.push_back(opts.intrinsic
                                         ? covering_number_exact(ps, s, opts.exact_threshold)
                                         : covering_number_exact(ps, ps, s, opts.exact_threshold));
            profile.modes.push_back(CountMode::Exact);
        } else if (opts.greedy_lower) {
            profile.counts.push_back(greedy_net(ps, 2.0 * s).size());
            profile.modes.push_back(CountMode::GreedyLower);
        } else {
            profile.counts.push_back(greedy_net(ps, s).size());
            profile.modes.push_back(CountMode::GreedyUpper);
        }
    }
    return profile;
}

/// Fit the entropy exponent on a radius window: gamma is the least-squares
/// slope of log log(count) against log(1/s) over entries with count >= 2;
/// c_low/c_high bracket log(count) s^gamma over the window; s0 is the window's
/// upper end; fit_residual is the RMS residual of the regression.
inline EntropyEnvelope fit_gamma(const EntropyProfile& profile, double window_lo,
                                 double window_hi) {
    if (!(window_lo > 0.0) || !(window_hi > window_lo))
        throw std::invalid_argument("fit_gamma: invalid window");
    std::vector<double> s, loglog, logcount;
    for (std::size_t i = 0; i < profile.radii.size(); ++i) {
        const double r = profile.radii[i];
        if (r < window_lo || r > window_hi) continue;
        if (profile.counts[i] < 2) continue;
        const double lc = std::log(static_cast<double>(profile.counts[i]));
        s.push_back(r);
        logcount.push_back(lc);
        loglog.push_back(std::log(lc));
    }
    if (s.size() < 3)
        throw std::invalid_argument(
            "fit_gamma: need at least 3 profile entries with count >= 2 inside the window");
    const std::size_t k = s.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) {
        x[i] = std::log(1.0 / s[i]);
        mx += x[i];
        my += loglog[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (loglog[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_gamma: degenerate window (single radius)");
    EntropyEnvelope env;
    const double slope = sxy / sxx;
    env.gamma = std::max(slope, 0.0);
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double e = loglog[i] - (intercept + slope * x[i]);
        rss += e * e;
    }
    env.fit_residual = std::sqrt(rss / static_cast<double>(k));
    env.c_low = logcount[0] * std::pow(s[0], env.gamma);
    env.c_high = env.c_low;
    for (std::size_t i = 1; i < k; ++i) {
        const double c = logcount[i] * std::pow(s[i], env.gamma);
        env.c_low = std::min(env.c_low, c);
        env.c_high = std::max(env.c_high, c);
    }
    if (!(env.c_low < env.c_high)) env.c_high = env.c_low + std::max(1e-12, env.c_low * 1e-9);
    env.s0 = window_hi;
    return env;
}

/// Small-ball probability psi(x,h): P-mass of the open ball of radius h
/// around the support point x.
inline double small_ball(const PointSet& ps, const DiscreteMeasure& P, std::size_t x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("small_ball: h must be positive");
    if (!P.contains(x)) throw std::invalid_argument("small_ball: x is not in the support of P");
    double mass = 0.0;
    for (std::size_t k = 0; k < P.size(); ++k)
        if (ps.dist(x, P.support()[k]) < h) mass += P.weights()[k];
    return mass;
}

/// psi(x,h) for every support point of P at one radius. Each value covers at
/// least the point's own weight (a point always lies in its own open ball).
struct SmallBallProfile {
    DiscreteMeasure measure;
    double h = 0.0;
    std::vector<double> psi;  // aligned with measure.support()

    double at(std::size_t point) const {
        const auto& sup = measure.support();
        auto it = std::lower_bound(sup.begin(), sup.end(), point);
        if (it == sup.end() || *it != point)
            throw std::invalid_argument("SmallBallProfile: point is not in the support");
        return psi[static_cast<std::size_t>(it - sup.begin())];
    }
};

inline SmallBallProfile small_ball_profile(const PointSet& ps, const DiscreteMeasure& P,
                                           double h) {
    if (!(h > 0.0)) throw std::invalid_argument("small_ball_profile: h must be positive");
    SmallBallProfile out{P, h, {}};
    out.psi.reserve(P.size());
    for (std::size_t x : P.support()) out.psi.push_back(small_ball(ps, P, x, h));
    return out;
}

struct SmallBallTailCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Check P({x : psi(x,h) <= delta}) <= delta exp(c_high 4^gamma h^-gamma).
/// The envelope must certify the covering bound at the one radius used: a
/// greedy h/2-net over the support witnesses log N(h/2) <= c_high (h/2)^-gamma,
/// otherwise the envelope is rejected as uncertified.
inline SmallBallTailCheck check_small_ball_tail(const PointSet& ps, const DiscreteMeasure& P,
                                                double h, double delta,
                                                const EntropyEnvelope& env) {
    if (!(h > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("check_small_ball_tail: h and delta must be positive");
    const auto net = greedy_net(ps, std::span<const std::size_t>(P.support()), h / 2.0);
    const double witness = std::log(static_cast<double>(net.size()));
    if (!(witness <= env.c_high * std::pow(h / 2.0, -env.gamma)))
        throw std::invalid_argument(
            "check_small_ball_tail: envelope is not certified at radius h/2 for this support");
    SmallBallTailCheck out;
    const auto profile = small_ball_profile(ps, P, h);
    for (std::size_t k = 0; k < P.size(); ++k)
        if (profile.psi[k] <= delta) out.lhs += P.weights()[k];
    out.rhs = delta * std::exp(env.c_high * std::pow(4.0, env.gamma) * std::pow(h, -env.gamma));
    out.holds = out.lhs <= out.rhs;
    return out;
}

}  // namespace mel
