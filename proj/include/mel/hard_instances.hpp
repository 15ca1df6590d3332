#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mel/discrete_measure.hpp"
#include "mel/divergences.hpp"
#include "mel/entropy.hpp"
#include "mel/metric.hpp"
#include "mel/models.hpp"

namespace mel {

/// Smooth compactly supported bump: exp(1/(t^2-1)) on (-1,1), zero outside.
/// Peak value is e^{-1} at t = 0; continuous at +-1.
inline double bump(double t) {
    const double den = t * t - 1.0;
    if (den >= 0.0) return 0.0;
    return std::exp(1.0 / den);
}

inline const double kBumpPeak = std::exp(-1.0);

/// Sup-norm of the bump derivative, estimated once by dense evaluation.
inline double bump_derivative_sup() {
    static const double value = [] {
        double m = 0.0;
        const int n = 400000;
        for (int i = 1; i < n; ++i) {
            const double t = -1.0 + 2.0 * static_cast<double>(i) / n;
            const double den = t * t - 1.0;
            const double deriv = std::abs(-2.0 * t / (den * den) * std::exp(1.0 / den));
            m = std::max(m, deriv);
        }
        return m;
    }();
    return value;
}

/// Hypercube-indexed family of bump regression maps on a separated packing
/// grid: g_bits(x) = sum_j bits_j d h^beta bump(rho(z_j, x)/h) with h equal to
/// a quarter of the packing separation, so the bumps have pairwise disjoint
/// supports. The design measure is uniform on the centers.
class AssouadRegressionFamily {
public:
    const PointSet& points() const { return points_; }
    const std::vector<std::size_t>& centers() const { return centers_; }
    double separation() const { return delta_n_; }  // pairwise center distances exceed this
    double bandwidth() const { return h_n_; }       // separation / 4
    double amplitude() const { return d_; }
    const SmoothnessSpec& smoothness() const { return smoothness_; }
    const DiscreteMeasure& design() const { return design_; }

    double evaluate(std::span<const std::uint8_t> bits, const SampledFunction& x) const {
        require_bits(bits);
        double acc = 0.0;
        for (std::size_t j = 0; j < centers_.size(); ++j)
            if (bits[j])
                acc += scale_ * bump(distance(points_.point(centers_[j]), x, points_.metric()) / h_n_);
        return acc;
    }

    double evaluate_at(std::span<const std::uint8_t> bits, std::size_t point_index) const {
        require_bits(bits);
        double acc = 0.0;
        for (std::size_t j = 0; j < centers_.size(); ++j)
            if (bits[j]) acc += scale_ * bump(points_.dist(centers_[j], point_index) / h_n_);
        return acc;
    }

    /// Regression map for a fixed bit vector, pluggable into instances.
    RegressionMap map(std::vector<std::uint8_t> bits) const {
        require_bits(bits);
        return [fam = *this, bits = std::move(bits)](const SampledFunction& x) {
            return fam.evaluate(bits, x);
        };
    }

    friend AssouadRegressionFamily build_regression_family(const PointSet&, double, double,
                                                           const SmoothnessSpec&);
    friend double max_regression_amplitude(const PointSet&, double, const SmoothnessSpec&);

private:
    AssouadRegressionFamily(PointSet points, std::vector<std::size_t> centers, double delta_n,
                            double d, SmoothnessSpec smoothness)
        : points_(std::move(points)),
          centers_(std::move(centers)),
          delta_n_(delta_n),
          h_n_(delta_n / 4.0),
          d_(d),
          smoothness_(smoothness),
          scale_(d * std::pow(h_n_, smoothness.beta)),
          design_(DiscreteMeasure::uniform(centers_)) {}

    void require_bits(std::span<const std::uint8_t> bits) const {
        if (bits.size() != centers_.size())
            throw std::invalid_argument("AssouadRegressionFamily: bit vector length must equal "
                                        "the number of centers");
    }

    PointSet points_;
    std::vector<std::size_t> centers_;
    double delta_n_;
    double h_n_;
    double d_;
    SmoothnessSpec smoothness_;
    double scale_;
    DiscreteMeasure design_;
};

namespace detail {

/// Worst constraint ratio of the all-ones unit-amplitude map against the
/// class (sup bound and Hölder pairs); the map is linear in the amplitude.
inline double unit_amplitude_ratio(const AssouadRegressionFamily& fam) {
    const auto& ps = fam.points();
    const auto& spec = fam.smoothness();
    std::vector<std::uint8_t> ones(fam.centers().size(), 1);
    std::vector<double> values(ps.size());
    double ratio = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        values[i] = fam.evaluate_at(ones, i) / fam.amplitude();
        ratio = std::max(ratio, std::abs(values[i]) / spec.C);
    }
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            const double rhs = spec.C * std::pow(ps.dist(i, j), spec.beta);
            const double lhs = std::abs(values[i] - values[j]);
            if (rhs > 0.0)
                ratio = std::max(ratio, lhs / rhs);
            else if (lhs > 0.0)
                ratio = std::numeric_limits<double>::infinity();
        }
    return ratio;
}

}  // namespace detail

/// Largest amplitude d for which the all-ones map stays inside the Hölder
/// class on this point set at this separation.
inline double max_regression_amplitude(const PointSet& ps, double delta_n,
                                       const SmoothnessSpec& spec);

/// Build the bump family on a greedy strictly-delta_n-separated packing of ps.
/// Verifies, for the all-ones bit vector, |g| <= C on all points and the
/// Hölder pair bound over all point pairs; fails loudly with the maximal
/// admissible amplitude otherwise (g scales linearly in d).
inline AssouadRegressionFamily build_regression_family(const PointSet& ps, double delta_n,
                                                       double d, const SmoothnessSpec& spec) {
    validate(spec);
    if (!(delta_n > 0.0))
        throw std::invalid_argument("build_regression_family: delta_n must be positive");
    if (!(d > 0.0)) throw std::invalid_argument("build_regression_family: d must be positive");
    if (ps.size() == 0) throw std::invalid_argument("build_regression_family: empty point set");
    auto centers = greedy_packing(ps, delta_n);
    AssouadRegressionFamily fam(ps, std::move(centers), delta_n, d, spec);
    const double ratio = d * detail::unit_amplitude_ratio(fam);
    if (ratio > 1.0)
        throw std::invalid_argument(
            "build_regression_family: amplitude too large for the Hölder class; maximal "
            "admissible d = " +
            std::to_string(d / ratio));
    return fam;
}

inline double max_regression_amplitude(const PointSet& ps, double delta_n,
                                       const SmoothnessSpec& spec) {
    validate(spec);
    if (!(delta_n > 0.0))
        throw std::invalid_argument("max_regression_amplitude: delta_n must be positive");
    if (ps.size() == 0) throw std::invalid_argument("max_regression_amplitude: empty point set");
    auto centers = greedy_packing(ps, delta_n);
    AssouadRegressionFamily fam(ps, std::move(centers), delta_n, 1.0, spec);
    const double ratio = detail::unit_amplitude_ratio(fam);
    if (!(ratio > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / ratio;
}

/// Hypercube-indexed family of discrete densities for the classification
/// lower bound: two far anchors carrying the total-variation gap kappa and an
/// even-sized separated packing carrying the smoothness-limited perturbation.
class AssouadClassificationFamily {
public:
    const PointSet& points() const { return points_; }
    std::size_t anchor_low() const { return anchor_low_; }    // carries the -theta_0 sign
    std::size_t anchor_high() const { return anchor_high_; }  // carries the +theta_0 sign
    const std::vector<std::size_t>& packing() const { return packing_; }
    std::size_t pair_count() const { return packing_.size() / 2; }
    std::size_t bit_count() const { return pair_count() + 1; }
    double anchor_separation() const { return big_m_; }  // M
    double m0() const { return m0_; }                    // min(C^{-1/beta}, M)
    double kappa() const { return kappa_; }
    double separation() const { return delta_n_; }
    const SmoothnessSpec& smoothness() const { return smoothness_; }
    const DiscreteMeasure& base() const { return base_; }  // the reference measure R

    /// Support points in layout order: [anchor_high, anchor_low, packing...].
    const std::vector<std::size_t>& support() const { return support_; }

    /// Density value f_bits(y) at a support point; 1 plus the anchor term
    /// (+C M_0^beta/2 at anchor_high, -... at anchor_low, when bits[0]) plus
    /// the pair terms (+C delta_n^beta/2 at z_{2j-1}, -... at z_{2j}, when
    /// bits[j]).
    double density(std::span<const std::uint8_t> bits, std::size_t point_index) const {
        require_bits(bits);
        double f = 1.0;
        if (point_index == anchor_high_) {
            if (bits[0]) f += anchor_term_;
        } else if (point_index == anchor_low_) {
            if (bits[0]) f -= anchor_term_;
        } else {
            bool found = false;
            for (std::size_t k = 0; k < packing_.size(); ++k)
                if (packing_[k] == point_index) {
                    const std::size_t pair = k / 2;
                    if (bits[pair + 1]) f += (k % 2 == 0) ? pair_term_ : -pair_term_;
                    found = true;
                    break;
                }
            if (!found)
                throw std::invalid_argument(
                    "AssouadClassificationFamily: point is not in the support");
        }
        return f;
    }

    /// The probability measure P_bits with weights f_bits * R.
    DiscreteMeasure measure(std::span<const std::uint8_t> bits) const {
        require_bits(bits);
        std::vector<double> weights(support_.size());
        for (std::size_t k = 0; k < support_.size(); ++k)
            weights[k] = density(bits, support_[k]) * base_.weight_at(support_[k]);
        return DiscreteMeasure(support_, std::move(weights));
    }

    friend AssouadClassificationFamily build_classification_family(const PointSet&, double,
                                                                   const SmoothnessSpec&, double);

private:
    AssouadClassificationFamily(PointSet points, std::size_t anchor_high, std::size_t anchor_low,
                                std::vector<std::size_t> packing, double kappa, double delta_n,
                                double big_m, SmoothnessSpec smoothness, DiscreteMeasure base)
        : points_(std::move(points)),
          anchor_low_(anchor_low),
          anchor_high_(anchor_high),
          packing_(std::move(packing)),
          kappa_(kappa),
          delta_n_(delta_n),
          big_m_(big_m),
          smoothness_(smoothness),
          base_(std::move(base)) {
        m0_ = std::min(std::pow(smoothness_.C, -1.0 / smoothness_.beta), big_m_);
        // C M_0^beta = min(1, C M^beta); the min form is exact at the attained
        // boundary, where the pow round-trip can overshoot 1 by one ulp
        anchor_term_ = 0.5 * std::min(1.0, smoothness_.C * std::pow(big_m_, smoothness_.beta));
        pair_term_ = 0.5 * smoothness_.C * std::pow(delta_n_, smoothness_.beta);
        support_.push_back(anchor_high_);
        support_.push_back(anchor_low_);
        support_.insert(support_.end(), packing_.begin(), packing_.end());
    }

    void require_bits(std::span<const std::uint8_t> bits) const {
        if (bits.size() != bit_count())
            throw std::invalid_argument(
                "AssouadClassificationFamily: bit vector length must be pair_count() + 1");
    }

    PointSet points_;
    std::size_t anchor_low_;
    std::size_t anchor_high_;
    std::vector<std::size_t> packing_;
    double kappa_;
    double delta_n_;
    double big_m_;
    double m0_ = 0.0;
    double anchor_term_ = 0.0;
    double pair_term_ = 0.0;
    SmoothnessSpec smoothness_;
    DiscreteMeasure base_;
    std::vector<std::size_t> support_;
};

namespace detail {

/// Three indices maximising the minimum pairwise distance: exhaustive for
/// small sets, farthest-point greedy otherwise.
inline std::array<std::size_t, 3> pick_anchors(const PointSet& ps) {
    const std::size_t n = ps.size();
    if (n <= 40) {
        std::array<std::size_t, 3> best{0, 1, 2};
        double best_sep = -1.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                for (std::size_t c = b + 1; c < n; ++c) {
                    const double sep =
                        std::min({ps.dist(a, b), ps.dist(a, c), ps.dist(b, c)});
                    if (sep > best_sep) {
                        best_sep = sep;
                        best = {a, b, c};
                    }
                }
        return best;
    }
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    // huge radius: the greedy loop stops by exhaustion after collecting seeds
    std::array<std::size_t, 3> out{0, 0, 0};
    std::vector<double> min_dist(n);
    out[0] = 0;
    for (std::size_t i = 0; i < n; ++i) min_dist[i] = ps.dist(0, i);
    for (int k = 1; k < 3; ++k) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (min_dist[i] > min_dist[far]) far = i;
        out[static_cast<std::size_t>(k)] = far;
        for (std::size_t i = 0; i < n; ++i)
            min_dist[i] = std::min(min_dist[i], ps.dist(far, i));
    }
    return out;
}

}  // namespace detail

/// Build the classification family: anchors from a max-min triple, the
/// largest Voronoi cell hosts an even-sized strictly separated packing, and
/// the reference measure weights follow from kappa and M_0.
inline AssouadClassificationFamily build_classification_family(const PointSet& ps, double kappa,
                                                               const SmoothnessSpec& spec,
                                                               double delta_n) {
    validate(spec);
    if (!(delta_n > 0.0))
        throw std::invalid_argument("build_classification_family: delta_n must be positive");
    if (ps.size() < 5)
        throw std::invalid_argument(
            "build_classification_family: need at least 5 points (3 anchors + a packing pair)");
    const auto anchors = detail::pick_anchors(ps);
    const double big_m =
        std::min({ps.dist(anchors[0], anchors[1]), ps.dist(anchors[0], anchors[2]),
                  ps.dist(anchors[1], anchors[2])}) /
        2.0;
    if (!(big_m > 0.0))
        throw std::invalid_argument("build_classification_family: anchor candidates coincide");
    const double c_m0_beta = std::min(1.0, spec.C * std::pow(big_m, spec.beta));  // = C M_0^beta
    const double kappa_cap = c_m0_beta / 8.0;
    if (!(kappa > 0.0 && kappa < kappa_cap))
        throw std::invalid_argument("build_classification_family: kappa must lie in (0, " +
                                    std::to_string(kappa_cap) + ") for this point set");

    // Voronoi three-way split; cells may overlap on ties.
    std::array<std::vector<std::size_t>, 3> cells;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double da = ps.dist(i, anchors[0]);
        const double db = ps.dist(i, anchors[1]);
        const double dc = ps.dist(i, anchors[2]);
        const double m = std::min({da, db, dc});
        if (da <= m) cells[0].push_back(i);
        if (db <= m) cells[1].push_back(i);
        if (dc <= m) cells[2].push_back(i);
    }
    std::size_t host = 0;
    for (std::size_t j = 1; j < 3; ++j)
        if (cells[j].size() > cells[host].size()) host = j;
    std::array<std::size_t, 2> others{};
    std::size_t o = 0;
    for (std::size_t j = 0; j < 3; ++j)
        if (j != host) others[o++] = anchors[j];
    const std::size_t anchor_high = std::min(others[0], others[1]);
    const std::size_t anchor_low = std::max(others[0], others[1]);

    std::vector<std::size_t> candidates;
    for (std::size_t i : cells[host])
        if (i != anchor_high && i != anchor_low) candidates.push_back(i);
    if (candidates.empty())
        throw std::invalid_argument("build_classification_family: host cell is empty");
    auto packing = greedy_packing(ps, candidates, delta_n);
    if (packing.size() < 2)
        throw std::invalid_argument(
            "build_classification_family: packing too small (need an even size >= 2); "
            "decrease delta_n");
    if (packing.size() % 2 == 1) packing.pop_back();
    const std::size_t d_n = packing.size();

    const double anchor_w = 2.0 * kappa / c_m0_beta;
    const double pack_w = (1.0 - 4.0 * kappa / c_m0_beta) / static_cast<double>(d_n);
    std::vector<std::size_t> support{anchor_high, anchor_low};
    std::vector<double> weights{anchor_w, anchor_w};
    for (std::size_t z : packing) {
        support.push_back(z);
        weights.push_back(pack_w);
    }
    DiscreteMeasure base(std::move(support), std::move(weights));

    AssouadClassificationFamily fam(ps, anchor_high, anchor_low, std::move(packing), kappa,
                                    delta_n, big_m, spec, std::move(base));
    // the Voronoi split guarantees packing points stay >= M from both anchors
    for (std::size_t z : fam.packing())
        if (ps.dist(z, anchor_high) < big_m || ps.dist(z, anchor_low) < big_m)
            throw std::invalid_argument(
                "build_classification_family: packing point closer than M to an anchor");
    return fam;
}

// --- audits -------------------------------------------------------------------

struct AuditCheck {
    std::string name;
    bool pass = false;
    double margin = 0.0;  // how far inside the requirement (negative = violated)
};

namespace detail {

inline std::vector<std::vector<std::uint8_t>> bit_patterns(std::size_t bits,
                                                           std::size_t max_exhaustive_bits) {
    std::vector<std::vector<std::uint8_t>> out;
    if (bits <= max_exhaustive_bits) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << bits); ++v) {
            std::vector<std::uint8_t> b(bits);
            for (std::size_t i = 0; i < bits; ++i) b[i] = (v >> i) & 1u;
            out.push_back(std::move(b));
        }
        return out;
    }
    // structural sample: the extremes, the alternations and all single flips
    out.emplace_back(bits, std::uint8_t{0});
    out.emplace_back(bits, std::uint8_t{1});
    std::vector<std::uint8_t> alt(bits);
    for (std::size_t i = 0; i < bits; ++i) alt[i] = static_cast<std::uint8_t>(i % 2);
    out.push_back(alt);
    for (std::size_t i = 0; i < bits; ++i) alt[i] = static_cast<std::uint8_t>(1 - i % 2);
    out.push_back(alt);
    for (std::size_t i = 0; i < bits; ++i) {
        std::vector<std::uint8_t> b(bits, 0);
        b[i] = 1;
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace detail

/// Invariant checks on a regression family, with margins.
inline std::vector<AuditCheck> audit_regression_family(const AssouadRegressionFamily& fam) {
    std::vector<AuditCheck> checks;
    const auto& ps = fam.points();
    const auto& centers = fam.centers();
    const auto& spec = fam.smoothness();

    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < centers.size(); ++a)
        for (std::size_t b = a + 1; b < centers.size(); ++b)
            min_sep = std::min(min_sep, ps.dist(centers[a], centers[b]));
    if (centers.size() < 2) min_sep = std::numeric_limits<double>::infinity();
    checks.push_back({"centers pairwise separated (> delta_n)",
                      min_sep > fam.separation(), min_sep - fam.separation()});

    std::vector<std::uint8_t> ones(centers.size(), 1);
    double sup_margin = spec.C;
    double holder_margin = std::numeric_limits<double>::infinity();
    std::vector<double> values(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        values[i] = fam.evaluate_at(ones, i);
        sup_margin = std::min(sup_margin, spec.C - std::abs(values[i]));
    }
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            const double rhs = spec.C * std::pow(ps.dist(i, j), spec.beta);
            holder_margin = std::min(holder_margin, rhs - std::abs(values[i] - values[j]));
        }
    checks.push_back({"all-ones map bounded by C", sup_margin >= 0.0, sup_margin});
    checks.push_back({"all-ones Hölder pair bound", holder_margin >= 0.0, holder_margin});

    // uniform-over-bits bound |g(y1)-g(y2)| <= 2 d max(||bump||, ||bump'||) rho^beta
    const double lip = std::max(kBumpPeak, bump_derivative_sup());
    double uni_margin = std::numeric_limits<double>::infinity();
    for (const auto& bits : detail::bit_patterns(centers.size(), 10)) {
        std::vector<double> v(ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) v[i] = fam.evaluate_at(bits, i);
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                const double rhs =
                    2.0 * fam.amplitude() * lip * std::pow(ps.dist(i, j), spec.beta);
                uni_margin = std::min(uni_margin, rhs - std::abs(v[i] - v[j]));
            }
    }
    checks.push_back({"two-bump Lipschitz envelope over bit patterns", uni_margin >= -1e-12,
                      uni_margin});

    // per-flip expected squared difference d^2 h^{2 beta} bump(0)^2 / m
    const double expected = fam.amplitude() * fam.amplitude() *
                            std::pow(fam.bandwidth(), 2.0 * spec.beta) * kBumpPeak * kBumpPeak /
                            static_cast<double>(centers.size());
    double worst_rel = 0.0;
    std::vector<std::uint8_t> zeros(centers.size(), 0);
    for (std::size_t j = 0; j < centers.size(); ++j) {
        std::vector<std::uint8_t> flipped(zeros);
        flipped[j] = 1;
        double acc = 0.0;
        const auto& design = fam.design();
        for (std::size_t k = 0; k < design.size(); ++k) {
            const double diff = fam.evaluate_at(flipped, design.support()[k]) -
                                fam.evaluate_at(zeros, design.support()[k]);
            acc += design.weights()[k] * diff * diff;
        }
        worst_rel = std::max(worst_rel, std::abs(acc - expected) / expected);
    }
    checks.push_back({"per-flip design-weighted squared difference identity", worst_rel <= 1e-12,
                      1e-12 - worst_rel});
    return checks;
}

/// Invariant checks on a classification family, with margins. Exhaustive over
/// bit vectors up to max_exhaustive_bits; structural patterns beyond.
inline std::vector<AuditCheck> audit_classification_family(
    const AssouadClassificationFamily& fam, std::size_t max_exhaustive_bits = 16) {
    std::vector<AuditCheck> checks;
    const auto& ps = fam.points();
    const auto& spec = fam.smoothness();
    const auto& base = fam.base();

    double wsum = 0.0;
    double wmin = std::numeric_limits<double>::infinity();
    for (double w : base.weights()) {
        wsum += w;
        wmin = std::min(wmin, w);
    }
    checks.push_back({"base weights sum to one", std::abs(wsum - 1.0) <= 1e-12,
                      1e-12 - std::abs(wsum - 1.0)});
    checks.push_back({"base weights positive", wmin > 0.0, wmin});

    double pack_sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < fam.packing().size(); ++a)
        for (std::size_t b = a + 1; b < fam.packing().size(); ++b)
            pack_sep = std::min(pack_sep, ps.dist(fam.packing()[a], fam.packing()[b]));
    checks.push_back({"packing pairwise separated (> delta_n)", pack_sep > fam.separation(),
                      pack_sep - fam.separation()});

    double anchor_gap = ps.dist(fam.anchor_high(), fam.anchor_low());
    for (std::size_t z : fam.packing()) {
        anchor_gap = std::min(anchor_gap, ps.dist(z, fam.anchor_high()));
        anchor_gap = std::min(anchor_gap, ps.dist(z, fam.anchor_low()));
    }
    checks.push_back({"anchors and packing mutually >= M", anchor_gap >= fam.anchor_separation(),
                      anchor_gap - fam.anchor_separation()});

    const auto patterns = detail::bit_patterns(fam.bit_count(), max_exhaustive_bits);
    double f_low = std::numeric_limits<double>::infinity();
    double f_high = -std::numeric_limits<double>::infinity();
    double integral_err = 0.0;
    double tv_margin = std::numeric_limits<double>::infinity();
    double holder_margin = std::numeric_limits<double>::infinity();
    const auto& sup = fam.support();
    for (const auto& bits : patterns) {
        std::vector<std::uint8_t> comp(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) comp[i] = static_cast<std::uint8_t>(1 - bits[i]);
        double integral = 0.0;
        std::vector<double> f(sup.size());
        for (std::size_t k = 0; k < sup.size(); ++k) {
            f[k] = fam.density(bits, sup[k]);
            f_low = std::min(f_low, f[k]);
            f_high = std::max(f_high, f[k]);
            integral += f[k] * base.weight_at(sup[k]);
        }
        integral_err = std::max(integral_err, std::abs(integral - 1.0));
        tv_margin = std::min(tv_margin, tv(fam.measure(bits), fam.measure(comp)) - fam.kappa());
        for (std::size_t a = 0; a < sup.size(); ++a)
            for (std::size_t b = a + 1; b < sup.size(); ++b) {
                const double rhs = spec.C * std::pow(ps.dist(sup[a], sup[b]), spec.beta);
                holder_margin = std::min(holder_margin, rhs - std::abs(f[a] - f[b]));
            }
    }
    checks.push_back({"densities within [1/2, 3/2]",
                      f_low >= 0.5 && f_high <= 1.5,
                      std::min(f_low - 0.5, 1.5 - f_high)});
    checks.push_back({"densities integrate to one", integral_err <= 1e-12, 1e-12 - integral_err});
    checks.push_back({"TV(P, P-complement) >= kappa", tv_margin >= 0.0, tv_margin});
    checks.push_back({"density Hölder pair bound", holder_margin >= 0.0, holder_margin});

    // per-flip KL bound KL(f_{l=1}, f_{l=0}) <= 3 C delta_n^beta R({z_{2l}})
    double kl_margin = std::numeric_limits<double>::infinity();
    for (const auto& bits : patterns) {
        for (std::size_t l = 1; l <= fam.pair_count(); ++l) {
            std::vector<std::uint8_t> on(bits), off(bits);
            on[l] = 1;
            off[l] = 0;
            const double bound = 3.0 * spec.C * std::pow(fam.separation(), spec.beta) *
                                 base.weight_at(fam.packing()[2 * l - 1]);
            kl_margin = std::min(kl_margin, bound - kl(fam.measure(on), fam.measure(off)));
        }
    }
    checks.push_back({"per-flip KL bound", kl_margin >= 0.0, kl_margin});
    return checks;
}

}  // namespace mel
