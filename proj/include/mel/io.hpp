#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mel/entropy.hpp"
#include "mel/metric.hpp"
#include "mel/models.hpp"
#include "mel/version.hpp"

namespace mel {

/// Shortest round-trip decimal form; locale-independent, '.' separator.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{})
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

/// FNV-1a over a canonical config dump; embedded in every output so results
/// are self-describing.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

inline std::string output_header(std::uint64_t seed, std::uint64_t config_hash) {
    return std::string("# ") + kToolName + " " + kVersion + " seed=" + std::to_string(seed) +
           " config=" + hex64(config_hash);
}

inline nlohmann::json meta_object(std::uint64_t seed, std::uint64_t config_hash) {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["seed"] = seed;
    j["config"] = hex64(config_hash);
    return j;
}

inline MetricSpec parse_metric(const std::string& s) {
    if (s == "sup") return MetricSpec::supremum();
    if (s == "l1") return MetricSpec::lp(1.0);
    if (s == "l2") return MetricSpec::lp(2.0);
    if (s.rfind("lp:", 0) == 0) return MetricSpec::lp(parse_double(std::string_view(s).substr(3)));
    throw std::invalid_argument("unknown metric '" + s + "' (expected sup, l1, l2 or lp:<p>)");
}

inline std::string metric_to_string(const MetricSpec& m) {
    if (m.kind == MetricSpec::Kind::Supremum) return "sup";
    if (m.p == 1.0) return "l1";
    if (m.p == 2.0) return "l2";
    return "lp:" + format_double(m.p);
}

// --- CSV tables ---------------------------------------------------------------

/// A dataset table: one functional datum per row on a shared grid given by the
/// header. An optional non-numeric first header cell ("y" or "label") marks a
/// leading response column.
struct Table {
    std::vector<double> grid;
    std::vector<std::vector<double>> rows;
    std::optional<std::string> leading_name;
    std::vector<double> leading;  // one entry per row when leading_name is set
};

inline Table read_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    Table t;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_on(line, ',');
        if (!header_done) {
            std::size_t start = 0;
            if (!cells.empty()) {
                try {
                    parse_double(cells[0]);
                } catch (const std::invalid_argument&) {
                    t.leading_name = cells[0];
                    start = 1;
                }
            }
            for (std::size_t i = start; i < cells.size(); ++i)
                t.grid.push_back(parse_double(cells[i]));
            if (t.grid.empty()) throw std::runtime_error(path + ": empty header row");
            header_done = true;
            continue;
        }
        std::size_t start = 0;
        if (t.leading_name) {
            if (cells.empty()) throw std::runtime_error(path + ": short row");
            t.leading.push_back(parse_double(cells[0]));
            start = 1;
        }
        if (cells.size() - start != t.grid.size())
            throw std::runtime_error(path + ": row width does not match the header grid");
        std::vector<double> row;
        row.reserve(t.grid.size());
        for (std::size_t i = start; i < cells.size(); ++i) row.push_back(parse_double(cells[i]));
        t.rows.push_back(std::move(row));
    }
    if (!header_done) throw std::runtime_error(path + ": missing header row");
    return t;
}

inline void write_table_csv(const std::string& path, const Table& t, const std::string& header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << header << "\n";
    if (t.leading_name) out << *t.leading_name << ",";
    for (std::size_t i = 0; i < t.grid.size(); ++i)
        out << format_double(t.grid[i]) << (i + 1 < t.grid.size() ? "," : "");
    out << "\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.leading_name) out << format_double(t.leading[r]) << ",";
        for (std::size_t i = 0; i < t.rows[r].size(); ++i)
            out << format_double(t.rows[r][i]) << (i + 1 < t.rows[r].size() ? "," : "");
        out << "\n";
    }
}

inline PointSet to_point_set(const Table& t, const MetricSpec& metric) {
    std::vector<SampledFunction> points;
    points.reserve(t.rows.size());
    for (const auto& row : t.rows) points.emplace_back(t.grid, row);
    return PointSet(std::move(points), metric);
}

// --- entropy profile CSV --------------------------------------------------------

inline void write_profile_csv(const std::string& path, const EntropyProfile& p,
                              const std::string& header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << header << "\n" << "radius,count,mode\n";
    for (std::size_t i = 0; i < p.radii.size(); ++i)
        out << format_double(p.radii[i]) << "," << p.counts[i] << "," << to_string(p.modes[i])
            << "\n";
}

inline EntropyProfile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    EntropyProfile p;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_done) {  // "radius,count,mode"
            header_done = true;
            continue;
        }
        auto cells = split_on(line, ',');
        if (cells.size() != 3) throw std::runtime_error(path + ": malformed profile row");
        p.radii.push_back(parse_double(cells[0]));
        p.counts.push_back(static_cast<std::size_t>(parse_double(cells[1])));
        p.modes.push_back(count_mode_from_string(cells[2]));
    }
    return p;
}

// --- instance JSON ---------------------------------------------------------------

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    return j;
}

inline DiscreteMeasure measure_from_json(const nlohmann::json& j) {
    std::vector<std::size_t> support = j.at("support").get<std::vector<std::size_t>>();
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    return DiscreteMeasure(std::move(support), std::move(weights));
}

/// Named regression-map constructors, so maps are serialisable:
///   constant:       g(x) = value
///   scaled_mean:    g(x) = scale * (trapezoidal mean of x)
///   dist_to_anchor: g(x) = scale * rho(x, points[anchor])^exponent
inline RegressionMap make_regression_map(const nlohmann::json& j, const PointSet& points) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        const double value = j.at("value").get<double>();
        return [value](const SampledFunction&) { return value; };
    }
    if (kind == "scaled_mean") {
        const double scale = j.at("scale").get<double>();
        return [scale](const SampledFunction& x) {
            const auto& t = x.grid();
            const auto& v = x.values();
            if (t.size() == 1) return scale * v[0];
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < t.size(); ++i)
                acc += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1]);
            return scale * acc / (t.back() - t.front());
        };
    }
    if (kind == "dist_to_anchor") {
        const double scale = j.at("scale").get<double>();
        const double exponent = j.value("exponent", 1.0);
        const std::size_t anchor = j.at("anchor").get<std::size_t>();
        if (anchor >= points.size())
            throw std::invalid_argument("regression map: anchor index out of range");
        SampledFunction anchor_point = points.point(anchor);
        MetricSpec metric = points.metric();
        return [scale, exponent, anchor_point = std::move(anchor_point),
                metric](const SampledFunction& x) {
            return scale * std::pow(distance(x, anchor_point, metric), exponent);
        };
    }
    throw std::invalid_argument("unknown regression map kind '" + kind + "'");
}

inline NoiseSpec noise_from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    const double cv = j.value("c_v", -1.0);
    if (family == "gaussian") return NoiseSpec::gaussian(j.at("sd").get<double>(), cv);
    if (family == "uniform") return NoiseSpec::uniform(j.at("halfwidth").get<double>(), cv);
    throw std::invalid_argument("unknown noise family '" + family + "'");
}

struct TuningDefaults {
    double gamma = 1.0;
    double d = 1.0;
    double eta = 0.25;
};

/// A parsed instance file. Holds the shared point pool plus whichever of the
/// regression / classification blocks the file provides.
struct LoadedInstance {
    PointSet points;
    SmoothnessSpec smoothness;
    std::optional<DiscreteMeasure> design;
    nlohmann::json g_spec;
    std::optional<NoiseSpec> noise;
    std::optional<DiscreteMeasure> px;
    std::optional<DiscreteMeasure> py;
    double kappa = 0.0;
    double w = 0.5;
    std::optional<TuningDefaults> tuning;
    std::optional<EntropyEnvelope> envelope;

    RegressionInstance regression() const {
        if (!design || !noise || g_spec.is_null())
            throw std::invalid_argument("instance file lacks a regression block (design/g/noise)");
        return RegressionInstance(points, *design, make_regression_map(g_spec, points), *noise,
                                  smoothness);
    }

    ClassificationInstance classification() const {
        if (!px || !py)
            throw std::invalid_argument("instance file lacks a classification block (px/py)");
        return ClassificationInstance(points, *px, *py, kappa, w, smoothness);
    }
};

inline LoadedInstance load_instance_json(const std::string& path) {
    const nlohmann::json j = load_json_file(path);
    const MetricSpec metric = parse_metric(j.value("metric", std::string("sup")));
    std::vector<SampledFunction> points;
    if (j.contains("dataset")) {
        Table t = read_table_csv(j.at("dataset").get<std::string>());
        for (const auto& row : t.rows) points.emplace_back(t.grid, row);
    } else {
        const auto grid = j.at("grid").get<std::vector<double>>();
        for (const auto& row : j.at("points"))
            points.emplace_back(grid, row.get<std::vector<double>>());
    }
    LoadedInstance inst{PointSet(std::move(points), metric),
                        SmoothnessSpec{j.value("beta", 1.0), j.value("C", 1.0)},
                        {}, nlohmann::json(), {}, {}, {}, 0.0, 0.5, {}, {}};
    if (j.contains("design")) inst.design = measure_from_json(j.at("design"));
    if (j.contains("g")) inst.g_spec = j.at("g");
    if (j.contains("noise")) inst.noise = noise_from_json(j.at("noise"));
    if (j.contains("px")) inst.px = measure_from_json(j.at("px"));
    if (j.contains("py")) inst.py = measure_from_json(j.at("py"));
    inst.kappa = j.value("kappa", 0.0);
    inst.w = j.value("w", 0.5);
    if (j.contains("tuning")) {
        const auto& t = j.at("tuning");
        inst.tuning = TuningDefaults{t.value("gamma", 1.0), t.value("d", 1.0), t.value("eta", 0.25)};
    }
    if (j.contains("envelope")) {
        const auto& e = j.at("envelope");
        inst.envelope = EntropyEnvelope{e.value("gamma", 1.0), e.value("c_low", 0.0),
                                        e.at("c_high").get<double>(), e.value("s0", 1.0), 0.0};
    }
    return inst;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mel
