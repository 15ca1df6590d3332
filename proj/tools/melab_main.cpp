// melab: batch experimentation tool for kernel regression, classification and
// metric-entropy diagnostics on sampled functional data. Every subcommand is a
// deterministic function of its flags and seed; outputs embed the seed and a
// hash of the effective configuration.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mel/mel.hpp"

using nlohmann::json;

namespace {

using namespace mel;

// ---- config file merge -------------------------------------------------------

/// Applies a JSON config under the parsed flags: flags win, unknown keys are
/// refused. Every bound key also lands in the effective-config object used
/// for the output hash.
class ConfigMerger {
public:
    void bind(const std::string& key, CLI::Option* opt, const std::function<void(const json&)>& set) {
        entries_.push_back({key, opt, set});
    }

    void apply(const std::string& config_path) {
        if (config_path.empty()) return;
        cfg_ = load_json_file(config_path);
        if (!cfg_.is_object()) throw std::invalid_argument("config file must hold a JSON object");
        for (const auto& item : cfg_.items()) {
            bool known = false;
            for (const auto& e : entries_) known = known || e.key == item.key();
            if (!known)
                throw std::invalid_argument("unknown config key '" + item.key() + "'");
        }
        for (const auto& e : entries_)
            if (e.opt->count() == 0 && cfg_.contains(e.key)) e.set(cfg_.at(e.key));
    }

    bool provided(const std::string& key) const {
        for (const auto& e : entries_)
            if (e.key == key) return e.opt->count() > 0 || cfg_.contains(key);
        return false;
    }

private:
    struct Entry {
        std::string key;
        CLI::Option* opt;
        std::function<void(const json&)> set;
    };
    std::vector<Entry> entries_;
    json cfg_ = json::object();
};

std::uint64_t resolve_seed(const ConfigMerger& merger, std::uint64_t current) {
    if (merger.provided("seed")) return current;
    if (const char* env = std::getenv("METRIC_ENTROPY_LAB_SEED")) {
        try {
            return static_cast<std::uint64_t>(std::stoull(env));
        } catch (const std::exception&) {
            throw std::invalid_argument("METRIC_ENTROPY_LAB_SEED is not an unsigned integer");
        }
    }
    return current;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_text_file(out_path, content);
}

void emit_json(const std::string& out_path, const json& j) { emit(out_path, j.dump(2) + "\n"); }

double finite_or_cap(double v) { return std::isfinite(v) ? v : 1e300; }

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

std::vector<double> descending(std::vector<double> radii) {
    std::sort(radii.begin(), radii.end(), std::greater<>());
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        require(radii[i] > radii[i + 1], "radii must be distinct");
    return radii;
}

// ---- generate ------------------------------------------------------------------

struct GenerateParams {
    std::string klass = "lipschitz";
    std::size_t n = 100;
    std::size_t grid = 101;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_generate(const GenerateParams& p) {
    require(p.klass == "lipschitz" || p.klass == "monotone",
            "--class must be lipschitz or monotone");
    require(p.n >= 1, "--n must be at least 1");
    require(p.grid >= 2, "--grid must be at least 2");
    require(p.amplitude >= 0.0, "--amplitude must be nonnegative");
    require(!p.out.empty(), "--out is required");
    json cfg{{"class", p.klass}, {"n", p.n},       {"grid", p.grid},
             {"amplitude", p.amplitude}, {"seed", p.seed}};
    Rng rng(p.seed);
    const auto grid = uniform_grid(p.grid);
    Table t;
    t.grid = grid;
    for (std::size_t i = 0; i < p.n; ++i) {
        const auto f = p.klass == "lipschitz" ? sample_lipschitz_curve(p.amplitude, grid, rng)
                                              : sample_monotone_curve(grid, rng);
        t.rows.push_back(f.values());
    }
    write_table_csv(p.out, t, output_header(p.seed, fnv1a(cfg.dump())));
    return 0;
}

// ---- entropy --------------------------------------------------------------------

struct EntropyParams {
    std::string input;
    std::string metric = "sup";
    std::vector<double> radii;
    bool intrinsic = false;
    std::size_t exact_threshold = kExactSearchThreshold;
    std::uint64_t seed = 1;
    std::string out;
};

int run_entropy(const EntropyParams& p) {
    require(!p.input.empty(), "--input is required");
    require(!p.radii.empty(), "--radii is required");
    require(p.exact_threshold >= 1 && p.exact_threshold <= 24,
            "--exact-threshold must lie in [1, 24]");
    for (double r : p.radii) require(r > 0.0, "radii must be positive");
    json cfg{{"input", p.input},   {"metric", p.metric},
             {"radii", p.radii},   {"intrinsic", p.intrinsic},
             {"exact-threshold", p.exact_threshold}, {"seed", p.seed}};
    const auto ps = to_point_set(read_table_csv(p.input), parse_metric(p.metric));
    const auto radii = descending(p.radii);
    ProfileOptions opts;
    opts.intrinsic = p.intrinsic;
    opts.exact_threshold = p.exact_threshold;
    const auto profile = entropy_profile(ps, radii, opts);
    std::ostringstream ss;
    ss << output_header(p.seed, fnv1a(cfg.dump())) << "\nradius,count,mode\n";
    for (std::size_t i = 0; i < profile.radii.size(); ++i)
        ss << format_double(profile.radii[i]) << "," << profile.counts[i] << ","
           << to_string(profile.modes[i]) << "\n";
    emit(p.out, ss.str());
    return 0;
}

// ---- gamma-fit ---------------------------------------------------------------------

struct GammaFitParams {
    std::string profile;
    std::vector<double> window;
    std::uint64_t seed = 1;
    std::string out;
};

int run_gamma_fit(const GammaFitParams& p) {
    require(!p.profile.empty(), "--profile is required");
    require(p.window.size() == 2, "--window takes lo,hi");
    json cfg{{"profile", p.profile}, {"window", p.window}, {"seed", p.seed}};
    const auto prof = read_profile_csv(p.profile);
    const auto env = fit_gamma(prof, p.window[0], p.window[1]);
    json j{{"gamma", env.gamma},   {"c_low", env.c_low}, {"c_high", env.c_high},
           {"s0", env.s0},         {"residual", env.fit_residual},
           {"meta", meta_object(p.seed, fnv1a(cfg.dump()))}};
    emit_json(p.out, j);
    return 0;
}

// ---- regress ------------------------------------------------------------------------

struct RegressParams {
    std::string train;
    std::string query;
    double gamma = 1.0;
    double d = 1.0;
    double eta = 0.25;
    std::string metric = "sup";
    std::uint64_t seed = 1;
    std::string out;
};

int run_regress(const RegressParams& p) {
    require(!p.train.empty() && !p.query.empty(), "--train and --query are required");
    require(p.gamma > 0.0, "--gamma must be positive");
    require(p.d > 0.0, "--d must be positive");
    require(p.eta > 0.0 && p.eta < 0.5, "--eta must lie in (0, 1/2)");
    json cfg{{"train", p.train}, {"query", p.query}, {"gamma", p.gamma}, {"d", p.d},
             {"eta", p.eta},     {"metric", p.metric}, {"seed", p.seed}};
    const auto metric = parse_metric(p.metric);
    const auto train_table = read_table_csv(p.train);
    require(train_table.leading_name == std::optional<std::string>("y"),
            "training CSV needs a leading 'y' column");
    require(train_table.rows.size() >= 2, "need at least two training rows");
    std::vector<std::pair<SampledFunction, double>> train;
    for (std::size_t r = 0; r < train_table.rows.size(); ++r)
        train.emplace_back(SampledFunction(train_table.grid, train_table.rows[r]),
                           train_table.leading[r]);
    const auto query_table = read_table_csv(p.query);
    const double n = static_cast<double>(train.size());
    const double h = select_bandwidth(n, p.gamma, p.d);
    const double delta_n = select_ridge(n, p.eta);
    std::ostringstream ss;
    ss << output_header(p.seed, fnv1a(cfg.dump())) << "\nquery_index,estimate,b_hat\n";
    for (std::size_t q = 0; q < query_table.rows.size(); ++q) {
        const SampledFunction x(query_table.grid, query_table.rows[q]);
        const auto fit = nw_fit(train, x, h, delta_n, metric);
        ss << q << "," << format_double(fit.estimate) << "," << format_double(fit.b_hat) << "\n";
    }
    emit(p.out, ss.str());
    return 0;
}

// ---- classify ------------------------------------------------------------------------

struct ClassifyParams {
    std::string train;
    std::string query;
    double h = 0.0;
    bool auto_h = false;
    double gamma = 1.0;
    double d = 1.0;
    std::string metric = "sup";
    std::uint64_t seed = 1;
    std::string out;
};

int run_classify(const ClassifyParams& p) {
    require(!p.train.empty() && !p.query.empty(), "--train and --query are required");
    require(p.auto_h != (p.h > 0.0), "pass exactly one of --h or --auto-h");
    json cfg{{"train", p.train}, {"query", p.query}, {"h", p.h},       {"auto-h", p.auto_h},
             {"gamma", p.gamma}, {"d", p.d},         {"metric", p.metric}, {"seed", p.seed}};
    const auto metric = parse_metric(p.metric);
    const auto train_table = read_table_csv(p.train);
    require(train_table.leading_name == std::optional<std::string>("label"),
            "training CSV needs a leading 'label' column");
    require(train_table.rows.size() >= 2, "need at least two training rows");
    std::vector<std::pair<SampledFunction, int>> train;
    for (std::size_t r = 0; r < train_table.rows.size(); ++r) {
        const double w = train_table.leading[r];
        require(w == 0.0 || w == 1.0, "labels must be 0 or 1");
        train.emplace_back(SampledFunction(train_table.grid, train_table.rows[r]),
                           static_cast<int>(w));
    }
    const double n = static_cast<double>(train.size());
    const double h = p.auto_h ? select_bandwidth(n, p.gamma, p.d) : p.h;
    const auto query_table = read_table_csv(p.query);
    std::ostringstream ss;
    ss << output_header(p.seed, fnv1a(cfg.dump())) << "\nquery_index,label,p_hat_x,p_hat_y\n";
    for (std::size_t q = 0; q < query_table.rows.size(); ++q) {
        const SampledFunction z(query_table.grid, query_table.rows[q]);
        const auto fit = plugin_fit(train, z, h, metric);
        ss << q << "," << fit.label << "," << format_double(fit.p_hat_x) << ","
           << format_double(fit.p_hat_y) << "\n";
    }
    emit(p.out, ss.str());
    return 0;
}

// ---- lowerbound -----------------------------------------------------------------------

struct LowerboundParams {
    std::string mode = "regression";
    std::string input;
    double delta_n = 0.1;
    double kappa = 0.01;
    double beta = 1.0;
    double C = 1.0;
    double d = -1.0;  // regression amplitude; negative = auto
    std::string metric = "sup";
    std::uint64_t seed = 1;
    std::string out;
};

json audit_to_json(const std::vector<AuditCheck>& checks) {
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", finite_or_cap(c.margin)}});
    return arr;
}

int run_lowerbound(const LowerboundParams& p) {
    require(p.mode == "regression" || p.mode == "classification",
            "--mode must be regression or classification");
    require(!p.input.empty(), "--input is required");
    require(p.delta_n > 0.0, "--delta-n must be positive");
    require(p.beta > 0.0 && p.beta <= 1.0, "--beta must lie in (0, 1]");
    require(p.C > 0.0, "--C must be positive");
    require(p.kappa >= 0.0, "--kappa must be nonnegative");
    json cfg{{"mode", p.mode},   {"input", p.input}, {"delta-n", p.delta_n},
             {"kappa", p.kappa}, {"beta", p.beta},   {"C", p.C},
             {"d", p.d},         {"metric", p.metric}, {"seed", p.seed}};
    const auto ps = to_point_set(read_table_csv(p.input), parse_metric(p.metric));
    const SmoothnessSpec spec{p.beta, p.C};
    json j;
    j["mode"] = p.mode;
    j["meta"] = meta_object(p.seed, fnv1a(cfg.dump()));
    if (p.mode == "regression") {
        const double max_d = max_regression_amplitude(ps, p.delta_n, spec);
        const double d = p.d > 0.0 ? p.d : 0.9 * finite_or_cap(max_d);
        const auto fam = build_regression_family(ps, p.delta_n, d, spec);
        j["family"] = {{"centers", fam.centers()},
                       {"separation", fam.separation()},
                       {"bandwidth", fam.bandwidth()},
                       {"amplitude", fam.amplitude()},
                       {"max_amplitude", finite_or_cap(max_d)},
                       {"beta", p.beta},
                       {"C", p.C}};
        j["audit"] = audit_to_json(audit_regression_family(fam));
    } else {
        const auto fam = build_classification_family(ps, p.kappa, spec, p.delta_n);
        j["family"] = {{"anchor_high", fam.anchor_high()},
                       {"anchor_low", fam.anchor_low()},
                       {"packing", fam.packing()},
                       {"M", fam.anchor_separation()},
                       {"M0", fam.m0()},
                       {"kappa", fam.kappa()},
                       {"separation", fam.separation()},
                       {"weights", fam.base().weights()},
                       {"beta", p.beta},
                       {"C", p.C}};
        j["audit"] = audit_to_json(audit_classification_family(fam));
    }
    emit_json(p.out, j);
    return 0;
}

// ---- risk -----------------------------------------------------------------------------

struct RiskParams {
    std::string instance;
    std::string task = "regress";
    std::vector<std::size_t> n_list;
    std::size_t reps = 50;
    std::uint64_t seed = 1;
    double gamma = std::nan("");
    double d = std::nan("");
    double eta = std::nan("");
    std::size_t x = 0;
    unsigned threads = 1;
    std::string svg;
    std::string out;
};

std::string risk_svg(const RiskReport& report) {
    const double width = 480, height = 320, margin = 48;
    double xmin = 1e300, xmax = -1e300, ymax = 0.0;
    for (const auto& c : report.cells) {
        const double x = std::log10(static_cast<double>(c.n));
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymax = std::max(ymax, c.mc.mean() + c.mc.se());
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= 0.0) ymax = 1.0;
    auto sx = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - y / ymax * (height - 2 * margin); };
    std::ostringstream ss;
    ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\">\n";
    ss << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    ss << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
       << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    ss << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
       << height - margin << "\" stroke=\"black\"/>\n";
    ss << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& c : report.cells)
        ss << format_double(sx(std::log10(static_cast<double>(c.n)))) << ","
           << format_double(sy(c.mc.mean())) << " ";
    ss << "\"/>\n";
    for (const auto& c : report.cells) {
        const double x = sx(std::log10(static_cast<double>(c.n)));
        ss << "<line x1=\"" << format_double(x) << "\" y1=\""
           << format_double(sy(c.mc.mean() - c.mc.se())) << "\" x2=\"" << format_double(x)
           << "\" y2=\"" << format_double(sy(c.mc.mean() + c.mc.se()))
           << "\" stroke=\"steelblue\"/>\n";
        ss << "<circle cx=\"" << format_double(x) << "\" cy=\"" << format_double(sy(c.mc.mean()))
           << "\" r=\"3\" fill=\"steelblue\"/>\n";
        ss << "<text x=\"" << format_double(x) << "\" y=\"" << height - margin + 16
           << "\" font-size=\"10\" text-anchor=\"middle\">" << c.n << "</text>\n";
    }
    ss << "<text x=\"" << margin - 6 << "\" y=\"" << margin << "\" font-size=\"10\" "
       << "text-anchor=\"end\">" << format_double(ymax) << "</text>\n";
    ss << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
       << "\" font-size=\"11\" text-anchor=\"middle\">n (log scale)</text>\n";
    ss << "</svg>\n";
    return ss.str();
}

int run_risk(const RiskParams& p) {
    require(!p.instance.empty(), "--instance is required");
    require(p.task == "regress" || p.task == "classify" || p.task == "pointwise",
            "--task must be regress, classify or pointwise");
    require(!p.n_list.empty(), "--n-list is required");
    require(p.reps >= 2, "--reps must be at least 2");
    require(p.threads >= 1, "--threads must be at least 1");
    // threads are schedule, not config: the report is identical at any count
    json cfg{{"instance", p.instance}, {"task", p.task},   {"n-list", p.n_list},
             {"reps", p.reps},         {"seed", p.seed},   {"gamma", finite_or_cap(p.gamma)},
             {"d", finite_or_cap(p.d)}, {"eta", finite_or_cap(p.eta)}, {"x", p.x},
             };
    const auto loaded = load_instance_json(p.instance);
    const TuningDefaults defaults = loaded.tuning.value_or(TuningDefaults{});
    const double gamma = std::isnan(p.gamma) ? defaults.gamma : p.gamma;
    const double d = std::isnan(p.d) ? defaults.d : p.d;
    const double eta = std::isnan(p.eta) ? defaults.eta : p.eta;
    require(gamma > 0.0, "gamma must be positive");
    require(d > 0.0, "d must be positive");
    require(eta > 0.0 && eta < 0.5, "eta must lie in (0, 1/2)");
    if (loaded.envelope) {
        const RegressionTuning probe{0.0, 0.0, eta, d, gamma};
        if (!tuning_within_envelope(probe, *loaded.envelope))
            std::cerr << kToolName << ": warning: d = " << d
                      << " violates d < eta / (c_high 4^gamma) for the instance envelope\n";
    }
    RiskReport report;
    report.kind = p.task == "classify" ? RiskKind::Classification : RiskKind::Regression;
    report.reps = p.reps;
    report.seed = p.seed;
    for (std::size_t n : p.n_list) {
        require(n >= 2, "every n must be at least 2");
        RiskCell cell;
        cell.n = n;
        const auto nn = static_cast<double>(n);
        if (p.task == "classify") {
            const auto inst = loaded.classification();
            auto h_rule = [&](std::size_t m) {
                return select_bandwidth(static_cast<double>(m), gamma, d);
            };
            cell.mc = excess_risk(inst, h_rule, n, p.reps, child_seed(p.seed, n), p.threads);
            cell.h = select_bandwidth(nn, gamma, d);
            cell.delta_n = 0.0;
        } else {
            const auto inst = loaded.regression();
            auto rule = [&](std::size_t m) {
                return select_tuning(static_cast<double>(m), gamma, d, eta);
            };
            cell.mc = p.task == "pointwise"
                          ? pointwise_risk(inst, rule, p.x, n, p.reps, child_seed(p.seed, n),
                                           p.threads)
                          : integrated_sq_risk(inst, rule, n, p.reps, child_seed(p.seed, n),
                                               p.threads);
            cell.h = select_bandwidth(nn, gamma, d);
            cell.delta_n = select_ridge(nn, eta);
        }
        report.cells.push_back(std::move(cell));
    }
    attach_rate_fit(report, loaded.smoothness.beta, gamma);
    std::ostringstream ss;
    ss << output_header(p.seed, fnv1a(cfg.dump())) << "\nn,estimate,se,h,delta_n,reps\n";
    for (const auto& c : report.cells)
        ss << c.n << "," << format_double(c.mc.mean()) << "," << format_double(c.mc.se()) << ","
           << format_double(c.h) << "," << format_double(c.delta_n) << "," << p.reps << "\n";
    if (report.rate)
        ss << "# rate slope=" << format_double(report.rate->slope)
           << " se=" << format_double(report.rate->se)
           << " target=" << format_double(report.rate->target) << "\n";
    emit(p.out, ss.str());
    if (!p.svg.empty()) write_text_file(p.svg, risk_svg(report));
    return 0;
}

// ---- rate ------------------------------------------------------------------------------

struct RateParams {
    std::string report;
    double beta = 1.0;
    double gamma = 1.0;
    std::string kind = "regression";
    std::uint64_t seed = 1;
    std::string out;
};

int run_rate(const RateParams& p) {
    require(!p.report.empty(), "--report is required");
    require(p.beta > 0.0 && p.beta <= 1.0, "--beta must lie in (0, 1]");
    require(p.gamma > 0.0, "--gamma must be positive");
    require(p.kind == "regression" || p.kind == "classification",
            "--kind must be regression or classification");
    json cfg{{"report", p.report}, {"beta", p.beta}, {"gamma", p.gamma},
             {"kind", p.kind},     {"seed", p.seed}};
    std::vector<std::pair<double, double>> pts;
    {
        std::ifstream in(p.report);
        if (!in) throw std::runtime_error("cannot open '" + p.report + "'");
        std::string line;
        bool header_done = false;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (!header_done) {
                header_done = true;
                continue;
            }
            const auto cells = split_on(line, ',');
            require(cells.size() >= 2, "malformed report row");
            pts.emplace_back(parse_double(cells[0]), parse_double(cells[1]));
        }
    }
    const auto fit = rate_fit(pts, p.beta, p.gamma,
                              p.kind == "regression" ? RiskKind::Regression
                                                     : RiskKind::Classification);
    json j{{"slope", fit.slope},
           {"se", fit.se},
           {"target", fit.target},
           {"used", fit.used},
           {"excluded", fit.excluded},
           {"meta", meta_object(p.seed, fnv1a(cfg.dump()))}};
    emit_json(p.out, j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel regression, classification and metric-entropy toolkit for sampled "
                 "functional data"};
    app.set_help_flag("--help", "print help");  // keeps --h free for the bandwidth flag
    app.set_version_flag("--version", std::string(mel::kVersion));
    app.require_subcommand(1);
    std::function<int()> runner;

    GenerateParams gen;
    std::string gen_config;
    ConfigMerger gen_merge;
    {
        auto* sub = app.add_subcommand("generate", "sample function-class datasets to CSV");
        auto* o1 = sub->add_option("--class", gen.klass, "lipschitz or monotone");
        auto* o2 = sub->add_option("--n", gen.n, "number of curves");
        auto* o3 = sub->add_option("--grid", gen.grid, "grid points on [0,1]");
        auto* o4 = sub->add_option("--amplitude", gen.amplitude, "Lipschitz amplitude M");
        auto* o5 = sub->add_option("--seed", gen.seed, "rng seed");
        auto* o6 = sub->add_option("--out", gen.out, "output CSV path");
        sub->add_option("--config", gen_config, "JSON config file (flags win)");
        gen_merge.bind("class", o1, [&](const json& v) { gen.klass = v.get<std::string>(); });
        gen_merge.bind("n", o2, [&](const json& v) { gen.n = v.get<std::size_t>(); });
        gen_merge.bind("grid", o3, [&](const json& v) { gen.grid = v.get<std::size_t>(); });
        gen_merge.bind("amplitude", o4, [&](const json& v) { gen.amplitude = v.get<double>(); });
        gen_merge.bind("seed", o5, [&](const json& v) { gen.seed = v.get<std::uint64_t>(); });
        gen_merge.bind("out", o6, [&](const json& v) { gen.out = v.get<std::string>(); });
        sub->callback([&] {
            gen_merge.apply(gen_config);
            gen.seed = resolve_seed(gen_merge, gen.seed);
            runner = [&] { return run_generate(gen); };
        });
    }

    EntropyParams ent;
    std::string ent_config;
    ConfigMerger ent_merge;
    {
        auto* sub = app.add_subcommand("entropy", "covering-count profile of a dataset");
        auto* o1 = sub->add_option("--input", ent.input, "dataset CSV");
        auto* o2 = sub->add_option("--metric", ent.metric, "sup, l1, l2 or lp:<p>");
        auto* o3 = sub->add_option("--radii", ent.radii, "comma list of radii")->delimiter(',');
        auto* o4 = sub->add_flag("--intrinsic", ent.intrinsic, "restrict centers to the sample");
        auto* o5 = sub->add_option("--exact-threshold", ent.exact_threshold,
                                   "max set size for exact search");
        auto* o6 = sub->add_option("--seed", ent.seed, "rng seed (recorded in the header)");
        auto* o7 = sub->add_option("--out", ent.out, "output CSV path (default stdout)");
        sub->add_option("--config", ent_config, "JSON config file (flags win)");
        ent_merge.bind("input", o1, [&](const json& v) { ent.input = v.get<std::string>(); });
        ent_merge.bind("metric", o2, [&](const json& v) { ent.metric = v.get<std::string>(); });
        ent_merge.bind("radii", o3, [&](const json& v) { ent.radii = v.get<std::vector<double>>(); });
        ent_merge.bind("intrinsic", o4, [&](const json& v) { ent.intrinsic = v.get<bool>(); });
        ent_merge.bind("exact-threshold", o5,
                       [&](const json& v) { ent.exact_threshold = v.get<std::size_t>(); });
        ent_merge.bind("seed", o6, [&](const json& v) { ent.seed = v.get<std::uint64_t>(); });
        ent_merge.bind("out", o7, [&](const json& v) { ent.out = v.get<std::string>(); });
        sub->callback([&] {
            ent_merge.apply(ent_config);
            ent.seed = resolve_seed(ent_merge, ent.seed);
            runner = [&] { return run_entropy(ent); };
        });
    }

    GammaFitParams gam;
    std::string gam_config;
    ConfigMerger gam_merge;
    {
        auto* sub = app.add_subcommand("gamma-fit", "fit the entropy exponent on a window");
        auto* o1 = sub->add_option("--profile", gam.profile, "profile CSV from `entropy`");
        auto* o2 = sub->add_option("--window", gam.window, "lo,hi radius window")->delimiter(',');
        auto* o3 = sub->add_option("--seed", gam.seed, "rng seed (recorded in the meta)");
        auto* o4 = sub->add_option("--out", gam.out, "output JSON path (default stdout)");
        sub->add_option("--config", gam_config, "JSON config file (flags win)");
        gam_merge.bind("profile", o1, [&](const json& v) { gam.profile = v.get<std::string>(); });
        gam_merge.bind("window", o2,
                       [&](const json& v) { gam.window = v.get<std::vector<double>>(); });
        gam_merge.bind("seed", o3, [&](const json& v) { gam.seed = v.get<std::uint64_t>(); });
        gam_merge.bind("out", o4, [&](const json& v) { gam.out = v.get<std::string>(); });
        sub->callback([&] {
            gam_merge.apply(gam_config);
            gam.seed = resolve_seed(gam_merge, gam.seed);
            runner = [&] { return run_gamma_fit(gam); };
        });
    }

    RegressParams reg;
    std::string reg_config;
    ConfigMerger reg_merge;
    {
        auto* sub = app.add_subcommand("regress", "truncated kernel regression at query curves");
        auto* o1 = sub->add_option("--train", reg.train, "training CSV with a leading y column");
        auto* o2 = sub->add_option("--query", reg.query, "query CSV");
        auto* o3 = sub->add_option("--gamma", reg.gamma, "entropy exponent for the bandwidth");
        auto* o4 = sub->add_option("--d", reg.d, "bandwidth constant");
        auto* o5 = sub->add_option("--eta", reg.eta, "ridge exponent in (0, 1/2)");
        auto* o6 = sub->add_option("--metric", reg.metric, "sup, l1, l2 or lp:<p>");
        auto* o7 = sub->add_option("--seed", reg.seed, "rng seed (recorded in the header)");
        auto* o8 = sub->add_option("--out", reg.out, "output CSV path (default stdout)");
        sub->add_option("--config", reg_config, "JSON config file (flags win)");
        reg_merge.bind("train", o1, [&](const json& v) { reg.train = v.get<std::string>(); });
        reg_merge.bind("query", o2, [&](const json& v) { reg.query = v.get<std::string>(); });
        reg_merge.bind("gamma", o3, [&](const json& v) { reg.gamma = v.get<double>(); });
        reg_merge.bind("d", o4, [&](const json& v) { reg.d = v.get<double>(); });
        reg_merge.bind("eta", o5, [&](const json& v) { reg.eta = v.get<double>(); });
        reg_merge.bind("metric", o6, [&](const json& v) { reg.metric = v.get<std::string>(); });
        reg_merge.bind("seed", o7, [&](const json& v) { reg.seed = v.get<std::uint64_t>(); });
        reg_merge.bind("out", o8, [&](const json& v) { reg.out = v.get<std::string>(); });
        sub->callback([&] {
            reg_merge.apply(reg_config);
            reg.seed = resolve_seed(reg_merge, reg.seed);
            runner = [&] { return run_regress(reg); };
        });
    }

    ClassifyParams cls;
    std::string cls_config;
    ConfigMerger cls_merge;
    {
        auto* sub = app.add_subcommand("classify", "plug-in kernel classification of query curves");
        sub->set_help_flag("--help", "print help");
        auto* o1 = sub->add_option("--train", cls.train, "training CSV with a leading label column");
        auto* o2 = sub->add_option("--query", cls.query, "query CSV");
        auto* o3 = sub->add_option("--h", cls.h, "bandwidth");
        auto* o4 = sub->add_flag("--auto-h", cls.auto_h, "derive h from --gamma/--d");
        auto* o5 = sub->add_option("--gamma", cls.gamma, "entropy exponent for --auto-h");
        auto* o6 = sub->add_option("--d", cls.d, "bandwidth constant for --auto-h");
        auto* o7 = sub->add_option("--metric", cls.metric, "sup, l1, l2 or lp:<p>");
        auto* o8 = sub->add_option("--seed", cls.seed, "rng seed (recorded in the header)");
        auto* o9 = sub->add_option("--out", cls.out, "output CSV path (default stdout)");
        sub->add_option("--config", cls_config, "JSON config file (flags win)");
        cls_merge.bind("train", o1, [&](const json& v) { cls.train = v.get<std::string>(); });
        cls_merge.bind("query", o2, [&](const json& v) { cls.query = v.get<std::string>(); });
        cls_merge.bind("h", o3, [&](const json& v) { cls.h = v.get<double>(); });
        cls_merge.bind("auto-h", o4, [&](const json& v) { cls.auto_h = v.get<bool>(); });
        cls_merge.bind("gamma", o5, [&](const json& v) { cls.gamma = v.get<double>(); });
        cls_merge.bind("d", o6, [&](const json& v) { cls.d = v.get<double>(); });
        cls_merge.bind("metric", o7, [&](const json& v) { cls.metric = v.get<std::string>(); });
        cls_merge.bind("seed", o8, [&](const json& v) { cls.seed = v.get<std::uint64_t>(); });
        cls_merge.bind("out", o9, [&](const json& v) { cls.out = v.get<std::string>(); });
        sub->callback([&] {
            cls_merge.apply(cls_config);
            cls.seed = resolve_seed(cls_merge, cls.seed);
            runner = [&] { return run_classify(cls); };
        });
    }

    LowerboundParams low;
    std::string low_config;
    ConfigMerger low_merge;
    {
        auto* sub = app.add_subcommand("lowerbound", "construct and audit hard instance families");
        auto* o1 = sub->add_option("--mode", low.mode, "regression or classification");
        auto* o2 = sub->add_option("--input", low.input, "dataset CSV (the point pool)");
        auto* o3 = sub->add_option("--delta-n", low.delta_n, "packing separation");
        auto* o4 = sub->add_option("--kappa", low.kappa, "total-variation gap (classification)");
        auto* o5 = sub->add_option("--beta", low.beta, "Hölder exponent");
        auto* o6 = sub->add_option("--C", low.C, "Hölder constant");
        auto* o7 = sub->add_option("--d", low.d, "bump amplitude (regression; default auto)");
        auto* o8 = sub->add_option("--metric", low.metric, "sup, l1, l2 or lp:<p>");
        auto* o9 = sub->add_option("--seed", low.seed, "rng seed (recorded in the meta)");
        auto* o10 = sub->add_option("--out", low.out, "output JSON path (default stdout)");
        sub->add_option("--config", low_config, "JSON config file (flags win)");
        low_merge.bind("mode", o1, [&](const json& v) { low.mode = v.get<std::string>(); });
        low_merge.bind("input", o2, [&](const json& v) { low.input = v.get<std::string>(); });
        low_merge.bind("delta-n", o3, [&](const json& v) { low.delta_n = v.get<double>(); });
        low_merge.bind("kappa", o4, [&](const json& v) { low.kappa = v.get<double>(); });
        low_merge.bind("beta", o5, [&](const json& v) { low.beta = v.get<double>(); });
        low_merge.bind("C", o6, [&](const json& v) { low.C = v.get<double>(); });
        low_merge.bind("d", o7, [&](const json& v) { low.d = v.get<double>(); });
        low_merge.bind("metric", o8, [&](const json& v) { low.metric = v.get<std::string>(); });
        low_merge.bind("seed", o9, [&](const json& v) { low.seed = v.get<std::uint64_t>(); });
        low_merge.bind("out", o10, [&](const json& v) { low.out = v.get<std::string>(); });
        sub->callback([&] {
            low_merge.apply(low_config);
            low.seed = resolve_seed(low_merge, low.seed);
            runner = [&] { return run_lowerbound(low); };
        });
    }

    RiskParams rsk;
    std::string rsk_config;
    ConfigMerger rsk_merge;
    {
        auto* sub = app.add_subcommand("risk", "Monte Carlo risk report over a grid of n");
        auto* o1 = sub->add_option("--instance", rsk.instance, "instance JSON file");
        auto* o2 = sub->add_option("--task", rsk.task, "regress, classify or pointwise");
        auto* o3 = sub->add_option("--n-list", rsk.n_list, "comma list of sample sizes")
                       ->delimiter(',');
        auto* o4 = sub->add_option("--reps", rsk.reps, "replications per cell");
        auto* o5 = sub->add_option("--seed", rsk.seed, "master seed");
        auto* o6 = sub->add_option("--gamma", rsk.gamma, "tuning gamma (default from instance)");
        auto* o7 = sub->add_option("--d", rsk.d, "tuning d (default from instance)");
        auto* o8 = sub->add_option("--eta", rsk.eta, "tuning eta (default from instance)");
        auto* o9 = sub->add_option("--x", rsk.x, "support point index for --task pointwise");
        auto* o10 = sub->add_option("--threads", rsk.threads, "parallel replications (default 1)");
        auto* o11 = sub->add_option("--svg", rsk.svg, "also write an SVG line chart");
        auto* o12 = sub->add_option("--out", rsk.out, "output CSV path (default stdout)");
        sub->add_option("--config", rsk_config, "JSON config file (flags win)");
        rsk_merge.bind("instance", o1, [&](const json& v) { rsk.instance = v.get<std::string>(); });
        rsk_merge.bind("task", o2, [&](const json& v) { rsk.task = v.get<std::string>(); });
        rsk_merge.bind("n-list", o3,
                       [&](const json& v) { rsk.n_list = v.get<std::vector<std::size_t>>(); });
        rsk_merge.bind("reps", o4, [&](const json& v) { rsk.reps = v.get<std::size_t>(); });
        rsk_merge.bind("seed", o5, [&](const json& v) { rsk.seed = v.get<std::uint64_t>(); });
        rsk_merge.bind("gamma", o6, [&](const json& v) { rsk.gamma = v.get<double>(); });
        rsk_merge.bind("d", o7, [&](const json& v) { rsk.d = v.get<double>(); });
        rsk_merge.bind("eta", o8, [&](const json& v) { rsk.eta = v.get<double>(); });
        rsk_merge.bind("x", o9, [&](const json& v) { rsk.x = v.get<std::size_t>(); });
        rsk_merge.bind("threads", o10, [&](const json& v) { rsk.threads = v.get<unsigned>(); });
        rsk_merge.bind("svg", o11, [&](const json& v) { rsk.svg = v.get<std::string>(); });
        rsk_merge.bind("out", o12, [&](const json& v) { rsk.out = v.get<std::string>(); });
        sub->callback([&] {
            rsk_merge.apply(rsk_config);
            rsk.seed = resolve_seed(rsk_merge, rsk.seed);
            runner = [&] { return run_risk(rsk); };
        });
    }

    RateParams rat;
    std::string rat_config;
    ConfigMerger rat_merge;
    {
        auto* sub = app.add_subcommand("rate", "fit the log-log risk slope of a report");
        auto* o1 = sub->add_option("--report", rat.report, "risk report CSV");
        auto* o2 = sub->add_option("--beta", rat.beta, "Hölder exponent");
        auto* o3 = sub->add_option("--gamma", rat.gamma, "entropy exponent");
        auto* o4 = sub->add_option("--kind", rat.kind, "regression or classification");
        auto* o5 = sub->add_option("--seed", rat.seed, "rng seed (recorded in the meta)");
        auto* o6 = sub->add_option("--out", rat.out, "output JSON path (default stdout)");
        sub->add_option("--config", rat_config, "JSON config file (flags win)");
        rat_merge.bind("report", o1, [&](const json& v) { rat.report = v.get<std::string>(); });
        rat_merge.bind("beta", o2, [&](const json& v) { rat.beta = v.get<double>(); });
        rat_merge.bind("gamma", o3, [&](const json& v) { rat.gamma = v.get<double>(); });
        rat_merge.bind("kind", o4, [&](const json& v) { rat.kind = v.get<std::string>(); });
        rat_merge.bind("seed", o5, [&](const json& v) { rat.seed = v.get<std::uint64_t>(); });
        rat_merge.bind("out", o6, [&](const json& v) { rat.out = v.get<std::string>(); });
        sub->callback([&] {
            rat_merge.apply(rat_config);
            rat.seed = resolve_seed(rat_merge, rat.seed);
            runner = [&] { return run_rate(rat); };
        });
    }

    try {
        app.parse(argc, argv);
        return runner ? runner() : 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << mel::kToolName << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << mel::kToolName << ": " << e.what() << "\n";
        return 3;
    }
}
