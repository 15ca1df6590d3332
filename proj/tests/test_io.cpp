#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "test_support.hpp"

using namespace mel;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / "mel_io_test";
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("double formatting round trips") {
    Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        const double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform(-12.0, 12.0));
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(0.25) == "0.25");
    CHECK(parse_double("  1.5") == 1.5);
    CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
}

TEST_CASE("config hashing is stable") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") != fnv1a("b"));
    CHECK(hex64(0) == "0000000000000000");
    CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("metric strings") {
    CHECK(parse_metric("sup").kind == MetricSpec::Kind::Supremum);
    CHECK(parse_metric("l1").p == 1.0);
    CHECK(parse_metric("l2").p == 2.0);
    CHECK(parse_metric("lp:1.7").p == 1.7);
    CHECK_THROWS_AS(parse_metric("cosine"), std::invalid_argument);
    CHECK_THROWS_AS(parse_metric("lp:0.5"), std::invalid_argument);
    CHECK(metric_to_string(MetricSpec::lp(1.7)) == "lp:1.7");
}

TEST_CASE("table CSV round trip") {
    TempDir tmp;
    Table t;
    t.grid = {0.0, 0.25, 1.0};
    t.rows = {{1.0, 2.0, 3.0}, {-0.5, 0.125, 4.5}};
    SUBCASE("plain dataset") {
        write_table_csv(tmp.file("a.csv"), t, "# header line");
        const auto back = read_table_csv(tmp.file("a.csv"));
        CHECK(back.grid == t.grid);
        CHECK(back.rows == t.rows);
        CHECK(!back.leading_name);
    }
    SUBCASE("leading response column") {
        t.leading_name = "y";
        t.leading = {7.0, 8.0};
        write_table_csv(tmp.file("b.csv"), t, "# header line");
        const auto back = read_table_csv(tmp.file("b.csv"));
        CHECK(back.leading_name == std::optional<std::string>("y"));
        CHECK(back.leading == t.leading);
        CHECK(back.rows == t.rows);
    }
    SUBCASE("width mismatches are rejected") {
        write_text_file(tmp.file("c.csv"), "0,0.5,1\n1,2\n");
        CHECK_THROWS_AS(read_table_csv(tmp.file("c.csv")), std::runtime_error);
    }
    SUBCASE("missing files are runtime errors") {
        CHECK_THROWS_AS(read_table_csv(tmp.file("missing.csv")), std::runtime_error);
    }
}

TEST_CASE("profile CSV round trip") {
    TempDir tmp;
    EntropyProfile p;
    p.radii = {0.5, 0.25};
    p.counts = {3, 9};
    p.modes = {CountMode::Exact, CountMode::GreedyUpper};
    write_profile_csv(tmp.file("p.csv"), p, "# meta");
    const auto back = read_profile_csv(tmp.file("p.csv"));
    CHECK(back.radii == p.radii);
    CHECK(back.counts == p.counts);
    CHECK(back.modes == p.modes);
}

TEST_CASE("instance JSON loading") {
    TempDir tmp;
    nlohmann::json j;
    j["metric"] = "sup";
    j["grid"] = {0.0, 0.5, 1.0};
    j["points"] = {{0.0, 0.0, 0.0}, {0.4, 0.4, 0.4}, {1.0, 1.0, 1.0}};
    j["beta"] = 1.0;
    j["C"] = 2.0;
    j["design"] = {{"support", {0, 1, 2}}, {"weights", {0.25, 0.5, 0.25}}};
    j["g"] = {{"kind", "scaled_mean"}, {"scale", 1.5}};
    j["noise"] = {{"family", "uniform"}, {"halfwidth", 0.3}};
    j["px"] = {{"support", {0, 1}}, {"weights", {0.5, 0.5}}};
    j["py"] = {{"support", {1, 2}}, {"weights", {0.5, 0.5}}};
    j["kappa"] = 0.25;
    j["w"] = 0.4;
    j["tuning"] = {{"gamma", 1.0}, {"d", 0.5}, {"eta", 0.2}};
    j["envelope"] = {{"gamma", 1.0}, {"c_high", 0.3}};
    write_text_file(tmp.file("inst.json"), j.dump());

    const auto loaded = load_instance_json(tmp.file("inst.json"));
    CHECK(loaded.points.size() == 3);
    CHECK(loaded.smoothness.C == 2.0);
    REQUIRE(loaded.tuning.has_value());
    CHECK(loaded.tuning->d == 0.5);
    REQUIRE(loaded.envelope.has_value());
    CHECK(loaded.envelope->c_high == 0.3);

    const auto reg = loaded.regression();
    CHECK(reg.g_value(1) == doctest::Approx(0.6));  // 1.5 * mean of the 0.4 constant
    CHECK(reg.noise().family() == NoiseSpec::Family::Uniform);

    const auto cls = loaded.classification();
    CHECK(cls.kappa() == 0.25);
    CHECK(cls.label_probability() == 0.4);
    CHECK(cls.density_px(0) == 1.0);
    CHECK(cls.density_px(1) == doctest::Approx(0.5));

    SUBCASE("regression map kinds") {
        auto constant = make_regression_map({{"kind", "constant"}, {"value", 0.7}}, loaded.points);
        CHECK(constant(loaded.points.point(0)) == 0.7);
        auto dist = make_regression_map(
            {{"kind", "dist_to_anchor"}, {"anchor", 0}, {"scale", 2.0}, {"exponent", 1.0}},
            loaded.points);
        CHECK(dist(loaded.points.point(2)) == doctest::Approx(2.0));
        CHECK_THROWS_AS(make_regression_map({{"kind", "mystery"}}, loaded.points),
                        std::invalid_argument);
    }
    SUBCASE("classification block is required for classification()") {
        nlohmann::json j2 = j;
        j2.erase("px");
        write_text_file(tmp.file("inst2.json"), j2.dump());
        const auto partial = load_instance_json(tmp.file("inst2.json"));
        CHECK_THROWS_AS(partial.classification(), std::invalid_argument);
        CHECK_NOTHROW(partial.regression());
    }
}
