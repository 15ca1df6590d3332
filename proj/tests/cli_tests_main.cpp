// Contract tests for the melab binary: exit codes, config-file semantics,
// output fixtures. Invoked as: cli_tests <path-to-melab>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include "mel/io.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;
int g_checks = 0;

void check(bool ok, const std::string& what) {
    ++g_checks;
    if (!ok) {
        ++g_failures;
        std::cout << "FAIL: " << what << "\n";
    }
}

struct Harness {
    std::string bin;
    fs::path dir;

    explicit Harness(std::string binary) : bin(std::move(binary)) {
        dir = fs::temp_directory_path() / "melab_cli_tests";
        fs::remove_all(dir);
        fs::create_directories(dir);
    }

    std::string file(const std::string& name) const { return (dir / name).string(); }

    int run(const std::string& args, const std::string& extra_env = "") const {
        const std::string cmd = "cd '" + dir.string() + "' && " + extra_env + " '" + bin + "' " +
                                args + " > cli_stdout.txt 2> cli_stderr.txt";
        const int status = std::system(cmd.c_str());
        if (status == -1) return -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string stdout_text() const { return mel::read_text_file(file("cli_stdout.txt")); }
};

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-melab>\n";
        return 2;
    }
    Harness h(fs::absolute(argv[1]).string());

    // --- exit code contract -----------------------------------------------------
    check(h.run("--help") == 0, "--help exits 0");
    check(h.run("") == 2, "missing subcommand exits 2");
    check(h.run("frobnicate") == 2, "unknown subcommand exits 2");
    check(h.run("generate --class lipschitz --n 5 --grid 9 --seed 1 --out d.csv") == 0,
          "generate exits 0");
    check(h.run("generate --class cubic --n 5 --grid 9 --seed 1 --out d.csv") == 2,
          "unknown class exits 2");
    check(h.run("regress --train missing.csv --query d.csv --gamma 1 --d 1 --eta 0.25") == 3,
          "missing input file exits 3");
    check(h.run("entropy --input d.csv --metric cosine --radii 0.5") == 2,
          "unknown metric exits 2");

    // eta outside (0, 1/2) names the domain and exits 2
    mel::write_text_file(h.file("train.csv"), "y,0,0.5,1\n1,0,0,0\n2,1,1,1\n");
    mel::write_text_file(h.file("query.csv"), "0,0.5,1\n0.4,0.4,0.4\n");
    check(h.run("regress --train train.csv --query query.csv --gamma 1 --d 1 --eta 0.7") == 2,
          "eta = 0.7 exits 2");
    check(mel::read_text_file(h.file("cli_stderr.txt")).find("(0, 1/2)") != std::string::npos,
          "eta error names the (0, 1/2) domain");

    // --- config files: unknown keys refused, flags win ---------------------------
    mel::write_text_file(h.file("good.json"),
                         "{\"class\":\"monotone\",\"n\":4,\"grid\":9,\"seed\":5,\"out\":\"m.csv\"}");
    check(h.run("generate --config good.json") == 0, "config-driven generate exits 0");
    check(mel::read_table_csv(h.file("m.csv")).rows.size() == 4, "config n honored");
    check(h.run("generate --config good.json --n 6") == 0, "flag override accepted");
    check(mel::read_table_csv(h.file("m.csv")).rows.size() == 6, "flags win over config");
    mel::write_text_file(h.file("bad.json"), "{\"n\":4,\"bogus\":1}");
    check(h.run("generate --config bad.json --class monotone --grid 9 --out m.csv") == 2,
          "unknown config key exits 2");

    // --- seed fallback from the environment --------------------------------------
    check(h.run("generate --class monotone --n 3 --grid 9 --out e.csv",
                "METRIC_ENTROPY_LAB_SEED=77") == 0,
          "env seed accepted");
    check(mel::read_text_file(h.file("e.csv")).find("seed=77") != std::string::npos,
          "env seed lands in the output header");
    check(h.run("generate --class monotone --n 3 --grid 9 --seed 8 --out e.csv",
                "METRIC_ENTROPY_LAB_SEED=77") == 0,
          "explicit seed accepted");
    check(mel::read_text_file(h.file("e.csv")).find("seed=8") != std::string::npos,
          "explicit seed beats the environment");

    // --- entropy fixture: three constants, radii 1.5 and 0.75 --------------------
    mel::write_text_file(h.file("three.csv"), "0,1\n0,0\n1,1\n2,2\n");
    check(h.run("entropy --input three.csv --metric sup --radii 1.5,0.75 --intrinsic") == 0,
          "entropy fixture runs");
    {
        const auto text = h.stdout_text();
        check(text.find("1.5,1,exact") != std::string::npos, "count 1 at radius 1.5");
        check(text.find("0.75,3,exact") != std::string::npos, "count 3 at radius 0.75");
    }

    // --- classify label validation ------------------------------------------------
    mel::write_text_file(h.file("ctrain.csv"), "label,0,0.5,1\n0,0,0,0\n2,1,1,1\n");
    check(h.run("classify --train ctrain.csv --query query.csv --h 0.5") == 2,
          "non-binary labels exit 2");

    // --- risk on a tiny instance, threads do not change bytes ----------------------
    {
        nlohmann::json inst;
        inst["metric"] = "sup";
        inst["grid"] = {0.0, 0.5, 1.0};
        inst["points"] = {{0.0, 0.0, 0.0}, {0.3, 0.3, 0.3}, {0.9, 0.9, 0.9}};
        inst["beta"] = 1.0;
        inst["C"] = 2.0;
        inst["design"] = {{"support", {0, 1, 2}}, {"weights", {0.25, 0.5, 0.25}}};
        inst["g"] = {{"kind", "scaled_mean"}, {"scale", 1.0}};
        inst["noise"] = {{"family", "gaussian"}, {"sd", 0.2}};
        inst["tuning"] = {{"gamma", 1.0}, {"d", 1.0}, {"eta", 0.25}};
        mel::write_text_file(h.file("inst.json"), inst.dump());
        check(h.run("risk --instance inst.json --task regress --n-list 50,100 --reps 10 --seed 3 "
                    "--out r1.csv") == 0,
              "risk runs");
        check(h.run("risk --instance inst.json --task regress --n-list 50,100 --reps 10 --seed 3 "
                    "--out r2.csv --threads 4") == 0,
              "risk runs threaded");
        check(mel::read_text_file(h.file("r1.csv")) == mel::read_text_file(h.file("r2.csv")),
              "thread count does not change the report");
        check(h.run("risk --instance inst.json --task regress --n-list 50,100 --reps 10 --seed 3 "
                    "--out r3.csv --svg r.svg") == 0,
              "risk svg runs");
        check(mel::read_text_file(h.file("r.svg")).find("<svg") != std::string::npos,
              "svg chart is emitted");
        check(h.run("risk --instance inst.json --task classify --n-list 50 --reps 5 --seed 3") == 2,
              "classification task without px/py exits 2");
    }

    std::cout << "cli_tests: " << (g_checks - g_failures) << "/" << g_checks << " checks passed\n";
    return g_failures == 0 ? 0 : 1;
}
