// Integration tests that drive the installed `feel` binary end to end.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef FEEL_CLI_PATH
#error "FEEL_CLI_PATH must point at the feel executable"
#endif

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("feel_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_command(const std::string& args, const std::string& log) {
    const std::string cmd =
        std::string(FEEL_CLI_PATH) + " " + args + " >" + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kSmokeConfig = R"([simulation]
num_workers = 4
participants_per_round = 2
rounds = 2
deadline_s = 0.5
master_seed = 11

[trainer]
epochs = 2
threshold = 0.8
batch_size = 16

[channel]
num_antennas = 4
interference = off

[worker]
p_min_dbm = -60
p_max_dbm = 20

[model]
hidden_width = 8

[data]
source = synthetic
classes = 3
input_dim = 6
samples_per_class = 30
)";

}  // namespace

TEST_CASE("cli run: writes metrics and is byte-deterministic") {
    TempDir tmp;
    {
        std::ofstream cfg(tmp.file("exp.ini"));
        cfg << kSmokeConfig;
    }
    const int rc1 = run_command("run --config " + tmp.file("exp.ini") + " --out-dir " +
                                    tmp.file("a") + " --quiet",
                                tmp.file("log1"));
    REQUIRE(rc1 == 0);
    const int rc2 = run_command("run --config " + tmp.file("exp.ini") + " --out-dir " +
                                    tmp.file("b") + " --quiet",
                                tmp.file("log2"));
    REQUIRE(rc2 == 0);

    const std::string a = slurp(tmp.file("a") + "/metrics.csv");
    const std::string b = slurp(tmp.file("b") + "/metrics.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);
    CHECK(fs::exists(tmp.file("a") + "/summary.txt"));
    CHECK(a.rfind("round,worker_id,iota,", 0) == 0);
}

TEST_CASE("cli run: --seed overrides the config seed") {
    TempDir tmp;
    {
        std::ofstream cfg(tmp.file("exp.ini"));
        cfg << kSmokeConfig;
    }
    REQUIRE(run_command("run --config " + tmp.file("exp.ini") + " --out-dir " + tmp.file("a") +
                            " --quiet",
                        tmp.file("l1")) == 0);
    REQUIRE(run_command("run --config " + tmp.file("exp.ini") + " --out-dir " + tmp.file("b") +
                            " --seed 999 --quiet",
                        tmp.file("l2")) == 0);
    CHECK(slurp(tmp.file("a") + "/metrics.csv") != slurp(tmp.file("b") + "/metrics.csv"));
}

TEST_CASE("cli run: config errors exit 1 and name the problem") {
    TempDir tmp;
    {
        std::ofstream cfg(tmp.file("bad.ini"));
        cfg << "[simulation]\nnum_wrkrs = 2\n";
    }
    const int rc =
        run_command("run --config " + tmp.file("bad.ini"), tmp.file("log"));
    CHECK(rc == 1);
    CHECK(slurp(tmp.file("log")).find("num_wrkrs") != std::string::npos);
}

TEST_CASE("cli run: missing dataset file exits 1 and names the path") {
    TempDir tmp;
    {
        std::ofstream cfg(tmp.file("idx.ini"));
        cfg << "[data]\nsource = idx\n"
            << "train_images = " << tmp.file("missing-images.idx") << "\n"
            << "train_labels = " << tmp.file("missing-labels.idx") << "\n"
            << "test_images = " << tmp.file("missing-images.idx") << "\n"
            << "test_labels = " << tmp.file("missing-labels.idx") << "\n";
    }
    const int rc = run_command("run --config " + tmp.file("idx.ini"), tmp.file("log"));
    CHECK(rc == 1);
    CHECK(slurp(tmp.file("log")).find("missing-images.idx") != std::string::npos);
}

TEST_CASE("cli allocate: exit code reflects feasibility") {
    TempDir tmp;
    const int feasible = run_command(
        "allocate --beta 2000 --p-min-dbm -60 --quiet", tmp.file("log1"));
    CHECK(feasible == 0);

    // deadline far below rho / f_max
    const int infeasible = run_command(
        "allocate --beta 2000 --deadline-s 0.001 --num-samples 5000", tmp.file("log2"));
    CHECK(infeasible == 2);
    CHECK(slurp(tmp.file("log2")).find("DEADLINE") != std::string::npos);
}

TEST_CASE("cli allocate: printed split adds up to the deadline") {
    TempDir tmp;
    REQUIRE(run_command("allocate --beta 2000 --p-min-dbm -60 --deadline-s 0.5",
                        tmp.file("log")) == 0);
    const std::string out = slurp(tmp.file("log"));
    double t_up = -1.0, t_cmp = -1.0;
    std::istringstream in(out);
    std::string key, eq;
    double value;
    while (in >> key >> eq >> value) {
        if (key == "t_up_s") t_up = value;
        if (key == "t_cmp_s") t_cmp = value;
    }
    REQUIRE(t_up >= 0.0);
    REQUIRE(t_cmp >= 0.0);
    CHECK(t_up + t_cmp == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("cli sweep: threshold 1.0 row matches the baseline row") {
    TempDir tmp;
    {
        std::ofstream cfg(tmp.file("exp.ini"));
        cfg << kSmokeConfig;
    }
    REQUIRE(run_command("sweep --config " + tmp.file("exp.ini") + " --out-dir " + tmp.file("s") +
                            " --thresholds 1.0 --quiet",
                        tmp.file("log")) == 0);
    std::ifstream in(tmp.file("s") + "/sweep_summary.csv");
    std::string header, baseline, theta1;
    std::getline(in, header);
    std::getline(in, baseline);
    std::getline(in, theta1);
    REQUIRE(!baseline.empty());
    REQUIRE(!theta1.empty());

    // cum_energy, final_acc and final_loss columns must agree exactly
    auto field = [](const std::string& row, int idx) {
        std::istringstream ss(row);
        std::string f;
        for (int i = 0; i <= idx; ++i) std::getline(ss, f, ',');
        return f;
    };
    for (int col : {2, 3, 4}) CHECK(field(baseline, col) == field(theta1, col));
    CHECK(field(theta1, 5) == "0");  // energy reduction of an identical run
    // per-run metrics files exist
    CHECK(fs::exists(tmp.file("s") + "/metrics_baseline.csv"));
    CHECK(fs::exists(tmp.file("s") + "/metrics_theta_1.csv"));
    CHECK(fs::exists(tmp.file("s") + "/sweep_curves.csv"));
}

TEST_CASE("cli oracle: gradient suite passes quickly") {
    TempDir tmp;
    CHECK(run_command("oracle gradient --quiet", tmp.file("log")) == 0);
}

TEST_CASE("cli: unknown oracle suite fails") {
    TempDir tmp;
    CHECK(run_command("oracle bogus", tmp.file("log")) == 1);
}
