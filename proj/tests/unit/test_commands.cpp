#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tricrystal/commands.hpp"

using namespace tricrystal;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
        unsetenv(kOutDirEnv);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& body) {
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int data_rows(const std::string& csv) {
    int rows = 0;
    std::istringstream is(csv);
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

const char* kMinimalHead = R"(sim.N = 5
sim.beta = 50
sim.m = 20
potential.kind = quadratic
potential.kappa = 100
run.seed = 1
run.burn_in = 100
run.thin = 10
)";

const std::string kMinimal = std::string(kMinimalHead) + "run.sweeps = 1000\n";

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("minimal simulation writes the expected artifacts") {
    TempDir tmp("tricrystal_cmd_minimal");
    const auto cfg = write_config(tmp.path, "run.cfg", std::string(kMinimal) + "out.dir = out\n");
    std::ostringstream out, err;
    CHECK(cmd_simulate(cfg, {}, out, err) == kExitOk);
    const std::string csv = slurp(tmp.path / "out" / "samples.csv");
    CHECK(data_rows(csv) == 100);
    CHECK(csv.find("step,bond_dev_sq,jac_dev_sq,rigidity_sum,defect_count,energy_gap\n") != std::string::npos);
    CHECK(csv.find("# seed=1\n") != std::string::npos);
    CHECK(csv.find("# version=") != std::string::npos);
    CHECK(csv.find("# sim.beta=50\n") != std::string::npos);
    CHECK(csv.find("# wall_clock=") != std::string::npos);
    CHECK(csv.back() == '\n');

    const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "summary.json"));
    CHECK(summary["chains"][0]["rows"] == 100);
    CHECK(summary["chains"][0]["complete"] == true);
    CHECK(fs::exists(tmp.path / "out" / "checkpoint.txt"));
}

TEST_CASE("identical runs produce identical CSV bytes apart from wall clock") {
    TempDir tmp("tricrystal_cmd_repro");
    const auto a = write_config(tmp.path, "a.cfg", std::string(kMinimal) + "out.dir = a\n");
    const auto b = write_config(tmp.path, "b.cfg", std::string(kMinimal) + "out.dir = a\n");
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(a, {}, out, err) == kExitOk);
    const std::string first = slurp(tmp.path / "a" / "samples.csv");
    REQUIRE(cmd_simulate(b, {}, out, err) == kExitOk);
    const std::string second = slurp(tmp.path / "a" / "samples.csv");
    CHECK(strip_wall_clock(first) == strip_wall_clock(second));
}

TEST_CASE("resume from checkpoint reproduces the uninterrupted run") {
    TempDir tmp("tricrystal_cmd_resume");
    const std::string base = std::string(kMinimal) + "run.checkpoint_every = 50\n";
    const auto whole = write_config(tmp.path / "whole", "run.cfg", base + "out.dir = out\n");
    const auto parts = write_config(tmp.path / "parts", "run.cfg", base + "out.dir = out\n");
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(whole, {}, out, err) == kExitOk);
    REQUIRE(cmd_simulate(parts, {false, 437}, out, err) == kExitOk);
    const auto partial = nlohmann::json::parse(slurp(tmp.path / "parts" / "out" / "summary.json"));
    CHECK(partial["chains"][0]["complete"] == false);
    CHECK(partial["chains"][0]["sweeps"] == 437);
    REQUIRE(cmd_simulate(parts, {true, 0}, out, err) == kExitOk);
    CHECK(strip_wall_clock(slurp(tmp.path / "whole" / "out" / "samples.csv")) ==
          strip_wall_clock(slurp(tmp.path / "parts" / "out" / "samples.csv")));
    CHECK(slurp(tmp.path / "whole" / "out" / "checkpoint.txt") == slurp(tmp.path / "parts" / "out" / "checkpoint.txt"));
}

TEST_CASE("resume tolerates rows written after the last checkpoint") {
    TempDir tmp("tricrystal_cmd_crash");
    const std::string base = std::string(kMinimal) + "run.checkpoint_every = 100\n";
    const auto whole = write_config(tmp.path / "whole", "run.cfg", base + "out.dir = out\n");
    const auto parts = write_config(tmp.path / "parts", "run.cfg", base + "out.dir = out\n");
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(whole, {}, out, err) == kExitOk);
    REQUIRE(cmd_simulate(parts, {false, 300}, out, err) == kExitOk);
    // Simulate a crash: checkpoint from sweep 300, CSV with extra rows appended.
    const std::string ckpt = slurp(tmp.path / "parts" / "out" / "checkpoint.txt");
    REQUIRE(cmd_simulate(parts, {true, 350}, out, err) == kExitOk);
    std::ofstream(tmp.path / "parts" / "out" / "checkpoint.txt", std::ios::binary) << ckpt;
    REQUIRE(cmd_simulate(parts, {true, 0}, out, err) == kExitOk);
    CHECK(strip_wall_clock(slurp(tmp.path / "whole" / "out" / "samples.csv")) ==
          strip_wall_clock(slurp(tmp.path / "parts" / "out" / "samples.csv")));
}

TEST_CASE("multiple chains write separate files") {
    TempDir tmp("tricrystal_cmd_chains");
    const auto cfg = write_config(tmp.path, "run.cfg",
                                  std::string(kMinimalHead) + "run.chains = 2\nrun.sweeps = 200\nout.dir = out\n");
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(cfg, {}, out, err) == kExitOk);
    const std::string c0 = slurp(tmp.path / "out" / "samples_chain0.csv");
    const std::string c1 = slurp(tmp.path / "out" / "samples_chain1.csv");
    CHECK(data_rows(c0) == 20);
    CHECK(data_rows(c1) == 20);
    CHECK(c0 != c1);
}

TEST_CASE("output directory override by environment") {
    TempDir tmp("tricrystal_cmd_env");
    const auto cfg = write_config(tmp.path, "run.cfg", std::string(kMinimalHead) + "run.sweeps = 100\nout.dir = ignored\n");
    setenv(kOutDirEnv, (tmp.path / "env_out").c_str(), 1);
    std::ostringstream out, err;
    CHECK(cmd_simulate(cfg, {}, out, err) == kExitOk);
    unsetenv(kOutDirEnv);
    CHECK(fs::exists(tmp.path / "env_out" / "samples.csv"));
    CHECK_FALSE(fs::exists(tmp.path / "ignored"));
}

TEST_CASE("invalid configurations exit with the validation code") {
    TempDir tmp("tricrystal_cmd_invalid");
    const auto bad_l = write_config(tmp.path, "bad.cfg", "sim.N = 5\nsim.alpha = 0.1\nsim.l = 1.1\n");
    std::ostringstream out, err;
    CHECK(cmd_simulate(bad_l, {}, out, err) == kExitValidation);
    CHECK(err.str().find("bad.cfg:3: ") != std::string::npos);
    CHECK(err.str().find("assumption-3") != std::string::npos);
    std::ostringstream err2;
    CHECK(cmd_simulate(tmp.path / "missing.cfg", {}, out, err2) == kExitValidation);
    std::ostringstream err3;
    CHECK(cmd_verify(bad_l, out, err3) == kExitValidation);
}

TEST_CASE("resume without a checkpoint is a runtime failure") {
    TempDir tmp("tricrystal_cmd_nockpt");
    const auto cfg = write_config(tmp.path, "run.cfg", std::string(kMinimal) + "out.dir = out\n");
    std::ostringstream out, err;
    CHECK(cmd_simulate(cfg, {true, 0}, out, err) == kExitRuntime);
}

TEST_CASE("verify passes on a small suite and fails under fault injection") {
    TempDir tmp("tricrystal_cmd_verify");
    const std::string small = R"(verify.sizes = 5,6
verify.configs = 60
verify.sampled = 20
verify.sampled_burn_in = 50
verify.synthetic = 5000
verify.fjm_sizes = 5,8
verify.fjm_samples = 50
out.dir = out
)";
    const auto ok = write_config(tmp.path, "ok.cfg", small);
    std::ostringstream out, err;
    CHECK(cmd_verify(ok, out, err) == kExitOk);
    const auto report = nlohmann::json::parse(slurp(tmp.path / "out" / "verify_report.json"));
    CHECK(report["passed"] == true);
    CHECK(report.dump().find("fitted_defect_constant") != std::string::npos);
    CHECK(report.dump().find("rigidity_constant") != std::string::npos);
    CHECK(report.dump().find("\"seed\"") != std::string::npos);

    const auto faulty = write_config(tmp.path, "fault.cfg", small + "verify.fault = boundary-sign\n");
    std::ostringstream out2, err2;
    const int code = cmd_verify(faulty, out2, err2);
    CHECK(code == kExitVerification);
    CHECK(out2.str().find("energy decomposition") != std::string::npos);
    CHECK(out2.str().find("FAIL") != std::string::npos);
}

TEST_CASE("scan emits one row per grid point") {
    TempDir tmp("tricrystal_cmd_scan");
    const auto few = write_config(tmp.path, "few.cfg", "scan.betas = 25,50,100\n");
    std::ostringstream out, err;
    CHECK(cmd_scan(few, out, err) == kExitValidation);
    CHECK(err.str().find("few.cfg:1: ") != std::string::npos);

    const auto cfg = write_config(tmp.path, "scan.cfg", R"(sim.N = 5
scan.betas = 25,50,100,200
scan.ms = 10,20
run.burn_in = 20
run.sweeps = 200
run.thin = 1
out.dir = out
)");
    CHECK(cmd_scan(cfg, out, err) == kExitOk);
    const std::string csv = slurp(tmp.path / "out" / "scan.csv");
    CHECK(data_rows(csv) == 8);
    CHECK(csv.find("acc_displace") != std::string::npos);
    CHECK(csv.find("tau") != std::string::npos);
    const auto summary = nlohmann::json::parse(slurp(tmp.path / "out" / "scan_summary.json"));
    CHECK(summary.contains("beta_trends"));
}

TEST_CASE("wall clock lines are the only ones stripped") {
    CHECK(strip_wall_clock("# a\n# wall_clock=123\nx,y\n") == "# a\nx,y\n");
}

}  // TEST_SUITE
