#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "tricrystal/run_config.hpp"

using namespace tricrystal;

namespace {

RunConfig load(const std::string& text) { return load_run_config(parse_config_text(text, "test.cfg")); }

std::string error_of(const std::string& text) {
    try {
        load(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("run_config") {

TEST_CASE("defaults and a full parse") {
    const auto d = load("");
    CHECK(d.n == 8);
    CHECK(d.spec.beta == 100.0);
    CHECK(d.spec.potential.kappa() == 100.0);
    CHECK(d.sampler.mix.displace == 0.9);
    CHECK(d.seed == 1);
    CHECK(d.effective.count("sim.N") == 1);

    const auto c = load(R"(# minimal run
sim.N = 5
sim.beta = 50     # inverse temperature
sim.m = 20
potential.kind = quadratic
potential.kappa = 100
moves.p_displace = 0.8
moves.p_create = 0.1
moves.p_annihilate = 0.1
moves.delta = 0.02
moves.rho = 0.01
moves.tune = false
run.sweeps = 1000
run.burn_in = 100
run.thin = 10
run.seed = 42
run.chains = 2
run.init = near-standard
run.init_r = 0.01
out.dir = results
verify.sizes = 5, 6
scan.betas = 25,50,100,200
scan.ms = 10,20,40
)");
    CHECK(c.n == 5);
    CHECK(c.spec.beta == 50.0);
    CHECK(c.sampler.mix.create == 0.1);
    CHECK(c.sampler.delta == 0.02);
    CHECK(c.sampler.rho == 0.01);
    CHECK_FALSE(c.sampler.tune);
    CHECK(c.run.sweeps == 1000);
    CHECK(c.run.burn_in == 100);
    CHECK(c.run.thin == 10);
    CHECK(c.seed == 42);
    CHECK(c.chains == 2);
    CHECK(c.init == "near-standard");
    CHECK(c.out_dir == "results");
    CHECK(c.verify.sizes == std::vector<int>{5, 6});
    CHECK(c.scan.betas == std::vector<double>{25, 50, 100, 200});
    CHECK(c.scan.ms == std::vector<double>{10, 20, 40});
    CHECK(c.effective.at("run.seed") == "42");
    CHECK(c.effective.at("sim.beta") == "50");
}

TEST_CASE("syntax errors are line anchored") {
    CHECK(error_of("sim.N = 5\njunk line\n").rfind("test.cfg:2: ", 0) == 0);
    CHECK(error_of("sim.N = 5\nsim.N = 6\n").rfind("test.cfg:2: duplicate key", 0) == 0);
    CHECK(error_of("\n\nsim.bogus = 1\n").rfind("test.cfg:3: unknown key", 0) == 0);
    CHECK(error_of("run.sweeps = ten\n").rfind("test.cfg:1: run.sweeps", 0) == 0);
    CHECK(error_of("run.sweeps = -5\n").rfind("test.cfg:1:", 0) == 0);
}

TEST_CASE("lattice spacing outside the allowed window names assumption 3") {
    const std::string msg = error_of("sim.alpha = 0.1\n# comment\nsim.l = 1.1\n");
    CHECK(msg.rfind("test.cfg:3: ", 0) == 0);
    CHECK(msg.find("assumption-3") != std::string::npos);
}

TEST_CASE("semantic validation") {
    CHECK(error_of("sim.N = 4\n").find("sim.N") != std::string::npos);
    CHECK(error_of("sim.beta = -1\n").rfind("test.cfg:1:", 0) == 0);
    CHECK(error_of("potential.kappa = 0\n").rfind("test.cfg:1:", 0) == 0);
    CHECK(error_of("moves.p_displace = 0.5\n").rfind("test.cfg:1:", 0) == 0);
    CHECK(error_of("moves.delta = 0\n").rfind("test.cfg:1:", 0) == 0);
    CHECK(error_of("run.thin = 0\n").rfind("test.cfg:1:", 0) == 0);
    CHECK(error_of("run.init = hot\n").rfind("test.cfg:1:", 0) == 0);
    CHECK(error_of("run.init = near-standard\nrun.init_r = 0.025\n").rfind("test.cfg:2:", 0) == 0);
    CHECK(error_of("verify.sizes = 4,5\n").rfind("test.cfg:1:", 0) == 0);
    CHECK(error_of("scan.betas = 10,0\n").rfind("test.cfg:1:", 0) == 0);
    CHECK_FALSE(error_of("potential.kind = tabulated\n").empty());
}

TEST_CASE("tabulated potential files resolve relative to the config") {
    const auto dir = std::filesystem::temp_directory_path() / "tricrystal_run_config_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream v(dir / "v.txt");
        for (int i = 0; i <= 12; ++i) {
            const double r = 0.85 + 0.025 * i;
            v << r << ' ' << 50 * (r - 1) * (r - 1) << '\n';
        }
        std::ofstream c(dir / "run.cfg");
        c << "potential.kind = tabulated\npotential.file = v.txt\n";
    }
    const auto cfg = load_run_config_file(dir / "run.cfg");
    CHECK(cfg.spec.potential.kind() == PotentialKind::tabulated);
    CHECK(cfg.spec.potential.value(1.05) == doctest::Approx(0.125).epsilon(1e-6));
    CHECK_THROWS_AS(load_run_config_file(dir / "missing.cfg"), ConfigError);
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
