#ifndef TRICRYSTAL_RUN_CONFIG_HPP
#define TRICRYSTAL_RUN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tricrystal/potential.hpp"
#include "tricrystal/sampler.hpp"

namespace tricrystal {

/// Invalid configuration file; the message is anchored as "path:line: ...".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigEntry {
    std::string value;
    int line = 0;
};

/// Flat key=value text. '#' starts a comment; blank lines are ignored;
/// keys are dotted names. Duplicate keys are an error.
struct RawConfig {
    std::string source;
    std::map<std::string, ConfigEntry> entries;
};

RawConfig parse_config_text(const std::string& text, const std::string& source);
RawConfig parse_config_file(const std::filesystem::path& path);

struct VerifyOptions {
    std::vector<int> sizes{5, 6, 8};
    int configs = 1000;          // random near-standard configs per size
    int max_defects = 3;
    int sampled = 200;           // sampler snapshots per size
    double sampled_beta = 100.0;
    double sampled_m = 0.0;      // low vacancy cost so snapshots contain holes
    int sampled_thin = 5;
    int sampled_burn_in = 200;
    long synthetic = 100000;
    std::vector<int> fjm_sizes{5, 8, 12};
    int fjm_samples = 1000;
    double tolerance = 1e-9;
    std::string fault = "none";  // none | boundary-sign
};

struct ScanOptions {
    std::vector<double> betas{25.0, 50.0, 100.0, 200.0};
    std::vector<double> ms;
};

struct RunConfig {
    std::string source;
    int n = 8;
    PotentialSpec spec;
    SamplerParams sampler;
    RunParams run;
    std::uint64_t seed = 1;
    int chains = 1;
    std::string init = "standard";  // standard | near-standard
    double init_r = 0.0;
    std::uint64_t checkpoint_every = 0;  // sweeps; 0 writes only at the end
    std::string out_dir = "out";
    VerifyOptions verify;
    ScanOptions scan;
    /// Every recognized key with its effective value, for artifact preambles.
    std::map<std::string, std::string> effective;
};

/// Parses and validates. Unknown keys, malformed values and potential
/// assumption failures raise ConfigError naming the offending line.
RunConfig load_run_config(const RawConfig& raw);
RunConfig load_run_config_file(const std::filesystem::path& path);

}  // namespace tricrystal

#endif  // TRICRYSTAL_RUN_CONFIG_HPP
