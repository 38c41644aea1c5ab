#include "tricrystal/run_config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace tricrystal {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string anchor(const std::string& source, int line) {
    return line > 0 ? source + ":" + std::to_string(line) + ": " : source + ": ";
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE) {
        throw std::invalid_argument("expected a number, got '" + s + "'");
    }
    return v;
}

std::int64_t parse_int(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno == ERANGE) {
        throw std::invalid_argument("expected an integer, got '" + s + "'");
    }
    return v;
}

std::uint64_t parse_count(const std::string& s) {
    const std::int64_t v = parse_int(s);
    if (v < 0) {
        throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
    }
    return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        return false;
    }
    throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& s, F parse) {
    std::vector<T> out;
    for (const std::string& item : split_list(s)) {
        out.push_back(static_cast<T>(parse(item)));
    }
    if (out.empty()) {
        throw std::invalid_argument("expected a comma-separated list");
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            out += ',';
        }
        if constexpr (std::is_floating_point_v<T>) {
            out += format_double(v[i]);
        } else {
            out += std::to_string(v[i]);
        }
    }
    return out;
}

struct Key {
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

struct PotentialChoice {
    std::string kind = "quadratic";
    double kappa = 100.0;
    std::string file;
};

std::vector<Key> keys(PotentialChoice& pot) {
    return {
        {"sim.N", [](RunConfig& c, const std::string& v) { c.n = static_cast<int>(parse_int(v)); },
         [](const RunConfig& c) { return std::to_string(c.n); }},
        {"sim.beta", [](RunConfig& c, const std::string& v) { c.spec.beta = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.spec.beta); }},
        {"sim.m", [](RunConfig& c, const std::string& v) { c.spec.m = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.spec.m); }},
        {"sim.l", [](RunConfig& c, const std::string& v) { c.spec.l = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.spec.l); }},
        {"sim.alpha", [](RunConfig& c, const std::string& v) { c.spec.alpha = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.spec.alpha); }},
        {"potential.kind",
         [&pot](RunConfig&, const std::string& v) {
             if (v != "quadratic" && v != "tabulated") {
                 throw std::invalid_argument("potential.kind must be quadratic or tabulated, got '" + v + "'");
             }
             pot.kind = v;
         },
         [&pot](const RunConfig&) { return pot.kind; }},
        {"potential.kappa", [&pot](RunConfig&, const std::string& v) { pot.kappa = parse_double(v); },
         [&pot](const RunConfig&) { return format_double(pot.kappa); }},
        {"potential.file", [&pot](RunConfig&, const std::string& v) { pot.file = v; },
         [&pot](const RunConfig&) { return pot.file; }},
        {"moves.p_displace", [](RunConfig& c, const std::string& v) { c.sampler.mix.displace = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.sampler.mix.displace); }},
        {"moves.p_create", [](RunConfig& c, const std::string& v) { c.sampler.mix.create = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.sampler.mix.create); }},
        {"moves.p_annihilate", [](RunConfig& c, const std::string& v) { c.sampler.mix.annihilate = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.sampler.mix.annihilate); }},
        {"moves.delta", [](RunConfig& c, const std::string& v) { c.sampler.delta = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.sampler.delta); }},
        {"moves.rho", [](RunConfig& c, const std::string& v) { c.sampler.rho = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.sampler.rho); }},
        {"moves.tune", [](RunConfig& c, const std::string& v) { c.sampler.tune = parse_bool(v); },
         [](const RunConfig& c) { return std::string(c.sampler.tune ? "true" : "false"); }},
        {"run.sweeps", [](RunConfig& c, const std::string& v) { c.run.sweeps = parse_count(v); },
         [](const RunConfig& c) { return std::to_string(c.run.sweeps); }},
        {"run.burn_in", [](RunConfig& c, const std::string& v) { c.run.burn_in = parse_count(v); },
         [](const RunConfig& c) { return std::to_string(c.run.burn_in); }},
        {"run.thin", [](RunConfig& c, const std::string& v) { c.run.thin = parse_count(v); },
         [](const RunConfig& c) { return std::to_string(c.run.thin); }},
        {"run.seed", [](RunConfig& c, const std::string& v) { c.seed = parse_count(v); },
         [](const RunConfig& c) { return std::to_string(c.seed); }},
        {"run.chains", [](RunConfig& c, const std::string& v) { c.chains = static_cast<int>(parse_int(v)); },
         [](const RunConfig& c) { return std::to_string(c.chains); }},
        {"run.init", [](RunConfig& c, const std::string& v) { c.init = v; },
         [](const RunConfig& c) { return c.init; }},
        {"run.init_r", [](RunConfig& c, const std::string& v) { c.init_r = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.init_r); }},
        {"run.checkpoint_every", [](RunConfig& c, const std::string& v) { c.checkpoint_every = parse_count(v); },
         [](const RunConfig& c) { return std::to_string(c.checkpoint_every); }},
        {"out.dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
         [](const RunConfig& c) { return c.out_dir; }},
        {"verify.sizes",
         [](RunConfig& c, const std::string& v) { c.verify.sizes = parse_list<int>(v, parse_int); },
         [](const RunConfig& c) { return join(c.verify.sizes); }},
        {"verify.configs", [](RunConfig& c, const std::string& v) { c.verify.configs = static_cast<int>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.verify.configs); }},
        {"verify.max_defects",
         [](RunConfig& c, const std::string& v) { c.verify.max_defects = static_cast<int>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.verify.max_defects); }},
        {"verify.sampled", [](RunConfig& c, const std::string& v) { c.verify.sampled = static_cast<int>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.verify.sampled); }},
        {"verify.sampled_beta", [](RunConfig& c, const std::string& v) { c.verify.sampled_beta = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.verify.sampled_beta); }},
        {"verify.sampled_m", [](RunConfig& c, const std::string& v) { c.verify.sampled_m = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.verify.sampled_m); }},
        {"verify.sampled_thin",
         [](RunConfig& c, const std::string& v) { c.verify.sampled_thin = static_cast<int>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.verify.sampled_thin); }},
        {"verify.sampled_burn_in",
         [](RunConfig& c, const std::string& v) { c.verify.sampled_burn_in = static_cast<int>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.verify.sampled_burn_in); }},
        {"verify.synthetic",
         [](RunConfig& c, const std::string& v) { c.verify.synthetic = static_cast<long>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.verify.synthetic); }},
        {"verify.fjm_sizes",
         [](RunConfig& c, const std::string& v) { c.verify.fjm_sizes = parse_list<int>(v, parse_int); },
         [](const RunConfig& c) { return join(c.verify.fjm_sizes); }},
        {"verify.fjm_samples",
         [](RunConfig& c, const std::string& v) { c.verify.fjm_samples = static_cast<int>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.verify.fjm_samples); }},
        {"verify.tolerance", [](RunConfig& c, const std::string& v) { c.verify.tolerance = parse_double(v); },
         [](const RunConfig& c) { return format_double(c.verify.tolerance); }},
        {"verify.fault",
         [](RunConfig& c, const std::string& v) {
             if (v != "none" && v != "boundary-sign") {
                 throw std::invalid_argument("verify.fault must be none or boundary-sign, got '" + v + "'");
             }
             c.verify.fault = v;
         },
         [](const RunConfig& c) { return c.verify.fault; }},
        {"scan.betas", [](RunConfig& c, const std::string& v) { c.scan.betas = parse_list<double>(v, parse_double); },
         [](const RunConfig& c) { return join(c.scan.betas); }},
        {"scan.ms", [](RunConfig& c, const std::string& v) { c.scan.ms = parse_list<double>(v, parse_double); },
         [](const RunConfig& c) { return join(c.scan.ms); }},
    };
}

}  // namespace

RawConfig parse_config_text(const std::string& text, const std::string& source) {
    RawConfig raw;
    raw.source = source;
    std::istringstream is(text);
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(anchor(source, number) + "expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(anchor(source, number) + "empty key");
        }
        const auto [it, inserted] = raw.entries.emplace(key, ConfigEntry{value, number});
        if (!inserted) {
            throw ConfigError(anchor(source, number) + "duplicate key '" + key + "' (first set on line " +
                              std::to_string(it->second.line) + ")");
        }
    }
    return raw;
}

RawConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open configuration file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

RunConfig load_run_config(const RawConfig& raw) {
    RunConfig cfg;
    cfg.source = raw.source;
    PotentialChoice pot;
    const std::vector<Key> table = keys(pot);

    auto line_of = [&raw](const std::string& key) {
        const auto it = raw.entries.find(key);
        return it == raw.entries.end() ? 0 : it->second.line;
    };
    auto fail = [&](const std::string& key, const std::string& message) {
        throw ConfigError(anchor(raw.source, line_of(key)) + message);
    };

    for (const auto& [key, entry] : raw.entries) {
        const Key* k = nullptr;
        for (const Key& candidate : table) {
            if (key == candidate.name) {
                k = &candidate;
            }
        }
        if (!k) {
            throw ConfigError(anchor(raw.source, entry.line) + "unknown key '" + key + "'");
        }
        try {
            k->set(cfg, entry.value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(anchor(raw.source, entry.line) + key + ": " + e.what());
        }
    }

    try {
        if (pot.kind == "quadratic") {
            cfg.spec.potential = PairPotential::quadratic(pot.kappa);
        } else {
            if (pot.file.empty()) {
                fail("potential.kind", "potential.kind = tabulated requires potential.file");
            }
            std::filesystem::path file(pot.file);
            if (file.is_relative()) {
                file = std::filesystem::path(raw.source).parent_path() / file;
            }
            cfg.spec.potential = PairPotential::from_file(file);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(pot.kind == "quadratic" ? "potential.kappa" : "potential.file", e.what());
    }

    if (cfg.n < 5) {
        fail("sim.N", "sim.N must be at least 5 (defect isolation needs the 18-site neighbourhood)");
    }
    const ValidationReport report = validate(cfg.spec);
    if (const AssumptionCheck* bad = report.first_failure()) {
        std::string key = "potential.kind";
        if (bad->name.rfind("assumption-3", 0) == 0) {
            key = "sim.l";
        } else if (bad->name.find("alpha in") != std::string::npos) {
            key = "sim.alpha";
        } else if (bad->name.rfind("beta", 0) == 0) {
            key = "sim.beta";
        }
        fail(key, "validation failed: " + bad->name + " (" + bad->detail + ")");
    }
    try {
        cfg.sampler.mix.validate();
    } catch (const std::invalid_argument& e) {
        fail("moves.p_displace", e.what());
    }
    if (!(cfg.sampler.delta > 0.0)) {
        fail("moves.delta", "moves.delta must be positive");
    }
    if (cfg.sampler.rho < 0.0) {
        fail("moves.rho", "moves.rho must be non-negative (0 selects alpha/4)");
    }
    if (cfg.run.thin == 0) {
        fail("run.thin", "run.thin must be positive");
    }
    if (cfg.chains < 1) {
        fail("run.chains", "run.chains must be at least 1");
    }
    if (cfg.init != "standard" && cfg.init != "near-standard") {
        fail("run.init", "run.init must be standard or near-standard");
    }
    if (cfg.init == "near-standard" && !(cfg.init_r >= 0.0 && cfg.init_r < cfg.spec.alpha / 4.0)) {
        fail("run.init_r", "run.init_r must lie in [0, alpha/4)");
    }
    for (int size : cfg.verify.sizes) {
        if (size < 5) {
            fail("verify.sizes", "verify.sizes entries must be at least 5");
        }
    }
    for (int size : cfg.verify.fjm_sizes) {
        if (size < 3) {
            fail("verify.fjm_sizes", "verify.fjm_sizes entries must be at least 3");
        }
    }
    for (double b : cfg.scan.betas) {
        if (!(b > 0.0)) {
            fail("scan.betas", "scan.betas entries must be positive");
        }
    }

    for (const Key& k : table) {
        cfg.effective[k.name] = k.get(cfg);
    }
    return cfg;
}

RunConfig load_run_config_file(const std::filesystem::path& path) { return load_run_config(parse_config_file(path)); }

}  // namespace tricrystal
