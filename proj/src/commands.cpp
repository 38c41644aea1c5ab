#include "tricrystal/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tricrystal/energy.hpp"
#include "tricrystal/harness.hpp"
#include "tricrystal/observables.hpp"
#include "tricrystal/sampler.hpp"
#include "tricrystal/snapshot.hpp"
#include "tricrystal/version.hpp"

namespace tricrystal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string wall_clock() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        os << text;
        if (!os) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string preamble(const char* kind, const RunConfig& cfg, std::uint64_t seed, int chain) {
    std::ostringstream os;
    os << "# tricrystal " << kind << '\n';
    os << "# version=" << kVersion << '\n';
    if (chain >= 0) {
        os << "# chain=" << chain << '\n';
    }
    os << "# seed=" << seed << '\n';
    for (const auto& [key, value] : cfg.effective) {
        os << "# " << key << '=' << value << '\n';
    }
    os << "# wall_clock=" << wall_clock() << '\n';
    return os.str();
}

json estimate_json(const Estimate& e) {
    return {{"mean", e.mean}, {"stderr", e.std_error}, {"tau_int", e.tau_int}, {"samples", e.samples}};
}

json config_json(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& [key, value] : cfg.effective) {
        j[key] = value;
    }
    return j;
}

json tallies_json(const Chain& chain) {
    static const char* names[] = {"displace", "create_defect", "annihilate_defect"};
    json j = json::object();
    for (int k = 0; k < 3; ++k) {
        const MoveTally& t = chain.tallies()[k];
        j[names[k]] = {{"proposed", t.proposed},
                       {"accepted", t.accepted},
                       {"hard_rejected", t.hard_rejected},
                       {"acceptance_rate", t.acceptance_rate()}};
    }
    return j;
}

struct ChainFiles {
    fs::path samples;
    fs::path checkpoint;
};

ChainFiles chain_files(const fs::path& dir, int chains, int k) {
    if (chains == 1) {
        return {dir / "samples.csv", dir / "checkpoint.txt"};
    }
    const std::string suffix = "_chain" + std::to_string(k);
    return {dir / ("samples" + suffix + ".csv"), dir / ("checkpoint" + suffix + ".txt")};
}

std::string csv_row(const ObservableRecord& r) {
    std::string row = std::to_string(r.step);
    for (double v : {r.bond_dev_sq, r.jac_dev_sq, r.rigidity_sum, static_cast<double>(r.defect_count), r.energy_gap}) {
        row += ',';
        row += fmt17(v);
    }
    row += '\n';
    return row;
}

// Keeps comment and header lines and the data rows with step <= max_step.
std::string truncate_samples(const std::string& text, std::uint64_t max_step) {
    std::istringstream is(text);
    std::string line;
    std::string out;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#' || !header_seen) {
            header_seen = header_seen || line[0] != '#';
            out += line + '\n';
            continue;
        }
        const std::uint64_t step = std::strtoull(line.c_str(), nullptr, 10);
        if (step <= max_step) {
            out += line + '\n';
        }
    }
    return out;
}

std::vector<std::vector<double>> read_sample_columns(const fs::path& path) {
    std::vector<std::vector<double>> cols(sample_columns().size() - 1);
    std::istringstream is(read_text(path));
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        for (auto& col : cols) {
            std::getline(ls, cell, ',');
            col.push_back(std::strtod(cell.c_str(), nullptr));
        }
    }
    return cols;
}

Configuration initial_configuration(const RunConfig& cfg, std::uint64_t seed) {
    auto lattice = std::make_shared<const Lattice>(cfg.n);
    auto spec = std::make_shared<const PotentialSpec>(cfg.spec);
    if (cfg.init == "near-standard") {
        Rng rng(Rng::derive_seed(seed, 0x1417));
        return Configuration::near_standard_sample(lattice, spec, cfg.init_r, rng);
    }
    return Configuration::standard(lattice, spec);
}

json run_one_chain(const RunConfig& cfg, const fs::path& dir, int k, const SimulateOptions& options) {
    const std::uint64_t seed = cfg.chains == 1 ? cfg.seed : Rng::derive_seed(cfg.seed, k);
    const ChainFiles files = chain_files(dir, cfg.chains, k);
    auto save = [&files](const Chain& chain) {
        std::ostringstream os;
        chain.save(os);
        write_text_atomic(files.checkpoint, os.str());
    };

    std::optional<Chain> chain;
    if (options.resume) {
        std::istringstream is(read_text(files.checkpoint));
        chain.emplace(Chain::load(is));
        write_text_atomic(files.samples, truncate_samples(read_text(files.samples), chain->steps()));
    } else {
        chain.emplace(initial_configuration(cfg, seed), cfg.sampler, seed);
        std::string head = preamble("samples", cfg, seed, cfg.chains == 1 ? -1 : k);
        for (std::size_t i = 0; i < sample_columns().size(); ++i) {
            head += (i ? "," : "") + sample_columns()[i];
        }
        head += '\n';
        write_text_atomic(files.samples, head);
    }

    std::ofstream csv(files.samples, std::ios::binary | std::ios::app);
    if (!csv) {
        throw std::runtime_error("cannot append to " + files.samples.string());
    }
    RunParams rp = cfg.run;
    rp.stop_at_sweep = options.stop_at_sweep;
    run(
        *chain, rp, [&csv](const Chain& c) { csv << csv_row(measure(c.config(), c.steps())); },
        [&](const Chain& c) {
            if (cfg.checkpoint_every > 0 && c.sweeps() % cfg.checkpoint_every == 0) {
                csv.flush();
                save(c);
            }
        });
    csv.close();
    save(*chain);

    json j;
    j["chain"] = k;
    j["seed"] = seed;
    j["samples_file"] = files.samples.filename().string();
    j["checkpoint_file"] = files.checkpoint.filename().string();
    j["sweeps"] = chain->sweeps();
    j["steps"] = chain->steps();
    j["complete"] = chain->sweeps() >= cfg.run.burn_in + cfg.run.sweeps;
    j["step_size"] = chain->step_size();
    j["insertion_radius"] = chain->insertion_radius();
    j["tallies"] = tallies_json(*chain);
    const auto cols = read_sample_columns(files.samples);
    j["rows"] = cols.front().size();
    json est = json::object();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::string& name = sample_columns()[i + 1];
        est[name] = cols[i].size() >= kMinSamples ? estimate_json(estimate(cols[i])) : json(nullptr);
    }
    j["estimates"] = est;
    return j;
}

}  // namespace

const std::vector<std::string>& sample_columns() {
    static const std::vector<std::string> cols{"step",         "bond_dev_sq",  "jac_dev_sq",
                                               "rigidity_sum", "defect_count", "energy_gap"};
    return cols;
}

std::string strip_wall_clock(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::string out;
    while (std::getline(is, line)) {
        if (line.rfind("# wall_clock=", 0) != 0) {
            out += line + '\n';
        }
    }
    return out;
}

fs::path resolve_out_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv(kOutDirEnv); env && *env) {
        return env;
    }
    fs::path dir(cfg.out_dir);
    if (dir.is_relative() && !cfg.source.empty()) {
        dir = fs::path(cfg.source).parent_path() / dir;
    }
    return dir;
}

int cmd_simulate(const fs::path& config, const SimulateOptions& options, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = load_run_config_file(config);
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kExitValidation;
    }
    try {
        const fs::path dir = resolve_out_dir(cfg);
        fs::create_directories(dir);
        std::vector<std::future<json>> jobs;
        for (int k = 0; k < cfg.chains; ++k) {
            jobs.push_back(std::async(std::launch::async, run_one_chain, std::cref(cfg), dir, k, options));
        }
        json summary;
        summary["schema_version"] = kReportSchemaVersion;
        summary["version"] = kVersion;
        summary["wall_clock"] = wall_clock();
        summary["config"] = config_json(cfg);
        summary["chains"] = json::array();
        for (auto& job : jobs) {
            summary["chains"].push_back(job.get());
        }
        write_text_atomic(dir / "summary.json", summary.dump(2) + "\n");
        for (const json& c : summary["chains"]) {
            out << "chain " << c["chain"].get<int>() << ": " << c["sweeps"].get<std::uint64_t>() << " sweeps, "
                << c["rows"].get<std::size_t>() << " rows -> " << (dir / c["samples_file"].get<std::string>()).string()
                << '\n';
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "simulate: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_verify(const fs::path& config, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = load_run_config_file(config);
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kExitValidation;
    }
    try {
        const fs::path dir = resolve_out_dir(cfg);
        fs::create_directories(dir);
        const double boundary_sign = cfg.verify.fault == "boundary-sign" ? -1.0 : 1.0;
        auto spec = std::make_shared<const PotentialSpec>(cfg.spec);
        auto sampled_spec = std::make_shared<PotentialSpec>(cfg.spec);
        sampled_spec->beta = cfg.verify.sampled_beta;
        sampled_spec->m = cfg.verify.sampled_m;

        json report;
        report["schema_version"] = kReportSchemaVersion;
        report["version"] = kVersion;
        report["wall_clock"] = wall_clock();
        report["config"] = config_json(cfg);
        report["seed"] = cfg.seed;
        bool ok = true;

        for (std::size_t idx = 0; idx < cfg.verify.sizes.size(); ++idx) {
            const int n = cfg.verify.sizes[idx];
            auto lattice = std::make_shared<const Lattice>(n);
            const std::uint64_t random_seed = Rng::derive_seed(cfg.seed, 100 + idx);
            const std::uint64_t sampled_seed = Rng::derive_seed(cfg.seed, 200 + idx);
            const std::uint64_t training_seed = Rng::derive_seed(cfg.seed, 300 + idx);
            Rng rng(random_seed);
            std::vector<Configuration> configs =
                random_valid_configs(lattice, spec, cfg.verify.configs, cfg.verify.max_defects, rng);
            if (cfg.verify.sampled > 0) {
                auto sampled = sampled_configs(lattice, sampled_spec, cfg.verify.sampled, cfg.verify.sampled_burn_in,
                                               cfg.verify.sampled_thin, sampled_seed);
                configs.insert(configs.end(), sampled.begin(), sampled.end());
            }
            Rng training_rng(training_seed);
            std::vector<Configuration> training =
                random_valid_configs(lattice, spec, std::max(1, cfg.verify.configs / 2), cfg.verify.max_defects,
                                     training_rng);

            const IdentityReport ids = verify_identities(configs, cfg.verify.tolerance, boundary_sign);
            InequalityParams ip;
            ip.synthetic_samples = cfg.verify.synthetic;
            ip.seed = Rng::derive_seed(cfg.seed, 400 + idx);
            const InequalityReport ineq = verify_inequalities(training, configs, cfg.spec, ip);

            int defects = 0;
            for (const Configuration& c : configs) {
                defects += c.defect_count();
            }
            json entry;
            entry["N"] = n;
            entry["seeds"] = {{"random", random_seed},
                              {"sampled", sampled_seed},
                              {"training", training_seed},
                              {"synthetic", ip.seed}};
            entry["total_defects"] = defects;
            entry["identities"] = json::parse(to_json(ids));
            entry["inequalities"] = json::parse(to_json(ineq));
            report["sizes"].push_back(entry);

            out << "N=" << n << ": " << configs.size() << " configs, " << defects << " defects\n";
            for (const IdentityResult& r : ids.results) {
                out << "  identity " << r.name << ": max residual " << r.max_residual << (r.passed ? " PASS" : " FAIL")
                    << '\n';
            }
            out << "  fitted defect constant " << ineq.fitted_c9 << '\n';
            for (const InequalityResult& r : ineq.results) {
                out << "  ratio " << r.name << ": [" << r.min_ratio << ", " << r.max_ratio << "] over " << r.samples
                    << (r.passed ? " PASS" : " FAIL") << '\n';
            }
            ok = ok && ids.passed() && ineq.passed();
        }

        FjmParams fp;
        fp.sizes = cfg.verify.fjm_sizes;
        fp.samples = cfg.verify.fjm_samples;
        fp.seed = Rng::derive_seed(cfg.seed, 500);
        const auto fjm = estimate_fjm_constant(fp);
        json fj = json::parse(to_json(fjm));
        fj["seed"] = fp.seed;
        report["rigidity_constant"] = fj;
        for (const FjmRow& r : fjm) {
            out << "rigidity constant N=" << r.n << ": max " << r.max_ratio << " mean " << r.mean_ratio << " (" << r.sampled
                << " sampled fields, max " << r.sampled_max_ratio << ")\n";
            ok = ok && std::isfinite(r.max_ratio) && r.max_ratio > 0.0 && r.samples > 0;
        }

        const int probe_n = cfg.verify.sizes.back();
        const int kmax = static_cast<int>(greedy_hole_packing(Lattice(probe_n)).size());
        std::vector<int> counts;
        for (int k = 0; k <= kmax; ++k) {
            counts.push_back(k);
        }
        const DefectProbe probe = defect_energy_probe(spec, probe_n, counts);
        json pj;
        pj["N"] = probe_n;
        pj["fitted_cost"] = probe.fitted_cost;
        pj["expected_cost"] = cfg.spec.m - 6.0 * cfg.spec.potential.value(cfg.spec.l);
        pj["max_feasible"] = probe.max_feasible;
        for (const DefectProbeRow& r : probe.rows) {
            pj["rows"].push_back({{"k", r.k},
                                  {"energy_gap", r.energy_gap},
                                  {"triangle_part", r.triangle_part},
                                  {"boundary_part", r.boundary_part},
                                  {"boundary_edges", r.boundary_edges}});
        }
        report["defect_probe"] = pj;
        out << "defect cost (N=" << probe_n << "): fitted " << probe.fitted_cost << '\n';

        report["passed"] = ok;
        write_text_atomic(dir / "verify_report.json", report.dump(2) + "\n");
        out << (ok ? "verify: all checks passed" : "verify: FAILED") << '\n';
        return ok ? kExitOk : kExitVerification;
    } catch (const std::exception& e) {
        err << "verify: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_scan(const fs::path& config, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = load_run_config_file(config);
        if (cfg.scan.betas.size() < 4) {
            const auto raw = parse_config_file(config);
            const auto it = raw.entries.find("scan.betas");
            throw ConfigError(config.string() + ":" + std::to_string(it == raw.entries.end() ? 0 : it->second.line) +
                              ": scan.betas needs at least 4 values");
        }
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kExitValidation;
    }
    try {
        const fs::path dir = resolve_out_dir(cfg);
        fs::create_directories(dir);
        ScanParams sp;
        sp.n = cfg.n;
        sp.spec = cfg.spec;
        sp.betas = cfg.scan.betas;
        sp.ms = cfg.scan.ms;
        sp.sampler = cfg.sampler;
        sp.run = cfg.run;
        sp.seed = cfg.seed;
        const ScanTable table = symmetry_breaking_scan(sp);

        std::string csv = preamble("scan", cfg, cfg.seed, -1);
        csv +=
            "beta,m,seed,bond_dev_sq,bond_dev_sq_err,bond_dev_sq_tau,jac_dev_sq,jac_dev_sq_err,jac_dev_sq_tau,"
            "defect_density,defect_density_err,defect_density_tau,acc_displace,acc_create,acc_annihilate,step_size\n";
        for (const ScanRow& r : table.rows) {
            csv += fmt17(r.beta) + ',' + fmt17(r.m) + ',' + std::to_string(r.seed);
            for (const Estimate* e : {&r.bond_dev_sq, &r.jac_dev_sq, &r.defect_density}) {
                csv += ',' + fmt17(e->mean) + ',' + fmt17(e->std_error) + ',' + fmt17(e->tau_int);
            }
            for (double v : {r.acceptance_displace, r.acceptance_create, r.acceptance_annihilate, r.step_size}) {
                csv += ',' + fmt17(v);
            }
            csv += '\n';
        }
        write_text_atomic(dir / "scan.csv", csv);

        json summary;
        summary["schema_version"] = kReportSchemaVersion;
        summary["version"] = kVersion;
        summary["wall_clock"] = wall_clock();
        summary["config"] = config_json(cfg);
        const std::vector<double> ms = cfg.scan.ms.empty() ? std::vector<double>{cfg.spec.m} : cfg.scan.ms;
        for (double m : ms) {
            const auto rows = rows_at_m(table, m);
            std::vector<double> beta;
            std::vector<double> bond;
            std::vector<double> jac;
            for (const ScanRow& r : rows) {
                beta.push_back(r.beta);
                bond.push_back(r.bond_dev_sq.mean);
                jac.push_back(r.jac_dev_sq.mean);
            }
            json t;
            t["m"] = m;
            t["bond_dev_sq_strictly_decreasing"] = strictly_decreasing(bond);
            t["jac_dev_sq_strictly_decreasing"] = strictly_decreasing(jac);
            t["bond_dev_sq_loglog_slope"] = loglog_slope(beta, bond);
            summary["beta_trends"].push_back(t);
            out << "m=" << m << ": bond_dev_sq slope " << t["bond_dev_sq_loglog_slope"].get<double>()
                << ", strictly decreasing: bond " << (t["bond_dev_sq_strictly_decreasing"].get<bool>() ? "yes" : "no")
                << ", jac " << (t["jac_dev_sq_strictly_decreasing"].get<bool>() ? "yes" : "no") << '\n';
        }
        if (ms.size() > 1) {
            for (double beta : cfg.scan.betas) {
                const auto rows = rows_at_beta(table, beta);
                std::vector<double> density;
                for (const ScanRow& r : rows) {
                    density.push_back(r.defect_density.mean);
                }
                summary["m_trends"].push_back({{"beta", beta},
                                               {"defect_density_non_increasing", non_increasing(density)},
                                               {"defect_density_strictly_decreasing", strictly_decreasing(density)}});
            }
        }
        write_text_atomic(dir / "scan_summary.json", summary.dump(2) + "\n");
        out << "scan: " << table.rows.size() << " grid points -> " << (dir / "scan.csv").string() << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "scan: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace tricrystal
