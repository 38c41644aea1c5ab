#include "tricrystal/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tricrystal/energy.hpp"
#include "tricrystal/snapshot.hpp"

namespace tricrystal {

void MoveMix::validate() const {
    if (displace < 0.0 || create < 0.0 || annihilate < 0.0) {
        throw std::invalid_argument("move mix: probabilities must be non-negative");
    }
    if (std::abs(displace + create + annihilate - 1.0) > 1e-12) {
        throw std::invalid_argument("move mix: probabilities must sum to 1");
    }
    if ((create > 0.0) != (annihilate > 0.0)) {
        throw std::invalid_argument("move mix: create and annihilate must both be zero or both positive");
    }
}

namespace {

bool bonds_in_window(const Configuration& c, int site, const Vec2& u) {
    const PotentialSpec& spec = c.spec();
    for (int j = 0; j < 6; ++j) {
        const int nb = c.lattice().neighbor(site, j);
        if (c.is_hole(nb)) {
            continue;
        }
        const double r = (spec.l * unit_direction(j) + c.displacement(nb) - u).norm();
        if (!(r > spec.domain_min() && r < spec.domain_max())) {
            return false;
        }
    }
    return true;
}

bool orientation_preserved(const Configuration& c, std::span<const SiteValue> overrides) {
    for (const SiteValue& centre : overrides) {
        for (int t : c.lattice().incident_triangles(centre.site)) {
            if (!(c.jacobian_with(t, overrides).det() > 0.0)) {
                return false;
            }
        }
    }
    return true;
}

// Mean of the stored neighbour displacements of `hole` with `site` moved to `u`,
// summed in the same order as Configuration::neighbour_mean.
Vec2 neighbour_mean_with(const Configuration& c, int hole, int site, const Vec2& u) {
    Vec2 sum{};
    for (int j = 0; j < 6; ++j) {
        const int nb = c.lattice().neighbor(hole, j);
        sum += nb == site ? u : c.displacement(nb);
    }
    return sum * (1.0 / 6.0);
}

MoveEvaluation infeasible(const char* reason) { return {false, 0.0, reason}; }

}  // namespace

MoveEvaluation evaluate_move(const Configuration& c, const ProposedMove& move) {
    const int s = move.site;
    switch (move.kind) {
    case MoveKind::displace: {
        if (c.is_hole(s)) {
            return infeasible("displacement of a hole");
        }
        if (!bonds_in_window(c, s, move.displacement)) {
            return infeasible("bond length");
        }
        std::array<SiteValue, 7> overrides;
        std::size_t count = 0;
        overrides[count++] = {s, move.displacement};
        for (int j = 0; j < 6; ++j) {
            const int nb = c.lattice().neighbor(s, j);
            if (c.is_hole(nb)) {
                overrides[count++] = {nb, neighbour_mean_with(c, nb, s, move.displacement)};
            }
        }
        if (!orientation_preserved(c, std::span(overrides.data(), count))) {
            return infeasible("orientation");
        }
        break;
    }
    case MoveKind::create_defect: {
        if (c.is_hole(s)) {
            return infeasible("site already a hole");
        }
        for (int other : c.lattice().near_sites(s)) {
            if (c.is_hole(other)) {
                return infeasible("isolation");
            }
        }
        if (!(move.proposal_density > 0.0)) {
            return infeasible("particle outside the insertion disk");
        }
        const SiteValue fill{s, c.neighbour_mean(s)};
        if (!orientation_preserved(c, std::span(&fill, 1))) {
            return infeasible("orientation");
        }
        break;
    }
    case MoveKind::annihilate_defect: {
        if (!c.is_hole(s)) {
            return infeasible("site is not a hole");
        }
        if (!(move.proposal_density > 0.0)) {
            return infeasible("zero insertion density");
        }
        if (!bonds_in_window(c, s, move.displacement)) {
            return infeasible("bond length");
        }
        const SiteValue placed{s, move.displacement};
        if (!orientation_preserved(c, std::span(&placed, 1))) {
            return infeasible("orientation");
        }
        break;
    }
    }
    const double dh = delta_h(c, move);
    if (!std::isfinite(dh)) {
        return infeasible("potential domain");
    }
    return {true, dh, ""};
}

double acceptance_probability(const ProposedMove& move, double delta_h, double beta, const MoveMix& mix) {
    double log_ratio = -beta * delta_h;
    switch (move.kind) {
    case MoveKind::displace:
        break;
    case MoveKind::create_defect:
        // reverse move: pick this site for annihilation and insert at the old point
        log_ratio += std::log(move.proposal_density) + std::log(mix.annihilate / mix.create);
        break;
    case MoveKind::annihilate_defect:
        log_ratio += -std::log(move.proposal_density) + std::log(mix.create / mix.annihilate);
        break;
    }
    return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

void apply_move(Configuration& c, const ProposedMove& move) {
    switch (move.kind) {
    case MoveKind::displace:
        c.set_displacement(move.site, move.displacement);
        break;
    case MoveKind::create_defect:
        c.make_hole(move.site);
        break;
    case MoveKind::annihilate_defect:
        c.place_particle(move.site, move.displacement);
        break;
    }
}

Chain::Chain(Configuration config, SamplerParams params) : config_(std::move(config)), params_(params) {
    params_.mix.validate();
    if (!(params_.delta > 0.0)) {
        throw std::invalid_argument("sampler: displacement radius must be positive");
    }
    rho_ = params_.rho > 0.0 ? params_.rho : config_.spec().alpha / 4.0;
    delta_ = params_.delta;
    tuning_ = params_.tune;
}

Chain::Chain(Configuration initial, SamplerParams params, std::uint64_t seed) : Chain(std::move(initial), params) {
    rng_ = Rng(seed);
    const ConstraintReport report = config_.check_constraints();
    if (!report.ok()) {
        throw std::invalid_argument("sampler: unsatisfiable initial configuration (hard constraints violated)");
    }
    energy_ = hamiltonian(config_).total;
}

ProposedMove Chain::propose() {
    ProposedMove mv;
    const double r = rng_.uniform();
    mv.site = static_cast<int>(rng_.below(static_cast<std::uint64_t>(config_.site_count())));
    const double q = 1.0 / (std::numbers::pi * rho_ * rho_);
    if (r < params_.mix.displace) {
        mv.kind = MoveKind::displace;
        mv.displacement = config_.displacement(mv.site) + rng_.disk(delta_);
    } else if (r < params_.mix.displace + params_.mix.create) {
        mv.kind = MoveKind::create_defect;
        if (!config_.is_hole(mv.site)) {
            const double offset = (config_.displacement(mv.site) - config_.neighbour_mean(mv.site)).norm();
            mv.proposal_density = offset < rho_ ? q : 0.0;
        }
    } else {
        mv.kind = MoveKind::annihilate_defect;
        if (config_.is_hole(mv.site)) {
            mv.displacement = config_.neighbour_mean(mv.site) + rng_.disk(rho_);
            mv.proposal_density = q;
        }
    }
    return mv;
}

bool Chain::step() {
    const ProposedMove mv = propose();
    ++steps_;
    MoveTally& tally = tallies_[static_cast<int>(mv.kind)];
    ++tally.proposed;
    if (mv.kind == MoveKind::displace) {
        ++window_proposed_;
    }
    const MoveEvaluation ev = evaluate_move(config_, mv);
    if (!ev.feasible) {
        ++tally.hard_rejected;
        return false;
    }
    const double a = acceptance_probability(mv, ev.delta_h, config_.spec().beta, params_.mix);
    if (a < 1.0 && !(rng_.uniform() < a)) {
        return false;
    }
    apply_move(config_, mv);
    energy_ += ev.delta_h;
    ++tally.accepted;
    if (mv.kind == MoveKind::displace) {
        ++window_accepted_;
    }
    if (++accepted_since_audit_ >= params_.audit_interval) {
        audit();
    }
    return true;
}

void Chain::sweep() {
    for (int i = 0; i < config_.site_count(); ++i) {
        step();
    }
    ++sweeps_;
    if (tuning_) {
        tune_after_sweep();
    }
}

void Chain::tune_after_sweep() {
    constexpr std::uint64_t kWindow = 200;
    if (window_proposed_ < kWindow) {
        return;
    }
    const double rate = static_cast<double>(window_accepted_) / static_cast<double>(window_proposed_);
    if (rate < params_.target_low) {
        delta_ *= 0.8;
    } else if (rate > params_.target_high) {
        delta_ = std::min(delta_ * 1.25, config_.spec().alpha);
    }
    window_proposed_ = 0;
    window_accepted_ = 0;
}

void Chain::audit() {
    accepted_since_audit_ = 0;
    const double dev = config_.cache_deviation();
    if (dev > params_.audit_tolerance) {
        throw CacheAuditError("cache audit failed: deviation " + std::to_string(dev));
    }
    const double full = hamiltonian(config_).total;
    if (std::abs(full - energy_) > params_.energy_drift_tolerance) {
        throw CacheAuditError("energy drift audit failed: running " + std::to_string(energy_) + " vs full " +
                              std::to_string(full));
    }
    energy_ = full;
}

void Chain::save(std::ostream& os) const {
    os << "tricrystal-checkpoint " << kCheckpointVersion << '\n';
    os << "mix " << hex_double(params_.mix.displace) << ' ' << hex_double(params_.mix.create) << ' '
       << hex_double(params_.mix.annihilate) << '\n';
    os << "params " << hex_double(params_.delta) << ' ' << hex_double(params_.rho) << ' ' << (params_.tune ? 1 : 0)
       << ' ' << hex_double(params_.target_low) << ' ' << hex_double(params_.target_high) << ' '
       << params_.audit_interval << ' ' << hex_double(params_.audit_tolerance) << ' '
       << hex_double(params_.energy_drift_tolerance) << '\n';
    os << "state " << hex_double(delta_) << ' ' << hex_double(rho_) << ' ' << hex_double(energy_) << ' ' << steps_
       << ' ' << sweeps_ << ' ' << accepted_since_audit_ << ' ' << (tuning_ ? 1 : 0) << ' ' << window_proposed_ << ' '
       << window_accepted_ << '\n';
    os << "tallies";
    for (const MoveTally& t : tallies_) {
        os << ' ' << t.proposed << ' ' << t.accepted << ' ' << t.hard_rejected;
    }
    os << '\n';
    os << "rng " << rng_.state() << '\n';
    write_snapshot(os, config_);
    os << "end-checkpoint\n";
}

Chain Chain::load(std::istream& is) {
    auto keyword = [&is](const char* expected) {
        std::string tok;
        if (!(is >> tok) || tok != expected) {
            throw SnapshotError(std::string("checkpoint: expected '") + expected + "'");
        }
    };
    auto hex = [&is]() {
        std::string tok;
        if (!(is >> tok)) {
            throw SnapshotError("checkpoint: truncated");
        }
        return parse_hex_double(tok);
    };
    auto integer = [&is]() {
        std::uint64_t v = 0;
        if (!(is >> v)) {
            throw SnapshotError("checkpoint: malformed integer");
        }
        return v;
    };

    keyword("tricrystal-checkpoint");
    if (integer() != static_cast<std::uint64_t>(kCheckpointVersion)) {
        throw SnapshotError("checkpoint: unsupported version");
    }
    SamplerParams p;
    keyword("mix");
    p.mix.displace = hex();
    p.mix.create = hex();
    p.mix.annihilate = hex();
    keyword("params");
    p.delta = hex();
    p.rho = hex();
    p.tune = integer() != 0;
    p.target_low = hex();
    p.target_high = hex();
    p.audit_interval = integer();
    p.audit_tolerance = hex();
    p.energy_drift_tolerance = hex();

    keyword("state");
    const double delta = hex();
    const double rho = hex();
    const double energy = hex();
    const std::uint64_t steps = integer();
    const std::uint64_t sweeps = integer();
    const std::uint64_t since_audit = integer();
    const bool tuning = integer() != 0;
    const std::uint64_t wp = integer();
    const std::uint64_t wa = integer();
    keyword("tallies");
    std::array<MoveTally, 3> tallies{};
    for (MoveTally& t : tallies) {
        t.proposed = integer();
        t.accepted = integer();
        t.hard_rejected = integer();
    }
    keyword("rng");
    std::string rng_state;
    std::getline(is, rng_state);
    Configuration config = read_snapshot(is);
    keyword("end-checkpoint");

    Chain chain(std::move(config), p);
    chain.rng_.set_state(rng_state);
    chain.delta_ = delta;
    chain.rho_ = rho;
    chain.energy_ = energy;
    chain.steps_ = steps;
    chain.sweeps_ = sweeps;
    chain.accepted_since_audit_ = since_audit;
    chain.tuning_ = tuning;
    chain.window_proposed_ = wp;
    chain.window_accepted_ = wa;
    chain.tallies_ = tallies;
    return chain;
}

void run(Chain& chain, const RunParams& params, const ChainCallback& emit, const ChainCallback& after_sweep) {
    if (params.thin == 0) {
        throw std::invalid_argument("run: thin must be positive");
    }
    std::uint64_t total = params.burn_in + params.sweeps;
    if (params.stop_at_sweep > 0) {
        total = std::min(total, params.stop_at_sweep);
    }
    while (chain.sweeps() < total) {
        chain.set_tuning(chain.sweeps() < params.burn_in);
        chain.sweep();
        const std::uint64_t k = chain.sweeps();
        if (k > params.burn_in && (k - params.burn_in) % params.thin == 0 && emit) {
            emit(chain);
        }
        if (after_sweep) {
            after_sweep(chain);
        }
    }
}

std::vector<Configuration> run_snapshots(const RunParams& params, const SamplerParams& sampler, Configuration initial,
                                         std::uint64_t seed) {
    Chain chain(std::move(initial), sampler, seed);
    std::vector<Configuration> out;
    run(chain, params, [&out](const Chain& c) { out.push_back(c.config()); });
    return out;
}

AuditReport detailed_balance_audit(const AuditParams& ap) {
    ap.mix.validate();
    auto lattice = std::make_shared<const Lattice>(ap.n);
    auto spec = std::make_shared<PotentialSpec>();
    spec->potential = PairPotential::quadratic(ap.kappa);
    spec->alpha = ap.alpha;
    spec->l = ap.l;
    spec->m = ap.m;
    spec->beta = ap.beta;
    Configuration config(lattice, spec);
    constexpr int kMobile = 0;

    const int grid_points = ap.grid * ap.grid;
    const int hole_state = grid_points;
    const int states = grid_points + 1;
    const int centre = (ap.grid - 1) / 2;
    const double cell_area = ap.spacing * ap.spacing;
    auto grid_u = [&](int g) { return Vec2{ap.spacing * (g % ap.grid - centre), ap.spacing * (g / ap.grid - centre)}; };

    // Displacement offsets (in cells) and the discrete insertion set around the fill point.
    std::vector<std::array<int, 2>> offsets;
    for (int dj = -ap.displacement_cells; dj <= ap.displacement_cells; ++dj) {
        for (int di = -ap.displacement_cells; di <= ap.displacement_cells; ++di) {
            if (di * di + dj * dj <= ap.displacement_cells * ap.displacement_cells) {
                offsets.push_back({di, dj});
            }
        }
    }
    const Vec2 fill = config.neighbour_mean(kMobile);
    std::vector<int> insertion_set;
    for (int g = 0; g < grid_points; ++g) {
        if ((grid_u(g) - fill).norm() < ap.rho) {
            insertion_set.push_back(g);
        }
    }
    const double insertion_density = 1.0 / (static_cast<double>(insertion_set.size()) * cell_area);
    auto in_insertion_set = [&](int g) {
        return std::binary_search(insertion_set.begin(), insertion_set.end(), g);
    };

    auto set_state = [&](int state) {
        if (state == hole_state) {
            config.make_hole(kMobile);
        } else {
            config.place_particle(kMobile, grid_u(state));
        }
    };

    // Exact restricted Gibbs law: grid cell mass for particles, unit atom for the hole.
    AuditReport report;
    report.states = states;
    report.exact.assign(states, 0.0);
    std::vector<double> log_w(states, -std::numeric_limits<double>::infinity());
    for (int s = 0; s < states; ++s) {
        set_state(s);
        if (!config.check_constraints().ok()) {
            continue;
        }
        ++report.feasible_states;
        const double weight_log = s == hole_state ? 0.0 : std::log(cell_area);
        log_w[s] = weight_log - ap.beta * energy_gap(config);
    }
    const double max_log = *std::max_element(log_w.begin(), log_w.end());
    double z = 0.0;
    for (int s = 0; s < states; ++s) {
        report.exact[s] = std::exp(log_w[s] - max_log);
        z += report.exact[s];
    }
    for (double& p : report.exact) {
        p /= z;
    }
    report.exact_hole_probability = report.exact[hole_state];

    // Proposal enumeration shared by the exact kernel and the simulated chain.
    struct Candidate {
        int target;
        double probability;  // proposal probability
        ProposedMove move;
    };
    auto candidates = [&](int state) {
        std::vector<Candidate> out;
        if (state == hole_state) {
            for (int g : insertion_set) {
                ProposedMove mv{MoveKind::annihilate_defect, kMobile, grid_u(g), insertion_density};
                out.push_back({g, ap.mix.annihilate / insertion_set.size(), mv});
            }
            return out;
        }
        const int gi = state % ap.grid;
        const int gj = state / ap.grid;
        for (const auto& o : offsets) {
            const int ti = gi + o[0];
            const int tj = gj + o[1];
            if (ti < 0 || tj < 0 || ti >= ap.grid || tj >= ap.grid) {
                continue;
            }
            const int t = tj * ap.grid + ti;
            ProposedMove mv{MoveKind::displace, kMobile, grid_u(t), 1.0};
            out.push_back({t, ap.mix.displace / offsets.size(), mv});
        }
        ProposedMove mv{MoveKind::create_defect, kMobile, {}, in_insertion_set(state) ? insertion_density : 0.0};
        out.push_back({hole_state, ap.mix.create, mv});
        return out;
    };
    auto accept_prob = [&](const Candidate& cand) {
        const MoveEvaluation ev = evaluate_move(config, cand.move);
        return ev.feasible ? acceptance_probability(cand.move, ev.delta_h, ap.beta, ap.mix) : 0.0;
    };

    // Exact kernel: detailed balance and stationarity residuals.
    std::vector<std::vector<std::pair<int, double>>> kernel(states);
    for (int s = 0; s < states; ++s) {
        if (report.exact[s] == 0.0) {
            continue;
        }
        set_state(s);
        for (const Candidate& cand : candidates(s)) {
            const double p = cand.probability * accept_prob(cand);
            if (p > 0.0 && cand.target != s) {
                kernel[s].emplace_back(cand.target, p);
            }
        }
    }
    std::vector<double> flow_in(states, 0.0);
    std::vector<double> flow_out(states, 0.0);
    std::vector<double> pair_flow(static_cast<std::size_t>(states) * states, 0.0);
    for (int a = 0; a < states; ++a) {
        for (const auto& [b, p] : kernel[a]) {
            const double f = report.exact[a] * p;
            pair_flow[static_cast<std::size_t>(a) * states + b] += f;
            flow_out[a] += f;
            flow_in[b] += f;
        }
    }
    for (int a = 0; a < states; ++a) {
        report.exact_stationarity_residual = std::max(report.exact_stationarity_residual, std::abs(flow_in[a] - flow_out[a]));
        for (int b = a + 1; b < states; ++b) {
            const double diff = std::abs(pair_flow[static_cast<std::size_t>(a) * states + b] -
                                         pair_flow[static_cast<std::size_t>(b) * states + a]);
            report.exact_balance_residual = std::max(report.exact_balance_residual, diff);
        }
    }

    // Simulated chain.
    Rng rng(ap.seed);
    int state = centre * ap.grid + centre;
    set_state(state);
    std::vector<std::uint64_t> visits(states, 0);
    std::vector<std::uint64_t> transitions(static_cast<std::size_t>(states) * states, 0);
    for (std::uint64_t step = 0; step < ap.steps; ++step) {
        const double r = rng.uniform();
        ProposedMove mv;
        int target = state;
        bool proposed = false;
        if (r < ap.mix.displace) {
            const auto& o = offsets[rng.below(offsets.size())];
            if (state != hole_state) {
                const int ti = state % ap.grid + o[0];
                const int tj = state / ap.grid + o[1];
                if (ti >= 0 && tj >= 0 && ti < ap.grid && tj < ap.grid) {
                    target = tj * ap.grid + ti;
                    mv = {MoveKind::displace, kMobile, grid_u(target), 1.0};
                    proposed = true;
                }
            }
        } else if (r < ap.mix.displace + ap.mix.create) {
            if (state != hole_state) {
                target = hole_state;
                mv = {MoveKind::create_defect, kMobile, {}, in_insertion_set(state) ? insertion_density : 0.0};
                proposed = true;
            }
        } else {
            const int g = insertion_set[rng.below(insertion_set.size())];
            if (state == hole_state) {
                target = g;
                mv = {MoveKind::annihilate_defect, kMobile, grid_u(g), insertion_density};
                proposed = true;
            }
        }
        if (proposed) {
            const MoveEvaluation ev = evaluate_move(config, mv);
            if (ev.feasible) {
                const double a = acceptance_probability(mv, ev.delta_h, ap.beta, ap.mix);
                if (a >= 1.0 || rng.uniform() < a) {
                    apply_move(config, mv);
                    if (target != state) {
                        ++transitions[static_cast<std::size_t>(state) * states + target];
                    }
                    state = target;
                }
            }
        }
        ++visits[state];
    }

    report.empirical.assign(states, 0.0);
    double tv = 0.0;
    for (int s = 0; s < states; ++s) {
        report.empirical[s] = static_cast<double>(visits[s]) / static_cast<double>(ap.steps);
        tv += std::abs(report.empirical[s] - report.exact[s]);
    }
    report.tv_distance = 0.5 * tv;
    report.empirical_hole_probability = report.empirical[hole_state];
    for (int a = 0; a < states; ++a) {
        for (int b = a + 1; b < states; ++b) {
            const double fa = static_cast<double>(transitions[static_cast<std::size_t>(a) * states + b]);
            const double fb = static_cast<double>(transitions[static_cast<std::size_t>(b) * states + a]);
            report.max_flow_asymmetry = std::max(report.max_flow_asymmetry, std::abs(fa - fb) / ap.steps);
        }
    }
    return report;
}

}  // namespace tricrystal
