#ifndef TRICRYSTAL_SAMPLER_HPP
#define TRICRYSTAL_SAMPLER_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tricrystal/configuration.hpp"
#include "tricrystal/move.hpp"
#include "tricrystal/rng.hpp"

namespace tricrystal {

inline constexpr int kCheckpointVersion = 1;

/// Probabilities of proposing each move type; must sum to 1.
struct MoveMix {
    double displace = 0.9;
    double create = 0.05;
    double annihilate = 0.05;

    void validate() const;
};

struct SamplerParams {
    MoveMix mix;
    /// Initial radius of the uniform-disk displacement proposal.
    double delta = 0.01;
    /// Radius of the insertion disk around the hole-fill point; <= 0 means alpha / 4.
    double rho = 0.0;
    /// Adapt delta during burn-in towards the acceptance window below.
    bool tune = true;
    double target_low = 0.3;
    double target_high = 0.5;
    /// Accepted moves between full cache audits.
    std::uint64_t audit_interval = 10000;
    double audit_tolerance = 1e-9;
    double energy_drift_tolerance = 1e-8;
};

struct MoveTally {
    std::uint64_t proposed = 0;
    std::uint64_t accepted = 0;
    std::uint64_t hard_rejected = 0;  // constraint violations and impossible moves

    double acceptance_rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
};

/// Outcome of checking a proposal against the hard constraints.
struct MoveEvaluation {
    bool feasible = false;
    double delta_h = 0.0;
    const char* reason = "";
};

/// Checks (bond lengths, isolation, orientation, reversibility of the
/// insertion) and energy change of a proposal, without mutating `c`.
MoveEvaluation evaluate_move(const Configuration& c, const ProposedMove& move);

/// Metropolis-Hastings acceptance probability for a feasible move with
/// energy change `delta_h`. Dimension-changing moves include the insertion
/// density and the ratio of the create/annihilate selection probabilities.
double acceptance_probability(const ProposedMove& move, double delta_h, double beta, const MoveMix& mix);

/// Commits a move to the configuration.
void apply_move(Configuration& c, const ProposedMove& move);

/// Raised when the incremental caches drift from a full recomputation.
class CacheAuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One Metropolis-Hastings chain targeting exp(-beta H) against the
/// per-site reference measure (Lebesgue + atom at the hole state).
class Chain {
public:
    /// Throws std::invalid_argument if `initial` violates a hard constraint.
    Chain(Configuration initial, SamplerParams params, std::uint64_t seed);

    /// One proposal; returns true if accepted.
    bool step();
    /// N^2 proposals, followed by a tuning update while tuning is enabled.
    void sweep();

    const Configuration& config() const { return config_; }
    const SamplerParams& params() const { return params_; }
    std::uint64_t steps() const { return steps_; }
    std::uint64_t sweeps() const { return sweeps_; }
    const std::array<MoveTally, 3>& tallies() const { return tallies_; }
    double step_size() const { return delta_; }
    double insertion_radius() const { return rho_; }
    /// Running energy H accumulated from per-move energy changes.
    double energy() const { return energy_; }

    bool tuning() const { return tuning_; }
    void set_tuning(bool on) { tuning_ = on && params_.tune; }

    /// Full cache audit; resynchronizes the running energy. Throws CacheAuditError.
    void audit();

    void save(std::ostream& os) const;
    static Chain load(std::istream& is);

private:
    Chain(Configuration config, SamplerParams params);
    ProposedMove propose();
    void tune_after_sweep();

    Configuration config_;
    SamplerParams params_;
    Rng rng_;
    double delta_ = 0.0;
    double rho_ = 0.0;
    double energy_ = 0.0;
    std::uint64_t steps_ = 0;
    std::uint64_t sweeps_ = 0;
    std::uint64_t accepted_since_audit_ = 0;
    std::array<MoveTally, 3> tallies_{};
    bool tuning_ = true;
    std::uint64_t window_proposed_ = 0;
    std::uint64_t window_accepted_ = 0;
};

struct RunParams {
    std::uint64_t burn_in = 1000;  // sweeps, with step-size tuning
    std::uint64_t sweeps = 10000;  // measurement sweeps
    std::uint64_t thin = 10;       // emit every thin-th measurement sweep
    /// Stop early once the chain has done this many sweeps in total (0: never).
    /// The emission schedule is unchanged, so a resumed run continues the same stream.
    std::uint64_t stop_at_sweep = 0;
};

using ChainCallback = std::function<void(const Chain&)>;

/// Advances `chain` until burn_in + sweeps sweeps have been done, continuing
/// from wherever the chain currently is. `emit` sees every thin-th
/// measurement sweep; `after_sweep` (optional) sees every sweep.
void run(Chain& chain, const RunParams& params, const ChainCallback& emit, const ChainCallback& after_sweep = {});

/// Convenience wrapper: deterministic snapshot stream from an initial state.
std::vector<Configuration> run_snapshots(const RunParams& params, const SamplerParams& sampler, Configuration initial,
                                         std::uint64_t seed);

struct AuditParams {
    int n = 5;
    double kappa = 1.0;
    double beta = 1.0;
    double m = 3.5;
    double alpha = 0.1;
    double l = 1.0;
    int grid = 21;           // grid points per axis for the mobile site
    double spacing = 0.01;   // grid spacing (length units)
    int displacement_cells = 3;
    double rho = 0.025;      // insertion radius
    MoveMix mix{0.8, 0.1, 0.1};
    std::uint64_t steps = 10'000'000;
    std::uint64_t seed = 1;
};

struct AuditReport {
    int states = 0;           // grid points + hole
    int feasible_states = 0;
    double tv_distance = 0.0;
    double max_flow_asymmetry = 0.0;       // max |F(a->b) - F(b->a)| / steps
    double exact_balance_residual = 0.0;   // max |pi(a) P(a,b) - pi(b) P(b,a)| of the exact kernel
    double exact_stationarity_residual = 0.0;
    double exact_hole_probability = 0.0;
    double empirical_hole_probability = 0.0;
    std::vector<double> exact;
    std::vector<double> empirical;
};

/// Runs the sampler's move evaluation and acceptance rules on a discretized
/// single-site system (one mobile site on a grid plus the hole state, all
/// other sites frozen at standard positions) and compares the empirical
/// occupation with the exactly normalized restricted Gibbs law.
AuditReport detailed_balance_audit(const AuditParams& params);

}  // namespace tricrystal

#endif  // TRICRYSTAL_SAMPLER_HPP
