#ifndef BCSCHED_SIMULATION_HPP
#define BCSCHED_SIMULATION_HPP

#include "bcsched/config.hpp"
#include "bcsched/queueing.hpp"
#include "bcsched/schedulers.hpp"

#include <string>
#include <vector>

namespace bcsched {

/// One slot as seen by the MAC: queues at the start of the slot, the rates the
/// policy granted (bits), arrivals during the slot (bits) and the weights.
struct SlotRecord {
    long slot = 0;
    VectorXd queue_bits;
    VectorXd rate_bits;
    VectorXd arrival_bits;
    WeightVector weights;
};

/// Column-per-slot storage of a run's SlotRecords.
struct Trace {
    MatrixXd queue_bits;     ///< users x N
    MatrixXd rate_bits;
    MatrixXd arrival_bits;
    MatrixXd weights;

    Trace() = default;
    Trace(Index users, long slots);

    long size() const { return static_cast<long>(queue_bits.cols()); }
    Index num_users() const { return queue_bits.rows(); }
    SlotRecord record(long n) const;
    void store(const SlotRecord& r);
};

struct StabilityReport {
    bool stable = true;
    double slope = 0.0;                 ///< bits/slot growth of the total queue
    double mid_mean = 0.0;              ///< total queue, second quarter of the window
    double last_mean = 0.0;             ///< total queue, last quarter of the window
    double arrivals_per_slot = 0.0;     ///< total mean arrivals, bits/slot
    long window = 0;

    const char* verdict() const { return stable ? "stable" : "unstable"; }
};

/// Minimum post-warmup window accepted by stability_probe.
inline constexpr long kMinStabilityWindow = 10000;

/// Finite-horizon stability check on a users x N queue window.  Fits a
/// least-squares line to the total queue over the last half; stable when the
/// slope is at most 1% of the mean arrivals per slot and the last-quarter mean
/// is at most twice the second-quarter mean (the latter floored at one slot of
/// mean arrivals).  Throws std::invalid_argument on windows shorter than
/// kMinStabilityWindow.
StabilityReport stability_probe(const MatrixXd& queues, double arrivals_per_slot);

struct RunSummary {
    DelayReport delay;
    VectorXd mean_queue_bits;
    VectorXd max_queue_bits;
    VectorXd mean_arrival_bits;          ///< per slot, post-warmup
    bool stability_determined = false;
    StabilityReport stability;
    double wall_clock_s = 0.0;
    long fallbacks = 0;                  ///< slots where delay-opt used queue weights
    SimConfig config;
};

struct RunResult {
    Trace trace;
    RunSummary summary;
};

/// Metrics over the post-warmup slots of a trace.
RunSummary summarize(const Trace& trace, const SimConfig& config);

/// One simulation: per slot draw the channel block and the arrivals, let the
/// policy decide, record, step the queues.  Deterministic in config.seed.
/// Throws ConvergenceError once the delay-opt fallback count exceeds
/// config.nonconvergence_quota.
RunResult run(const SimConfig& config);

/// Replays a trace through the queue recurrence; true when every recorded
/// queue vector is reproduced exactly.
bool replay_matches(const Trace& trace);

struct SweepRow {
    std::vector<double> rates_bps;
    PolicyKind policy = PolicyKind::DelayOptimal;
    double mean_delay_ms = 0.0;
    double stderr_ms = 0.0;
    bool stable = true;                 ///< every seed's run was stable
    std::vector<double> per_seed_ms;
};

/// Runs every (point, policy) pair over seeds base.seed, ..., base.seed+R-1.
/// Rows come back in (point, policy) order whatever the thread count.
/// `threads` <= 0 picks the hardware concurrency.
std::vector<SweepRow> load_sweep(const SimConfig& base,
                                 const std::vector<std::vector<double>>& points_bps,
                                 const std::vector<PolicyKind>& policies, int seeds,
                                 int threads = 0);

/// Boundary point of the sampled ergodic region along `direction`, in bits/s,
/// from a region bank of config.region_bank_size samples.
VectorXd boundary_rates_bps(const SimConfig& config, const VectorXd& direction);

}  // namespace bcsched

#endif  // BCSCHED_SIMULATION_HPP
