#ifndef BCSCHED_SCHEDULERS_HPP
#define BCSCHED_SCHEDULERS_HPP

#include "bcsched/capacity.hpp"
#include "bcsched/channel.hpp"
#include "bcsched/drain.hpp"
#include "bcsched/ergodic.hpp"
#include "bcsched/queueing.hpp"
#include "bcsched/region.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcsched {

// Every policy here picks a weight vector from the MAC state alone and then
// solves the weighted sum-rate problem on the current channel.  Rates in a
// decision's allocation are nats; the schedulers' MAC state is in bits.

enum class PolicyKind { DelayOptimal, Lqhpr, Qps, MaxSumRate };

std::string_view policy_name(PolicyKind kind);
/// Accepts "delay-opt", "lqhpr", "qps", "max-sum".
PolicyKind parse_policy(std::string_view name);

struct PolicyDecision {
    PolicyKind policy = PolicyKind::MaxSumRate;
    WeightVector weights;
    RateAllocation allocation;
    bool idle = false;                          ///< nothing queued, nothing sent
    bool fallback = false;                      ///< delay-opt fell back to queue weights
    std::optional<VectorXd> eta;                ///< delay-opt idle-onset times
    std::optional<WeightVector> supporting;     ///< QPS boundary weights
};

PolicyDecision lqhpr_decide(const ChannelState& channel, const MacState& mac, double total_power);
PolicyDecision max_sum_rate_decide(const ChannelState& channel, double total_power);

class Scheduler {
public:
    virtual ~Scheduler() = default;
    virtual PolicyKind kind() const = 0;
    virtual PolicyDecision decide(const ChannelState& channel, const MacState& mac) = 0;
};

class LqhprScheduler final : public Scheduler {
public:
    explicit LqhprScheduler(double total_power) : total_power_(total_power) {}
    PolicyKind kind() const override { return PolicyKind::Lqhpr; }
    PolicyDecision decide(const ChannelState& channel, const MacState& mac) override
    {
        return lqhpr_decide(channel, mac, total_power_);
    }

private:
    double total_power_;
};

class MaxSumRateScheduler final : public Scheduler {
public:
    explicit MaxSumRateScheduler(double total_power) : total_power_(total_power) {}
    PolicyKind kind() const override { return PolicyKind::MaxSumRate; }
    PolicyDecision decide(const ChannelState& channel, const MacState&) override
    {
        return max_sum_rate_decide(channel, total_power_);
    }

private:
    double total_power_;
};

/// Queue-proportional scheduling: the supporting weights of the ergodic
/// boundary point along the queue direction.  Directions are quantized to
/// `direction_step` on the simplex and each quantized direction is solved once.
class QpsScheduler final : public Scheduler {
public:
    QpsScheduler(std::shared_ptr<const ErgodicBank> bank, double total_power,
                 double direction_step = 0.01);

    PolicyKind kind() const override { return PolicyKind::Qps; }
    PolicyDecision decide(const ChannelState& channel, const MacState& mac) override;

    /// Supporting weights for queue vector q (q != 0).
    const BoundaryPoint& boundary_for(const VectorXd& queues);

private:
    std::shared_ptr<const ErgodicBank> bank_;
    double total_power_;
    double direction_step_;
    std::map<std::vector<long>, BoundaryPoint> cache_;
};

struct DelayOptimalOptions {
    double eta_tolerance = 1e-3;
    double queue_tolerance = 1e-6;        ///< relative to the total queued bits
    double cache_resolution = 1e-4;
    /// Drains predicted to last longer than this are solved on proportionally
    /// shrunk queues and the idle-onset times scaled back up.
    double max_drain_slots = 16.0;
    int max_outer_iterations = 50;
};

/// Delay-optimal policy: each slot, idle-onset times from the drain problem on
/// the sampled ergodic region, first-slot weights eta_i / abar_i, then the
/// instantaneous weighted sum-rate allocation.
class DelayOptimalScheduler final : public Scheduler {
public:
    DelayOptimalScheduler(std::shared_ptr<const ErgodicBank> bank, double total_power,
                          double bits_per_nat, DelayOptimalOptions options = {});

    PolicyKind kind() const override { return PolicyKind::DelayOptimal; }
    PolicyDecision decide(const ChannelState& channel, const MacState& mac) override;

    /// Idle-onset times for a MAC state (throws DrainConvergenceError).
    VectorXd predict_eta(const MacState& mac);
    long fallbacks() const { return fallbacks_; }

private:
    std::shared_ptr<const ErgodicBank> bank_;
    double total_power_;
    DelayOptimalOptions options_;
    ErgodicRegion region_;
    long fallbacks_ = 0;
};

std::unique_ptr<Scheduler> make_scheduler(PolicyKind kind,
                                          std::shared_ptr<const ErgodicBank> bank,
                                          double total_power, double bits_per_nat,
                                          DelayOptimalOptions options = {});

}  // namespace bcsched

#endif  // BCSCHED_SCHEDULERS_HPP
