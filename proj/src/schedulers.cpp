#include "bcsched/schedulers.hpp"

#include <cmath>
#include <stdexcept>

namespace bcsched {

std::string_view policy_name(PolicyKind kind)
{
    switch (kind) {
    case PolicyKind::DelayOptimal: return "delay-opt";
    case PolicyKind::Lqhpr: return "lqhpr";
    case PolicyKind::Qps: return "qps";
    case PolicyKind::MaxSumRate: return "max-sum";
    }
    return "unknown";
}

PolicyKind parse_policy(std::string_view name)
{
    for (auto kind : {PolicyKind::DelayOptimal, PolicyKind::Lqhpr, PolicyKind::Qps,
                      PolicyKind::MaxSumRate})
        if (policy_name(kind) == name)
            return kind;
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

namespace {

PolicyDecision idle_decision(PolicyKind kind, const ChannelState& channel)
{
    PolicyDecision d;
    d.policy = kind;
    d.idle = true;
    d.weights = WeightVector::Zero(channel.num_users());
    d.allocation = RateAllocation::zero(channel.num_users(), channel.num_subcarriers());
    return d;
}

void check_mac(const ChannelState& channel, const MacState& mac)
{
    if (mac.queues.size() != channel.num_users())
        throw std::invalid_argument("MAC state does not match the channel's user count");
}

}  // namespace

PolicyDecision lqhpr_decide(const ChannelState& channel, const MacState& mac, double total_power)
{
    check_mac(channel, mac);
    if (mac.queues.sum() <= 0.0)
        return idle_decision(PolicyKind::Lqhpr, channel);
    PolicyDecision d;
    d.policy = PolicyKind::Lqhpr;
    d.weights = mac.queues;
    d.allocation = solve_wsr_instant(channel, d.weights, total_power);
    return d;
}

PolicyDecision max_sum_rate_decide(const ChannelState& channel, double total_power)
{
    PolicyDecision d;
    d.policy = PolicyKind::MaxSumRate;
    d.weights = WeightVector::Ones(channel.num_users());
    d.allocation = solve_wsr_instant(channel, d.weights, total_power);
    return d;
}

QpsScheduler::QpsScheduler(std::shared_ptr<const ErgodicBank> bank, double total_power,
                           double direction_step)
    : bank_(std::move(bank)), total_power_(total_power), direction_step_(direction_step)
{
    if (!bank_ || bank_->samples.empty())
        throw std::invalid_argument("QPS needs a non-empty ergodic bank");
    if (!(direction_step > 0.0) || direction_step > 0.5)
        throw std::invalid_argument("direction step must lie in (0, 0.5]");
}

const BoundaryPoint& QpsScheduler::boundary_for(const VectorXd& queues)
{
    const double total = queues.sum();
    if (!(total > 0.0))
        throw std::invalid_argument("QPS direction needs a nonzero queue vector");
    std::vector<long> key(static_cast<std::size_t>(queues.size()));
    VectorXd direction(queues.size());
    for (Index i = 0; i < queues.size(); ++i) {
        key[static_cast<std::size_t>(i)] = std::lround(queues[i] / total / direction_step_);
        direction[i] = static_cast<double>(key[static_cast<std::size_t>(i)]) * direction_step_;
    }
    auto it = cache_.find(key);
    if (it == cache_.end())
        it = cache_.emplace(std::move(key),
                            boundary_point_in_direction(*bank_, direction, total_power_))
                 .first;
    return it->second;
}

PolicyDecision QpsScheduler::decide(const ChannelState& channel, const MacState& mac)
{
    check_mac(channel, mac);
    if (mac.queues.sum() <= 0.0)
        return idle_decision(PolicyKind::Qps, channel);
    const BoundaryPoint& point = boundary_for(mac.queues);
    PolicyDecision d;
    d.policy = PolicyKind::Qps;
    d.weights = point.weights;
    d.supporting = point.weights;
    d.allocation = solve_wsr_instant(channel, d.weights, total_power_);
    return d;
}

DelayOptimalScheduler::DelayOptimalScheduler(std::shared_ptr<const ErgodicBank> bank,
                                             double total_power, double bits_per_nat,
                                             DelayOptimalOptions options)
    : bank_(std::move(bank)), total_power_(total_power), options_(options),
      region_(*bank_, total_power, bits_per_nat, options.cache_resolution)
{
}

VectorXd DelayOptimalScheduler::predict_eta(const MacState& mac)
{
    const Index users = region_.num_users();
    if (mac.queues.size() != users || mac.avg_arrivals.size() != users)
        throw std::invalid_argument("MAC state does not match the bank's user count");

    DrainProblem problem;
    problem.initial_queues = mac.queues;
    problem.avg_arrivals = mac.avg_arrivals;
    problem.region = &region_;
    problem.eta_tolerance = options_.eta_tolerance;
    problem.max_outer_iterations = options_.max_outer_iterations;

    // Long drains are solved at a reduced scale: with a stationary region the
    // idle-onset times grow in proportion to the queues.
    const RateVector r0 = region_.rates(mac.avg_arrivals.cwiseInverse());
    double scale = 1.0;
    if (r0.sum() > 0.0) {
        const double horizon = mac.queues.sum() / r0.sum();
        if (horizon > options_.max_drain_slots)
            scale = horizon / options_.max_drain_slots;
    }
    problem.initial_queues /= scale;
    problem.queue_tolerance = options_.queue_tolerance * problem.initial_queues.sum();
    return scale * idle_state_prediction(problem).eta;
}

PolicyDecision DelayOptimalScheduler::decide(const ChannelState& channel, const MacState& mac)
{
    check_mac(channel, mac);
    if (mac.queues.sum() <= 0.0)
        return idle_decision(PolicyKind::DelayOptimal, channel);

    PolicyDecision d;
    d.policy = PolicyKind::DelayOptimal;
    try {
        const VectorXd eta = predict_eta(mac);
        d.weights = weights_from_eta(eta, mac.avg_arrivals, 1);
        d.eta = eta;
    } catch (const ConvergenceError&) {
        d.fallback = true;
    }
    if (d.fallback || !(d.weights.sum() > 0.0)) {
        d.fallback = true;
        d.weights = mac.queues;
        ++fallbacks_;
    }
    d.allocation = solve_wsr_instant(channel, d.weights, total_power_);
    return d;
}

std::unique_ptr<Scheduler> make_scheduler(PolicyKind kind,
                                          std::shared_ptr<const ErgodicBank> bank,
                                          double total_power, double bits_per_nat,
                                          DelayOptimalOptions options)
{
    switch (kind) {
    case PolicyKind::Lqhpr: return std::make_unique<LqhprScheduler>(total_power);
    case PolicyKind::MaxSumRate: return std::make_unique<MaxSumRateScheduler>(total_power);
    case PolicyKind::Qps: return std::make_unique<QpsScheduler>(std::move(bank), total_power);
    case PolicyKind::DelayOptimal:
        return std::make_unique<DelayOptimalScheduler>(std::move(bank), total_power,
                                                       bits_per_nat, options);
    }
    throw std::invalid_argument("unknown policy kind");
}

}  // namespace bcsched
