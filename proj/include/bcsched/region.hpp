#ifndef BCSCHED_REGION_HPP
#define BCSCHED_REGION_HPP

#include "bcsched/capacity.hpp"
#include "bcsched/channel.hpp"

#include <map>
#include <optional>
#include <vector>

namespace bcsched {

/// A capacity region queried through its weighted sum-rate maximizer.
/// Rates are reported in the caller's queue units per slot (scale * nats).
class RateRegion {
public:
    virtual ~RateRegion() = default;
    virtual Index num_users() const = 0;
    virtual RateVector rates(const WeightVector& weights) = 0;
    /// One coordinate of rates(weights).
    virtual double rate(const WeightVector& weights, Index user) { return rates(weights)[user]; }
};

/// C(h, P) for a single fading state.
class InstantRegion final : public RateRegion {
public:
    InstantRegion(ChannelState channel, double total_power, double scale = 1.0)
        : channel_(std::move(channel)), total_power_(total_power), scale_(scale)
    {
    }

    Index num_users() const override { return channel_.num_users(); }
    RateVector rates(const WeightVector& weights) override
    {
        return scale_ * solve_wsr_instant(channel_, weights, total_power_).rates;
    }

    const ChannelState& channel() const { return channel_; }

private:
    ChannelState channel_;
    double total_power_;
    double scale_;
};

/// Sampled ergodic region with memoized boundary points.  Weights are
/// normalized onto the simplex and quantized to `resolution`; each grid node is
/// solved at the node itself, so cached answers never depend on query history.
/// Two-user regions interpolate linearly between adjacent nodes.
class ErgodicRegion final : public RateRegion {
public:
    ErgodicRegion(const ErgodicBank& bank, double total_power, double scale = 1.0,
                  double resolution = 1e-4);

    Index num_users() const override { return users_; }
    RateVector rates(const WeightVector& weights) override;
    double rate(const WeightVector& weights, Index user) override;

    /// Uncached expected rates at exactly these weights.
    RateVector exact_rates(const WeightVector& weights) const;
    std::size_t cached_nodes() const { return pair_nodes_filled_ + simplex_nodes_.size(); }

private:
    const RateVector& pair_node(Index j);

    const ErgodicBank* bank_;
    double total_power_;
    double scale_;
    double resolution_;
    Index users_;
    Index steps_;
    std::vector<std::optional<RateVector>> pair_nodes_;
    std::size_t pair_nodes_filled_ = 0;
    std::map<std::vector<long>, RateVector> simplex_nodes_;
};

}  // namespace bcsched

#endif  // BCSCHED_REGION_HPP
