#include "bcsched/region.hpp"

#include "bcsched/ergodic.hpp"

#include <cmath>

namespace bcsched {

ErgodicRegion::ErgodicRegion(const ErgodicBank& bank, double total_power, double scale,
                             double resolution)
    : bank_(&bank), total_power_(total_power), scale_(scale), resolution_(resolution)
{
    if (bank.samples.empty())
        throw std::invalid_argument("ergodic bank is empty");
    if (!(resolution > 0.0) || resolution > 0.5)
        throw std::invalid_argument("cache resolution must lie in (0, 0.5]");
    users_ = bank.samples.front().num_users();
    steps_ = static_cast<Index>(std::llround(1.0 / resolution));
    if (users_ == 2)
        pair_nodes_.resize(static_cast<std::size_t>(steps_ + 1));
}

RateVector ErgodicRegion::exact_rates(const WeightVector& weights) const
{
    return scale_ * solve_wsr_ergodic(*bank_, weights, total_power_);
}

const RateVector& ErgodicRegion::pair_node(Index j)
{
    auto& slot = pair_nodes_[static_cast<std::size_t>(j)];
    if (!slot) {
        WeightVector w(2);
        w << static_cast<double>(j) / steps_, static_cast<double>(steps_ - j) / steps_;
        slot = exact_rates(w);
        ++pair_nodes_filled_;
    }
    return *slot;
}

double ErgodicRegion::rate(const WeightVector& weights, Index user)
{
    if (users_ != 2 || weights.size() != 2)
        return rates(weights)[user];
    if (!(weights[0] >= 0.0 && weights[1] >= 0.0) || !std::isfinite(weights[0] + weights[1]))
        throw std::invalid_argument("weights must be finite and nonnegative");
    const double total = weights[0] + weights[1];
    if (total == 0.0)
        return 0.0;
    const double position = weights[0] / total * static_cast<double>(steps_);
    const Index j = std::min(static_cast<Index>(std::floor(position)), steps_);
    const double frac = position - static_cast<double>(j);
    if (j == steps_ || frac == 0.0)
        return pair_node(j)[user];
    const double upper = pair_node(j + 1)[user];
    return (1.0 - frac) * pair_node(j)[user] + frac * upper;
}

RateVector ErgodicRegion::rates(const WeightVector& weights)
{
    if (weights.size() != users_)
        throw std::invalid_argument("weight vector length does not match user count");
    check_weights(weights);
    const double total = weights.sum();
    if (total == 0.0)
        return RateVector::Zero(users_);
    if (users_ == 2) {
        const double position = weights[0] / total * static_cast<double>(steps_);
        const Index j = std::min(static_cast<Index>(std::floor(position)), steps_);
        const double frac = position - static_cast<double>(j);
        if (j == steps_ || frac == 0.0)
            return pair_node(j);
        pair_node(j + 1);
        return (1.0 - frac) * pair_node(j) + frac * pair_node(j + 1);
    }

    const WeightVector unit = weights / total;

    std::vector<long> key(static_cast<std::size_t>(users_));
    WeightVector node(users_);
    for (Index m = 0; m < users_; ++m) {
        key[static_cast<std::size_t>(m)] = std::lround(unit[m] / resolution_);
        node[m] = static_cast<double>(key[static_cast<std::size_t>(m)]) * resolution_;
    }
    auto it = simplex_nodes_.find(key);
    if (it == simplex_nodes_.end())
        it = simplex_nodes_.emplace(std::move(key), exact_rates(node)).first;
    return it->second;
}

}  // namespace bcsched
