#include "bcsched/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bcsched {

namespace {

bool is_candidate(double weight, double gain)
{
    return weight > 0.0 && gain > 0.0;
}

// Among users whose curves are on top at z = 0, prefer the flatter curve
// (larger weight), since it stays on top for z > 0; then the lowest index.
int top_user_at_zero(const VectorXd& gains, const WeightVector& weights)
{
    int best = -1;
    double best_value = 0.0;
    for (int m = 0; m < gains.size(); ++m) {
        if (!is_candidate(weights[m], gains[m]))
            continue;
        const double value = weights[m] * gains[m];
        if (best < 0 || value > best_value ||
            (value == best_value && weights[m] > weights[best])) {
            best = m;
            best_value = value;
        }
    }
    return best;
}

}  // namespace

std::vector<LayerSegment> layer_partition_to(const VectorXd& gains,
                                             const WeightVector& weights,
                                             double level_max)
{
    if (gains.size() != weights.size())
        throw std::invalid_argument("gains and weights differ in length");

    std::vector<LayerSegment> segments;
    segments.reserve(static_cast<std::size_t>(gains.size()));
    int current = top_user_at_zero(gains, weights);
    if (current < 0 || !(level_max > 0.0))
        return segments;

    double level = 0.0;
    // Each switch moves to a strictly flatter curve, so at most M segments.
    for (;;) {
        double next_level = std::numeric_limits<double>::infinity();
        int next = -1;
        for (int j = 0; j < gains.size(); ++j) {
            if (j == current || !is_candidate(weights[j], gains[j]))
                continue;
            if (!(weights[j] > weights[current]))
                continue;
            const auto cross = crossing_point(weights[current], gains[current],
                                              weights[j], gains[j]);
            if (!cross)
                continue;
            const double z = std::max(*cross, level);
            if (z < next_level || (z == next_level && weights[j] > weights[next])) {
                next_level = z;
                next = j;
            }
        }
        if (next < 0 || next_level >= level_max) {
            segments.push_back({current, level, level_max});
            break;
        }
        if (next_level > level)
            segments.push_back({current, level, next_level});
        level = next_level;
        current = next;
    }
    return segments;
}

double envelope_level(const VectorXd& gains, const WeightVector& weights,
                      double water_level)
{
    double level = 0.0;
    for (int m = 0; m < gains.size(); ++m)
        if (is_candidate(weights[m], gains[m]))
            level = std::max(level, weights[m] / water_level - 1.0 / gains[m]);
    return level;
}

std::vector<LayerSegment> layer_partition(const VectorXd& gains,
                                          const WeightVector& weights,
                                          double water_level)
{
    if (!(water_level > 0.0))
        throw std::invalid_argument("water level must be positive");
    return layer_partition_to(gains, weights,
                              envelope_level(gains, weights, water_level));
}

namespace {

// Total power as a function of x = 1 / water_level.  Piecewise linear and
// convex in x: sum over subcarriers of max(0, max_m (mu_m x - 1/g_mk)).
class PowerCurve {
public:
    PowerCurve(const MatrixXd& gains, const WeightVector& weights)
    {
        const Index users = gains.rows();
        const Index subcarriers = gains.cols();
        columns_.resize(static_cast<std::size_t>(subcarriers));
        for (Index k = 0; k < subcarriers; ++k)
            for (Index m = 0; m < users; ++m)
                if (is_candidate(weights[m], gains(m, k))) {
                    columns_[k].push_back({weights[m], 1.0 / gains(m, k)});
                    peak_ = std::max(peak_, weights[m] * gains(m, k));
                }
    }

    double peak_utility() const { return peak_; }

    double operator()(double x) const
    {
        double total = 0.0;
        for (const auto& column : columns_) {
            double level = 0.0;
            for (const auto& line : column)
                level = std::max(level, line.weight * x - line.inverse_gain);
            total += level;
        }
        return total;
    }

    // Solves the linear piece active at `x` for the point where it reaches
    // `target`.  Returns x itself if no subcarrier is active there.
    double linear_solve(double x, double target) const
    {
        double slope = 0.0;
        double offset = 0.0;
        for (const auto& column : columns_) {
            double level = 0.0;
            const Line* active = nullptr;
            for (const auto& line : column) {
                const double value = line.weight * x - line.inverse_gain;
                if (value > level) {
                    level = value;
                    active = &line;
                }
            }
            if (active) {
                slope += active->weight;
                offset += active->inverse_gain;
            }
        }
        return slope > 0.0 ? (target + offset) / slope : x;
    }

private:
    struct Line {
        double weight;
        double inverse_gain;
    };
    std::vector<std::vector<Line>> columns_;
    double peak_ = 0.0;
};

}  // namespace

RateAllocation solve_wsr_instant(const ChannelState& channel,
                                 const WeightVector& weights,
                                 double total_power,
                                 const WsrOptions& options)
{
    const Index users = channel.num_users();
    const Index subcarriers = channel.num_subcarriers();
    if (weights.size() != users)
        throw std::invalid_argument("weight vector length does not match user count");
    check_weights(weights);
    if (!(total_power >= 0.0) || !std::isfinite(total_power))
        throw std::invalid_argument("power budget must be finite and nonnegative");
    if (!channel.gains.allFinite() || (channel.gains.array() < 0.0).any())
        throw std::invalid_argument("channel gains must be finite and nonnegative");

    RateAllocation result = RateAllocation::zero(users, subcarriers);
    const PowerCurve power(channel.gains, weights);
    if (total_power == 0.0 || power.peak_utility() == 0.0) {
        result.water_level = power.peak_utility();
        return result;
    }

    double lo = 1.0 / power.peak_utility();
    double hi = 2.0 * lo;
    int iterations = 0;
    while (power(hi) < total_power) {
        lo = hi;
        hi *= 2.0;
        if (++iterations > options.max_iterations || !std::isfinite(hi))
            throw ConvergenceError("water-level bisection failed to bracket the power budget");
    }
    for (int it = 0; it < options.max_iterations; ++it) {
        if (hi - lo <= options.relative_tolerance * hi)
            break;
        const double mid = 0.5 * (lo + hi);
        if (power(mid) < total_power)
            lo = mid;
        else
            hi = mid;
    }

    // Snap onto the linear piece of the power curve to make the budget tight.
    double x = hi;
    const double snapped = power.linear_solve(hi, total_power);
    if (std::isfinite(snapped) && snapped >= lo * (1.0 - 1e-9) && snapped <= hi * (1.0 + 1e-9) &&
        std::abs(power(snapped) - total_power) <= std::abs(power(hi) - total_power))
        x = snapped;

    const double water_level = 1.0 / x;
    result.water_level = water_level;
    VectorXd column_weights = weights;
    for (Index k = 0; k < subcarriers; ++k) {
        const VectorXd gains = channel.gains.col(k);
        const double level = envelope_level(gains, column_weights, water_level);
        const auto segments = layer_partition_to(gains, column_weights, level);

        std::vector<int> pi;
        pi.reserve(static_cast<std::size_t>(users));
        std::vector<bool> placed(static_cast<std::size_t>(users), false);
        for (const auto& s : segments) {
            const double g = gains[s.user];
            result.powers(s.user, k) += s.end - s.start;
            result.rates[s.user] += std::log1p(g * (s.end - s.start) / (1.0 + g * s.start));
            pi.push_back(s.user);
            placed[static_cast<std::size_t>(s.user)] = true;
        }
        for (int m = 0; m < users; ++m)
            if (!placed[static_cast<std::size_t>(m)])
                pi.push_back(m);
        result.order[static_cast<std::size_t>(k)] = std::move(pi);
    }
    result.objective = weights.dot(result.rates);
    return result;
}

RateVector rates_from_powers(const ChannelState& channel,
                             const MatrixXd& powers,
                             const std::vector<std::vector<int>>& order)
{
    const Index users = channel.num_users();
    const Index subcarriers = channel.num_subcarriers();
    if (powers.rows() != users || powers.cols() != subcarriers ||
        static_cast<Index>(order.size()) != subcarriers)
        throw std::invalid_argument("allocation shape does not match channel");

    RateVector rates = RateVector::Zero(users);
    for (Index k = 0; k < subcarriers; ++k) {
        double interference = 0.0;
        for (int m : order[static_cast<std::size_t>(k)]) {
            const double p = powers(m, k);
            const double g = channel.gains(m, k);
            if (p > 0.0)
                rates[m] += std::log1p(g * p / (1.0 + g * interference));
            interference += p;
        }
    }
    return rates;
}

double reconstruction_error(const ChannelState& channel,
                            const RateAllocation& allocation)
{
    const RateVector rebuilt = rates_from_powers(channel, allocation.powers, allocation.order);
    double worst = 0.0;
    for (Index m = 0; m < rebuilt.size(); ++m) {
        const double diff = std::abs(rebuilt[m] - allocation.rates[m]);
        if (diff == 0.0)
            continue;
        worst = std::max(worst, diff / std::max(std::abs(rebuilt[m]), 1e-12));
    }
    return worst;
}

}  // namespace bcsched
