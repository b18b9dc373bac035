#ifndef BCSCHED_CAPACITY_HPP
#define BCSCHED_CAPACITY_HPP

#include "bcsched/types.hpp"

#include <optional>
#include <vector>

namespace bcsched {

// Weighted sum-rate maximization over the instantaneous OFDM broadcast
// capacity region under a sum-power constraint.
//
// On one subcarrier, adding power dz at cumulative level z (all power already
// stacked below it is interference for the new layer) yields weighted rate
// mu_m * g_m / (1 + g_m z) dz for user m.  The optimal layering follows the
// upper envelope of these curves up to the level where the envelope meets the
// water level lambda.  Bisection on lambda enforces the sum-power budget.

/// Weighted marginal rate of user power stacked at cumulative level z.
template <typename Scalar>
Scalar marginal_utility(Scalar weight, Scalar gain, Scalar level)
{
    return weight * gain / (Scalar(1) + gain * level);
}

/// Level z* > 0 where the marginal-utility curves of users i and j intersect,
/// or nothing when they only meet at z <= 0 (or never).
template <typename Scalar>
std::optional<Scalar> crossing_point(Scalar weight_i, Scalar gain_i,
                                     Scalar weight_j, Scalar gain_j)
{
    const Scalar denom = gain_i * gain_j * (weight_j - weight_i);
    if (denom == Scalar(0))
        return std::nullopt;
    const Scalar z = (weight_i * gain_i - weight_j * gain_j) / denom;
    if (!(z > Scalar(0)))
        return std::nullopt;
    return z;
}

struct LayerSegment {
    int user;
    double start;   ///< cumulative power below this layer
    double end;
};

/// Upper-envelope partition of [0, z_max] for one subcarrier.  Segments are
/// listed bottom-up, i.e. in encoding order.  Ties between identical curves go
/// to the lowest user index.
std::vector<LayerSegment> layer_partition_to(const VectorXd& gains,
                                             const WeightVector& weights,
                                             double level_max);

/// Envelope partition up to the level where the envelope drops to
/// `water_level`.  Throws std::invalid_argument for water_level <= 0.
std::vector<LayerSegment> layer_partition(const VectorXd& gains,
                                          const WeightVector& weights,
                                          double water_level);

/// Highest level on one subcarrier at which some user's marginal utility is
/// still >= water_level (0 when none is).
double envelope_level(const VectorXd& gains, const WeightVector& weights,
                      double water_level);

struct WsrOptions {
    double relative_tolerance = 1e-8;
    int max_iterations = 200;
};

/// Exact maximizer of weights' * r over C(h, total_power).
RateAllocation solve_wsr_instant(const ChannelState& channel,
                                 const WeightVector& weights,
                                 double total_power,
                                 const WsrOptions& options = {});

/// Per-user rates recomputed from the powers and encoding orders of an
/// allocation: user pi(m) sees the power of all earlier-encoded users on the
/// same subcarrier as interference.
RateVector rates_from_powers(const ChannelState& channel,
                             const MatrixXd& powers,
                             const std::vector<std::vector<int>>& order);

/// Largest relative mismatch between stored rates and rates_from_powers.
double reconstruction_error(const ChannelState& channel,
                            const RateAllocation& allocation);

}  // namespace bcsched

#endif  // BCSCHED_CAPACITY_HPP
