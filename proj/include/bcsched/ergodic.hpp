#ifndef BCSCHED_ERGODIC_HPP
#define BCSCHED_ERGODIC_HPP

#include "bcsched/capacity.hpp"
#include "bcsched/channel.hpp"

#include <functional>
#include <vector>

namespace bcsched {

/// Sample mean over the bank of the instantaneous maximizer's rates (nats).
/// Summation runs in bank order.
RateVector solve_wsr_ergodic(const ErgodicBank& bank, const WeightVector& weights,
                             double total_power);

struct BoundaryPoint {
    RateVector rates;
    WeightVector weights;   ///< supporting weights, normalized to sum 1
    int iterations = 0;
};

struct DirectionOptions {
    double tolerance = 1e-3;
    int max_iterations = 500;
};

using RateOracle = std::function<RateVector(const WeightVector&)>;

/// Boundary point of a region along the ray {a d : a >= 0} and a weight vector
/// supporting it.  Users with d_i = 0 get zero weight.  Throws
/// ConvergenceError when the multiplicative fixed-point iteration stalls.
BoundaryPoint boundary_point_in_direction(const RateOracle& region,
                                          const VectorXd& direction,
                                          const DirectionOptions& options = {});

BoundaryPoint boundary_point_in_direction(const ErgodicBank& bank,
                                          const VectorXd& direction,
                                          double total_power,
                                          const DirectionOptions& options = {});

struct RegionSample {
    double theta = 0.0;          ///< only meaningful for two users
    WeightVector weights;
    RateVector rates;            ///< nats
};

/// Two users: mu(theta) = (cos theta, sin theta) on num_angles evenly spaced
/// angles in [0, pi/2].  Other user counts: a simplex grid of weights with
/// num_angles - 1 steps per axis.
std::vector<RegionSample> sweep_region(const ErgodicBank& bank, int num_angles,
                                       double total_power);

}  // namespace bcsched

#endif  // BCSCHED_ERGODIC_HPP
