#ifndef BCSCHED_DRAIN_HPP
#define BCSCHED_DRAIN_HPP

#include "bcsched/region.hpp"
#include "bcsched/types.hpp"

#include <vector>

namespace bcsched {

// Static drain problem: initial queues, no further arrivals, a fixed region.
// The delay-minimal schedule is parameterized by per-user idle-onset times
// eta_i.  In slot n user i carries weight max(0, eta_i - n + 1) / abar_i and
// stays active for eta_i slots, the last one fractional.

struct DrainProblem {
    VectorXd initial_queues;     ///< bits
    VectorXd avg_arrivals;       ///< bits/slot, weight denominators
    RateRegion* region = nullptr;
    double eta_tolerance = 1e-3;      ///< slots
    double queue_tolerance = 0.0;     ///< <= 0 selects 1e-6 * sum(initial_queues)
    long max_slots = 0;               ///< <= 0 selects 10 * sum(q) / sum(r0) + 10
    int max_outer_iterations = 50;
    double growth_factor = 1.5;

    void validate() const;
    double effective_queue_tolerance() const;
};

struct DrainTrajectory {
    MatrixXd queues;      ///< users x (H + 1); column 0 holds the initial queues
    MatrixXd rates;       ///< users x H
    MatrixXd weights;     ///< users x H
    VectorXd residual;    ///< q1 - sum_n f_i^n r_i^n, signed; negative means overshoot
    bool emptied = false;
};

struct DrainSolution {
    VectorXd eta;
    DrainTrajectory trajectory;
    double delay = 0.0;               ///< static objective of the trajectory
    std::vector<VectorXd> iterates;   ///< eta after initialization and after each sweep
    std::vector<int> order;           ///< users by decreasing q1_i / r0_i
    RateVector initial_rates;         ///< r0 at weights 1 / abar
    int sweeps = 0;
};

class DrainConvergenceError : public ConvergenceError {
public:
    DrainConvergenceError(const std::string& what, VectorXd last)
        : ConvergenceError(what), last_iterate(std::move(last))
    {
    }
    VectorXd last_iterate;
};

/// mu_i = max(0, eta_i - n + 1) / abar_i for slot n (1-based).
WeightVector weights_from_eta(const VectorXd& eta, const VectorXd& avg_arrivals, long slot);

/// Active fraction of slot n for a user with idle-onset time eta.
inline double active_fraction(double eta, long slot)
{
    const double f = eta - static_cast<double>(slot - 1);
    return f <= 0.0 ? 0.0 : (f >= 1.0 ? 1.0 : f);
}

/// Runs the weight schedule of `eta` through the region until every weight is
/// zero.  Throws DrainConvergenceError if that takes more than max_slots.
DrainTrajectory simulate_drain(const DrainProblem& problem, const VectorXd& eta);

/// Idle-onset times by coordinate-wise growth: each user's eta is pushed to
/// the largest value that still leaves its residual nonnegative, sweeping
/// users in order of decreasing q1/r0 until the iterates settle.
DrainSolution idle_state_prediction(const DrainProblem& problem);

/// sum_n sum_i q_i^n / abar_i over every column of the trajectory.
double static_delay(const MatrixXd& queues, const VectorXd& avg_arrivals);

}  // namespace bcsched

#endif  // BCSCHED_DRAIN_HPP
