#ifndef BCSCHED_TESTS_DRAIN_ORACLE_HPP
#define BCSCHED_TESTS_DRAIN_ORACLE_HPP

#include "bcsched/drain.hpp"

namespace bcsched::oracle {

struct GridDrainResult {
    VectorXd eta;
    double delay = 0.0;
    long evaluated = 0;
};

// Exhaustive search over two-user idle-onset pairs on a grid of `step`
// slots up to `max_eta`.  A pair is feasible when each user's queue is within
// the problem's tolerance of empty at ceil(eta_i); the result is the feasible
// pair with the smallest static delay.
GridDrainResult grid_drain_oracle(const DrainProblem& problem, double step, double max_eta);

}  // namespace bcsched::oracle

#endif
