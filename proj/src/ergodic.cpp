#include "bcsched/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bcsched {

RateVector solve_wsr_ergodic(const ErgodicBank& bank, const WeightVector& weights,
                             double total_power)
{
    if (bank.samples.empty())
        throw std::invalid_argument("ergodic bank is empty");
    RateVector sum = RateVector::Zero(bank.samples.front().num_users());
    for (const auto& sample : bank.samples)
        sum += solve_wsr_instant(sample, weights, total_power).rates;
    return sum / static_cast<double>(bank.samples.size());
}

BoundaryPoint boundary_point_in_direction(const RateOracle& region,
                                          const VectorXd& direction,
                                          const DirectionOptions& options)
{
    if (direction.size() == 0 || (direction.array() < 0.0).any() || !direction.allFinite())
        throw std::invalid_argument("direction must be finite and nonnegative");
    std::vector<Index> support;
    for (Index i = 0; i < direction.size(); ++i)
        if (direction[i] > 0.0)
            support.push_back(i);
    if (support.empty())
        throw std::invalid_argument("direction must be nonzero");

    BoundaryPoint point;
    point.weights = WeightVector::Zero(direction.size());
    if (support.size() == 1) {
        point.weights[support.front()] = 1.0;
        point.rates = region(point.weights);
        return point;
    }

    // Fixed point r(mu) proportional to d.  Over-served users (r_i/d_i above
    // the mean) get their weight shrunk multiplicatively.
    const auto spread = [&](const RateVector& r, VectorXd& served) {
        served.resize(static_cast<Index>(support.size()));
        for (std::size_t s = 0; s < support.size(); ++s)
            served[static_cast<Index>(s)] = r[support[s]] / direction[support[s]];
        const double mean = served.mean();
        if (!(mean > 0.0))
            throw ConvergenceError("boundary search: region has no rate along direction");
        return (served.maxCoeff() - served.minCoeff()) / mean;
    };

    WeightVector mu = WeightVector::Zero(direction.size());
    for (Index i : support)
        mu[i] = 1.0 / static_cast<double>(support.size());
    VectorXd served;
    RateVector r = region(mu);
    double error = spread(r, served);
    double step = 1.0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        point.iterations = it;
        if (error <= options.tolerance) {
            point.weights = mu;
            point.rates = r;
            return point;
        }
        const double mean = served.mean();
        WeightVector trial = mu;
        for (std::size_t s = 0; s < support.size(); ++s)
            trial[support[s]] *= std::exp(-step * (served[static_cast<Index>(s)] - mean) / mean);
        trial /= trial.sum();

        const RateVector trial_rates = region(trial);
        VectorXd trial_served;
        const double trial_error = spread(trial_rates, trial_served);
        if (trial_error < error) {
            mu = trial;
            r = trial_rates;
            served = trial_served;
            error = trial_error;
            step = std::min(step * 1.5, 64.0);
        } else {
            step *= 0.5;
            if (step < 1e-12)
                break;
        }
    }
    throw ConvergenceError("boundary search did not converge within the iteration cap");
}

BoundaryPoint boundary_point_in_direction(const ErgodicBank& bank,
                                          const VectorXd& direction,
                                          double total_power,
                                          const DirectionOptions& options)
{
    return boundary_point_in_direction(
        [&](const WeightVector& w) { return solve_wsr_ergodic(bank, w, total_power); },
        direction, options);
}

namespace {

void simplex_grid(Index users, int steps, WeightVector& current, Index position, int remaining,
                  std::vector<WeightVector>& out)
{
    if (position == users - 1) {
        current[position] = static_cast<double>(remaining) / steps;
        out.push_back(current);
        return;
    }
    for (int s = remaining; s >= 0; --s) {
        current[position] = static_cast<double>(s) / steps;
        simplex_grid(users, steps, current, position + 1, remaining - s, out);
    }
}

}  // namespace

std::vector<RegionSample> sweep_region(const ErgodicBank& bank, int num_angles,
                                       double total_power)
{
    if (num_angles < 2)
        throw std::invalid_argument("need at least two sweep points");
    if (bank.samples.empty())
        throw std::invalid_argument("ergodic bank is empty");
    const Index users = bank.samples.front().num_users();

    std::vector<RegionSample> table;
    if (users == 2) {
        for (int j = 0; j < num_angles; ++j) {
            RegionSample row;
            row.theta = 0.5 * std::numbers::pi * j / (num_angles - 1);
            row.weights = WeightVector(2);
            // Pin the endpoints so the corners are exact single-user points.
            if (j == 0)
                row.weights << 1.0, 0.0;
            else if (j == num_angles - 1)
                row.weights << 0.0, 1.0;
            else
                row.weights << std::cos(row.theta), std::sin(row.theta);
            row.rates = solve_wsr_ergodic(bank, row.weights, total_power);
            table.push_back(std::move(row));
        }
        return table;
    }

    std::vector<WeightVector> grid;
    WeightVector scratch(users);
    simplex_grid(users, num_angles - 1, scratch, 0, num_angles - 1, grid);
    for (auto& w : grid) {
        RegionSample row;
        row.rates = solve_wsr_ergodic(bank, w, total_power);
        row.weights = std::move(w);
        table.push_back(std::move(row));
    }
    return table;
}

}  // namespace bcsched
