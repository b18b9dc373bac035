#include "bcsched/drain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace bcsched {

void DrainProblem::validate() const
{
    if (region == nullptr)
        throw std::invalid_argument("drain problem has no region");
    const Index users = region->num_users();
    if (initial_queues.size() != users || avg_arrivals.size() != users)
        throw std::invalid_argument("drain problem vectors do not match the region's user count");
    if ((initial_queues.array() < 0.0).any() || !initial_queues.allFinite())
        throw std::invalid_argument("initial queues must be finite and nonnegative");
    if ((avg_arrivals.array() <= 0.0).any() || !avg_arrivals.allFinite())
        throw std::invalid_argument("average arrivals must be positive");
    if (!(eta_tolerance > 0.0))
        throw std::invalid_argument("eta tolerance must be positive");
    if (!(growth_factor > 1.0))
        throw std::invalid_argument("growth factor must exceed 1");
}

double DrainProblem::effective_queue_tolerance() const
{
    return queue_tolerance > 0.0 ? queue_tolerance : 1e-6 * initial_queues.sum();
}

WeightVector weights_from_eta(const VectorXd& eta, const VectorXd& avg_arrivals, long slot)
{
    if (eta.size() != avg_arrivals.size())
        throw std::invalid_argument("eta and arrival averages differ in length");
    WeightVector mu(eta.size());
    for (Index i = 0; i < eta.size(); ++i)
        mu[i] = std::max(0.0, eta[i] - static_cast<double>(slot) + 1.0) / avg_arrivals[i];
    return mu;
}

namespace {

long horizon_of(const VectorXd& eta)
{
    return eta.size() == 0 ? 0 : static_cast<long>(std::ceil(std::max(0.0, eta.maxCoeff())));
}

// Signed residual of one user after its eta_i active slots.  Only the first
// ceil(eta_i) slots matter for it.
double residual_of(const DrainProblem& problem, const VectorXd& eta, Index user)
{
    const long slots = static_cast<long>(std::ceil(std::max(0.0, eta[user])));
    double remaining = problem.initial_queues[user];
    WeightVector w(eta.size());
    for (long n = 1; n <= slots; ++n) {
        for (Index i = 0; i < eta.size(); ++i)
            w[i] = std::max(0.0, eta[i] - static_cast<double>(n) + 1.0) / problem.avg_arrivals[i];
        remaining -= active_fraction(eta[user], n) * problem.region->rate(w, user);
    }
    return remaining;
}

}  // namespace

DrainTrajectory simulate_drain(const DrainProblem& problem, const VectorXd& eta)
{
    problem.validate();
    const Index users = problem.region->num_users();
    if (eta.size() != users || (eta.array() < 0.0).any() || !eta.allFinite())
        throw std::invalid_argument("eta must be finite, nonnegative and one per user");
    const long horizon = horizon_of(eta);
    if (problem.max_slots > 0 && horizon > problem.max_slots) {
        std::ostringstream msg;
        msg << "drain horizon " << horizon << " exceeds the cap of " << problem.max_slots << " slots";
        throw DrainConvergenceError(msg.str(), eta);
    }

    DrainTrajectory out;
    out.queues.resize(users, horizon + 1);
    out.rates.resize(users, horizon);
    out.weights.resize(users, horizon);
    out.queues.col(0) = problem.initial_queues;
    out.residual = problem.initial_queues;
    for (long n = 1; n <= horizon; ++n) {
        const WeightVector w = weights_from_eta(eta, problem.avg_arrivals, n);
        const RateVector r = problem.region->rates(w);
        out.weights.col(n - 1) = w;
        out.rates.col(n - 1) = r;
        out.queues.col(n) = (out.queues.col(n - 1) - r).cwiseMax(0.0);
        for (Index i = 0; i < users; ++i)
            out.residual[i] -= active_fraction(eta[i], n) * r[i];
    }
    out.emptied = (out.queues.col(horizon).array() <= problem.effective_queue_tolerance()).all();
    return out;
}

double static_delay(const MatrixXd& queues, const VectorXd& avg_arrivals)
{
    if (avg_arrivals.size() != queues.rows())
        throw std::invalid_argument("arrival averages do not match user count");
    return (queues.rowwise().sum().array() / avg_arrivals.array()).sum();
}

DrainSolution idle_state_prediction(const DrainProblem& problem)
{
    problem.validate();
    const Index users = problem.region->num_users();
    const VectorXd& q = problem.initial_queues;
    const double queue_tol = problem.effective_queue_tolerance();

    DrainSolution solution;
    solution.eta = VectorXd::Zero(users);
    solution.initial_rates = problem.region->rates(problem.avg_arrivals.cwiseInverse());
    solution.order.resize(static_cast<std::size_t>(users));
    std::iota(solution.order.begin(), solution.order.end(), 0);
    if (q.sum() == 0.0) {
        solution.iterates.push_back(solution.eta);
        solution.trajectory = simulate_drain(problem, solution.eta);
        return solution;
    }

    constexpr double inf = std::numeric_limits<double>::infinity();
    VectorXd ratio(users);
    for (Index i = 0; i < users; ++i)
        ratio[i] = solution.initial_rates[i] > 0.0 ? q[i] / solution.initial_rates[i] : inf;
    if (ratio.minCoeff() == inf)
        throw DrainConvergenceError("region serves no user at the initial weights", solution.eta);
    std::stable_sort(solution.order.begin(), solution.order.end(),
                     [&](int a, int b) { return ratio[a] > ratio[b]; });

    DrainProblem capped = problem;
    if (capped.max_slots <= 0)
        capped.max_slots = static_cast<long>(std::ceil(10.0 * q.sum() / solution.initial_rates.sum())) + 10;
    const double cap = static_cast<double>(capped.max_slots);

    VectorXd eta = VectorXd::Constant(users, ratio.minCoeff());
    solution.iterates.push_back(eta);

    // Residuals below `floor` count as drained.  Growth stops on entering
    // [floor, queue_tol], so a user never slides along the flat tail of its
    // residual once it is empty.
    const double floor = 0.1 * queue_tol;

    // Pushes eta_i to where its residual first drops below the floor.
    const auto grow = [&](Index i) {
        const auto residual_at = [&](double value) {
            VectorXd trial = eta;
            trial[i] = value;
            return residual_of(capped, trial, i) - floor;
        };
        const double target = queue_tol - floor;
        double lo = eta[i];
        double lo_residual = residual_at(lo);
        if (lo_residual <= target)
            return;
        // First guess: serve the residual at the rate of the current last slot.
        const long last = std::max(1L, static_cast<long>(std::ceil(lo)));
        const double last_rate =
            capped.region->rate(weights_from_eta(eta, capped.avg_arrivals, last), i);
        double hi = last_rate > 0.0 ? lo + lo_residual / last_rate + 1e-9 * (1.0 + lo)
                                    : std::max(lo * capped.growth_factor, lo + 1.0);
        hi = std::min(cap, hi);
        double hi_residual = residual_at(hi);
        while (hi_residual >= 0.0) {
            if (hi >= cap) {
                std::ostringstream msg;
                msg << "user " << i << " cannot be drained within " << capped.max_slots << " slots";
                eta[i] = hi;
                throw DrainConvergenceError(msg.str(), eta);
            }
            lo = hi;
            lo_residual = hi_residual;
            hi = std::min(cap, std::max(hi * capped.growth_factor, hi + 1.0));
            hi_residual = residual_at(hi);
        }
        // Illinois false position, with a bisection step whenever the bracket
        // fails to halve.
        double hi_weight = hi_residual;
        bool bisect = false;
        while (lo_residual > target && hi - lo > 1e-13 * (1.0 + hi)) {
            const double width = hi - lo;
            double mid = bisect ? 0.5 * (lo + hi)
                                : lo + lo_residual * width / (lo_residual - hi_weight);
            if (!(mid > lo && mid < hi))
                mid = 0.5 * (lo + hi);
            const double mid_residual = residual_at(mid);
            if (mid_residual >= 0.0) {
                lo = mid;
                lo_residual = mid_residual;
                hi_weight *= 0.5;
            } else {
                hi = mid;
                hi_weight = mid_residual;
            }
            bisect = !bisect && hi - lo > 0.5 * width;
        }
        eta[i] = lo;
    };

    const auto residuals = [&](const VectorXd& candidate) {
        VectorXd out(users);
        for (Index i = 0; i < users; ++i)
            out[i] = residual_of(capped, candidate, i);
        return out;
    };

    // A jump may not overshoot anyone or push a user into its drained tail.
    const auto acceptable = [&](const VectorXd& candidate) {
        for (Index i = 0; i < users; ++i) {
            const double r = residual_of(capped, candidate, i);
            if (r < 0.0 || (r < floor && candidate[i] != eta[i]))
                return false;
        }
        return true;
    };

    VectorXd last_step = VectorXd::Zero(users);
    for (int sweep = 1; sweep <= capped.max_outer_iterations; ++sweep) {
        const VectorXd previous = eta;
        for (int i : solution.order)
            grow(i);
        const VectorXd step = eta - previous;

        // The sweeps contract linearly.  Try a Newton jump on the residual map,
        // then the geometric tail of the steps.
        bool jumped = false;
        {
            const VectorXd base = residuals(eta);
            MatrixXd jacobian(users, users);
            for (Index j = 0; j < users; ++j) {
                const double h = std::max(1e-6, 1e-5 * eta[j]);
                VectorXd probe = eta;
                probe[j] += h;
                jacobian.col(j) = (residuals(probe) - base) / h;
            }
            VectorXd goal = base;
            for (Index i = 0; i < users; ++i)
                if (base[i] > queue_tol)
                    goal[i] = 0.0;
            const VectorXd delta = jacobian.fullPivLu().solve(goal - base);
            if (delta.allFinite() && (delta.array() > -capped.eta_tolerance).all()) {
                // Aim a quarter tolerance short of the root; growth finishes.
                for (double scale : {1.0, 0.9, 0.7, 0.5, 0.25}) {
                    const VectorXd aimed = (eta + scale * delta).array() - 0.25 * capped.eta_tolerance;
                    const VectorXd candidate = aimed.cwiseMax(eta).cwiseMin(cap);
                    if ((candidate - eta).maxCoeff() > 0.0 && acceptable(candidate)) {
                        eta = candidate;
                        jumped = true;
                        break;
                    }
                }
            }
        }
        if (!jumped && sweep > 1) {
            const double prior = last_step.norm();
            const double ratio = prior > 0.0 ? step.norm() / prior : 0.0;
            const VectorXd jump = (ratio > 0.0 && ratio < 0.95)
                                      ? VectorXd(step * (ratio / (1.0 - ratio)))
                                      : VectorXd::Zero(users);
            for (double scale = 1.0; scale > 0.1 && jump.maxCoeff() > 0.0; scale *= 0.5) {
                const VectorXd candidate = (eta + scale * jump).cwiseMin(cap);
                if (acceptable(candidate)) {
                    eta = candidate;
                    break;
                }
            }
        }
        last_step = step;
        solution.iterates.push_back(eta);
        solution.sweeps = sweep;

        const double change = step.cwiseAbs().maxCoeff();
        if (change >= capped.eta_tolerance)
            continue;
        // Each user must be empty at the end of its last active slot.
        DrainTrajectory trajectory = simulate_drain(capped, eta);
        bool empty = true;
        for (Index i = 0; i < users; ++i) {
            const auto last = static_cast<Index>(std::ceil(eta[i]));
            empty = empty && trajectory.queues(i, last) <= queue_tol;
        }
        if (empty) {
            solution.eta = eta;
            solution.trajectory = std::move(trajectory);
            solution.delay = static_delay(solution.trajectory.queues, problem.avg_arrivals);
            return solution;
        }
    }
    throw DrainConvergenceError("idle state prediction did not converge within the sweep cap", eta);
}

}  // namespace bcsched
