#include "bcsched/simulation.hpp"

#include "bcsched/ergodic.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

namespace bcsched {

Trace::Trace(Index users, long slots)
    : queue_bits(users, slots), rate_bits(users, slots), arrival_bits(users, slots),
      weights(users, slots)
{
}

SlotRecord Trace::record(long n) const
{
    if (n < 0 || n >= size())
        throw std::out_of_range("slot index outside the trace");
    return {n, queue_bits.col(n), rate_bits.col(n), arrival_bits.col(n), weights.col(n)};
}

void Trace::store(const SlotRecord& r)
{
    queue_bits.col(r.slot) = r.queue_bits;
    rate_bits.col(r.slot) = r.rate_bits;
    arrival_bits.col(r.slot) = r.arrival_bits;
    weights.col(r.slot) = r.weights;
}

StabilityReport stability_probe(const MatrixXd& queues, double arrivals_per_slot)
{
    const long n = static_cast<long>(queues.cols());
    if (n < kMinStabilityWindow) {
        std::ostringstream msg;
        msg << "stability probe needs at least " << kMinStabilityWindow
            << " post-warmup slots, got " << n;
        throw std::invalid_argument(msg.str());
    }
    const VectorXd total = queues.colwise().sum().transpose();

    StabilityReport report;
    report.window = n;
    report.arrivals_per_slot = arrivals_per_slot;

    // Least-squares slope over the last half, centred abscissa.
    const long start = n / 2;
    const long len = n - start;
    const double centre = 0.5 * static_cast<double>(len - 1);
    const double mean = total.segment(start, len).mean();
    double sxy = 0.0, sxx = 0.0;
    for (long k = 0; k < len; ++k) {
        const double x = static_cast<double>(k) - centre;
        sxy += x * (total[start + k] - mean);
        sxx += x * x;
    }
    report.slope = sxy / sxx;

    const long quarter = n / 4;
    report.mid_mean = total.segment(quarter, n / 2 - quarter).mean();
    report.last_mean = total.segment(n - quarter, quarter).mean();

    const bool flat = report.slope <= 0.01 * arrivals_per_slot;
    const bool bounded = report.last_mean <= 2.0 * std::max(report.mid_mean, arrivals_per_slot);
    report.stable = flat && bounded;
    return report;
}

RunSummary summarize(const Trace& trace, const SimConfig& config)
{
    const long begin = std::min<long>(config.warmup_slots, trace.size());
    const long len = trace.size() - begin;
    if (len <= 0)
        throw std::invalid_argument("trace has no post-warmup slots");
    const auto queues = trace.queue_bits.middleCols(begin, len);

    RunSummary s;
    s.config = config;
    s.mean_arrival_bits = trace.arrival_bits.middleCols(begin, len).rowwise().mean();
    s.mean_queue_bits = queues.rowwise().mean();
    s.max_queue_bits = queues.rowwise().maxCoeff();
    s.delay = delay_metrics(queues, s.mean_arrival_bits.cwiseMax(config.avg_floor),
                            config.slot_duration_s());
    if (len >= kMinStabilityWindow) {
        s.stability = stability_probe(queues, s.mean_arrival_bits.sum());
        s.stability_determined = true;
    }
    return s;
}

RunResult run(const SimConfig& config)
{
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const ChannelConfig channel = config.seeded_channel();
    const Index users = channel.num_users;
    const double total_power = config.total_power();
    const double bits_per_nat = config.bits_per_nat();
    const double slot = config.slot_duration_s();

    std::shared_ptr<const ErgodicBank> bank;
    if (config.policy == PolicyKind::Qps || config.policy == PolicyKind::DelayOptimal)
        bank = std::make_shared<const ErgodicBank>(build_bank(channel, config.scheduler_bank_size));
    auto scheduler = make_scheduler(config.policy, bank, total_power, bits_per_nat, config.delay_opt);

    ChannelGenerator generator(channel, derive_seed(config.seed, "channel"));
    Rng arrival_rng(derive_seed(config.seed, "arrivals"));
    ArrivalAverager averager(users, config.avg_window, config.avg_mode, config.avg_floor);

    RunResult result;
    result.trace = Trace(users, config.num_slots);
    QueueState queues{VectorXd::Zero(users), 0};
    long fallbacks = 0;
    SlotRecord record;
    for (long n = 0; n < config.num_slots; ++n) {
        const ChannelState h = generator.draw_block();
        const VectorXd arrivals = draw_arrivals(config.arrivals, slot, arrival_rng);
        const MacState mac{queues.bits, averager.current(), n};
        const PolicyDecision decision = scheduler->decide(h, mac);
        if (decision.fallback && ++fallbacks > config.nonconvergence_quota) {
            std::ostringstream msg;
            msg << "drain solver failed in " << fallbacks << " slots, quota is "
                << config.nonconvergence_quota;
            throw ConvergenceError(msg.str());
        }
        record.slot = n;
        record.queue_bits = queues.bits;
        record.rate_bits = decision.allocation.rates * bits_per_nat;
        record.arrival_bits = arrivals;
        record.weights = decision.weights;
        result.trace.store(record);
        queues = step_queues(queues, record.rate_bits, arrivals);
        averager.update(arrivals);
    }

    result.summary = summarize(result.trace, config);
    result.summary.fallbacks = fallbacks;
    result.summary.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

bool replay_matches(const Trace& trace)
{
    if (trace.size() == 0)
        return true;
    QueueState q{trace.queue_bits.col(0), 0};
    for (long n = 0; n + 1 < trace.size(); ++n) {
        if (q.bits != trace.queue_bits.col(n))
            return false;
        q = step_queues(q, trace.rate_bits.col(n), trace.arrival_bits.col(n));
    }
    return q.bits == trace.queue_bits.col(trace.size() - 1);
}

std::vector<SweepRow> load_sweep(const SimConfig& base,
                                 const std::vector<std::vector<double>>& points_bps,
                                 const std::vector<PolicyKind>& policies, int seeds,
                                 int threads)
{
    if (seeds < 1)
        throw std::invalid_argument("need at least one seed");
    for (const auto& p : points_bps)
        if (static_cast<int>(p.size()) != base.channel.num_users)
            throw std::invalid_argument("every load point needs one rate per user");

    struct Job {
        std::size_t row;
        int seed;
    };
    std::vector<SweepRow> rows;
    std::vector<Job> jobs;
    for (const auto& point : points_bps)
        for (PolicyKind policy : policies) {
            SweepRow row;
            row.rates_bps = point;
            row.policy = policy;
            row.per_seed_ms.assign(static_cast<std::size_t>(seeds), 0.0);
            for (int r = 0; r < seeds; ++r)
                jobs.push_back({rows.size(), r});
            rows.push_back(std::move(row));
        }

    std::vector<char> stable(jobs.size(), 1);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    const auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                const Job& job = jobs[k];
                SimConfig config = base;
                config.set_bit_rates(rows[job.row].rates_bps,
                                     base.arrivals.empty() ? 1000.0
                                                           : base.arrivals.front().packet_size_bits);
                config.policy = rows[job.row].policy;
                config.seed = base.seed + static_cast<std::uint64_t>(job.seed);
                const RunResult result = run(config);
                rows[job.row].per_seed_ms[static_cast<std::size_t>(job.seed)] =
                    result.summary.delay.mean_ms();
                stable[k] = !result.summary.stability_determined || result.summary.stability.stable;
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_lock);
                if (!failure)
                    failure = std::current_exception();
                next = jobs.size();
            }
        }
    };

    int count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    count = std::clamp(count, 1, static_cast<int>(jobs.size()));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < count; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    for (std::size_t k = 0; k < jobs.size(); ++k)
        if (!stable[k])
            rows[jobs[k].row].stable = false;
    for (auto& row : rows) {
        const Eigen::Map<const VectorXd> d(row.per_seed_ms.data(), seeds);
        row.mean_delay_ms = d.mean();
        row.stderr_ms = seeds > 1 ? std::sqrt((d.array() - row.mean_delay_ms).square().sum() /
                                              (seeds - 1) / seeds)
                                  : 0.0;
    }
    return rows;
}

VectorXd boundary_rates_bps(const SimConfig& config, const VectorXd& direction)
{
    const ChannelConfig channel = config.seeded_channel();
    const ErgodicBank bank = build_bank(channel, config.region_bank_size);
    const BoundaryPoint point = boundary_point_in_direction(bank, direction, config.total_power());
    return point.rates * config.bits_per_nat() / config.slot_duration_s();
}

}  // namespace bcsched
