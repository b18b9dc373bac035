// One PASS/FAIL line per acceptance criterion.  Exits nonzero when any
// criterion fails.

#include "bcsched/capacity.hpp"
#include "bcsched/drain.hpp"
#include "bcsched/ergodic.hpp"
#include "bcsched/io.hpp"
#include "bcsched/schedulers.hpp"
#include "bcsched/simulation.hpp"

#include "drain_oracle.hpp"
#include "wsr_oracle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace bcsched;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    std::function<Outcome()> check;
};

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

VectorXd vec(std::initializer_list<double> v)
{
    VectorXd out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

// Largest reconstruction error over every allocation checked so far.
struct ReconstructionLog {
    double worst = 0.0;
    long checked = 0;

    void add(const ChannelState& h, const RateAllocation& a)
    {
        worst = std::max(worst, reconstruction_error(h, a));
        ++checked;
    }
};

ReconstructionLog recon;

RateAllocation solve_logged(const ChannelState& h, const WeightVector& mu, double P)
{
    RateAllocation a = solve_wsr_instant(h, mu, P);
    recon.add(h, a);
    return a;
}

SimConfig desk_config()
{
    SimConfig c;
    c.scheduler_bank_size = 100;
    c.region_bank_size = 500;
    return c;
}

double angle_deg(const VectorXd& a, const VectorXd& b)
{
    const double c = a.dot(b) / (a.norm() * b.norm());
    return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

// ---------------------------------------------------------------------------

Outcome wsr_oracle_equivalence()
{
    Stopwatch clock;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> log_gain(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    double worst = 0.0;
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index users = 2 + trial % 2;
        const Index subcarriers = 1 + (trial / 2) % 2;
        MatrixXd g(users, subcarriers);
        for (Index m = 0; m < users; ++m)
            for (Index k = 0; k < subcarriers; ++k)
                g(m, k) = std::exp(log_gain(gen));
        WeightVector mu(users);
        for (Index m = 0; m < users; ++m)
            mu[m] = weight(gen);
        const ChannelState h = ChannelState::from_gains(g);
        const RateAllocation exact = solve_logged(h, mu, 10.0);
        const RateAllocation grid = oracle::brute_force_wsr(h, mu, 10.0, 400);
        const double gap = std::abs(exact.objective - grid.objective) / grid.objective;
        worst = std::max(worst, gap);
        if (gap > 0.005 || exact.objective < grid.objective - 1e-9)
            ++failures;
    }
    const double t = clock.seconds();
    return {failures == 0 && t < 30.0,
            fmt("100 instances, worst relative gap %.2e, %d outside 0.5%%, %.1f s (limit 30 s)",
                worst, failures, t)};
}

Outcome analytic_spot_checks()
{
    struct Case {
        MatrixXd g;
        WeightVector mu;
        VectorXd rates;
        VectorXd powers;
    };
    MatrixXd g1(1, 1), g2(2, 1), g3(2, 1);
    g1 << 4.0;
    g2 << 2.0, 1.0;
    g3 << 4.0, 1.0;
    const std::vector<Case> cases = {
        {g1, vec({1}), vec({std::log(41.0)}), vec({10})},
        {g2, vec({1, 2}), vec({0, std::log(11.0)}), vec({0, 10})},
        {g3, vec({1, 1.5}), vec({std::log(6.0), std::log(11.0 / 2.25)}), vec({1.25, 8.75})},
    };
    double worst = 0.0;
    for (const Case& c : cases) {
        const ChannelState h = ChannelState::from_gains(c.g);
        const RateAllocation a = solve_logged(h, c.mu, 10.0);
        const VectorXd p = a.powers.rowwise().sum();
        for (Index i = 0; i < c.rates.size(); ++i) {
            worst = std::max(worst, std::abs(a.rates[i] - c.rates[i]) / std::max(1.0, c.rates[i]));
            worst = std::max(worst, std::abs(p[i] - c.powers[i]) / std::max(1.0, c.powers[i]));
        }
    }
    return {worst <= 1e-6, fmt("3 instances, worst relative error %.2e (limit 1e-6)", worst)};
}

Outcome algorithm1_properties()
{
    Stopwatch clock;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int monotone_bad = 0, empty_bad = 0, order_bad = 0, errors = 0;
    std::string order_cases;
    for (int trial = 0; trial < 20; ++trial) {
        const Index users = 2 + trial % 2;
        const Index k = 1 + trial % 4;
        MatrixXd g(users, k);
        for (Index i = 0; i < users; ++i)
            for (Index c = 0; c < k; ++c)
                g(i, c) = std::pow(10.0, -1.0 + 2.0 * unit(rng));
        VectorXd q(users), abar(users);
        for (Index i = 0; i < users; ++i) {
            q[i] = 5.0 + 45.0 * unit(rng);
            abar[i] = 0.5 + 1.5 * unit(rng);
        }
        InstantRegion region(ChannelState::from_gains(g), 10.0);
        DrainProblem p;
        p.initial_queues = q;
        p.avg_arrivals = abar;
        p.region = &region;
        DrainSolution s;
        try {
            s = idle_state_prediction(p);
        } catch (const ConvergenceError&) {
            ++errors;
            continue;
        }
        const double tol = p.effective_queue_tolerance();
        bool monotone = true;
        for (std::size_t t = 1; t < s.iterates.size(); ++t)
            monotone = monotone && (s.iterates[t].array() >= s.iterates[t - 1].array()).all();
        monotone_bad += !monotone;
        bool empty = true;
        for (Index i = 0; i < users; ++i)
            empty = empty && std::abs(s.trajectory.queues(i, static_cast<Index>(std::ceil(s.eta[i])))) <= tol;
        empty_bad += !empty;
        bool ordered = true;
        for (Index a = 0; a < users; ++a)
            for (Index b = 0; b < users; ++b)
                if (q[a] / s.initial_rates[a] >= q[b] / s.initial_rates[b] &&
                    s.eta[a] < s.eta[b] - p.eta_tolerance)
                    ordered = false;
        if (!ordered) {
            ++order_bad;
            order_cases += (order_cases.empty() ? "" : ",") + std::to_string(trial);
        }
    }

    MatrixXd toy_g(2, 1);
    toy_g << 4.0, 1.0;
    InstantRegion toy_region(ChannelState::from_gains(toy_g), 10.0);
    DrainProblem toy;
    toy.initial_queues = vec({30, 10});
    toy.avg_arrivals = vec({1, 1});
    toy.region = &toy_region;
    const DrainSolution toy_solution = idle_state_prediction(toy);
    const auto best = oracle::grid_drain_oracle(toy, 0.05, 16.0);
    const double toy_gap = std::abs(toy_solution.delay - best.delay) / best.delay;

    const double t = clock.seconds();
    const bool pass = monotone_bad == 0 && empty_bad == 0 && order_bad == 0 && errors == 0 &&
                      toy_gap <= 0.02 && t < 120.0;
    return {pass, fmt("20 instances: %d non-monotone, %d not emptied, %d order violations%s%s%s, "
                      "%d non-converged; toy delay %.4f vs oracle %.4f (gap %.2f%%); %.1f s",
                      monotone_bad, empty_bad, order_bad, order_bad ? " (trials " : "",
                      order_cases.c_str(), order_bad ? ")" : "", errors, toy_solution.delay,
                      best.delay, 100.0 * toy_gap, t)};
}

Outcome weights_ignore_channel()
{
    const SimConfig c = desk_config();
    const ChannelConfig channel = c.seeded_channel();
    auto bank = std::make_shared<const ErgodicBank>(build_bank(channel, c.scheduler_bank_size));
    const MacState mac{vec({4200, 1300}), vec({260, 410}), 17};
    ChannelGenerator gen(channel, derive_seed(c.seed, "channel"));
    std::string detail;
    bool pass = true;
    for (auto kind : {PolicyKind::DelayOptimal, PolicyKind::Lqhpr, PolicyKind::Qps,
                      PolicyKind::MaxSumRate}) {
        auto scheduler = make_scheduler(kind, bank, c.total_power(), c.bits_per_nat(), c.delay_opt);
        WeightVector first;
        int differing = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const ChannelState h = gen.draw_block();
            const PolicyDecision d = scheduler->decide(h, mac);
            recon.add(h, d.allocation);
            if (trial == 0)
                first = d.weights;
            else if (d.weights.size() != first.size() ||
                     std::memcmp(d.weights.data(), first.data(),
                                 sizeof(double) * static_cast<std::size_t>(first.size())) != 0)
                ++differing;
        }
        pass = pass && differing == 0;
        detail += fmt("%s%s %d/50 identical", detail.empty() ? "" : ", ",
                      std::string(policy_name(kind)).c_str(), 50 - differing);
    }
    return {pass, detail};
}

Outcome region_shape()
{
    const SimConfig c = desk_config();
    const ErgodicBank bank = build_bank(c.seeded_channel(), 500);
    const auto rows = sweep_region(bank, 65, c.total_power());
    const Index n = static_cast<Index>(rows.size());
    double asym = 0.0;
    bool monotone = true;
    double scale = 0.0;
    for (const auto& r : rows)
        scale = std::max(scale, r.rates.maxCoeff());
    for (Index j = 0; j < n; ++j) {
        const auto& a = rows[static_cast<std::size_t>(j)].rates;
        const auto& b = rows[static_cast<std::size_t>(n - 1 - j)].rates;
        asym = std::max({asym, std::abs(a[0] - b[1]) / scale, std::abs(a[1] - b[0]) / scale});
        if (j > 0) {
            const auto& prev = rows[static_cast<std::size_t>(j - 1)].rates;
            monotone = monotone && a[0] <= prev[0] + 1e-12 && a[1] >= prev[1] - 1e-12;
        }
    }
    const RateVector equal = solve_wsr_ergodic(bank, vec({1, 1}), c.total_power());
    const double corner1 = rows.front().rates[0];
    const double corner2 = rows.back().rates[1];
    const double bpn = c.bits_per_nat() / c.slot_duration_s() / 1e6;
    const bool pass = asym <= 0.05 && monotone && equal.sum() > corner1 && equal.sum() > corner2;
    return {pass, fmt("S=500, 65 angles: asymmetry %.2f%% (limit 5%%), monotone %s, equal-weight "
                      "sum %.3f Mb/s vs corners %.3f / %.3f Mb/s",
                      100.0 * asym, monotone ? "yes" : "no", equal.sum() * bpn, corner1 * bpn,
                      corner2 * bpn)};
}

Outcome qps_direction()
{
    const SimConfig c = desk_config();
    const ChannelConfig channel = c.seeded_channel();
    auto bank = std::make_shared<const ErgodicBank>(build_bank(channel, c.scheduler_bank_size));
    QpsScheduler qps(bank, c.total_power());
    ChannelGenerator gen(channel, derive_seed(c.seed, "channel"));
    const double unit = 5000.0;
    const MacState mac{vec({2 * unit, unit}), vec({1, 1}), 0};
    VectorXd sum = VectorXd::Zero(2);
    for (int n = 0; n < 2000; ++n) {
        const ChannelState h = gen.draw_block();
        const PolicyDecision d = qps.decide(h, mac);
        recon.add(h, d.allocation);
        sum += d.allocation.rates;
    }
    const double err = angle_deg(sum, mac.queues);
    return {err <= 5.0, fmt("q=(2c,c), 2000 slots: mean rate off the queue direction by %.3f deg "
                            "(limit 5 deg)", err)};
}

Outcome reconstruction_identity()
{
    // A fresh batch on desk-scale channels on top of everything logged above.
    const SimConfig c = desk_config();
    ChannelGenerator gen(c.seeded_channel(), 404);
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (int n = 0; n < 500; ++n) {
        const ChannelState h = gen.draw_block();
        solve_logged(h, vec({w(rng), w(rng)}), c.total_power());
    }
    return {recon.worst <= 1e-9,
            fmt("%ld allocations, worst relative mismatch %.2e (limit 1e-9)", recon.checked,
                recon.worst)};
}

// ---------------------------------------------------------------------------

std::string cli_path;

Outcome trace_determinism()
{
    const SimConfig base = desk_config();
    const VectorXd boundary = boundary_rates_bps(base, vec({1, 1}));
    const fs::path dir = fs::temp_directory_path() / "bcsched_acceptance";
    fs::create_directories(dir);
    {
        SimConfig c = base;
        c.set_bit_rates({0.8 * boundary[0], 0.8 * boundary[1]});
        std::ofstream(dir / "config.json") << config_to_json(c).dump(2);
    }
    Stopwatch clock;
    for (const char* name : {"a", "b"}) {
        const std::string cmd = "\"" + cli_path + "\" simulate --config \"" +
                                (dir / "config.json").string() + "\" --out \"" +
                                (dir / (std::string("trace_") + name + ".csv")).string() +
                                "\" --summary \"" +
                                (dir / (std::string("summary_") + name + ".json")).string() + "\"";
        if (std::system(cmd.c_str()) != 0)
            return {false, "simulate exited with an error"};
    }
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    const std::string a = slurp(dir / "trace_a.csv");
    const std::string b = slurp(dir / "trace_b.csv");
    const bool same = !a.empty() && a == b;
    return {same, fmt("two delay-opt runs of %ld slots: traces %s (%zu bytes), %.1f s",
                      base.num_slots, same ? "byte-identical" : "differ", a.size(),
                      clock.seconds())};
}

Outcome stability(int threads)
{
    const SimConfig base = desk_config();
    const VectorXd boundary = boundary_rates_bps(base, vec({1, 1}));
    bool pass = true;
    std::string detail = fmt("boundary (%.3f, %.3f) Mb/s;", boundary[0] / 1e6, boundary[1] / 1e6);
    for (auto policy : {PolicyKind::DelayOptimal, PolicyKind::Lqhpr, PolicyKind::Qps}) {
        double cpu = 0.0;
        std::string part;
        for (double load : {0.8, 1.2}) {
            std::vector<SimConfig> configs;
            for (int r = 0; r < 3; ++r) {
                SimConfig c = base;
                c.policy = policy;
                c.seed = base.seed + static_cast<std::uint64_t>(r);
                c.set_bit_rates({load * boundary[0], load * boundary[1]});
                configs.push_back(c);
            }
            std::vector<RunSummary> out(configs.size());
            std::vector<std::thread> pool;
            std::atomic<std::size_t> next{0};
            const auto worker = [&] {
                for (std::size_t k = next++; k < configs.size(); k = next++)
                    out[k] = run(configs[k]).summary;
            };
            for (int t = 0; t < std::max(1, threads); ++t)
                pool.emplace_back(worker);
            for (auto& t : pool)
                t.join();

            int stable = 0;
            bool rising = true;
            std::string slopes;
            for (const auto& s : out) {
                cpu += s.wall_clock_s;
                stable += s.stability.stable;
                rising = rising && s.stability.slope > 0.0;
                slopes += fmt("%s%.3g", slopes.empty() ? "" : "/", s.stability.slope);
            }
            const bool ok = load < 1.0 ? stable == 3 : (stable == 0 && rising);
            pass = pass && ok;
            part += fmt(" %.1fx %d/3 stable (slopes %s bits/slot)", load, stable, slopes.c_str());
        }
        pass = pass && cpu < 600.0;
        detail += fmt(" %s:%s, %.0f s;", std::string(policy_name(policy)).c_str(), part.c_str(), cpu);
    }
    return {pass, detail};
}

Outcome delay_ordering(int threads)
{
    Stopwatch clock;
    SimConfig base = desk_config();
    base.num_slots = 100000;
    base.warmup_slots = 10000;
    const VectorXd boundary = boundary_rates_bps(base, vec({1, 2}));
    const std::vector<double> loads = {0.4, 0.6, 0.7, 0.8, 0.9};
    std::vector<std::vector<double>> points;
    for (double l : loads)
        points.push_back({l * boundary[0], l * boundary[1]});
    const std::vector<PolicyKind> policies = {PolicyKind::DelayOptimal, PolicyKind::Qps,
                                              PolicyKind::Lqhpr};
    const auto rows = load_sweep(base, points, policies, 5, threads);

    bool pass = true;
    std::string detail;
    for (std::size_t p = 0; p < loads.size(); ++p) {
        const double opt = rows[3 * p].mean_delay_ms;
        const double qps = rows[3 * p + 1].mean_delay_ms;
        const double lq = rows[3 * p + 2].mean_delay_ms;
        bool ok = true;
        if (loads[p] >= 0.6 - 1e-12)
            ok = opt <= qps && qps <= lq;
        if (std::abs(loads[p] - 0.8) < 1e-12)
            ok = ok && opt <= 0.9 * lq;
        pass = pass && ok;
        detail += fmt("%s%.1fx %s opt/qps/lqhpr %.4f/%.4f/%.4f ms", detail.empty() ? "" : "; ",
                      loads[p], ok ? "ok" : "VIOLATED", opt, qps, lq);
    }
    const double t = clock.seconds();
    pass = pass && t < 1800.0;
    return {pass, detail + fmt("; %.0f s", t)};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance checks"};
    std::vector<std::string> only;
    int threads = 1;
    cli_path = BCSCHED_CLI;
    app.add_option("--only", only, "run just these criteria");
    app.add_option("--threads", threads, "worker threads for the simulation criteria")
        ->check(CLI::PositiveNumber);
    app.add_option("--cli", cli_path, "path to the bcsched executable");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {"wsr-oracle-equivalence", wsr_oracle_equivalence},
        {"analytic-spot-checks", analytic_spot_checks},
        {"idle-state-prediction", algorithm1_properties},
        {"weights-independent-of-channel", weights_ignore_channel},
        {"stability", [&] { return stability(threads); }},
        {"delay-ordering", [&] { return delay_ordering(threads); }},
        {"region-shape", region_shape},
        {"qps-direction", qps_direction},
        {"trace-determinism", trace_determinism},
        // Last, so it covers every allocation checked by the criteria above.
        {"reconstruction-identity", reconstruction_identity},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end())
            continue;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
