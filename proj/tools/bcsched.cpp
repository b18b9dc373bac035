#include "bcsched/config.hpp"
#include "bcsched/drain.hpp"
#include "bcsched/ergodic.hpp"
#include "bcsched/io.hpp"
#include "bcsched/region.hpp"
#include "bcsched/simulation.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace bcsched;

namespace {

struct Common {
    std::string config_path;
    bool full_scale = false;
};

SimConfig load(const Common& common)
{
    SimConfig config = common.config_path.empty() ? config_from_json(nlohmann::json::object())
                                                  : load_config(common.config_path);
    if (common.full_scale)
        config.channel.num_subcarriers = 250;
    return config;
}

void add_common(CLI::App* sub, Common& common)
{
    sub->add_option("--config", common.config_path, "JSON config (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_flag("--full-scale", common.full_scale, "use 250 subcarriers instead of 16");
}

std::vector<PolicyKind> parse_policies(const std::string& list)
{
    std::vector<PolicyKind> out;
    std::istringstream in(list);
    std::string name;
    while (std::getline(in, name, ','))
        if (!name.empty())
            out.push_back(parse_policy(name));
    if (out.empty())
        throw std::invalid_argument("no policies given");
    return out;
}

int cmd_capacity(const Common& common, int angles, const std::string& out_path)
{
    const SimConfig config = load(common);
    const ErgodicBank bank = build_bank(config.seeded_channel(), config.region_bank_size);
    const auto samples = sweep_region(bank, angles, config.total_power());
    auto out = open_output(out_path);
    write_region_csv(out, samples, config.bits_per_nat() / config.slot_duration_s());
    return 0;
}

int cmd_simulate(const Common& common, const std::optional<std::string>& policy,
                 std::optional<long> slots, std::optional<long> warmup,
                 std::optional<std::uint64_t> seed, std::string trace_path,
                 std::string summary_path)
{
    SimConfig config = load(common);
    if (policy)
        config.policy = parse_policy(*policy);
    if (slots)
        config.num_slots = *slots;
    if (warmup)
        config.warmup_slots = *warmup;
    if (seed)
        config.seed = *seed;
    if (trace_path.empty())
        trace_path = config.trace_path;
    if (summary_path.empty())
        summary_path = config.summary_path;
    config.validate();

    const RunResult result = run(config);
    if (!trace_path.empty()) {
        auto out = open_output(trace_path);
        write_trace_csv(out, result.trace);
    }
    const std::string summary = summary_to_json(result.summary).dump(2) + "\n";
    if (!summary_path.empty()) {
        auto out = open_output(summary_path);
        out << summary;
    } else {
        std::cout << summary;
    }
    return 0;
}

int cmd_sweep(const Common& common, const std::string& policies, const std::string& points_path,
              int seeds, std::optional<long> slots, std::optional<long> warmup, int threads,
              const std::string& out_path)
{
    SimConfig config = load(common);
    if (slots)
        config.num_slots = *slots;
    if (warmup)
        config.warmup_slots = *warmup;
    config.validate();
    auto in = open_input(points_path);
    const auto points = read_points_csv(in);
    const auto rows = load_sweep(config, points, parse_policies(policies), seeds, threads);
    auto out = open_output(out_path);
    write_delays_csv(out, rows);
    return 0;
}

int cmd_drain(const Common& common, const std::string& queues_path, const std::string& out_path)
{
    const SimConfig config = load(common);
    auto in = open_input(queues_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("queue file is not valid JSON: ") + e.what());
    }
    const DrainInput input = drain_input_from_json(j);

    const ErgodicBank bank = build_bank(config.seeded_channel(), config.region_bank_size);
    ErgodicRegion region(bank, config.total_power(), config.bits_per_nat(),
                         config.delay_opt.cache_resolution);
    DrainProblem problem;
    problem.initial_queues = input.queues_bits;
    problem.avg_arrivals = input.avg_arrivals_bits;
    problem.region = &region;
    problem.eta_tolerance = config.delay_opt.eta_tolerance;
    problem.queue_tolerance = config.delay_opt.queue_tolerance * input.queues_bits.sum();
    problem.max_outer_iterations = config.delay_opt.max_outer_iterations;
    const DrainSolution solution = idle_state_prediction(problem);
    auto out = open_output(out_path);
    write_drain_csv(out, solution);
    std::cerr << "eta = " << solution.eta.transpose() << ", static delay = " << solution.delay
              << " slots, sweeps = " << solution.sweeps << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"OFDM broadcast-channel scheduling simulator"};
    app.require_subcommand(1);

    Common common;

    auto* capacity = app.add_subcommand("capacity", "sweep the sampled ergodic capacity region");
    add_common(capacity, common);
    int angles = 64;
    std::string region_out;
    capacity->add_option("--angles", angles, "number of weight angles")
        ->check(CLI::Range(2, 100000));
    capacity->add_option("--out", region_out, "region CSV")->required();

    auto* simulate = app.add_subcommand("simulate", "run one scheduling simulation");
    add_common(simulate, common);
    std::optional<std::string> policy;
    std::optional<long> slots, warmup;
    std::optional<std::uint64_t> seed;
    std::string trace_out, summary_out;
    simulate->add_option("--policy", policy, "delay-opt, lqhpr, qps or max-sum");
    simulate->add_option("--slots", slots, "number of slots");
    simulate->add_option("--warmup", warmup, "slots excluded from the metrics");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--out", trace_out, "trace CSV");
    simulate->add_option("--summary", summary_out, "summary JSON (stdout when omitted)");

    auto* sweep = app.add_subcommand("sweep", "delay versus load over several policies and seeds");
    add_common(sweep, common);
    std::string policies = "delay-opt,lqhpr,qps";
    std::string points_path, delays_out;
    int seeds = 5, threads = 0;
    std::optional<long> sweep_slots, sweep_warmup;
    sweep->add_option("--policies", policies, "comma-separated policy list");
    sweep->add_option("--points", points_path, "CSV of rho1_bps,rho2_bps")->required();
    sweep->add_option("--seeds", seeds, "seeds per point")->check(CLI::PositiveNumber);
    sweep->add_option("--slots", sweep_slots, "slots per run");
    sweep->add_option("--warmup", sweep_warmup, "slots excluded from the metrics");
    sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
    sweep->add_option("--out", delays_out, "delays CSV")->required();

    auto* drain = app.add_subcommand("drain", "idle-onset times for a static drain problem");
    add_common(drain, common);
    std::string queues_path, drain_out;
    drain->add_option("--queues", queues_path, "JSON with queues_bits and avg_arrivals_bits")
        ->required();
    drain->add_option("--out", drain_out, "drain CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (capacity->parsed())
            return cmd_capacity(common, angles, region_out);
        if (simulate->parsed())
            return cmd_simulate(common, policy, slots, warmup, seed, trace_out, summary_out);
        if (sweep->parsed())
            return cmd_sweep(common, policies, points_path, seeds, sweep_slots, sweep_warmup, threads,
                             delays_out);
        if (drain->parsed())
            return cmd_drain(common, queues_path, drain_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
