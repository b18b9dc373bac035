#ifndef BCSCHED_CONFIG_HPP
#define BCSCHED_CONFIG_HPP

#include "bcsched/channel.hpp"
#include "bcsched/queueing.hpp"
#include "bcsched/schedulers.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace bcsched {

/// Everything one simulation run needs.  Defaults are the desk-scale setup:
/// two users, 16 subcarriers over 2.5 MHz, 0.1 ms blocks, 8 equal taps, 15 dB.
struct SimConfig {
    ChannelConfig channel = desk_channel();
    std::vector<ArrivalProcess> arrivals;
    PolicyKind policy = PolicyKind::DelayOptimal;
    long num_slots = 200000;
    long warmup_slots = 10000;
    std::uint64_t seed = 1;
    std::size_t region_bank_size = 500;
    std::size_t scheduler_bank_size = 100;
    int avg_window = 1000;
    AveragingMode avg_mode = AveragingMode::Sliding;
    double avg_floor = 1e-6;
    DelayOptimalOptions delay_opt;
    long nonconvergence_quota = 1000;
    std::string trace_path;
    std::string summary_path;

    static ChannelConfig desk_channel();

    double slot_duration_s() const { return channel.block_duration_s; }
    double total_power() const { return channel.total_power(); }
    double bits_per_nat() const { return channel.bits_per_slot_per_nat(); }

    /// Sets every user's Poisson process to the given mean bit rates.
    void set_bit_rates(const std::vector<double>& bits_per_s, double packet_size_bits = 1000.0);
    /// Channel config with the per-run seed applied.
    ChannelConfig seeded_channel() const;

    void validate() const;
};

/// Parses a JSON config.  Missing fields take defaults; unknown keys throw
/// std::invalid_argument.
SimConfig config_from_json(const nlohmann::json& j);
SimConfig load_config(const std::string& path);
nlohmann::json config_to_json(const SimConfig& config);

}  // namespace bcsched

#endif  // BCSCHED_CONFIG_HPP
