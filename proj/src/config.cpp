#include "bcsched/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string_view>

namespace bcsched {

using nlohmann::json;

ChannelConfig SimConfig::desk_channel()
{
    ChannelConfig c;
    c.num_subcarriers = 16;
    return c;
}

void SimConfig::set_bit_rates(const std::vector<double>& bits_per_s, double packet_size_bits)
{
    arrivals.clear();
    for (double rate : bits_per_s)
        arrivals.push_back(ArrivalProcess::from_bit_rate(rate, packet_size_bits));
}

ChannelConfig SimConfig::seeded_channel() const
{
    ChannelConfig c = channel;
    c.seed = seed;
    return c;
}

void SimConfig::validate() const
{
    channel.validate();
    if (static_cast<int>(arrivals.size()) != channel.num_users)
        throw std::invalid_argument("need one arrival process per user");
    for (const auto& a : arrivals)
        if (!(a.packet_rate_hz >= 0.0) || !(a.packet_size_bits > 0.0))
            throw std::invalid_argument("arrival rates must be nonnegative, packet sizes positive");
    if (!(num_slots > warmup_slots) || warmup_slots < 0)
        throw std::invalid_argument("need num_slots > warmup_slots >= 0");
    if (region_bank_size < 1 || scheduler_bank_size < 1)
        throw std::invalid_argument("bank sizes must be positive");
    if (avg_window < 1 || !(avg_floor > 0.0))
        throw std::invalid_argument("averaging window and floor must be positive");
    if (!(delay_opt.eta_tolerance > 0.0) || !(delay_opt.queue_tolerance > 0.0) ||
        !(delay_opt.cache_resolution > 0.0) || !(delay_opt.max_drain_slots >= 1.0) ||
        delay_opt.max_outer_iterations < 1)
        throw std::invalid_argument("invalid delay_opt options");
    if (nonconvergence_quota < 0)
        throw std::invalid_argument("nonconvergence_quota must be nonnegative");
}

namespace {

void reject_unknown(const json& j, std::string_view where,
                    std::initializer_list<std::string_view> allowed)
{
    if (!j.is_object())
        throw std::invalid_argument(std::string(where) + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (auto key : allowed)
            known = known || item.key() == key;
        if (!known)
            throw std::invalid_argument("unknown key '" + item.key() + "' in " + std::string(where));
    }
}

template <typename T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

AveragingMode parse_mode(const std::string& s)
{
    if (s == "sliding")
        return AveragingMode::Sliding;
    if (s == "exponential")
        return AveragingMode::Exponential;
    throw std::invalid_argument("averaging mode must be 'sliding' or 'exponential'");
}

ArrivalProcess parse_arrival(const json& j)
{
    reject_unknown(j, "arrivals[]", {"rate_bps", "packet_rate_hz", "packet_size_bits"});
    ArrivalProcess a;
    read(j, "packet_size_bits", a.packet_size_bits);
    if (j.contains("rate_bps") && j.contains("packet_rate_hz"))
        throw std::invalid_argument("give either rate_bps or packet_rate_hz, not both");
    if (j.contains("rate_bps"))
        a = ArrivalProcess::from_bit_rate(j.at("rate_bps").get<double>(), a.packet_size_bits);
    read(j, "packet_rate_hz", a.packet_rate_hz);
    return a;
}

}  // namespace

SimConfig config_from_json(const json& j)
{
    reject_unknown(j, "config",
                   {"channel", "arrivals", "policy", "num_slots", "warmup_slots", "seed",
                    "region_bank_size", "scheduler_bank_size", "averaging", "delay_opt",
                    "nonconvergence_quota", "outputs"});
    SimConfig c;
    try {
        if (j.contains("channel")) {
            const json& ch = j.at("channel");
            reject_unknown(ch, "channel",
                           {"num_users", "num_subcarriers", "bandwidth_hz", "block_duration_s",
                            "num_taps", "power_delay_profile", "snr_db"});
            read(ch, "num_users", c.channel.num_users);
            read(ch, "num_subcarriers", c.channel.num_subcarriers);
            read(ch, "bandwidth_hz", c.channel.bandwidth_hz);
            read(ch, "block_duration_s", c.channel.block_duration_s);
            read(ch, "num_taps", c.channel.num_taps);
            read(ch, "power_delay_profile", c.channel.power_delay_profile);
            read(ch, "snr_db", c.channel.snr_db);
        }
        if (j.contains("arrivals")) {
            if (!j.at("arrivals").is_array())
                throw std::invalid_argument("arrivals must be an array");
            for (const auto& a : j.at("arrivals"))
                c.arrivals.push_back(parse_arrival(a));
        } else {
            c.arrivals.assign(static_cast<std::size_t>(std::max(0, c.channel.num_users)), {});
        }
        if (j.contains("policy"))
            c.policy = parse_policy(j.at("policy").get<std::string>());
        read(j, "num_slots", c.num_slots);
        read(j, "warmup_slots", c.warmup_slots);
        read(j, "seed", c.seed);
        read(j, "region_bank_size", c.region_bank_size);
        read(j, "scheduler_bank_size", c.scheduler_bank_size);
        read(j, "nonconvergence_quota", c.nonconvergence_quota);
        if (j.contains("averaging")) {
            const json& av = j.at("averaging");
            reject_unknown(av, "averaging", {"window", "mode", "floor"});
            read(av, "window", c.avg_window);
            read(av, "floor", c.avg_floor);
            if (av.contains("mode"))
                c.avg_mode = parse_mode(av.at("mode").get<std::string>());
        }
        if (j.contains("delay_opt")) {
            const json& d = j.at("delay_opt");
            reject_unknown(d, "delay_opt",
                           {"eta_tolerance", "queue_tolerance", "cache_resolution",
                            "max_drain_slots", "max_outer_iterations"});
            read(d, "eta_tolerance", c.delay_opt.eta_tolerance);
            read(d, "queue_tolerance", c.delay_opt.queue_tolerance);
            read(d, "cache_resolution", c.delay_opt.cache_resolution);
            read(d, "max_drain_slots", c.delay_opt.max_drain_slots);
            read(d, "max_outer_iterations", c.delay_opt.max_outer_iterations);
        }
        if (j.contains("outputs")) {
            const json& o = j.at("outputs");
            reject_unknown(o, "outputs", {"trace", "summary"});
            read(o, "trace", c.trace_path);
            read(o, "summary", c.summary_path);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

SimConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const SimConfig& c)
{
    json arrivals = json::array();
    for (const auto& a : c.arrivals)
        arrivals.push_back({{"packet_rate_hz", a.packet_rate_hz},
                            {"packet_size_bits", a.packet_size_bits}});
    json channel = {{"num_users", c.channel.num_users},
                    {"num_subcarriers", c.channel.num_subcarriers},
                    {"bandwidth_hz", c.channel.bandwidth_hz},
                    {"block_duration_s", c.channel.block_duration_s},
                    {"num_taps", c.channel.num_taps},
                    {"power_delay_profile", c.channel.power_delay_profile},
                    {"snr_db", c.channel.snr_db}};
    return {
        {"channel", channel},
        {"arrivals", arrivals},
        {"policy", std::string(policy_name(c.policy))},
        {"num_slots", c.num_slots},
        {"warmup_slots", c.warmup_slots},
        {"seed", c.seed},
        {"region_bank_size", c.region_bank_size},
        {"scheduler_bank_size", c.scheduler_bank_size},
        {"averaging",
         {{"window", c.avg_window},
          {"mode", c.avg_mode == AveragingMode::Sliding ? "sliding" : "exponential"},
          {"floor", c.avg_floor}}},
        {"delay_opt",
         {{"eta_tolerance", c.delay_opt.eta_tolerance},
          {"queue_tolerance", c.delay_opt.queue_tolerance},
          {"cache_resolution", c.delay_opt.cache_resolution},
          {"max_drain_slots", c.delay_opt.max_drain_slots},
          {"max_outer_iterations", c.delay_opt.max_outer_iterations}}},
        {"nonconvergence_quota", c.nonconvergence_quota},
        {"outputs", {{"trace", c.trace_path}, {"summary", c.summary_path}}},
    };
}

}  // namespace bcsched
