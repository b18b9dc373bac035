#include "bcsched/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bcsched {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> to_vector(const VectorXd& v)
{
    return {v.data(), v.data() + v.size()};
}

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    const auto last = s.find_last_not_of(" \t\r");
    return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace)
{
    out << "slot,user,q_bits,rate_bits,arrival_bits,weight\n";
    for (long n = 0; n < trace.size(); ++n)
        for (Index i = 0; i < trace.num_users(); ++i)
            out << n << ',' << i << ',' << num(trace.queue_bits(i, n)) << ','
                << num(trace.rate_bits(i, n)) << ',' << num(trace.arrival_bits(i, n)) << ','
                << num(trace.weights(i, n)) << '\n';
}

void write_delays_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "rho1_bps,rho2_bps,policy,mean_delay_ms,stderr_ms,stable\n";
    for (const auto& row : rows) {
        if (row.rates_bps.size() != 2)
            throw std::invalid_argument("delays.csv holds two-user load points only");
        out << num(row.rates_bps[0]) << ',' << num(row.rates_bps[1]) << ','
            << policy_name(row.policy) << ',' << num(row.mean_delay_ms) << ','
            << num(row.stderr_ms) << ',' << (row.stable ? "true" : "false") << '\n';
    }
}

void write_region_csv(std::ostream& out, const std::vector<RegionSample>& samples,
                      double bits_per_second_per_nat)
{
    out << "theta,r1_bps,r2_bps\n";
    for (const auto& s : samples) {
        if (s.rates.size() != 2)
            throw std::invalid_argument("region.csv holds two-user regions only");
        out << num(s.theta) << ',' << num(s.rates[0] * bits_per_second_per_nat) << ','
            << num(s.rates[1] * bits_per_second_per_nat) << '\n';
    }
}

void write_drain_csv(std::ostream& out, const DrainSolution& solution)
{
    const auto& t = solution.trajectory;
    out << "slot,user,eta,weight,q_bits,rate_bits\n";
    for (Index n = 0; n < t.queues.cols(); ++n)
        for (Index i = 0; i < t.queues.rows(); ++i) {
            const bool served = n > 0;
            out << n << ',' << i << ',' << num(solution.eta[i]) << ','
                << num(served ? t.weights(i, n - 1) : 0.0) << ',' << num(t.queues(i, n)) << ','
                << num(served ? t.rates(i, n - 1) : 0.0) << '\n';
        }
}

std::vector<std::vector<double>> read_points_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || trim(line) != "rho1_bps,rho2_bps")
        throw std::invalid_argument("points CSV must start with the header rho1_bps,rho2_bps");
    std::vector<std::vector<double>> points;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty())
            continue;
        std::istringstream cells(line);
        std::string a, b, extra;
        if (!std::getline(cells, a, ',') || !std::getline(cells, b, ',') ||
            std::getline(cells, extra, ','))
            throw std::invalid_argument("points CSV row " + std::to_string(row) +
                                        " must have two columns");
        try {
            std::size_t used_a = 0, used_b = 0;
            const double r1 = std::stod(trim(a), &used_a);
            const double r2 = std::stod(trim(b), &used_b);
            if (used_a != trim(a).size() || used_b != trim(b).size() || !(r1 >= 0.0) ||
                !(r2 >= 0.0))
                throw std::invalid_argument("bad number");
            points.push_back({r1, r2});
        } catch (const std::exception&) {
            throw std::invalid_argument("points CSV row " + std::to_string(row) +
                                        " must hold two nonnegative numbers");
        }
    }
    if (points.empty())
        throw std::invalid_argument("points CSV has no load points");
    return points;
}

DrainInput drain_input_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("queue file must be a JSON object");
    for (const auto& item : j.items())
        if (item.key() != "queues_bits" && item.key() != "avg_arrivals_bits")
            throw std::invalid_argument("unknown key '" + item.key() + "' in queue file");
    if (!j.contains("queues_bits") || !j.contains("avg_arrivals_bits"))
        throw std::invalid_argument("queue file needs queues_bits and avg_arrivals_bits");
    try {
        const auto q = j.at("queues_bits").get<std::vector<double>>();
        const auto a = j.at("avg_arrivals_bits").get<std::vector<double>>();
        DrainInput in;
        in.queues_bits = Eigen::Map<const VectorXd>(q.data(), static_cast<Index>(q.size()));
        in.avg_arrivals_bits = Eigen::Map<const VectorXd>(a.data(), static_cast<Index>(a.size()));
        return in;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad queue file: ") + e.what());
    }
}

nlohmann::json summary_to_json(const RunSummary& s)
{
    nlohmann::json stability = {{"determined", s.stability_determined}};
    if (s.stability_determined)
        stability.update({{"verdict", s.stability.verdict()},
                          {"slope_bits_per_slot", s.stability.slope},
                          {"mid_mean_bits", s.stability.mid_mean},
                          {"last_mean_bits", s.stability.last_mean},
                          {"window_slots", s.stability.window}});
    const long slots = s.config.num_slots;
    return {
        {"schema_version", kSummarySchemaVersion},
        {"policy", std::string(policy_name(s.config.policy))},
        {"seed", s.config.seed},
        {"num_slots", slots},
        {"warmup_slots", s.config.warmup_slots},
        {"delay",
         {{"per_user_slots", to_vector(s.delay.per_user_slots)},
          {"per_user_ms", to_vector(s.delay.per_user_ms())},
          {"mean_slots", s.delay.mean_slots},
          {"mean_ms", s.delay.mean_ms()},
          {"window_slots", s.delay.window}}},
        {"mean_queue_bits", to_vector(s.mean_queue_bits)},
        {"max_queue_bits", to_vector(s.max_queue_bits)},
        {"mean_arrival_bits_per_slot", to_vector(s.mean_arrival_bits)},
        {"stability", stability},
        {"wall_clock", {{"total_s", s.wall_clock_s},
                        {"per_slot_us", slots > 0 ? 1e6 * s.wall_clock_s / slots : 0.0}}},
        {"nonconvergence_fallbacks", s.fallbacks},
        {"config", config_to_json(s.config)},
    };
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    return in;
}

}  // namespace bcsched
