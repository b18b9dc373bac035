#ifndef BCSCHED_IO_HPP
#define BCSCHED_IO_HPP

#include "bcsched/drain.hpp"
#include "bcsched/ergodic.hpp"
#include "bcsched/simulation.hpp"

#include <json.hpp>

#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

namespace bcsched {

// CSV writers print doubles with 17 significant digits so files round-trip.

inline constexpr int kSummarySchemaVersion = 1;

/// slot,user,q_bits,rate_bits,arrival_bits,weight
void write_trace_csv(std::ostream& out, const Trace& trace);
/// rho1_bps,rho2_bps,policy,mean_delay_ms,stderr_ms,stable  (two-user rows)
void write_delays_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// theta,r1_bps,r2_bps
void write_region_csv(std::ostream& out, const std::vector<RegionSample>& samples,
                      double bits_per_second_per_nat);
/// slot,user,eta,weight,q_bits,rate_bits ; slot 0 holds the initial queues.
void write_drain_csv(std::ostream& out, const DrainSolution& solution);

/// Reads rho1_bps,rho2_bps rows (header required).
std::vector<std::vector<double>> read_points_csv(std::istream& in);

/// Queue file for the drain subcommand:
/// {"queues_bits": [...], "avg_arrivals_bits": [...]}.
struct DrainInput {
    VectorXd queues_bits;
    VectorXd avg_arrivals_bits;
};
DrainInput drain_input_from_json(const nlohmann::json& j);

nlohmann::json summary_to_json(const RunSummary& summary);

/// Opens `path` for writing or throws std::runtime_error.
std::ofstream open_output(const std::string& path);
std::ifstream open_input(const std::string& path);

}  // namespace bcsched

#endif  // BCSCHED_IO_HPP
