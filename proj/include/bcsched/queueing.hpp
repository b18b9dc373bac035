#ifndef BCSCHED_QUEUEING_HPP
#define BCSCHED_QUEUEING_HPP

#include "bcsched/random.hpp"
#include "bcsched/types.hpp"

#include <vector>

namespace bcsched {

/// Buffer occupancies in bits at the start of slot `slot`.
struct QueueState {
    VectorXd bits;
    long slot = 0;
};

/// q' = max(0, q - r) + a.
QueueState step_queues(const QueueState& state, const RateVector& service,
                       const VectorXd& arrivals);

/// Poisson packet arrivals of fixed size.
struct ArrivalProcess {
    double packet_rate_hz = 0.0;
    double packet_size_bits = 1000.0;

    double mean_bit_rate() const { return packet_rate_hz * packet_size_bits; }
    static ArrivalProcess from_bit_rate(double bits_per_s, double packet_size_bits = 1000.0)
    {
        return {bits_per_s / packet_size_bits, packet_size_bits};
    }
};

/// Bits arriving in one slot of length `slot_duration_s`, one entry per user.
VectorXd draw_arrivals(const std::vector<ArrivalProcess>& processes, double slot_duration_s,
                       Rng& rng);

/// Queue lengths plus the windowed average arrival rate (bits/slot) the
/// schedulers read.
struct MacState {
    VectorXd queues;
    VectorXd avg_arrivals;
    long slot = 0;
};

enum class AveragingMode { Sliding, Exponential };

/// Running estimate of per-user arrivals in bits/slot, floored so it can be
/// used as a divisor.
class ArrivalAverager {
public:
    ArrivalAverager(Index users, int window, AveragingMode mode = AveragingMode::Sliding,
                    double floor = 1e-6);

    const VectorXd& update(const VectorXd& arrivals);
    VectorXd current() const;

private:
    int window_;
    AveragingMode mode_;
    double floor_;
    std::vector<VectorXd> history_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    VectorXd sum_;
    VectorXd ewma_;
    VectorXd value_;
};

/// Average bit delay over a window.  D_i = (1/N) sum_n q_i(n) / abar_i.
struct DelayReport {
    VectorXd per_user_slots;
    double mean_slots = 0.0;
    long window = 0;
    double slot_duration_s = 0.0;

    VectorXd per_user_ms() const { return per_user_slots * slot_duration_s * 1e3; }
    double mean_ms() const { return mean_slots * slot_duration_s * 1e3; }
};

/// `queues` is users x N (column n = start of slot n).
DelayReport delay_metrics(const MatrixXd& queues, const VectorXd& avg_arrivals,
                          double slot_duration_s);

}  // namespace bcsched

#endif  // BCSCHED_QUEUEING_HPP
