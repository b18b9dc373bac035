#include "bcsched/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcsched {

QueueState step_queues(const QueueState& state, const RateVector& service,
                       const VectorXd& arrivals)
{
    if (service.size() != state.bits.size() || arrivals.size() != state.bits.size())
        throw std::invalid_argument("queue, rate and arrival vectors differ in length");
    if ((service.array() < 0.0).any() || (arrivals.array() < 0.0).any())
        throw std::invalid_argument("rates and arrivals must be nonnegative");
    QueueState next;
    next.bits = (state.bits - service).cwiseMax(0.0) + arrivals;
    next.slot = state.slot + 1;
    return next;
}

VectorXd draw_arrivals(const std::vector<ArrivalProcess>& processes, double slot_duration_s,
                       Rng& rng)
{
    VectorXd bits(static_cast<Index>(processes.size()));
    for (std::size_t m = 0; m < processes.size(); ++m) {
        const auto& p = processes[m];
        if (!(p.packet_rate_hz >= 0.0) || !(p.packet_size_bits > 0.0))
            throw std::invalid_argument("invalid arrival process");
        const double packets = p.packet_rate_hz > 0.0
                                   ? static_cast<double>(rng.poisson(p.packet_rate_hz * slot_duration_s))
                                   : 0.0;
        bits[static_cast<Index>(m)] = packets * p.packet_size_bits;
    }
    return bits;
}

ArrivalAverager::ArrivalAverager(Index users, int window, AveragingMode mode, double floor)
    : window_(window), mode_(mode), floor_(floor),
      sum_(VectorXd::Zero(users)), ewma_(VectorXd::Zero(users)),
      value_(VectorXd::Constant(users, floor))
{
    if (window < 1)
        throw std::invalid_argument("averaging window must be at least 1");
    if (!(floor > 0.0))
        throw std::invalid_argument("averaging floor must be positive");
    if (mode == AveragingMode::Sliding)
        history_.assign(static_cast<std::size_t>(window), VectorXd::Zero(users));
}

const VectorXd& ArrivalAverager::update(const VectorXd& arrivals)
{
    if (arrivals.size() != sum_.size())
        throw std::invalid_argument("arrival vector length does not match user count");
    if (mode_ == AveragingMode::Sliding) {
        auto& slot = history_[head_];
        sum_ += arrivals - slot;
        slot = arrivals;
        head_ = (head_ + 1) % history_.size();
        count_ = std::min(count_ + 1, history_.size());
        // Re-add from scratch once per wrap to keep rounding from accumulating.
        if (head_ == 0) {
            sum_.setZero();
            for (const auto& a : history_)
                sum_ += a;
        }
        value_ = (sum_ / static_cast<double>(count_)).cwiseMax(floor_);
    } else {
        const double alpha = 1.0 / window_;
        ewma_ = count_ == 0 ? arrivals : VectorXd((1.0 - alpha) * ewma_ + alpha * arrivals);
        ++count_;
        value_ = ewma_.cwiseMax(floor_);
    }
    return value_;
}

VectorXd ArrivalAverager::current() const
{
    return value_;
}

DelayReport delay_metrics(const MatrixXd& queues, const VectorXd& avg_arrivals,
                          double slot_duration_s)
{
    if (queues.cols() == 0)
        throw std::invalid_argument("empty queue trajectory");
    if (avg_arrivals.size() != queues.rows())
        throw std::invalid_argument("arrival averages do not match user count");
    if ((avg_arrivals.array() <= 0.0).any())
        throw std::invalid_argument("average arrivals must be positive");
    DelayReport report;
    report.window = static_cast<long>(queues.cols());
    report.slot_duration_s = slot_duration_s;
    report.per_user_slots = (queues.rowwise().sum().array() / avg_arrivals.array()).matrix() /
                            static_cast<double>(queues.cols());
    report.mean_slots = report.per_user_slots.mean();
    return report;
}

}  // namespace bcsched
