#include "bcsched/channel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace bcsched {

void ChannelConfig::validate() const
{
    if (num_users < 1)
        throw std::invalid_argument("num_users must be positive");
    if (num_taps < 1 || num_subcarriers < num_taps)
        throw std::invalid_argument("need num_subcarriers >= num_taps >= 1");
    if (!(bandwidth_hz > 0.0) || !(block_duration_s > 0.0))
        throw std::invalid_argument("bandwidth and block duration must be positive");
    if (!std::isfinite(snr_db))
        throw std::invalid_argument("snr_db must be finite");
    if (!power_delay_profile.empty()) {
        if (static_cast<int>(power_delay_profile.size()) != num_taps)
            throw std::invalid_argument("power_delay_profile length must equal num_taps");
        double sum = 0.0;
        for (double p : power_delay_profile) {
            if (!(p >= 0.0))
                throw std::invalid_argument("power_delay_profile entries must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("power_delay_profile must sum to 1");
    }
}

VectorXd ChannelConfig::profile() const
{
    if (power_delay_profile.empty())
        return VectorXd::Constant(num_taps, 1.0 / num_taps);
    return Eigen::Map<const VectorXd>(power_delay_profile.data(),
                                      static_cast<Index>(power_delay_profile.size()));
}

double ChannelConfig::total_power() const
{
    return num_subcarriers * std::pow(10.0, snr_db / 10.0);
}

double ChannelConfig::symbols_per_slot() const
{
    return bandwidth_hz * block_duration_s / num_subcarriers;
}

double ChannelConfig::bits_per_slot_per_nat() const
{
    return symbols_per_slot() / std::numbers::ln2;
}

ChannelGenerator::ChannelGenerator(ChannelConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(seed)
{
    config_.validate();
    // Each complex tap is CN(0, pdp_l): real and imaginary parts carry half.
    tap_scale_ = (config_.profile() / 2.0).cwiseSqrt();
    const int taps = config_.num_taps;
    const int subcarriers = config_.num_subcarriers;
    dft_.resize(taps, subcarriers);
    for (int l = 0; l < taps; ++l)
        for (int k = 0; k < subcarriers; ++k) {
            // Reduce l*k mod K first so the phase is exact in integers.
            const double phase = -2.0 * std::numbers::pi *
                                 static_cast<double>((l * k) % subcarriers) / subcarriers;
            dft_(l, k) = std::polar(1.0, phase);
        }
}

ChannelState ChannelGenerator::draw_block()
{
    MatrixXcd taps(config_.num_users, config_.num_taps);
    for (int m = 0; m < config_.num_users; ++m)
        for (int l = 0; l < config_.num_taps; ++l) {
            const double re = rng_.normal();
            const double im = rng_.normal();
            taps(m, l) = std::complex<double>(re, im) * tap_scale_[l];
        }
    return ChannelState(taps * dft_, 1.0);
}

ErgodicBank build_bank(const ChannelConfig& config, std::size_t size)
{
    if (size < 1)
        throw std::invalid_argument("bank size must be at least 1");
    ErgodicBank bank;
    bank.seed = derive_seed(config.seed, "bank");
    ChannelGenerator generator(config, bank.seed);
    bank.samples.reserve(size);
    for (std::size_t s = 0; s < size; ++s)
        bank.samples.push_back(generator.draw_block());
    return bank;
}

}  // namespace bcsched
