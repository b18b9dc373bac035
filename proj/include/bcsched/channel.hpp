#ifndef BCSCHED_CHANNEL_HPP
#define BCSCHED_CHANNEL_HPP

#include "bcsched/random.hpp"
#include "bcsched/types.hpp"

#include <cstdint>
#include <vector>

namespace bcsched {

/// i.i.d. block-fading multipath OFDM downlink.
struct ChannelConfig {
    int num_users = 2;
    int num_subcarriers = 250;
    double bandwidth_hz = 2.5e6;
    double block_duration_s = 1e-4;
    int num_taps = 8;
    std::vector<double> power_delay_profile;   ///< empty means uniform over num_taps
    double snr_db = 15.0;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on inconsistent fields.
    void validate() const;
    VectorXd profile() const;

    /// Sum power with unit noise such that snr_db = 10 log10(P / K).
    double total_power() const;
    /// OFDM symbols carried by one slot on each subcarrier.
    double symbols_per_slot() const;
    /// Converts nats per channel use (summed over subcarriers) to bits per slot.
    double bits_per_slot_per_nat() const;
};

/// A fixed, seeded collection of channel samples standing in for the
/// ergodic region.
struct ErgodicBank {
    std::vector<ChannelState> samples;
    std::uint64_t seed = 0;

    std::size_t size() const { return samples.size(); }
};

/// Owns one generator stream.  Successive draws are independent blocks.
class ChannelGenerator {
public:
    ChannelGenerator(ChannelConfig config, std::uint64_t seed);

    ChannelState draw_block();
    const ChannelConfig& config() const { return config_; }

private:
    ChannelConfig config_;
    Rng rng_;
    VectorXd tap_scale_;
    MatrixXcd dft_;   ///< taps x subcarriers
};

/// S draws under the sub-seed derived from (config.seed, "bank").
ErgodicBank build_bank(const ChannelConfig& config, std::size_t size);

}  // namespace bcsched

#endif  // BCSCHED_CHANNEL_HPP
