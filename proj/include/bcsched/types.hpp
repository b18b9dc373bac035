#ifndef BCSCHED_TYPES_HPP
#define BCSCHED_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace bcsched {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Per-user weights of a weighted sum-rate problem. Entries are nonnegative.
using WeightVector = VectorXd;

/// Per-user rates or queue lengths.
using RateVector = VectorXd;

/// Raised when an iterative solver fails to converge or bracket its root.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One downlink fading block: complex coefficients h (users x subcarriers),
/// the noise variance and the SNR-normalized gains g = |h|^2 / sigma^2.
struct ChannelState {
    MatrixXcd coefficients;
    double noise_variance = 1.0;
    MatrixXd gains;

    ChannelState() = default;
    ChannelState(MatrixXcd h, double sigma2)
        : coefficients(std::move(h)), noise_variance(sigma2),
          gains(coefficients.cwiseAbs2() / sigma2)
    {
        if (!(sigma2 > 0.0))
            throw std::invalid_argument("noise variance must be positive");
    }

    /// Builds a state straight from real gains (h = sqrt(g), sigma^2 = 1).
    static ChannelState from_gains(const MatrixXd& g)
    {
        if ((g.array() < 0.0).any())
            throw std::invalid_argument("channel gains must be nonnegative");
        ChannelState state(g.cwiseSqrt().cast<std::complex<double>>(), 1.0);
        state.gains = g;  // exact, not re-derived through sqrt
        return state;
    }

    Index num_users() const { return gains.rows(); }
    Index num_subcarriers() const { return gains.cols(); }
};

/// Result of one weighted sum-rate maximization over C(h, P).
struct RateAllocation {
    MatrixXd powers;                            ///< users x subcarriers
    std::vector<std::vector<int>> order;        ///< per subcarrier, first-encoded user first
    RateVector rates;                           ///< nats per channel use, summed over subcarriers
    double objective = 0.0;                     ///< weights' * rates
    double water_level = 0.0;                   ///< dual price of the sum-power constraint

    static RateAllocation zero(Index users, Index subcarriers)
    {
        RateAllocation a;
        a.powers = MatrixXd::Zero(users, subcarriers);
        a.rates = RateVector::Zero(users);
        a.order.assign(static_cast<std::size_t>(subcarriers), {});
        for (auto& pi : a.order)
            for (int m = 0; m < users; ++m)
                pi.push_back(m);
        return a;
    }
};

inline void check_weights(const WeightVector& mu)
{
    if (mu.size() == 0 || (mu.array() < 0.0).any() || !mu.allFinite())
        throw std::invalid_argument("weights must be finite and nonnegative");
}

}  // namespace bcsched

#endif  // BCSCHED_TYPES_HPP
