#ifndef BCSCHED_RANDOM_HPP
#define BCSCHED_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace bcsched {

/// Sub-seed for an independent stream, derived from a master seed and a label.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

/// Pseudo-random source with platform-independent variate transforms.
/// std::mt19937_64 output is fully specified by the standard; the standard
/// distributions are not, so the transforms below are written out.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1).
    double uniform();
    double normal();
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bcsched

#endif  // BCSCHED_RANDOM_HPP
