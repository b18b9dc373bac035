#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bcsched/channel.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace bcsched;

namespace {

ChannelConfig small_config()
{
    ChannelConfig c;
    c.num_users = 2;
    c.num_subcarriers = 16;
    c.num_taps = 4;
    c.seed = 7;
    return c;
}

}  // namespace

TEST_CASE("derived seeds differ by label and master")
{
    CHECK(derive_seed(1, "channel") == derive_seed(1, "channel"));
    CHECK(derive_seed(1, "channel") != derive_seed(1, "arrivals"));
    CHECK(derive_seed(1, "channel") != derive_seed(2, "channel"));
    CHECK(derive_seed(1, "bank") != derive_seed(1, "channel"));
}

TEST_CASE("rng variates have the right moments")
{
    Rng rng(3);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));

    for (double mean : {0.0, 0.25, 3.0, 40.0, 400.0}) {
        CAPTURE(mean);
        Rng p(5);
        double s = 0, s2 = 0;
        const int m = 50000;
        for (int i = 0; i < m; ++i) {
            const double k = static_cast<double>(p.poisson(mean));
            s += k;
            s2 += k * k;
        }
        const double avg = s / m;
        CHECK(avg == doctest::Approx(mean).epsilon(0.02).scale(0.01));
        CHECK(s2 / m - avg * avg == doctest::Approx(mean).epsilon(0.05).scale(0.01));
    }

    Rng a(9), b(9);
    for (int i = 0; i < 100; ++i)
        CHECK(a.normal() == b.normal());
}

TEST_CASE("channel config validation")
{
    ChannelConfig c = small_config();
    CHECK_NOTHROW(c.validate());
    CHECK(c.profile().sum() == doctest::Approx(1.0));

    ChannelConfig bad = c;
    bad.num_taps = 17;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.num_taps = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.power_delay_profile = {0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.power_delay_profile = {0.5, 0.5, 0.1, -0.1};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.power_delay_profile = {0.5, 0.25, 0.125, 0.125 + 1e-9};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.num_users = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("unit conversions")
{
    ChannelConfig c;
    c.num_subcarriers = 250;
    c.snr_db = 15.0;
    CHECK(c.total_power() == doctest::Approx(250.0 * std::pow(10.0, 1.5)));
    CHECK(10.0 * std::log10(c.total_power() / c.num_subcarriers) == doctest::Approx(15.0));
    CHECK(c.symbols_per_slot() == doctest::Approx(1.0));
    CHECK(c.bits_per_slot_per_nat() == doctest::Approx(1.0 / std::numbers::ln2));
}

TEST_CASE("single tap is frequency flat")
{
    ChannelConfig c = small_config();
    c.num_taps = 1;
    ChannelGenerator gen(c, 1);
    for (int b = 0; b < 20; ++b) {
        const ChannelState h = gen.draw_block();
        for (Index m = 0; m < h.num_users(); ++m)
            for (Index k = 1; k < h.num_subcarriers(); ++k)
                CHECK(std::abs(h.coefficients(m, k)) ==
                      doctest::Approx(std::abs(h.coefficients(m, 0))).epsilon(1e-12));
    }
}

TEST_CASE("unit average gain and independent blocks")
{
    ChannelConfig c = small_config();
    ChannelGenerator gen(c, 11);
    const int blocks = 10000;
    double sum = 0.0;
    VectorXd first(blocks);
    for (int b = 0; b < blocks; ++b) {
        const ChannelState h = gen.draw_block();
        CHECK(h.noise_variance == 1.0);
        sum += h.gains.mean();
        first[b] = h.gains(0, 0);
    }
    CHECK(sum / blocks == doctest::Approx(1.0).epsilon(0.03));

    const VectorXd x = first.head(blocks - 1).array() - first.head(blocks - 1).mean();
    const VectorXd y = first.tail(blocks - 1).array() - first.tail(blocks - 1).mean();
    const double rho = x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
    CHECK(std::abs(rho) < 0.05);
}

TEST_CASE("subcarrier autocorrelation matches the transformed delay profile")
{
    ChannelConfig c = small_config();
    c.power_delay_profile = {0.4, 0.3, 0.2, 0.1};
    const int blocks = 1000;
    const Index K = c.num_subcarriers;
    for (Index d : {0, 1, 2, 5}) {
        std::complex<double> acc = 0.0;
        long count = 0;
        ChannelGenerator g(c, 13);
        for (int b = 0; b < blocks; ++b) {
            const ChannelState h = g.draw_block();
            for (Index m = 0; m < h.num_users(); ++m)
                for (Index k = 0; k < K; ++k) {
                    acc += h.coefficients(m, k) * std::conj(h.coefficients(m, (k + d) % K));
                    ++count;
                }
        }
        acc /= static_cast<double>(count);
        std::complex<double> expected = 0.0;
        for (int l = 0; l < c.num_taps; ++l)
            expected += c.power_delay_profile[l] *
                        std::polar(1.0, 2.0 * std::numbers::pi * l * d / static_cast<double>(K));
        CAPTURE(d);
        CHECK(std::abs(acc - expected) < 0.05 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("generators and banks are deterministic")
{
    const ChannelConfig c = small_config();
    ChannelGenerator a(c, 42), b(c, 42);
    for (int i = 0; i < 5; ++i) {
        const ChannelState x = a.draw_block();
        const ChannelState y = b.draw_block();
        CHECK(x.coefficients == y.coefficients);
        CHECK(x.gains == y.gains);
    }

    const ErgodicBank one = build_bank(c, 1);
    REQUIRE(one.size() == 1);
    CHECK(one.seed == derive_seed(c.seed, "bank"));
    ChannelGenerator direct(c, derive_seed(c.seed, "bank"));
    CHECK(one.samples[0].coefficients == direct.draw_block().coefficients);

    const ErgodicBank p = build_bank(c, 50), q = build_bank(c, 50);
    for (std::size_t s = 0; s < p.size(); ++s)
        CHECK(p.samples[s].gains == q.samples[s].gains);

    ChannelConfig other = c;
    other.seed = 8;
    CHECK(build_bank(other, 1).samples[0].gains != one.samples[0].gains);
    CHECK_THROWS_AS(build_bank(c, 0), std::invalid_argument);
}
