#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "levkit/constants.hpp"
#include "levkit/signal.hpp"
#include "oracles.hpp"

using namespace levkit;
using Catch::Approx;
namespace sig = levkit::signal;

namespace {

dynamics::Trajectory make_tone(double fs, double f, double amplitude, std::size_t n,
                               double phase = 0.0) {
    dynamics::Trajectory traj;
    traj.sample_rate = fs;
    traj.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        traj.x[i] = amplitude * std::sin(constants::two_pi * f * i / fs + phase);
    }
    return traj;
}

dynamics::Trajectory make_noise(double fs, std::size_t n, std::uint64_t seed) {
    testing::TestRng rng(seed);
    dynamics::Trajectory traj;
    traj.sample_rate = fs;
    traj.x.resize(n);
    // sum of 12 uniforms: unit-variance, close enough to Gaussian for PSD levels
    for (auto& v : traj.x) {
        double acc = 0.0;
        for (int k = 0; k < 12; ++k) acc += rng.uniform(0.0, 1.0);
        v = acc - 6.0;
    }
    return traj;
}

double gain_db(const sig::FirFilter& filter, double f) {
    return 20.0 * std::log10(std::abs(sig::frequency_response(filter, f)));
}

}  // namespace

TEST_CASE("bandpass design meets the response contract", "[signal]") {
    const auto filter = sig::design_bandpass(1001, 1250.0, 18.0, 23.0);

    // symmetric to the last bit, DC gain pinned to zero
    for (std::size_t k = 0; k < filter.length(); ++k) {
        REQUIRE(filter.coefficients[k] == filter.coefficients[filter.length() - 1 - k]);
    }
    const double dc = std::accumulate(filter.coefficients.begin(), filter.coefficients.end(), 0.0);
    CHECK(std::abs(dc) < 1e-6);

    CHECK(std::abs(gain_db(filter, 20.5)) < 1.0);
    CHECK(gain_db(filter, 16.2) < -20.0);
    CHECK(gain_db(filter, 25.0) < -20.0);

    CHECK_THROWS_AS(sig::design_bandpass(1000, 1250.0, 18.0, 23.0), sig::InvalidBand);
    CHECK_THROWS_AS(sig::design_bandpass(1001, 1250.0, 23.0, 18.0), sig::InvalidBand);
    CHECK_THROWS_AS(sig::design_bandpass(1001, 40.0, 18.0, 23.0), sig::InvalidBand);
}

TEST_CASE("group delay in periods", "[signal]") {
    const auto filter = sig::design_bandpass(1001, 1250.0, 18.0, 23.0);
    CHECK(group_delay_periods(filter, 19.0) == Approx(7.6).margin(1e-12));
    CHECK(group_delay_periods(filter, 18.9) == Approx(7.56).margin(1e-12));

    sig::FirFilter three;
    three.coefficients = {0.25, 0.5, 0.25};
    three.sample_rate = 100.0;
    CHECK(group_delay_periods(three, 7.0) == Approx(7.0 / 100.0).margin(1e-15));
}

TEST_CASE("single-tap identity filter passes the signal through", "[signal]") {
    sig::FirFilter identity;
    identity.coefficients = {1.0};
    identity.sample_rate = 1250.0;
    const auto tone = make_tone(1250.0, 18.9, 1e-6, 4096);
    const auto out = sig::apply_filter(identity, tone);
    REQUIRE(out.x.size() == tone.x.size());
    for (std::size_t i = 0; i < out.x.size(); i += 101) {
        CHECK(out.x[i] == tone.x[i]);
    }
}

TEST_CASE("centered 3-tap impulse delays by one sample", "[signal]") {
    sig::FirFilter shift;
    shift.coefficients = {0.0, 1.0, 0.0};
    shift.sample_rate = 1000.0;
    const auto tone = make_tone(1000.0, 50.0, 1.0, 512);
    const auto out = sig::apply_filter(shift, tone);
    for (std::size_t i = 1; i < out.x.size(); i += 37) {
        CHECK(out.x[i] == Approx(tone.x[i - 1]).margin(1e-15));
    }
}

TEST_CASE("filtered tone delay matches the symmetric-filter formula", "[signal]") {
    const auto filter = sig::design_bandpass(1001, 1250.0, 18.0, 23.0);

    // a steady sine only defines delay modulo its period; a slow amplitude
    // modulation (sidebands still inside the passband) pins the absolute lag
    const double fs = 1250.0, fc = 18.9, fm = 0.4;
    dynamics::Trajectory tone;
    tone.sample_rate = fs;
    tone.x.resize(25000);
    for (std::size_t i = 0; i < tone.x.size(); ++i) {
        const double t = static_cast<double>(i) / fs;
        tone.x[i] = (1.0 + 0.5 * std::cos(constants::two_pi * fm * t)) *
                    std::sin(constants::two_pi * fc * t);
    }
    const auto out = sig::apply_filter(filter, tone);

    std::vector<double> in_tail(tone.x.begin() + 2500, tone.x.end());
    std::vector<double> out_tail(out.x.begin() + 2500, out.x.end());
    const double lag = sig::estimate_delay_samples(in_tail, out_tail);
    const double periods = lag / fs * fc;
    CHECK(periods == Approx(group_delay_periods(filter, fc)).margin(0.05));
}

TEST_CASE("dc shift produces a constant offset after warm-up", "[signal]") {
    sig::FirFilter filter = sig::design_bandpass(101, 1000.0, 100.0, 200.0);
    dynamics::Trajectory zero;
    zero.sample_rate = 1000.0;
    zero.x.assign(1024, 0.0);
    const auto out = sig::apply_filter(filter, zero, 0.0, 2.0, 0.125);
    for (std::size_t i = out.warmup; i < out.x.size(); ++i) {
        REQUIRE(out.x[i] == Approx(0.125).margin(1e-15));
    }
}

TEST_CASE("extra fractional delay shifts the waveform", "[signal]") {
    // broadband input so the correlation peak is unique
    sig::FirFilter identity;
    identity.coefficients = {1.0};
    identity.sample_rate = 1250.0;
    const auto noise = make_noise(1250.0, 8192, 17);
    const auto out = sig::apply_filter(identity, noise, 10.5);
    std::vector<double> in_tail(noise.x.begin() + 100, noise.x.end());
    std::vector<double> out_tail(out.x.begin() + 100, out.x.end());
    const double lag = sig::estimate_delay_samples(in_tail, out_tail);
    CHECK(lag == Approx(10.5).margin(0.05));
}

TEST_CASE("filter-then-delay commutes with delay-then-filter", "[signal]") {
    const auto filter = sig::design_bandpass(201, 1250.0, 18.0, 23.0);
    const auto tone = make_tone(1250.0, 20.0, 1.0, 4096);

    const auto filtered_then_delayed = sig::apply_filter(filter, tone, 7.0);
    auto delayed = sig::apply_filter(sig::FirFilter{{1.0}, 1250.0}, tone, 7.0);
    const auto delayed_then_filtered = sig::apply_filter(filter, delayed);

    for (std::size_t i = 600; i < tone.x.size(); i += 73) {
        CHECK(filtered_then_delayed.x[i] ==
              Approx(delayed_then_filtered.x[i]).margin(1e-12));
    }
}

TEST_CASE("rate mismatch is rejected", "[signal]") {
    const auto filter = sig::design_bandpass(101, 1250.0, 18.0, 23.0);
    auto tone = make_tone(2440.0, 18.9, 1.0, 1024);
    CHECK_THROWS_AS(sig::apply_filter(filter, tone), sig::RateMismatch);
}

TEST_CASE("decimation keeps low-frequency content", "[signal]") {
    SECTION("factor 1 is the identity") {
        const auto tone = make_tone(2440.0, 19.0, 1.0, 4096);
        const auto out = sig::decimate(tone, 1);
        CHECK(out.sample_rate == tone.sample_rate);
        CHECK(out.x == tone.x);
    }

    SECTION("a 19 Hz tone survives 2440 -> 1220 Hz decimation") {
        const auto tone = make_tone(2440.0, 19.0, 1.0, 1 << 15);
        const auto out = sig::decimate(tone, 2);
        CHECK(out.sample_rate == Approx(1220.0));

        double peak = 0.0;
        for (std::size_t i = out.warmup + 200; i + 200 < out.x.size(); ++i) {
            peak = std::max(peak, std::abs(out.x[i]));
        }
        CHECK(peak == Approx(1.0).epsilon(0.01));
    }

    SECTION("spectral content below 100 Hz is preserved") {
        auto noise = make_noise(2440.0, 1 << 17, 3);
        const auto before = sig::welch_psd(noise, 4096);
        const auto after = sig::welch_psd(sig::decimate(noise, 2), 4096);
        const double p_before = sig::band_power(before, 5.0, 100.0);
        const double p_after = sig::band_power(after, 5.0, 100.0);
        CHECK(p_after == Approx(p_before).epsilon(0.05));
    }
}

TEST_CASE("welch density normalization", "[signal]") {
    SECTION("unit-variance white noise is flat at 2/fs") {
        const double fs = 2440.0;
        const auto noise = make_noise(fs, 1 << 18, 9);
        const auto spec = sig::welch_psd(noise, 1024);
        double mean_level = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 1; i + 1 < spec.psd.size(); ++i) {
            mean_level += spec.psd[i];
            ++count;
        }
        mean_level /= static_cast<double>(count);
        CHECK(mean_level == Approx(2.0 / fs).epsilon(0.05));
    }

    SECTION("pure tone integrates to A^2/2") {
        const double amp = 3.0;
        const auto tone = make_tone(1000.0, 123.4, amp, 1 << 16);
        const auto spec = sig::welch_psd(tone, 4096);
        const double total = sig::band_power(spec, 0.0, 500.0);
        CHECK(total == Approx(0.5 * amp * amp).epsilon(0.02));
    }

    SECTION("Parseval for broadband input with many segments") {
        const auto noise = make_noise(500.0, 1 << 17, 21);
        double mean = 0.0;
        for (double v : noise.x) mean += v;
        mean /= static_cast<double>(noise.x.size());
        double var = 0.0;
        for (double v : noise.x) var += (v - mean) * (v - mean);
        var /= static_cast<double>(noise.x.size());

        const auto spec = sig::welch_psd(noise, 1024);
        const double total = sig::band_power(spec, 0.0, 250.0);
        CHECK(total == Approx(var).epsilon(0.02));
    }
}

TEST_CASE("welch rejects bad inputs", "[signal]") {
    const auto tone = make_tone(1000.0, 10.0, 1.0, 256);
    CHECK_THROWS_AS(sig::welch_psd(tone, 512), sig::TooShort);
    CHECK_THROWS_AS(sig::welch_psd(tone, 128, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sig::welch_psd(tone, 128, 0.5, "flattop"), std::invalid_argument);
}

TEST_CASE("fft matches the direct transform", "[signal]") {
    testing::TestRng rng(5);
    std::vector<std::complex<double>> data(64);
    for (auto& c : data) c = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    auto fast = data;
    sig::fft_radix2(fast);
    for (std::size_t k = 0; k < data.size(); k += 7) {
        std::complex<double> direct{0.0, 0.0};
        for (std::size_t n = 0; n < data.size(); ++n) {
            const double angle = -constants::two_pi * static_cast<double>(k * n) /
                                 static_cast<double>(data.size());
            direct += data[n] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        CHECK(std::abs(fast[k] - direct) < 1e-10);
    }
    std::vector<std::complex<double>> odd(48);
    CHECK_THROWS_AS(sig::fft_radix2(odd), std::invalid_argument);
}
