#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pamsim/txdsp.hpp"

using namespace pamsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent RRC oracle: evaluate the closed form slightly off the singular
// points instead of using analytic limits, then normalize the same way.
std::vector<double> rrc_oracle(double b, int sps, int span) {
    const int n_taps = span * sps + 1;
    const int c = (n_taps - 1) / 2;
    std::vector<double> h(n_taps);
    for (int i = 0; i < n_taps; ++i) {
        double t = static_cast<double>(i - c) / sps;
        if (t == 0.0) t = 1e-9;
        if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-12) t += 1e-9;
        const double num = std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b));
        const double den = kPi * t * (1.0 - 16.0 * b * b * t * t);
        h[static_cast<std::size_t>(i)] = num / den;
    }
    double e = 0.0;
    for (double v : h) e += v * v;
    for (double& v : h) v /= std::sqrt(e);
    return h;
}

}  // namespace

TEST_CASE("rrc_taps basic structure", "[txdsp]") {
    RrcFilter f = rrc_taps(0.01, 2, 64);
    REQUIRE(f.taps.size() == 129);
    REQUIRE(f.taps.size() % 2 == 1);

    // Even symmetry.
    for (std::size_t i = 0; i < f.taps.size(); ++i)
        REQUIRE(f.taps[i] == Catch::Approx(f.taps[f.taps.size() - 1 - i]).margin(1e-15));

    // Unit energy.
    double e = 0.0;
    for (double v : f.taps) e += v * v;
    REQUIRE(e == Catch::Approx(1.0).epsilon(1e-12));

    REQUIRE_THROWS_AS(rrc_taps(0.0, 2, 64), std::invalid_argument);
    REQUIRE_THROWS_AS(rrc_taps(1.1, 2, 64), std::invalid_argument);
    REQUIRE_THROWS_AS(rrc_taps(0.01, 0, 64), std::invalid_argument);
    REQUIRE_THROWS_AS(rrc_taps(0.01, 2, 7), std::invalid_argument);
}

TEST_CASE("rrc singular points match the closed-form limits", "[txdsp]") {
    // beta = 1.0, sps = 4: t = 1/(4*beta) = 0.25 lands exactly on the grid.
    RrcFilter f = rrc_taps(1.0, 4, 16);
    std::vector<double> oracle = rrc_oracle(1.0, 4, 16);
    REQUIRE(f.taps.size() == oracle.size());
    for (std::size_t i = 0; i < f.taps.size(); ++i) {
        CAPTURE(i);
        REQUIRE(f.taps[i] == Catch::Approx(oracle[i]).margin(1e-6));
    }
}

TEST_CASE("rrc self-convolution is Nyquist at symbol instants", "[txdsp]") {
    // At beta = 0.01 the impulse response decays ~1/t, so the truncation ISI
    // floor is span-limited: ~1.3e-2 at span 64, below 1e-3 from span ~200.
    RrcFilter f = rrc_taps(0.01, 2, 256);
    std::vector<double> rc = convolve_full(f.taps, f.taps);
    const std::size_t center = (rc.size() - 1) / 2;
    const double peak = rc[center];
    REQUIRE(peak == Catch::Approx(1.0).margin(1e-3));
    for (std::size_t k = 2; center + k < rc.size(); k += 2) {
        CAPTURE(k);
        REQUIRE(std::abs(rc[center + k] / peak) < 1e-3);
        REQUIRE(std::abs(rc[center - k] / peak) < 1e-3);
    }

    // The default span-64 filter keeps the same property within its
    // truncation floor.
    RrcFilter f64 = rrc_taps(0.01, 2, 64);
    std::vector<double> rc64 = convolve_full(f64.taps, f64.taps);
    const std::size_t c64 = (rc64.size() - 1) / 2;
    REQUIRE(rc64[c64] == Catch::Approx(1.0).margin(1e-3));
    for (std::size_t k = 2; c64 + k < rc64.size(); k += 2)
        REQUIRE(std::abs(rc64[c64 + k] / rc64[c64]) < 1.5e-2);
}

TEST_CASE("upsample_and_shape impulse response and energy", "[txdsp]") {
    RrcFilter f = rrc_taps(0.01, 23, 16);
    SampledWaveform w = upsample_and_shape({1}, 80e9, 23, f, /*keep_tails=*/true);
    REQUIRE(w.sample_rate == Catch::Approx(80e9 * 23));
    REQUIRE(w.samples.size() == f.taps.size());
    for (std::size_t i = 0; i < f.taps.size(); ++i)
        REQUIRE(w.samples[i] == Catch::Approx(f.taps[i]).margin(1e-15));

    REQUIRE_THROWS_AS(upsample_and_shape({1}, 80e9, 20, f), std::invalid_argument);

    // Parseval: unit-energy shaping of nearly orthogonal symbol pulses keeps
    // total energy ~ sum of squared symbols.
    FrameLayout layout;
    layout.payload_len = 500;
    SymbolFrame frame = build_frame(layout, std::uint64_t{3});
    RrcFilter f2 = rrc_taps(0.01, 2, 64);
    SampledWaveform shaped = upsample_and_shape(frame.symbols, 80e9, 2, f2, true);
    double sym_energy = 0.0;
    for (int s : frame.symbols) sym_energy += static_cast<double>(s) * s;
    REQUIRE(energy(shaped.samples) == Catch::Approx(sym_energy).epsilon(0.01));
}

TEST_CASE("shaping is linear", "[txdsp]") {
    RrcFilter f = rrc_taps(0.01, 2, 16);
    Pam4Seq x = generate_msequence(6, 1, 100);
    Pam4Seq y = generate_msequence(6, 5, 100);
    Pam4Seq sum(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sum[i] = x[i] + y[i];
    SampledWaveform wx = upsample_and_shape(x, 80e9, 2, f, true);
    SampledWaveform wy = upsample_and_shape(y, 80e9, 2, f, true);
    SampledWaveform ws = upsample_and_shape(sum, 80e9, 2, f, true);
    for (std::size_t i = 0; i < ws.samples.size(); ++i)
        REQUIRE(ws.samples[i] == Catch::Approx(wx.samples[i] + wy.samples[i]).margin(1e-9));
}

TEST_CASE("downsample semantics and Nyquist guard", "[txdsp]") {
    SampledWaveform w;
    w.sample_rate = 1840e9;
    w.samples.resize(100);
    for (std::size_t i = 0; i < w.samples.size(); ++i) w.samples[i] = static_cast<double>(i);

    SampledWaveform same = downsample(w, 1);
    REQUIRE(same.samples == w.samples);

    SampledWaveform d = downsample(w, 20);
    REQUIRE(d.sample_rate == Catch::Approx(92e9));
    REQUIRE(d.samples.size() == 5);
    REQUIRE(d.samples[1] == 20.0);

    // 80 Gbaud, beta 0.01: band edge 40.4 GHz < 46 GHz post-decimation Nyquist.
    REQUIRE_NOTHROW(downsample(w, 20, 80e9 * 1.01 / 2.0));
    REQUIRE_THROWS_AS(downsample(w, 40, 80e9 * 1.01 / 2.0), std::invalid_argument);
}

TEST_CASE("polyphase shape_to_dac equals explicit upsample + downsample", "[txdsp]") {
    Pam4Seq symbols = generate_msequence(7, 1, 200);
    RrcFilter f = rrc_taps(0.01, 23, 16);
    SampledWaveform fast = shape_to_dac(symbols, 80e9, 92e9, f);
    SampledWaveform slow = downsample(upsample_and_shape(symbols, 80e9, 23, f), 20);
    REQUIRE(fast.sample_rate == Catch::Approx(92e9));
    REQUIRE(fast.samples.size() == slow.samples.size());
    for (std::size_t i = 0; i < fast.samples.size(); ++i) {
        CAPTURE(i);
        REQUIRE(fast.samples[i] == Catch::Approx(slow.samples[i]).margin(1e-12));
    }
}

TEST_CASE("rate ratios are exact rational arithmetic", "[txdsp]") {
    Rational r = rate_ratio(92e9, 80e9);
    REQUIRE(r.up == 23);
    REQUIRE(r.down == 20);
    r = rate_ratio(92e9, 84e9);
    REQUIRE(r.up == 23);
    REQUIRE(r.down == 21);
    r = rate_ratio(160e9, 92e9);
    REQUIRE(r.up == 40);
    REQUIRE(r.down == 23);
    r = rate_ratio(2 * 84e9, 160e9);
    REQUIRE(r.up == 21);
    REQUIRE(r.down == 20);
    REQUIRE_THROWS_AS(rate_ratio(0.0, 80e9), std::invalid_argument);
}

TEST_CASE("dac_model passthrough and quantization SQNR", "[txdsp]") {
    SampledWaveform sine;
    sine.sample_rate = 92e9;
    sine.samples.resize(8192);
    for (std::size_t i = 0; i < sine.samples.size(); ++i)
        sine.samples[i] = std::sin(2.0 * kPi * 37.0 * static_cast<double>(i) / 8192.0);

    SampledWaveform off = dac_model(sine, 1.0, 0);
    REQUIRE(off.samples == sine.samples);

    SampledWaveform q = dac_model(sine, 1.0, 8);
    double sig = 0.0, err = 0.0;
    for (std::size_t i = 0; i < sine.samples.size(); ++i) {
        sig += sine.samples[i] * sine.samples[i];
        const double d = q.samples[i] - sine.samples[i];
        err += d * d;
    }
    const double sqnr_db = db10(sig / err);
    REQUIRE(sqnr_db == Catch::Approx(6.02 * 8 + 1.76).margin(3.0));

    REQUIRE_THROWS_AS(dac_model(sine, 0.0, 8), std::invalid_argument);
    REQUIRE_THROWS_AS(dac_model(sine, 1.0, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(dac_model(sine, 1.0, 11), std::invalid_argument);
}
