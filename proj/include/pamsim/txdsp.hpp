#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pamsim/common.hpp"
#include "pamsim/fft.hpp"
#include "pamsim/framing.hpp"
#include "pamsim/resample.hpp"

namespace pamsim {

struct RrcFilter {
    double rolloff = 0.01;
    int span = 64;  // symbols
    int sps = 2;    // samples per symbol
    std::vector<double> taps;
};

/// Root-raised-cosine taps, unit energy. The singular points t = 0 and
/// t = +-Ts/(4*beta) use their analytic limits.
inline RrcFilter rrc_taps(double rolloff, int sps, int span) {
    if (!(rolloff > 0.0 && rolloff <= 1.0))
        throw std::invalid_argument("rrc_taps: rolloff must be in (0, 1]");
    if (sps < 1) throw std::invalid_argument("rrc_taps: sps must be >= 1");
    if (span < 8) throw std::invalid_argument("rrc_taps: span must be >= 8 symbols");

    const int n_taps = span * sps + 1;
    const int c = (n_taps - 1) / 2;
    const double pi = 3.14159265358979323846;
    const double b = rolloff;

    std::vector<double> h(n_taps);
    for (int i = 0; i < n_taps; ++i) {
        const double t = static_cast<double>(i - c) / sps;  // in symbol periods
        double v;
        if (t == 0.0) {
            v = 1.0 - b + 4.0 * b / pi;
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-12) {
            v = (b / std::sqrt(2.0)) *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) +
                 (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
        } else {
            const double num = std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b));
            const double den = pi * t * (1.0 - 16.0 * b * b * t * t);
            v = num / den;
        }
        h[i] = v;
    }
    double e = 0.0;
    for (double v : h) e += v * v;
    const double scale = 1.0 / std::sqrt(e);
    for (double& v : h) v *= scale;
    return {rolloff, span, sps, std::move(h)};
}

inline std::vector<double> symbols_as_double(const Pam4Seq& symbols) {
    std::vector<double> x(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) x[i] = static_cast<double>(symbols[i]);
    return x;
}

/// Zero-insert by `up` and convolve with the RRC. With keep_tails the full
/// convolution is returned (symbol 0 center at sample (taps-1)/2); otherwise
/// the output is trimmed so sample 0 is the symbol 0 center.
inline SampledWaveform upsample_and_shape(const Pam4Seq& symbols, double baud, int up,
                                          const RrcFilter& rrc, bool keep_tails = false) {
    if (rrc.sps != up) throw std::invalid_argument("upsample_and_shape: rrc.sps must equal up");
    std::vector<double> x = symbols_as_double(symbols);
    SampledWaveform out;
    out.sample_rate = baud * up;
    if (keep_tails) {
        std::vector<double> xu(static_cast<std::size_t>(x.size() - 1) * up + 1, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) xu[i * up] = x[i];
        out.samples = convolve_full(xu, rrc.taps);
    } else {
        out.samples = polyphase_filter_resample(x, rrc.taps, up, 1);
    }
    return out;
}

/// Keep every down-th sample. max_signal_freq, when given, guards the
/// post-decimation Nyquist rate.
inline SampledWaveform downsample(const SampledWaveform& wave, int down,
                                  double max_signal_freq = 0.0) {
    if (down < 1) throw std::invalid_argument("downsample: factor must be >= 1");
    const double new_rate = wave.sample_rate / down;
    if (max_signal_freq > 0.0 && max_signal_freq > new_rate / 2.0)
        throw std::invalid_argument("downsample: signal band exceeds post-decimation Nyquist");
    SampledWaveform out;
    out.sample_rate = new_rate;
    out.samples.reserve((wave.samples.size() + down - 1) / down);
    for (std::size_t i = 0; i < wave.samples.size(); i += down)
        out.samples.push_back(wave.samples[i]);
    return out;
}

/// Polyphase fast path: RRC shaping and the up/down rate change in one pass,
/// without materializing the up-rate grid. Identical to
/// downsample(upsample_and_shape(...), down) sample for sample.
inline SampledWaveform shape_to_dac(const Pam4Seq& symbols, double baud, double dac_rate,
                                    const RrcFilter& rrc) {
    Rational r = rate_ratio(dac_rate, baud);
    if (rrc.sps != r.up)
        throw std::invalid_argument("shape_to_dac: rrc.sps must equal the rate-ratio numerator");
    SampledWaveform out;
    out.sample_rate = dac_rate;
    out.samples = polyphase_filter_resample(symbols_as_double(symbols), rrc.taps, r.up, r.down);
    return out;
}

/// Optional AWG impairment: clip to clip_ratio * full scale and quantize to
/// n_bits. n_bits = 0 disables (bit-exact passthrough).
inline SampledWaveform dac_model(const SampledWaveform& wave, double clip_ratio, int n_bits) {
    if (n_bits == 0) return wave;
    if (!(clip_ratio > 0.0 && clip_ratio <= 1.0))
        throw std::invalid_argument("dac_model: clip_ratio must be in (0, 1]");
    if (n_bits < 4 || n_bits > 10)
        throw std::invalid_argument("dac_model: n_bits must be in [4, 10] or 0 (disabled)");
    double peak = 0.0;
    for (double v : wave.samples) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return wave;
    const double c = clip_ratio * peak;
    const double levels = static_cast<double>((1 << n_bits) - 1);
    SampledWaveform out;
    out.sample_rate = wave.sample_rate;
    out.samples.resize(wave.samples.size());
    for (std::size_t i = 0; i < wave.samples.size(); ++i) {
        double v = std::clamp(wave.samples[i], -c, c);
        double q = std::round((v + c) / (2.0 * c) * levels);
        out.samples[i] = q / levels * 2.0 * c - c;
    }
    return out;
}

}  // namespace pamsim
