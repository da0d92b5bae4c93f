#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pamsim/common.hpp"

namespace pamsim {

/// Modified Bessel function I0 (power-series), for Kaiser windows.
inline double bessel_i0(double x) {
    double sum = 1.0, term = 1.0;
    const double half_x = x / 2.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half_x / k) * (half_x / k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

/// Kaiser-windowed sinc lowpass. cutoff is in cycles/sample (0 .. 0.5),
/// gain is the DC gain. Tap count is forced odd.
inline std::vector<double> kaiser_lowpass(std::size_t n_taps, double cutoff, double beta,
                                          double gain = 1.0) {
    if (n_taps % 2 == 0) ++n_taps;
    std::vector<double> h(n_taps);
    const double c = static_cast<double>(n_taps - 1) / 2.0;
    const double i0b = bessel_i0(beta);
    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < n_taps; ++i) {
        const double t = static_cast<double>(i) - c;
        double sinc = (t == 0.0) ? 2.0 * cutoff : std::sin(2.0 * pi * cutoff * t) / (pi * t);
        const double r = t / c;
        const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
        h[i] = gain * sinc * w;
    }
    return h;
}

/// Polyphase rational resampler core: conceptually insert (up-1) zeros,
/// convolve with `taps` (odd length, delay-compensated), keep every
/// `down`-th sample. The up-rate grid is never materialized.
inline std::vector<double> polyphase_filter_resample(const std::vector<double>& x,
                                                     const std::vector<double>& taps,
                                                     std::int64_t up, std::int64_t down) {
    if (up < 1 || down < 1) throw std::invalid_argument("resample: factors must be >= 1");
    if (taps.empty() || taps.size() % 2 == 0)
        throw std::invalid_argument("resample: taps must be odd-length");
    if (x.empty()) return {};

    const std::int64_t n_in = static_cast<std::int64_t>(x.size());
    const std::int64_t L = static_cast<std::int64_t>(taps.size());
    const std::int64_t c = (L - 1) / 2;
    const std::int64_t n_out = ((n_in - 1) * up) / down + 1;

    std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);
    for (std::int64_t n = 0; n < n_out; ++n) {
        const std::int64_t m = n * down + c;  // up-rate index being evaluated
        // Need j = m - k*up in [0, L)
        const std::int64_t a = m - L + 1;
        std::int64_t k_lo = (a >= 0) ? (a + up - 1) / up : -((-a) / up);  // ceil(a/up)
        std::int64_t k_hi = m / up;
        if (k_lo < 0) k_lo = 0;
        if (k_hi > n_in - 1) k_hi = n_in - 1;
        double acc = 0.0;
        for (std::int64_t k = k_lo; k <= k_hi; ++k)
            acc += x[static_cast<std::size_t>(k)] * taps[static_cast<std::size_t>(m - k * up)];
        y[static_cast<std::size_t>(n)] = acc;
    }
    return y;
}

struct ResampleDesign {
    double passband_frac = 0.93;  // passband edge / min-side Nyquist
    double atten_db = 140.0;      // stopband attenuation target
};

/// Design the anti-imaging/anti-aliasing lowpass for an up/down resampler.
inline std::vector<double> resample_taps(std::int64_t up, std::int64_t down,
                                         const ResampleDesign& d = {}) {
    const double f_nyq = 0.5 / static_cast<double>(std::max(up, down));  // at up-rate
    const double f_pass = d.passband_frac * f_nyq;
    const double f_stop = f_nyq;
    const double pi = 3.14159265358979323846;
    const double delta_w = 2.0 * pi * (f_stop - f_pass);
    const double A = d.atten_db;
    double beta = 0.0;
    if (A > 50.0)
        beta = 0.1102 * (A - 8.7);
    else if (A >= 21.0)
        beta = 0.5842 * std::pow(A - 21.0, 0.4) + 0.07886 * (A - 21.0);
    std::size_t n = static_cast<std::size_t>(std::ceil((A - 7.95) / (2.285 * delta_w))) + 1;
    if (n % 2 == 0) ++n;
    const double fc = 0.5 * (f_pass + f_stop);
    return kaiser_lowpass(n, fc, beta, static_cast<double>(up));
}

/// Band-limited rational resampling by up/down with an internally designed
/// Kaiser lowpass. Delay compensated: output sample n sits at input time
/// n*down/up samples.
inline std::vector<double> rational_resample(const std::vector<double>& x, std::int64_t up,
                                             std::int64_t down, const ResampleDesign& d = {}) {
    if (up == down) return x;
    std::int64_t g = std::gcd(up, down);
    up /= g;
    down /= g;
    return polyphase_filter_resample(x, resample_taps(up, down, d), up, down);
}

/// Resample a waveform to a new rate (rates must form an exact rational).
inline SampledWaveform resample_to_rate(const SampledWaveform& w, double new_rate,
                                        const ResampleDesign& d = {}) {
    Rational r = rate_ratio(new_rate, w.sample_rate);
    if (r.up == r.down) return {w.samples, new_rate};
    return {rational_resample(w.samples, r.up, r.down, d), new_rate};
}

}  // namespace pamsim
