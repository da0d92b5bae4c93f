#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pamsim/common.hpp"
#include "pamsim/fft.hpp"
#include "pamsim/framing.hpp"

namespace pamsim {

constexpr double kKp4Threshold = 2.2e-4;
constexpr double kHd7Threshold = 3.8e-3;
constexpr double kHd20Threshold = 1.5e-2;

struct BerReport {
    std::size_t bits_compared = 0;
    std::size_t bit_errors = 0;
    double ber = 0.0;
    bool kp4_pass = false;   // <= 2.2e-4
    bool hd7_pass = false;   // <= 3.8e-3
    bool hd20_pass = false;  // <= 1.5e-2
    double net_rate = 0.0;   // bit/s, 0 if not attached
};

/// Exact error counting. A BER exactly at a threshold passes (<= convention).
inline BerReport count_ber(const BitSeq& tx_bits, const BitSeq& rx_bits) {
    if (tx_bits.size() != rx_bits.size())
        throw std::invalid_argument("count_ber: bit stream lengths differ");
    if (tx_bits.empty()) throw std::invalid_argument("count_ber: empty bit streams");
    BerReport r;
    r.bits_compared = tx_bits.size();
    for (std::size_t i = 0; i < tx_bits.size(); ++i)
        if (tx_bits[i] != rx_bits[i]) ++r.bit_errors;
    r.ber = static_cast<double>(r.bit_errors) / static_cast<double>(r.bits_compared);
    r.kp4_pass = r.ber <= kKp4Threshold;
    r.hd7_pass = r.ber <= kHd7Threshold;
    r.hd20_pass = r.ber <= kHd20Threshold;
    return r;
}

/// Net data rate after frame redundancy and FEC overhead:
/// baud * bits_per_symbol / overhead * payload / total_frame.
inline double net_rate(double baud, double bits_per_symbol, double fec_overhead_ratio,
                       const FrameLayout& layout) {
    if (fec_overhead_ratio < 1.0)
        throw std::invalid_argument("net_rate: overhead ratio must be >= 1");
    return baud * bits_per_symbol / fec_overhead_ratio *
           static_cast<double>(layout.payload_len) / static_cast<double>(layout.total());
}

struct SpectrumPoint {
    double frequency_hz = 0.0;  // offset from carrier
    double psd_db = 0.0;
};

/// Welch-averaged periodogram (Hann window, 50% overlap) smoothed to the
/// requested resolution bandwidth. Total integrated power matches the
/// time-domain mean power (Parseval).
inline std::vector<SpectrumPoint> optical_spectrum(const OpticalField& field,
                                                   double resolution_bw) {
    if (resolution_bw <= 0) throw std::invalid_argument("optical_spectrum: bad resolution");
    std::size_t seg = next_pow2(static_cast<std::size_t>(field.sample_rate / resolution_bw));
    if (seg > field.samples.size())
        throw std::invalid_argument("optical_spectrum: field too short for resolution");
    const std::size_t hop = seg / 2;
    const double pi = 3.14159265358979323846;

    std::vector<double> window(seg);
    double wpow = 0.0;
    for (std::size_t i = 0; i < seg; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(seg)));
        wpow += window[i] * window[i];
    }

    std::vector<double> psd(seg, 0.0);
    std::size_t n_seg = 0;
    for (std::size_t start = 0; start + seg <= field.samples.size(); start += hop) {
        std::vector<cdouble> x(seg);
        for (std::size_t i = 0; i < seg; ++i) x[i] = field.samples[start + i] * window[i];
        fft_inplace(x);
        for (std::size_t k = 0; k < seg; ++k) psd[k] += std::norm(x[k]);
        ++n_seg;
    }
    if (n_seg == 0) throw std::invalid_argument("optical_spectrum: field too short");
    // Normalize so that the sum over all bins equals the time-domain mean power.
    const double scale = 1.0 / (static_cast<double>(n_seg) * wpow * static_cast<double>(seg));
    for (auto& v : psd) v *= scale;

    // Boxcar smoothing to the resolution bandwidth.
    const double df = field.sample_rate / static_cast<double>(seg);
    const int halfwin = std::max(0, static_cast<int>(std::round(resolution_bw / df / 2.0)) - 0);
    std::vector<double> smooth(seg);
    for (std::size_t k = 0; k < seg; ++k) {
        double acc = 0.0;
        int cnt = 0;
        for (int j = -halfwin; j <= halfwin; ++j) {
            const std::size_t idx = (k + seg + static_cast<std::size_t>(j + static_cast<int>(seg))) % seg;
            acc += psd[idx];
            ++cnt;
        }
        smooth[k] = acc / cnt;
    }

    std::vector<SpectrumPoint> out(seg);
    for (std::size_t i = 0; i < seg; ++i) {
        // fftshift: negative offsets first
        const std::size_t k = (i + seg / 2) % seg;
        out[i].frequency_hz = bin_frequency(k, seg, field.sample_rate);
        out[i].psd_db = 10.0 * std::log10(std::max(smooth[k], 1e-300));
    }
    return out;
}

struct FadingPoint {
    double frequency_hz = 0.0;
    double attenuation_db = 0.0;  // <= 0
};

struct FadingProfile {
    std::vector<FadingPoint> curve;
    double first_3db_hz = 0.0;  // sqrt(c / (4 lambda^2 D L)), 0 for L = 0
};

/// Small-signal IM/DD dispersion power fading |cos(pi lambda^2 D L f^2 / c)|.
inline double fading_amplitude(double f_hz, double length_m, double dispersion_D,
                               double wavelength) {
    const double pi = 3.14159265358979323846;
    const double phase = pi * wavelength * wavelength * dispersion_D * length_m * f_hz * f_hz /
                         kSpeedOfLight;
    return std::abs(std::cos(phase));
}

inline FadingProfile fading_profile(double length_m, double dispersion_D, double wavelength,
                                    const std::vector<double>& f_grid) {
    FadingProfile p;
    p.curve.reserve(f_grid.size());
    for (double f : f_grid) {
        const double a = fading_amplitude(f, length_m, dispersion_D, wavelength);
        p.curve.push_back({f, 20.0 * std::log10(std::max(a, 1e-300))});
    }
    if (length_m > 0.0)
        p.first_3db_hz =
            std::sqrt(kSpeedOfLight / (4.0 * wavelength * wavelength * dispersion_D * length_m));
    return p;
}

}  // namespace pamsim
