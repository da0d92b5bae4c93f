#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pamsim {

using cdouble = std::complex<double>;

constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Real-valued waveform with an explicit sample rate.
struct SampledWaveform {
    std::vector<double> samples;
    double sample_rate = 0.0;  // Hz
};

/// Complex optical field envelope (sqrt(W) units) on a carrier.
struct OpticalField {
    std::vector<cdouble> samples;
    double sample_rate = 0.0;  // Hz
    double wavelength = 0.0;   // m
};

inline double mean(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double energy(const std::vector<double>& x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

inline double energy(const std::vector<cdouble>& x) {
    double e = 0.0;
    for (const auto& v : x) e += std::norm(v);
    return e;
}

inline double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    return std::sqrt(energy(x) / static_cast<double>(x.size()));
}

inline bool all_finite(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

inline double db10(double power_ratio) { return 10.0 * std::log10(power_ratio); }
inline double db20(double amp_ratio) { return 20.0 * std::log10(amp_ratio); }
inline double from_db10(double db) { return std::pow(10.0, db / 10.0); }

/// Reduce a rate ratio out_rate/in_rate to an exact integer fraction.
/// Rates are expected to be integral in Hz (92e9, 160e9, ...).
struct Rational {
    std::int64_t up = 1;
    std::int64_t down = 1;
};

inline Rational rate_ratio(double out_rate, double in_rate) {
    if (out_rate <= 0.0 || in_rate <= 0.0)
        throw std::invalid_argument("rate_ratio: rates must be positive");
    auto a = static_cast<std::int64_t>(std::llround(out_rate));
    auto b = static_cast<std::int64_t>(std::llround(in_rate));
    if (std::abs(out_rate - static_cast<double>(a)) > 1e-3 ||
        std::abs(in_rate - static_cast<double>(b)) > 1e-3)
        throw std::invalid_argument("rate_ratio: rates must be integral in Hz");
    std::int64_t g = std::gcd(a, b);
    return {a / g, b / g};
}

}  // namespace pamsim
