#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pamsim/common.hpp"
#include "pamsim/fft.hpp"
#include "pamsim/resample.hpp"
#include "pamsim/rng.hpp"

namespace pamsim {

struct LinkConfig {
    double baud = 80e9;
    double dac_rate = 92e9;
    double adc_rate = 160e9;
    double eo_3db_bandwidth = 21e9;
    int eo_order = 2;
    double rx_3db_bandwidth = 50e9;
    int rx_order = 2;
    double vpi = 6.0;           // volts
    double drive_swing = 3.0;   // volts peak
    double fiber_length = 0.0;  // m
    double dispersion_D = 17e-6;   // s/m^2 (17 ps/nm/km)
    double wavelength = 1545.72e-9;
    double osnr_db = 0.0;  // <= 0 disables ASE loading
    double responsivity = 1.0;
    std::uint64_t rng_seed = 1;

    bool noise_enabled() const { return osnr_db > 0.0; }
    /// Internal analog grid; commensurate with both converter rates.
    double sim_rate() const { return 2.0 * std::max(dac_rate, adc_rate); }

    void validate() const {
        if (baud <= 0 || dac_rate <= 0 || adc_rate <= 0 || eo_3db_bandwidth <= 0 ||
            rx_3db_bandwidth <= 0)
            throw std::invalid_argument("LinkConfig: rates and bandwidths must be positive");
        if (fiber_length < 0) throw std::invalid_argument("LinkConfig: fiber_length must be >= 0");
        if (drive_swing >= 2.0 * vpi)
            throw std::invalid_argument("LinkConfig: drive_swing must stay within one Vpi period");
    }
};

/// Zero-phase filtering by a real magnitude response H(|f|). Circular at the
/// input length; DC gain is H(0).
template <typename MagFn>
inline SampledWaveform apply_magnitude_response(const SampledWaveform& wave, MagFn mag) {
    const std::size_t n = wave.samples.size();
    std::vector<cdouble> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = wave.samples[i];
    dft_inplace(x);
    for (std::size_t k = 0; k < n; ++k) x[k] *= mag(std::abs(bin_frequency(k, n, wave.sample_rate)));
    dft_inplace(x, true);
    SampledWaveform out;
    out.sample_rate = wave.sample_rate;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = x[i].real();
    return out;
}

/// Combined driver + modulator rolloff: Butterworth-shaped magnitude with a
/// pinned -3 dB point and linear phase.
inline SampledWaveform eo_response(const SampledWaveform& wave, double f3db, int order = 2) {
    if (f3db <= 0) throw std::invalid_argument("eo_response: f3db must be positive");
    return apply_magnitude_response(wave, [f3db, order](double f) {
        return 1.0 / std::sqrt(1.0 + std::pow(f / f3db, 2.0 * order));
    });
}

/// Quadrature-biased push-pull MZM: E(t) = E0 * cos(pi/4 + pi*v/(2*Vpi)).
/// At v = 0 the transmitted power is half the input power.
inline OpticalField mzm_modulate(const SampledWaveform& drive, const LinkConfig& cfg,
                                 bool* overmod_warning = nullptr) {
    const double pi = 3.14159265358979323846;
    OpticalField field;
    field.sample_rate = drive.sample_rate;
    field.wavelength = cfg.wavelength;
    field.samples.resize(drive.samples.size());
    bool warn = false;
    for (std::size_t i = 0; i < drive.samples.size(); ++i) {
        const double v = drive.samples[i];
        if (std::abs(v) > cfg.vpi) warn = true;
        field.samples[i] = std::cos(pi / 4.0 + pi * v / (2.0 * cfg.vpi));
    }
    if (overmod_warning) *overmod_warning = warn;
    return field;
}

/// Chromatic dispersion as an all-pass on the complex envelope:
/// H(f) = exp(+j*pi*lambda^2*D*L*f^2 / c). Unitary and invertible (L -> -L).
inline OpticalField fiber_cd(const OpticalField& field, double length_m, double dispersion_D,
                             double wavelength) {
    if (length_m == 0.0) return field;
    const double pi = 3.14159265358979323846;
    const std::size_t n = field.samples.size();
    std::vector<cdouble> x = field.samples;
    dft_inplace(x);
    const double coef = pi * wavelength * wavelength * dispersion_D * length_m / kSpeedOfLight;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = bin_frequency(k, n, field.sample_rate);
        const double phase = coef * f * f;
        x[k] *= cdouble{std::cos(phase), std::sin(phase)};
    }
    dft_inplace(x, true);
    OpticalField out = field;
    out.samples = std::move(x);
    return out;
}

/// ASE loading: complex circular Gaussian noise at an OSNR setpoint
/// referenced to 12.5 GHz (0.1 nm). osnr_db <= 0 disables (passthrough).
inline OpticalField load_ase_noise(const OpticalField& field, double osnr_db, Rng& rng) {
    if (osnr_db <= 0.0) return field;
    constexpr double kOsnrRefBandwidth = 12.5e9;
    const double sig_power = energy(field.samples) / static_cast<double>(field.samples.size());
    const double noise_in_ref = sig_power / from_db10(osnr_db);
    const double noise_total = noise_in_ref * field.sample_rate / kOsnrRefBandwidth;
    const double sigma = std::sqrt(noise_total / 2.0);
    OpticalField out = field;
    for (auto& v : out.samples) v += cdouble{sigma * rng.gaussian(), sigma * rng.gaussian()};
    return out;
}

/// Square-law detection followed by the receiver electrical lowpass.
inline SampledWaveform photodiode(const OpticalField& field, double responsivity, double rx_f3db,
                                  int order = 2) {
    SampledWaveform current;
    current.sample_rate = field.sample_rate;
    current.samples.resize(field.samples.size());
    for (std::size_t i = 0; i < field.samples.size(); ++i)
        current.samples[i] = responsivity * std::norm(field.samples[i]);
    if (rx_f3db <= 0) return current;
    return apply_magnitude_response(current, [rx_f3db, order](double f) {
        return 1.0 / std::sqrt(1.0 + std::pow(f / rx_f3db, 2.0 * order));
    });
}

/// Band-limited rational resampling to the capture rate.
inline SampledWaveform adc_model(const SampledWaveform& wave, double adc_rate, double baud) {
    if (adc_rate < baud) throw std::invalid_argument("adc_model: sub-Nyquist capture disallowed");
    return resample_to_rate(wave, adc_rate);
}

/// Full analog path: DAC-rate drive waveform in, ADC-rate photocurrent out.
/// Deterministic given (cfg, seed).
inline SampledWaveform channel_propagate(const SampledWaveform& dac_wave, const LinkConfig& cfg,
                                         std::uint64_t noise_seed, bool* overmod_warning = nullptr) {
    cfg.validate();
    SampledWaveform analog = resample_to_rate(dac_wave, cfg.sim_rate());

    // Scale the drive to the configured peak swing.
    double peak = 0.0;
    for (double v : analog.samples) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
        const double s = cfg.drive_swing / peak;
        for (double& v : analog.samples) v *= s;
    }

    analog = eo_response(analog, cfg.eo_3db_bandwidth, cfg.eo_order);
    OpticalField field = mzm_modulate(analog, cfg, overmod_warning);
    if (cfg.fiber_length > 0.0)
        field = fiber_cd(field, cfg.fiber_length, cfg.dispersion_D, cfg.wavelength);
    if (cfg.noise_enabled()) {
        Rng rng(noise_seed);
        field = load_ase_noise(field, cfg.osnr_db, rng);
    }
    SampledWaveform detected = photodiode(field, cfg.responsivity, cfg.rx_3db_bandwidth, cfg.rx_order);
    return adc_model(detected, cfg.adc_rate, cfg.baud);
}

}  // namespace pamsim
