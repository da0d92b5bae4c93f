#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pamsim/sweep.hpp"

namespace pamsim {

using nlohmann::json;

namespace detail {
template <typename T>
void maybe_get(const json& j, const char* key, T& value) {
    if (j.contains(key)) j.at(key).get_to(value);
}
}  // namespace detail

inline void from_json(const json& j, FrameLayout& l) {
    detail::maybe_get(j, "sync_seq_len", l.sync_seq_len);
    detail::maybe_get(j, "sync_seq_count", l.sync_seq_count);
    detail::maybe_get(j, "train_seq_len", l.train_seq_len);
    detail::maybe_get(j, "train_seq_count", l.train_seq_count);
    detail::maybe_get(j, "payload_len", l.payload_len);
}

inline void to_json(json& j, const FrameLayout& l) {
    j = json{{"sync_seq_len", l.sync_seq_len},
             {"sync_seq_count", l.sync_seq_count},
             {"train_seq_len", l.train_seq_len},
             {"train_seq_count", l.train_seq_count},
             {"payload_len", l.payload_len}};
}

inline void from_json(const json& j, LinkConfig& c) {
    detail::maybe_get(j, "baud", c.baud);
    detail::maybe_get(j, "dac_rate", c.dac_rate);
    detail::maybe_get(j, "adc_rate", c.adc_rate);
    detail::maybe_get(j, "eo_3db_bandwidth", c.eo_3db_bandwidth);
    detail::maybe_get(j, "eo_order", c.eo_order);
    detail::maybe_get(j, "rx_3db_bandwidth", c.rx_3db_bandwidth);
    detail::maybe_get(j, "rx_order", c.rx_order);
    detail::maybe_get(j, "vpi", c.vpi);
    detail::maybe_get(j, "drive_swing", c.drive_swing);
    detail::maybe_get(j, "fiber_length", c.fiber_length);
    detail::maybe_get(j, "dispersion_D", c.dispersion_D);
    detail::maybe_get(j, "wavelength", c.wavelength);
    detail::maybe_get(j, "osnr_db", c.osnr_db);
    detail::maybe_get(j, "responsivity", c.responsivity);
    detail::maybe_get(j, "rng_seed", c.rng_seed);
}

inline void to_json(json& j, const LinkConfig& c) {
    j = json{{"baud", c.baud},
             {"dac_rate", c.dac_rate},
             {"adc_rate", c.adc_rate},
             {"eo_3db_bandwidth", c.eo_3db_bandwidth},
             {"eo_order", c.eo_order},
             {"rx_3db_bandwidth", c.rx_3db_bandwidth},
             {"rx_order", c.rx_order},
             {"vpi", c.vpi},
             {"drive_swing", c.drive_swing},
             {"fiber_length", c.fiber_length},
             {"dispersion_D", c.dispersion_D},
             {"wavelength", c.wavelength},
             {"osnr_db", c.osnr_db},
             {"responsivity", c.responsivity},
             {"rng_seed", c.rng_seed}};
}

inline void from_json(const json& j, DspConfig& d) {
    detail::maybe_get(j, "rolloff", d.rolloff);
    detail::maybe_get(j, "rrc_span", d.rrc_span);
    detail::maybe_get(j, "guard_symbols", d.guard_symbols);
    detail::maybe_get(j, "use_ffe", d.use_ffe);
    detail::maybe_get(j, "ffe_taps", d.ffe_taps);
    detail::maybe_get(j, "lambda_train", d.lambda_train);
    detail::maybe_get(j, "delta", d.delta);
    detail::maybe_get(j, "use_dd_rls", d.use_dd_rls);
    detail::maybe_get(j, "dd_taps", d.dd_taps);
    detail::maybe_get(j, "lambda_dd", d.lambda_dd);
    detail::maybe_get(j, "dd_gain", d.dd_gain);
    detail::maybe_get(j, "use_postfilter_mlsd", d.use_postfilter_mlsd);
    detail::maybe_get(j, "alpha", d.alpha);
    detail::maybe_get(j, "n_frames", d.n_frames);
    detail::maybe_get(j, "layout", d.layout);
}

inline void to_json(json& j, const DspConfig& d) {
    j = json{{"rolloff", d.rolloff},
             {"rrc_span", d.rrc_span},
             {"guard_symbols", d.guard_symbols},
             {"use_ffe", d.use_ffe},
             {"ffe_taps", d.ffe_taps},
             {"lambda_train", d.lambda_train},
             {"delta", d.delta},
             {"use_dd_rls", d.use_dd_rls},
             {"dd_taps", d.dd_taps},
             {"lambda_dd", d.lambda_dd},
             {"dd_gain", d.dd_gain},
             {"use_postfilter_mlsd", d.use_postfilter_mlsd},
             {"alpha", d.alpha},
             {"n_frames", d.n_frames},
             {"layout", d.layout}};
}

inline void from_json(const json& j, SweepSpec& s) {
    detail::maybe_get(j, "param", s.param);
    detail::maybe_get(j, "values", s.values);
    detail::maybe_get(j, "trials", s.trials);
    detail::maybe_get(j, "link", s.link);
    detail::maybe_get(j, "dsp", s.dsp);
    detail::maybe_get(j, "rop_osnr_offset_db", s.rop_osnr_offset_db);
}

inline void to_json(json& j, const SweepSpec& s) {
    j = json{{"param", s.param},       {"values", s.values},
             {"trials", s.trials},     {"link", s.link},
             {"dsp", s.dsp},           {"rop_osnr_offset_db", s.rop_osnr_offset_db}};
}

struct Scenario {
    LinkConfig link;
    DspConfig dsp;
};

/// Named presets covering the default operating points. Physical parameters
/// are the schema defaults; presets only pin baud, distance, the per-distance
/// post-filter alpha and a noise setpoint. The per-distance alphas sit at the
/// measured BER optimum for each preset.
inline Scenario preset_scenario(const std::string& name) {
    Scenario s;
    s.link.osnr_db = 38.0;
    auto set = [&s](double baud, double length_m, double alpha) {
        s.link.baud = baud;
        s.link.fiber_length = length_m;
        s.dsp.alpha = alpha;
    };
    if (name == "80g-btb")
        set(80e9, 0.0, 0.5);
    else if (name == "80g-1km")
        set(80e9, 1000.0, 0.7);
    else if (name == "80g-2km")
        set(80e9, 2000.0, 0.8);
    else if (name == "84g-btb")
        set(84e9, 0.0, 0.6);
    else if (name == "84g-1km")
        set(84e9, 1000.0, 0.7);
    else if (name == "clean-loopback") {
        set(80e9, 0.0, 0.0);
        s.link.osnr_db = 0.0;  // noiseless
        s.link.eo_3db_bandwidth = 300e9;
        s.link.rx_3db_bandwidth = 300e9;
        s.dsp.use_postfilter_mlsd = false;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return s;
}

inline const char* kPresetNames[] = {"80g-btb", "80g-1km", "80g-2km",
                                     "84g-btb", "84g-1km", "clean-loopback"};

}  // namespace pamsim
