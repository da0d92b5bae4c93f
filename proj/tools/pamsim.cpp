// pamsim: PAM-4 IM/DD link simulator front end.
//
// Subcommands:
//   simulate  - one end-to-end run, JSON report
//   sweep     - parameter sweep with Monte-Carlo trials, CSV output
//   fading    - chromatic-dispersion power-fading profile, CSV output
//   spectrum  - optical PSD of the modulated signal, CSV output

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pamsim/config.hpp"
#include "pamsim/metrics.hpp"
#include "pamsim/pipeline.hpp"
#include "pamsim/sweep.hpp"

namespace {

pamsim::Scenario load_scenario(const std::string& preset, const std::string& config_path) {
    pamsim::Scenario s;
    if (!preset.empty()) s = pamsim::preset_scenario(preset);
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw std::runtime_error("cannot open config file: " + config_path);
        pamsim::json j = pamsim::json::parse(f);
        if (j.contains("link")) j.at("link").get_to(s.link);
        if (j.contains("dsp")) j.at("dsp").get_to(s.dsp);
    }
    return s;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PAM-4 IM/DD optical link simulator"};
    app.require_subcommand(1);

    std::string preset, config_path, out_path;
    std::uint64_t seed = 1;
    int trials = 0;
    int jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool with_jobs) {
        cmd->add_option("--preset", preset, "named scenario preset");
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--out", out_path, "output path ('-' for stdout)");
        if (with_jobs) {
            cmd->add_option("--trials", trials, "Monte-Carlo trials per sweep point");
            cmd->add_option("--jobs", jobs, "worker threads");
        }
    };

    // simulate
    auto* sim = app.add_subcommand("simulate", "single end-to-end run");
    int frames = 0;
    add_common(sim, false);
    sim->add_option("--frames", frames, "frames per run (>=5 gives >=2e5 bits)");

    // sweep
    auto* swp = app.add_subcommand("sweep", "parameter sweep");
    std::string param;
    std::string values_csv;
    add_common(swp, true);
    swp->add_option("--param", param, "swept parameter name");
    swp->add_option("--values", values_csv, "comma-separated value list");

    // fading
    auto* fad = app.add_subcommand("fading", "CD power-fading profile export");
    double length_km = 1.0, fmax_ghz = 60.0, dispersion = 17e-6, wavelength = 1545.72e-9;
    int points = 601;
    fad->add_option("--length-km", length_km, "fiber length in km");
    fad->add_option("--fmax-ghz", fmax_ghz, "maximum frequency");
    fad->add_option("--points", points, "number of grid points");
    fad->add_option("--dispersion", dispersion, "D in s/m^2");
    fad->add_option("--wavelength", wavelength, "carrier wavelength in m");
    fad->add_option("--out", out_path, "output path ('-' for stdout)");

    // spectrum
    auto* spc = app.add_subcommand("spectrum", "optical PSD of the modulated signal");
    double rbw_ghz = 2.5;  // ~0.02 nm at 1545.72 nm
    add_common(spc, false);
    spc->add_option("--rbw-ghz", rbw_ghz, "resolution bandwidth in GHz");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            pamsim::Scenario s = load_scenario(preset, config_path);
            if (frames > 0) s.dsp.n_frames = frames;
            pamsim::RunResult r = pamsim::run_single(s.link, s.dsp, seed);
            pamsim::json j{{"seed", seed},
                           {"bits_compared", r.report.bits_compared},
                           {"bit_errors", r.report.bit_errors},
                           {"ber", r.report.ber},
                           {"ber_raw", r.ber_raw},
                           {"ber_ffe", r.ber_ffe},
                           {"ber_dd", r.ber_dd},
                           {"ber_full", r.ber_full},
                           {"kp4_pass", r.report.kp4_pass},
                           {"hd7_pass", r.report.hd7_pass},
                           {"hd20_pass", r.report.hd20_pass},
                           {"net_rate", r.report.net_rate},
                           {"sync_offset", r.first_sync_offset},
                           {"train_mse", r.mean_train_mse},
                           {"dd_frozen", r.dd_frozen}};
            write_text(out_path, j.dump(2) + "\n");
        } else if (swp->parsed()) {
            pamsim::SweepSpec spec;
            if (!preset.empty()) {
                pamsim::Scenario s = pamsim::preset_scenario(preset);
                spec.link = s.link;
                spec.dsp = s.dsp;
            }
            if (!config_path.empty()) {
                std::ifstream f(config_path);
                if (!f) throw std::runtime_error("cannot open config file: " + config_path);
                pamsim::json::parse(f).get_to(spec);
            }
            if (!param.empty()) spec.param = param;
            if (!values_csv.empty()) {
                spec.values.clear();
                std::stringstream ss(values_csv);
                std::string tok;
                while (std::getline(ss, tok, ',')) spec.values.push_back(std::stod(tok));
            }
            if (trials > 0) spec.trials = trials;
            pamsim::SweepResult result = pamsim::run_sweep(spec, seed, jobs);
            write_text(out_path, pamsim::sweep_to_csv(result));
            for (const auto& p : result.summarize())
                std::fprintf(stderr, "point %.10g: mean ber %.3e (%zu trials)\n", p.value,
                             p.mean_ber, p.ok_trials);
        } else if (fad->parsed()) {
            std::vector<double> grid(static_cast<std::size_t>(points));
            for (int i = 0; i < points; ++i)
                grid[static_cast<std::size_t>(i)] = fmax_ghz * 1e9 * i / (points - 1);
            pamsim::FadingProfile p =
                pamsim::fading_profile(length_km * 1000.0, dispersion, wavelength, grid);
            std::string csv = "frequency_hz,value_db\n";
            char buf[80];
            for (const auto& pt : p.curve) {
                std::snprintf(buf, sizeof(buf), "%.10e,%.10e\n", pt.frequency_hz,
                              pt.attenuation_db);
                csv += buf;
            }
            write_text(out_path, csv);
            std::fprintf(stderr, "first 3-dB frequency: %.3f GHz\n", p.first_3db_hz / 1e9);
        } else if (spc->parsed()) {
            pamsim::Scenario s = load_scenario(preset, config_path);
            s.link.validate();
            pamsim::SymbolFrame frame = pamsim::build_frame(s.dsp.layout, seed);
            pamsim::Rational ratio = pamsim::rate_ratio(s.link.dac_rate, s.link.baud);
            pamsim::RrcFilter rrc =
                pamsim::rrc_taps(s.dsp.rolloff, static_cast<int>(ratio.up), s.dsp.rrc_span);
            pamsim::SampledWaveform dac =
                pamsim::shape_to_dac(frame.symbols, s.link.baud, s.link.dac_rate, rrc);
            pamsim::SampledWaveform analog = pamsim::resample_to_rate(dac, s.link.sim_rate());
            double peak = 0.0;
            for (double v : analog.samples) peak = std::max(peak, std::abs(v));
            if (peak > 0.0)
                for (double& v : analog.samples) v *= s.link.drive_swing / peak;
            analog = pamsim::eo_response(analog, s.link.eo_3db_bandwidth, s.link.eo_order);
            pamsim::OpticalField field = pamsim::mzm_modulate(analog, s.link);
            auto psd = pamsim::optical_spectrum(field, rbw_ghz * 1e9);
            std::string csv = "frequency_hz,value_db\n";
            char buf[80];
            for (const auto& pt : psd) {
                std::snprintf(buf, sizeof(buf), "%.10e,%.10e\n", pt.frequency_hz, pt.psd_db);
                csv += buf;
            }
            write_text(out_path, csv);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
