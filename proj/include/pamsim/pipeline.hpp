#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pamsim/channel.hpp"
#include "pamsim/framing.hpp"
#include "pamsim/metrics.hpp"
#include "pamsim/rxdsp.hpp"
#include "pamsim/txdsp.hpp"

namespace pamsim {

struct DspConfig {
    double rolloff = 0.01;
    int rrc_span = 64;      // symbols
    int guard_symbols = 96; // zero symbols padded around each frame

    bool use_ffe = true;
    int ffe_taps = 61;
    double lambda_train = 0.999;
    double delta = 0.01;

    bool use_dd_rls = true;
    int dd_taps = 15;
    double lambda_dd = 0.9999;
    double dd_gain = 1e-3;  // initial P scale; the DD filter starts converged

    bool use_postfilter_mlsd = true;
    double alpha = 0.6;

    int n_frames = 5;
    FrameLayout layout{};
};

/// Soft outputs of one frame, before detection. Lets callers sweep the post
/// filter alpha without re-running the channel and equalizers.
struct FrameSoft {
    std::vector<double> soft_raw;  // symbol-instant samples, affine-fitted, no FFE
    std::vector<double> soft_ffe;  // after trained FFE
    std::vector<double> soft_dd;   // after DD-RLS tracking
    BitSeq payload_bits;
    SyncResult sync;
    double train_mse = 0.0;
    bool dd_frozen = false;
};

/// Everything up to (but excluding) post filter + MLSD for one frame.
inline FrameSoft process_frame(const LinkConfig& cfg, const DspConfig& dsp,
                               std::uint64_t frame_seed) {
    cfg.validate();
    const FrameLayout& layout = dsp.layout;
    SymbolFrame frame = build_frame(layout, derive_seed(frame_seed, 0));

    Pam4Seq padded(layout.total() + 2 * static_cast<std::size_t>(dsp.guard_symbols), 0);
    std::copy(frame.symbols.begin(), frame.symbols.end(),
              padded.begin() + dsp.guard_symbols);

    Rational tx_ratio = rate_ratio(cfg.dac_rate, cfg.baud);
    RrcFilter rrc_tx = rrc_taps(dsp.rolloff, static_cast<int>(tx_ratio.up), dsp.rrc_span);
    SampledWaveform dac_wave = shape_to_dac(padded, cfg.baud, cfg.dac_rate, rrc_tx);

    SampledWaveform captured = channel_propagate(dac_wave, cfg, derive_seed(frame_seed, 1));

    SampledWaveform rx = resample_to_2sps(captured, cfg.baud, dsp.rolloff);
    rx = normalize_rx(rx);
    RrcFilter rrc_rx = rrc_taps(dsp.rolloff, 2, dsp.rrc_span);
    rx = matched_filter(rx, rrc_rx);

    Preamble preamble = make_preamble(layout);
    Pam4Seq reference = preamble.sync;
    reference.insert(reference.end(), preamble.train.begin(), preamble.train.end());
    const std::size_t search = 4 * static_cast<std::size_t>(dsp.guard_symbols) + 64;
    FrameSoft out;
    out.sync = synchronize(rx, reference, rrc_rx, search);
    out.payload_bits = frame.payload_bits;
    if (out.sync.polarity < 0.0)
        for (double& v : rx.samples) v = -v;

    const std::size_t train_start = out.sync.offset + 2 * layout.sync_total();
    const std::size_t payload_start = train_start + 2 * layout.train_total();

    // Unequalized reference path: symbol-instant samples, affine-fitted to
    // the known training symbols.
    {
        double sxx = 0, sx = 0, sxy = 0, sy = 0;
        const auto n = static_cast<double>(layout.train_total());
        for (std::size_t i = 0; i < layout.train_total(); ++i) {
            const double x = rx.samples[train_start + 2 * i];
            const double y = static_cast<double>(preamble.train[i]);
            sxx += x * x;
            sx += x;
            sxy += x * y;
            sy += y;
        }
        const double det = n * sxx - sx * sx;
        const double a = (det != 0.0) ? (n * sxy - sx * sy) / det : 1.0;
        const double b = (det != 0.0) ? (sy - a * sx) / n : 0.0;
        out.soft_raw.resize(layout.payload_len);
        for (std::size_t i = 0; i < layout.payload_len; ++i)
            out.soft_raw[i] = a * rx.samples[payload_start + 2 * i] + b;
    }

    if (dsp.use_ffe) {
        EqualizerState eq = rls_train(rx.samples, train_start, preamble.train, dsp.ffe_taps,
                                      dsp.lambda_train, dsp.delta);
        out.train_mse = eq.train_mse;
        out.soft_ffe = equalize(rx.samples, payload_start, layout.payload_len, eq);
    } else {
        out.soft_ffe = out.soft_raw;
    }

    if (dsp.use_dd_rls) {
        DdRlsResult dd = dd_rls_track(out.soft_ffe, dsp.dd_taps, dsp.lambda_dd, dsp.dd_gain);
        out.soft_dd = std::move(dd.soft);
        out.dd_frozen = dd.frozen;
    } else {
        out.soft_dd = out.soft_ffe;
    }
    return out;
}

/// Detection back end: optional post filter + MLSD, then Gray demapping.
inline BitSeq detect_bits(const std::vector<double>& soft, double alpha, bool use_mlsd) {
    if (!use_mlsd) return slice_and_demap(soft);
    std::vector<double> colored = post_filter(soft, {alpha});
    MlsdResult mlsd = mlsd_viterbi(colored, alpha);
    return demap_pam4_to_bits(mlsd.decisions);
}

struct RunResult {
    BerReport report;      // the configured detection path
    double ber_raw = 0.0;  // no equalization at all
    double ber_ffe = 0.0;  // FFE only
    double ber_dd = 0.0;   // FFE + DD-RLS
    double ber_full = 0.0; // FFE + DD-RLS + post filter + MLSD
    double mean_train_mse = 0.0;
    std::size_t first_sync_offset = 0;
    bool dd_frozen = false;
};

/// One deterministic end-to-end run: framing -> txdsp -> channel -> rxdsp ->
/// metrics, aggregated over dsp.n_frames independent frames.
inline RunResult run_single(const LinkConfig& cfg, const DspConfig& dsp, std::uint64_t seed) {
    RunResult r;
    std::size_t bits_total = 0;
    std::size_t err_raw = 0, err_ffe = 0, err_dd = 0, err_full = 0;
    double mse_acc = 0.0;
    for (int f = 0; f < dsp.n_frames; ++f) {
        FrameSoft fs = process_frame(cfg, dsp, derive_seed(seed, static_cast<std::uint64_t>(f)));
        if (f == 0) r.first_sync_offset = fs.sync.offset;
        r.dd_frozen = r.dd_frozen || fs.dd_frozen;
        mse_acc += fs.train_mse;
        bits_total += fs.payload_bits.size();

        auto errors = [&fs](const BitSeq& rx_bits) {
            std::size_t e = 0;
            for (std::size_t i = 0; i < rx_bits.size(); ++i)
                if (rx_bits[i] != fs.payload_bits[i]) ++e;
            return e;
        };
        err_raw += errors(slice_and_demap(fs.soft_raw));
        err_ffe += errors(slice_and_demap(fs.soft_ffe));
        err_dd += errors(slice_and_demap(fs.soft_dd));
        err_full += errors(detect_bits(fs.soft_dd, dsp.alpha, true));
    }
    const double n = static_cast<double>(bits_total);
    r.ber_raw = err_raw / n;
    r.ber_ffe = err_ffe / n;
    r.ber_dd = err_dd / n;
    r.ber_full = err_full / n;
    r.mean_train_mse = mse_acc / dsp.n_frames;

    std::size_t selected_errors;
    if (dsp.use_postfilter_mlsd)
        selected_errors = err_full;
    else if (dsp.use_dd_rls)
        selected_errors = err_dd;
    else if (dsp.use_ffe)
        selected_errors = err_ffe;
    else
        selected_errors = err_raw;

    r.report.bits_compared = bits_total;
    r.report.bit_errors = selected_errors;
    r.report.ber = selected_errors / n;
    r.report.kp4_pass = r.report.ber <= kKp4Threshold;
    r.report.hd7_pass = r.report.ber <= kHd7Threshold;
    r.report.hd20_pass = r.report.ber <= kHd20Threshold;
    r.report.net_rate = net_rate(cfg.baud, 2.0, 1.2, dsp.layout);
    return r;
}

}  // namespace pamsim
