#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pamsim/common.hpp"
#include "pamsim/fft.hpp"
#include "pamsim/framing.hpp"
#include "pamsim/resample.hpp"
#include "pamsim/txdsp.hpp"

namespace pamsim {

struct SyncFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EqualizerDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Resample the capture to exactly 2 samples per symbol.
inline SampledWaveform resample_to_2sps(const SampledWaveform& wave, double baud,
                                        double rolloff = 0.01) {
    const double target = 2.0 * baud;
    if (wave.sample_rate < baud * (1.0 + rolloff))
        throw std::invalid_argument("resample_to_2sps: input rate below signal bandwidth");
    return resample_to_rate(wave, target);
}

/// Remove DC and scale to the PAM-4 constellation RMS (sqrt(5)).
inline SampledWaveform normalize_rx(const SampledWaveform& wave) {
    SampledWaveform out = wave;
    const double m = mean(out.samples);
    for (double& v : out.samples) v -= m;
    const double r = rms(out.samples);
    if (r > 0.0) {
        const double s = std::sqrt(5.0) / r;
        for (double& v : out.samples) v *= s;
    }
    return out;
}

/// RRC correlation at 2 SPS; combined with the transmit RRC this is Nyquist.
inline SampledWaveform matched_filter(const SampledWaveform& wave, const RrcFilter& rrc) {
    SampledWaveform out;
    out.sample_rate = wave.sample_rate;
    out.samples = convolve_same(wave.samples, rrc.taps);
    return out;
}

struct SyncResult {
    std::size_t offset = 0;   // sample index of reference symbol 0 center
    double peak = 0.0;        // |normalized correlation| at the peak
    double polarity = 1.0;    // +1/-1; square-law detection inverts the drive
    double psr = 0.0;         // peak-to-sidelobe ratio
};

/// Frame synchronization by normalized cross-correlation of the 2-SPS
/// waveform against the shaped reference symbols (raised-cosine pulses,
/// since the input is already matched-filtered). max_offset limits the
/// search window; 0 searches everywhere.
inline SyncResult synchronize(const SampledWaveform& wave_2sps, const Pam4Seq& reference,
                              const RrcFilter& rrc_2sps, std::size_t max_offset = 0,
                              double psr_threshold = 3.0) {
    if (reference.empty()) throw std::invalid_argument("synchronize: empty reference");
    // Shape the reference with the full raised-cosine (TX RRC * RX RRC).
    std::vector<double> rc = convolve_full(rrc_2sps.taps, rrc_2sps.taps);
    std::vector<double> ref = polyphase_filter_resample(symbols_as_double(reference), rc, 2, 1);
    const std::size_t rlen = ref.size();
    const std::vector<double>& x = wave_2sps.samples;
    if (x.size() < rlen) throw SyncFailure("synchronize: capture shorter than reference");

    std::size_t n_off = x.size() - rlen + 1;
    if (max_offset > 0) n_off = std::min(n_off, max_offset + 1);

    const double ref_energy = energy(ref);
    // Sliding window energy of x.
    std::vector<double> cum(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) cum[i + 1] = cum[i] + x[i] * x[i];

    // Raw correlation, FFT-based when the search is wide.
    std::vector<double> raw(n_off, 0.0);
    if (n_off * rlen > std::size_t{1} << 22) {
        std::vector<double> ref_rev(ref.rbegin(), ref.rend());
        std::vector<double> full = convolve_full(x, ref_rev);
        for (std::size_t m = 0; m < n_off; ++m) raw[m] = full[m + rlen - 1];
    } else {
        for (std::size_t m = 0; m < n_off; ++m) {
            double acc = 0.0;
            for (std::size_t j = 0; j < rlen; ++j) acc += ref[j] * x[m + j];
            raw[m] = acc;
        }
    }
    std::vector<double> corr(n_off, 0.0);
    for (std::size_t m = 0; m < n_off; ++m) {
        const double we = cum[m + rlen] - cum[m];
        corr[m] = (we > 0.0) ? raw[m] / std::sqrt(ref_energy * we) : 0.0;
    }

    std::size_t best = 0;
    for (std::size_t m = 1; m < n_off; ++m)
        if (std::abs(corr[m]) > std::abs(corr[best])) best = m;

    // Sidelobe: everything further than 2 symbols from the peak.
    double sidelobe = 0.0;
    for (std::size_t m = 0; m < n_off; ++m) {
        if (m + 4 >= best && m <= best + 4) continue;
        sidelobe = std::max(sidelobe, std::abs(corr[m]));
    }
    SyncResult r;
    r.offset = best;
    r.peak = std::abs(corr[best]);
    r.polarity = (corr[best] < 0.0) ? -1.0 : 1.0;
    r.psr = (sidelobe > 0.0) ? r.peak / sidelobe : std::numeric_limits<double>::infinity();
    if (r.psr < psr_threshold)
        throw SyncFailure("synchronize: peak-to-sidelobe ratio below threshold");
    return r;
}

struct EqualizerState {
    std::vector<double> taps;  // T taps, fractionally spaced (2 SPS)
    std::vector<double> P;     // T x T inverse correlation matrix, row major
    double forgetting = 0.999;
    double delta = 0.01;
    double train_mse = 0.0;  // mean squared a-priori error, last quarter
};

namespace detail {

/// One RLS step: updates w and P in place, returns the a-priori error.
inline double rls_step(std::vector<double>& w, std::vector<double>& P, const double* u,
                       double desired, double lambda, int T) {
    thread_local std::vector<double> pi;
    pi.assign(static_cast<std::size_t>(T), 0.0);
    for (int i = 0; i < T; ++i) {
        const double* Pi = &P[static_cast<std::size_t>(i) * T];
        double acc = 0.0;
        for (int j = 0; j < T; ++j) acc += Pi[j] * u[j];
        pi[static_cast<std::size_t>(i)] = acc;
    }
    double denom = lambda;
    for (int i = 0; i < T; ++i) denom += u[i] * pi[static_cast<std::size_t>(i)];
    double y = 0.0;
    for (int i = 0; i < T; ++i) y += w[static_cast<std::size_t>(i)] * u[i];
    const double e = desired - y;
    const double inv_lambda = 1.0 / lambda;
    for (int i = 0; i < T; ++i) {
        const double k = pi[static_cast<std::size_t>(i)] / denom;
        w[static_cast<std::size_t>(i)] += k * e;
        double* Pi = &P[static_cast<std::size_t>(i) * T];
        const double pii = pi[static_cast<std::size_t>(i)];
        for (int j = 0; j < T; ++j)
            Pi[j] = (Pi[j] - pii * pi[static_cast<std::size_t>(j)] / denom) * inv_lambda;
    }
    if (!std::isfinite(e)) throw EqualizerDivergence("RLS: non-finite error metric");
    return e;
}

}  // namespace detail

/// Train a T-tap fractionally spaced FFE with RLS. rx samples are at 2 SPS;
/// symbol n of the training sequence is centered at train_start + 2n.
inline EqualizerState rls_train(const std::vector<double>& rx_2sps, std::size_t train_start,
                                const Pam4Seq& tx_train, int T = 61, double lambda = 0.999,
                                double delta = 0.01) {
    if (T < 1 || T % 2 == 0) throw std::invalid_argument("rls_train: tap count must be odd");
    if (tx_train.size() < 2 * static_cast<std::size_t>(T))
        throw std::invalid_argument("rls_train: training length must be >= 2T");
    const int half = (T - 1) / 2;
    if (train_start < static_cast<std::size_t>(half) ||
        train_start + 2 * (tx_train.size() - 1) + half >= rx_2sps.size())
        throw std::invalid_argument("rls_train: training window out of range");

    EqualizerState eq;
    eq.forgetting = lambda;
    eq.delta = delta;
    eq.taps.assign(static_cast<std::size_t>(T), 0.0);
    eq.P.assign(static_cast<std::size_t>(T) * T, 0.0);
    for (int i = 0; i < T; ++i) eq.P[static_cast<std::size_t>(i) * T + i] = 1.0 / delta;

    std::vector<double> u(static_cast<std::size_t>(T));
    const std::size_t n_train = tx_train.size();
    const std::size_t tail_start = n_train - n_train / 4;
    double mse_acc = 0.0;
    std::size_t mse_n = 0;
    for (std::size_t n = 0; n < n_train; ++n) {
        const std::size_t c = train_start + 2 * n;
        for (int j = 0; j < T; ++j)
            u[static_cast<std::size_t>(j)] = rx_2sps[c + half - static_cast<std::size_t>(j)];
        const double e = detail::rls_step(eq.taps, eq.P, u.data(), tx_train[n], lambda, T);
        if (n >= tail_start) {
            mse_acc += e * e;
            ++mse_n;
        }
    }
    eq.train_mse = mse_n ? mse_acc / static_cast<double>(mse_n) : 0.0;
    return eq;
}

/// Apply the trained FFE at symbol instants: soft symbol n comes from the
/// 2-SPS window centered at start + 2n.
inline std::vector<double> equalize(const std::vector<double>& rx_2sps, std::size_t start,
                                    std::size_t n_symbols, const EqualizerState& eq) {
    const int T = static_cast<int>(eq.taps.size());
    const int half = (T - 1) / 2;
    if (start < static_cast<std::size_t>(half) ||
        start + 2 * (n_symbols - 1) + half >= rx_2sps.size())
        throw std::invalid_argument("equalize: window out of range");
    std::vector<double> soft(n_symbols);
    for (std::size_t n = 0; n < n_symbols; ++n) {
        const std::size_t c = start + 2 * n;
        double acc = 0.0;
        for (int j = 0; j < T; ++j)
            acc += eq.taps[static_cast<std::size_t>(j)] * rx_2sps[c + half - static_cast<std::size_t>(j)];
        soft[n] = acc;
    }
    return soft;
}

/// Nearest PAM-4 level; exact threshold hits round toward positive.
inline int slice_level(double x) {
    if (x < -2.0) return -3;
    if (x < 0.0) return -1;
    if (x < 2.0) return 1;
    return 3;
}

inline Pam4Seq slice_symbols(const std::vector<double>& soft) {
    Pam4Seq out(soft.size());
    for (std::size_t i = 0; i < soft.size(); ++i) out[i] = slice_level(soft[i]);
    return out;
}

inline BitSeq slice_and_demap(const std::vector<double>& soft) {
    return demap_pam4_to_bits(slice_symbols(soft));
}

struct DdRlsResult {
    std::vector<double> soft;
    bool frozen = false;  // divergence detector tripped; adaptation stopped
    std::vector<double> taps;
};

/// Decision-directed RLS tracking at 1 SPS. Decisions come from nearest-level
/// slicing of the filter output. If the running |error| proxy doubles from
/// its initial window, adaptation freezes and the result is flagged.
///
/// The filter starts at identity and is treated as already converged, so P is
/// initialized to gain * I with a small gain. A large initial P (as used when
/// training from scratch) lets early decision errors throw the taps, and the
/// resulting error propagation can run away before the divergence detector has
/// a baseline.
inline DdRlsResult dd_rls_track(const std::vector<double>& soft_in, int T = 15,
                                double lambda = 0.9999, double gain = 1e-3) {
    if (T < 1 || T % 2 == 0) throw std::invalid_argument("dd_rls_track: tap count must be odd");
    const int half = (T - 1) / 2;
    const std::size_t n = soft_in.size();
    DdRlsResult res;
    res.soft.resize(n);
    std::vector<double> w(static_cast<std::size_t>(T), 0.0);
    w[static_cast<std::size_t>(half)] = 1.0;
    std::vector<double> P(static_cast<std::size_t>(T) * T, 0.0);
    for (int i = 0; i < T; ++i) P[static_cast<std::size_t>(i) * T + i] = gain;

    constexpr std::size_t kWindow = 512;
    double window_acc = 0.0;
    std::size_t window_n = 0;
    double initial_level = -1.0;
    bool frozen = false;

    std::vector<double> u(static_cast<std::size_t>(T));
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < T; ++j) {
            const std::int64_t idx = static_cast<std::int64_t>(i) + half - j;
            u[static_cast<std::size_t>(j)] =
                (idx >= 0 && idx < static_cast<std::int64_t>(n)) ? soft_in[static_cast<std::size_t>(idx)] : 0.0;
        }
        double y = 0.0;
        for (int j = 0; j < T; ++j) y += w[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j)];
        res.soft[i] = y;
        const double d = static_cast<double>(slice_level(y));
        // Gate on decision confidence: outputs near a slicing threshold are
        // likely mis-decided, and adapting on them propagates errors.
        if (!frozen && std::abs(y - d) < 0.5) {
            const double e = detail::rls_step(w, P, u.data(), d, lambda, static_cast<int>(T));
            window_acc += std::abs(e);
            if (++window_n == kWindow) {
                const double level = window_acc / static_cast<double>(kWindow);
                if (initial_level < 0.0)
                    initial_level = level;
                else if (level > 2.0 * initial_level)
                    frozen = true;
                window_acc = 0.0;
                window_n = 0;
            }
        }
    }
    res.frozen = frozen;
    res.taps = std::move(w);
    return res;
}

struct PostFilterConfig {
    double alpha = 0.0;  // two-tap form [1, alpha]
};

/// y[n] = x[n] + alpha * x[n-1]; the first sample uses zero history.
inline std::vector<double> post_filter(const std::vector<double>& x, const PostFilterConfig& cfg) {
    if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
        throw std::invalid_argument("post_filter: alpha must be in [0, 1]");
    std::vector<double> y(x.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + cfg.alpha * prev;
        prev = x[i];
    }
    return y;
}

struct MlsdResult {
    Pam4Seq decisions;
    double metric = 0.0;  // total path metric of the winning path
};

constexpr int kPam4Levels[4] = {-3, -1, 1, 3};

/// Viterbi over the memory-1 trellis of the [1, alpha] post filter, with
/// full-sequence traceback. Branch metric (y[n] - (s[n] + alpha*s[n-1]))^2;
/// the n = 0 branch uses zero history, matching post_filter.
inline MlsdResult mlsd_viterbi(const std::vector<double>& colored, double alpha) {
    MlsdResult res;
    const std::size_t n = colored.size();
    if (n == 0) return res;

    std::array<double, 4> metric{};
    std::array<double, 4> next{};
    std::vector<std::array<std::uint8_t, 4>> back(n);

    for (int s = 0; s < 4; ++s) {
        const double d = colored[0] - static_cast<double>(kPam4Levels[s]);
        metric[static_cast<std::size_t>(s)] = d * d;
        back[0][static_cast<std::size_t>(s)] = 0;
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (int s = 0; s < 4; ++s) {
            double best = std::numeric_limits<double>::infinity();
            std::uint8_t best_prev = 0;
            for (int p = 0; p < 4; ++p) {
                const double pred = static_cast<double>(kPam4Levels[s]) +
                                    alpha * static_cast<double>(kPam4Levels[p]);
                const double d = colored[i] - pred;
                const double m = metric[static_cast<std::size_t>(p)] + d * d;
                if (m < best) {
                    best = m;
                    best_prev = static_cast<std::uint8_t>(p);
                }
            }
            next[static_cast<std::size_t>(s)] = best;
            back[i][static_cast<std::size_t>(s)] = best_prev;
        }
        metric = next;
    }
    int final_state = 0;
    for (int s = 1; s < 4; ++s)
        if (metric[static_cast<std::size_t>(s)] < metric[static_cast<std::size_t>(final_state)])
            final_state = s;
    res.metric = metric[static_cast<std::size_t>(final_state)];
    res.decisions.resize(n);
    int s = final_state;
    for (std::size_t i = n; i-- > 0;) {
        res.decisions[i] = kPam4Levels[s];
        s = back[i][static_cast<std::size_t>(s)];
    }
    return res;
}

}  // namespace pamsim
