#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pamsim/pipeline.hpp"

namespace pamsim {

struct SweepSpec {
    std::string param = "osnr_db";
    std::vector<double> values;
    int trials = 1;
    LinkConfig link;
    DspConfig dsp;
    // Emulated received-optical-power axis: rop_dbm maps to an OSNR setpoint
    // through a fixed affine model, osnr_db = rop_dbm + rop_osnr_offset_db.
    double rop_osnr_offset_db = 38.0;

    void validate() const {
        if (values.empty()) throw std::invalid_argument("SweepSpec: empty value list");
        if (trials < 1) throw std::invalid_argument("SweepSpec: trials must be >= 1");
    }
};

inline void apply_sweep_param(LinkConfig& link, DspConfig& dsp, const SweepSpec& spec,
                              double value) {
    const std::string& p = spec.param;
    if (p == "alpha")
        dsp.alpha = value;
    else if (p == "osnr_db")
        link.osnr_db = value;
    else if (p == "rop_dbm")
        link.osnr_db = value + spec.rop_osnr_offset_db;
    else if (p == "baud")
        link.baud = value;
    else if (p == "bit_rate")
        link.baud = value / 2.0;
    else if (p == "fiber_length")
        link.fiber_length = value;
    else if (p == "eo_3db_bandwidth")
        link.eo_3db_bandwidth = value;
    else if (p == "drive_swing")
        link.drive_swing = value;
    else
        throw std::invalid_argument("unknown sweep parameter: " + p);
}

struct CellResult {
    std::size_t point_index = 0;
    std::size_t trial_index = 0;
    double value = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    RunResult run;
};

struct PointSummary {
    double value = 0.0;
    double mean_ber = 0.0;
    double min_ber = 0.0;
    double max_ber = 0.0;
    std::size_t ok_trials = 0;
};

struct SweepResult {
    SweepSpec spec;
    std::uint64_t master_seed = 0;
    std::vector<CellResult> cells;  // ordered by (point, trial)

    std::vector<PointSummary> summarize() const {
        std::vector<PointSummary> out(spec.values.size());
        for (std::size_t p = 0; p < spec.values.size(); ++p) {
            PointSummary& s = out[p];
            s.value = spec.values[p];
            s.min_ber = 1.0;
            for (const auto& c : cells) {
                if (c.point_index != p || c.failed) continue;
                const double b = c.run.report.ber;
                s.mean_ber += b;
                s.min_ber = std::min(s.min_ber, b);
                s.max_ber = std::max(s.max_ber, b);
                ++s.ok_trials;
            }
            if (s.ok_trials) s.mean_ber /= static_cast<double>(s.ok_trials);
        }
        return out;
    }
};

/// Run every (point, trial) cell with an independently derived seed. Results
/// are identical regardless of worker count: each cell is pure in its seed
/// and is written to a preassigned slot.
inline SweepResult run_sweep(const SweepSpec& spec, std::uint64_t master_seed, int jobs = 1) {
    spec.validate();
    SweepResult result;
    result.spec = spec;
    result.master_seed = master_seed;
    const std::size_t n_points = spec.values.size();
    const std::size_t n_cells = n_points * static_cast<std::size_t>(spec.trials);
    result.cells.resize(n_cells);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= n_cells) return;
            const std::size_t p = idx / static_cast<std::size_t>(spec.trials);
            const std::size_t t = idx % static_cast<std::size_t>(spec.trials);
            CellResult& cell = result.cells[idx];
            cell.point_index = p;
            cell.trial_index = t;
            cell.value = spec.values[p];
            cell.seed = derive_seed(derive_seed(master_seed, p), t);
            try {
                LinkConfig link = spec.link;
                DspConfig dsp = spec.dsp;
                apply_sweep_param(link, dsp, spec, cell.value);
                cell.run = run_single(link, dsp, cell.seed);
            } catch (const std::exception& e) {
                cell.failed = true;
                cell.error = e.what();
            }
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return result;
}

/// Deterministic CSV serialization: header then one row per cell, ordered by
/// (point, trial). Failed cells carry ber = nan and verdicts 0.
inline std::string sweep_to_csv(const SweepResult& result) {
    std::string out = "param,trial_seed,ber,kp4,hd7,hd20\n";
    char buf[160];
    for (const auto& c : result.cells) {
        if (c.failed) {
            std::snprintf(buf, sizeof(buf), "%.10g,%llu,nan,0,0,0\n", c.value,
                          static_cast<unsigned long long>(c.seed));
        } else {
            const BerReport& r = c.run.report;
            std::snprintf(buf, sizeof(buf), "%.10g,%llu,%.10e,%d,%d,%d\n", c.value,
                          static_cast<unsigned long long>(c.seed), r.ber, r.kp4_pass ? 1 : 0,
                          r.hd7_pass ? 1 : 0, r.hd20_pass ? 1 : 0);
        }
        out += buf;
    }
    return out;
}

inline void emit_csv(const SweepResult& result, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
    f << sweep_to_csv(result);
    if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace pamsim
