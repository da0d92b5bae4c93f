#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pamsim/common.hpp"

namespace pamsim {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

namespace detail {

struct FftPlan {
    std::vector<std::size_t> rev;
    std::vector<cdouble> twiddle;  // forward twiddles, n/2 entries
};

inline const FftPlan& fft_plan(std::size_t n) {
    thread_local std::unordered_map<std::size_t, FftPlan> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    FftPlan plan;
    plan.rev.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        plan.rev[i] = r;
    }
    plan.twiddle.resize(n / 2);
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t k = 0; k < n / 2; ++k) {
        double ang = -two_pi * static_cast<double>(k) / static_cast<double>(n);
        plan.twiddle[k] = {std::cos(ang), std::sin(ang)};
    }
    return cache.emplace(n, std::move(plan)).first->second;
}

}  // namespace detail

/// In-place radix-2 FFT. Length must be a power of two.
/// Inverse transform includes the 1/n scaling.
inline void fft_inplace(std::vector<cdouble>& x, bool inverse = false) {
    const std::size_t n = x.size();
    if (n == 0) return;
    if ((n & (n - 1)) != 0)
        throw std::invalid_argument("fft_inplace: length must be a power of two");
    if (n == 1) return;

    const auto& plan = detail::fft_plan(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = plan.rev[i];
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cdouble w = plan.twiddle[k * step];
                if (inverse) w = std::conj(w);
                cdouble u = x[start + k];
                cdouble v = x[start + k + half] * w;
                x[start + k] = u + v;
                x[start + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv_n;
    }
}

/// DFT of arbitrary length: radix-2 when possible, Bluestein otherwise.
/// Circular and (numerically) unitary at the exact input length.
inline void dft_inplace(std::vector<cdouble>& x, bool inverse = false) {
    const std::size_t n = x.size();
    if (n == 0) return;
    if ((n & (n - 1)) == 0) {
        fft_inplace(x, inverse);
        return;
    }
    // Bluestein: X_k = conj(w_k) * IFFT(FFT(a) .* FFT(b))_k with
    // w_n = exp(-i*pi*n^2/n_total), a_n = x_n * w_n, b_n = conj(w_n) extended.
    const double pi = 3.14159265358979323846;
    const double sign = inverse ? 1.0 : -1.0;
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<cdouble> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        // i^2 mod 2n keeps the phase argument small for large i
        const std::uint64_t q = (static_cast<std::uint64_t>(i) * i) % (2 * n);
        const double ang = sign * pi * static_cast<double>(q) / static_cast<double>(n);
        w[i] = {std::cos(ang), std::sin(ang)};
    }
    std::vector<cdouble> a(m, cdouble{0.0, 0.0}), b(m, cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) a[i] = x[i] * w[i];
    b[0] = std::conj(w[0]);
    for (std::size_t i = 1; i < n; ++i) {
        b[i] = std::conj(w[i]);
        b[m - i] = b[i];
    }
    fft_inplace(a);
    fft_inplace(b);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    fft_inplace(a, true);
    for (std::size_t i = 0; i < n; ++i) x[i] = a[i] * w[i];
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv_n;
    }
}

/// Full linear convolution of two real sequences via FFT.
inline std::vector<double> fft_convolve_full(const std::vector<double>& a,
                                             const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(out_len);
    std::vector<cdouble> fa(n, cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fa[i].imag(b[i]);
    fft_inplace(fa);
    // Spectra of the packed pair: A = (F + conj(F(-)))/2, B = (F - conj(F(-)))/(2i)
    std::vector<cdouble> prod(n);
    for (std::size_t k = 0; k < n; ++k) {
        cdouble fk = fa[k];
        cdouble fnk = std::conj(fa[(n - k) & (n - 1)]);
        cdouble A = 0.5 * (fk + fnk);
        cdouble B = cdouble{0.0, -0.5} * (fk - fnk);
        prod[k] = A * B;
    }
    fft_inplace(prod, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = prod[i].real();
    return out;
}

/// Direct full convolution; used below the FFT crossover.
inline std::vector<double> direct_convolve_full(const std::vector<double>& a,
                                                const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b[j];
    }
    return out;
}

constexpr std::size_t kFftConvCrossover = 4096;

inline std::vector<double> convolve_full(const std::vector<double>& a,
                                         const std::vector<double>& b) {
    if (a.size() + b.size() > kFftConvCrossover) return fft_convolve_full(a, b);
    return direct_convolve_full(a, b);
}

/// "Same"-sized convolution with the filter's group delay removed:
/// output[i] corresponds to input[i] for a symmetric odd-length filter.
inline std::vector<double> convolve_same(const std::vector<double>& x,
                                         const std::vector<double>& taps) {
    auto full = convolve_full(x, taps);
    const std::size_t delay = (taps.size() - 1) / 2;
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = full[i + delay];
    return out;
}

/// FFT bin center frequency for bin k of an n-point transform at fs.
inline double bin_frequency(std::size_t k, std::size_t n, double fs) {
    double f = static_cast<double>(k) / static_cast<double>(n) * fs;
    if (k > n / 2) f -= fs;
    return f;
}

}  // namespace pamsim
