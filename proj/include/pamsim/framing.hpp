#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pamsim/rng.hpp"

namespace pamsim {

/// PAM-4 amplitude levels, 2 bits per symbol.
using Pam4Seq = std::vector<int>;
using BitSeq = std::vector<std::uint8_t>;

/// Pinned primitive polynomials (Fibonacci form; bit i-1 of the mask is the
/// x^i tap). Any primitive polynomial works; these are fixed so preambles
/// are bit-exact across versions.
inline std::uint32_t default_lfsr_mask(int order) {
    switch (order) {
        case 3: return 0x6;
        case 4: return 0xC;
        case 5: return 0x14;
        case 6: return 0x30;      // x^6 + x^5 + 1
        case 7: return 0x60;      // x^7 + x^6 + 1
        case 8: return 0xB8;
        case 9: return 0x110;
        case 10: return 0x240;
        case 11: return 0x500;
        case 12: return 0xE08;
        case 13: return 0x1C80;
        case 14: return 0x3802;
        case 15: return 0x6000;
        case 16: return 0xD008;
        default: throw std::invalid_argument("LFSR order must be in [3, 16]");
    }
}

/// Secondary order-6 primitive polynomial (x^6 + x^4 + x^3 + x + 1), used for
/// the second sync block so the two blocks have low cross-correlation.
constexpr std::uint32_t kLfsrMaskOrder6Alt = 0x2D;

/// Distinct order-7 primitive polynomials for the four training blocks
/// (x^7+x^6+1, x^7+x^3+1, x^7+x+1, x^7+x^4+1); shifted copies of a single
/// M-sequence would correlate with each other and blind the synchronizer.
constexpr std::uint32_t kLfsrMasksOrder7[4] = {0x60, 0x44, 0x41, 0x48};

/// One full period (2^order - 1 bits) of a maximal-length LFSR sequence.
inline BitSeq msequence_bits(int order, std::uint32_t seed_state, std::uint32_t mask = 0) {
    if (order < 3 || order > 16) throw std::invalid_argument("LFSR order must be in [3, 16]");
    if (mask == 0) mask = default_lfsr_mask(order);
    const std::uint32_t state_mask = (1u << order) - 1;
    std::uint32_t state = seed_state & state_mask;
    if (state == 0) throw std::invalid_argument("LFSR seed state must be nonzero");
    const std::size_t period = (std::size_t{1} << order) - 1;
    BitSeq bits(period);
    for (std::size_t i = 0; i < period; ++i) {
        const std::uint32_t fb =
            static_cast<std::uint32_t>(__builtin_popcount(state & mask) & 1);
        state = ((state << 1) | fb) & state_mask;
        bits[i] = static_cast<std::uint8_t>(fb);
    }
    return bits;
}

/// Cyclically extend a sequence to out_len.
template <typename Seq>
inline Seq cyclic_extend(const Seq& base, std::size_t out_len) {
    Seq out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = base[i % base.size()];
    return out;
}

/// Binary-antipodal PAM-4 mapping of an M-sequence (bit 1 -> +3, 0 -> -3),
/// cyclically extended to out_len symbols.
inline Pam4Seq generate_msequence(int order, std::uint32_t seed_state, std::size_t out_len,
                                  std::uint32_t mask = 0) {
    if (out_len < 1) throw std::invalid_argument("generate_msequence: out_len must be >= 1");
    BitSeq bits = msequence_bits(order, seed_state, mask);
    Pam4Seq period(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) period[i] = bits[i] ? 3 : -3;
    return cyclic_extend(period, out_len);
}

/// Gray mapping: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
inline int gray_map_pair(int b0, int b1) {
    if (b0 == 0) return b1 == 0 ? -3 : -1;
    return b1 == 0 ? 3 : 1;
}

inline void gray_demap_level(int level, std::uint8_t& b0, std::uint8_t& b1) {
    switch (level) {
        case -3: b0 = 0; b1 = 0; return;
        case -1: b0 = 0; b1 = 1; return;
        case 1: b0 = 1; b1 = 1; return;
        case 3: b0 = 1; b1 = 0; return;
        default: throw std::invalid_argument("gray_demap_level: not a PAM-4 level");
    }
}

inline Pam4Seq map_bits_to_pam4(const BitSeq& bits) {
    if (bits.size() % 2 != 0)
        throw std::invalid_argument("map_bits_to_pam4: bit count must be even");
    Pam4Seq out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = gray_map_pair(bits[2 * i], bits[2 * i + 1]);
    return out;
}

inline BitSeq demap_pam4_to_bits(const Pam4Seq& symbols) {
    BitSeq out(symbols.size() * 2);
    for (std::size_t i = 0; i < symbols.size(); ++i)
        gray_demap_level(symbols[i], out[2 * i], out[2 * i + 1]);
    return out;
}

struct FrameLayout {
    std::size_t sync_seq_len = 64;
    std::size_t sync_seq_count = 2;
    std::size_t train_seq_len = 128;
    std::size_t train_seq_count = 4;
    std::size_t payload_len = 20000;

    std::size_t sync_total() const { return sync_seq_len * sync_seq_count; }
    std::size_t train_total() const { return train_seq_len * train_seq_count; }
    std::size_t total() const { return sync_total() + train_total() + payload_len; }
};

struct Preamble {
    Pam4Seq sync;   // sync_total() symbols, binary antipodal
    Pam4Seq train;  // train_total() symbols, all four levels
};

/// Fixed, receiver-known preamble. Sync blocks come from two different
/// order-6 primitive polynomials; training blocks are order-7 LFSR bit
/// streams (distinct start states per block) Gray-mapped to 4 levels.
inline Preamble make_preamble(const FrameLayout& layout) {
    Preamble p;
    p.sync.reserve(layout.sync_total());
    for (std::size_t b = 0; b < layout.sync_seq_count; ++b) {
        std::uint32_t mask = (b % 2 == 0) ? default_lfsr_mask(6) : kLfsrMaskOrder6Alt;
        Pam4Seq block = generate_msequence(6, 1, layout.sync_seq_len, mask);
        p.sync.insert(p.sync.end(), block.begin(), block.end());
    }
    p.train.reserve(layout.train_total());
    for (std::size_t b = 0; b < layout.train_seq_count; ++b) {
        BitSeq bits = msequence_bits(7, 1, kLfsrMasksOrder7[b % 4]);
        BitSeq ext = cyclic_extend(bits, 2 * layout.train_seq_len);
        Pam4Seq block = map_bits_to_pam4(ext);
        p.train.insert(p.train.end(), block.begin(), block.end());
    }
    return p;
}

struct SymbolFrame {
    FrameLayout layout;
    Pam4Seq symbols;
    BitSeq payload_bits;  // ground truth, 2 * payload_len bits
};

inline BitSeq random_payload_bits(const FrameLayout& layout, std::uint64_t seed) {
    Rng rng(seed);
    BitSeq bits(2 * layout.payload_len);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    return bits;
}

/// Assemble [sync x2 | train x4 | payload]. The preamble is fixed and known
/// at the receiver; only the payload depends on the caller's bits.
inline SymbolFrame build_frame(const FrameLayout& layout, const BitSeq& payload_bits) {
    if (payload_bits.size() != 2 * layout.payload_len)
        throw std::invalid_argument("build_frame: payload_bits length must be 2 * payload_len");
    Preamble p = make_preamble(layout);
    SymbolFrame f;
    f.layout = layout;
    f.payload_bits = payload_bits;
    f.symbols.reserve(layout.total());
    f.symbols.insert(f.symbols.end(), p.sync.begin(), p.sync.end());
    f.symbols.insert(f.symbols.end(), p.train.begin(), p.train.end());
    Pam4Seq payload = map_bits_to_pam4(payload_bits);
    f.symbols.insert(f.symbols.end(), payload.begin(), payload.end());
    return f;
}

inline SymbolFrame build_frame(const FrameLayout& layout, std::uint64_t payload_seed) {
    return build_frame(layout, random_payload_bits(layout, payload_seed));
}

}  // namespace pamsim
