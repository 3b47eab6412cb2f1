#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace mixforge {

// FNV-1a 64-bit. Stable across platforms; used for whitespace-token ids,
// job ids, and PRNG stream derivation.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) {
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xFF;
        h *= kFnvPrime;
    }
    return h;
}

// PCG32 (oneseq variant, XSH-RR output), constants from the reference
// implementation. Fixed here so schedules are reproducible across
// implementations: state' = state * 6364136223846793005 + (inc|1).
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t initstate, std::uint64_t initseq = kDefaultStream) {
        inc_ = (initseq << 1u) | 1u;
        state_ = 0;
        next_u32();
        state_ += initstate;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * kMultiplier + inc_;
        auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Unbiased bounded draw (multiply-shift with rejection).
    std::uint32_t bounded(std::uint32_t n) {
        if (n <= 1) return 0;
        std::uint64_t m = std::uint64_t(next_u32()) * n;
        auto low = static_cast<std::uint32_t>(m);
        if (low < n) {
            std::uint32_t threshold = (0u - n) % n;
            while (low < threshold) {
                m = std::uint64_t(next_u32()) * n;
                low = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    // Fisher-Yates, high index down.
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = bounded(static_cast<std::uint32_t>(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
    static constexpr std::uint64_t kDefaultStream = 721347520444481703ULL;

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
};

// Per-(seed, lang, epoch) PRNG stream: FNV-1a over the little-endian seed,
// the language code, a 0x1F separator, and the little-endian epoch.
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view lang, std::uint64_t epoch) {
    std::uint64_t h = fnv1a64_u64(seed);
    h = fnv1a64(lang, h);
    h ^= 0x1F;
    h *= kFnvPrime;
    return fnv1a64_u64(epoch, h);
}

} // namespace mixforge
