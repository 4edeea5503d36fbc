#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <type_traits>

namespace slidealign {

/// SplitMix64 (Steele, Lea and Flood). Eight bytes of state, full 64-bit
/// output, identical streams on every platform. `split()` derives an
/// independent child generator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    static constexpr std::string_view algorithm = "splitmix64";

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return finalize(state_);
    }

    constexpr SplitMix64 split() noexcept { return SplitMix64((*this)()); }

    static constexpr std::uint64_t finalize(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    constexpr bool operator==(const SplitMix64&) const = default;

private:
    std::uint64_t state_;
};

/// Generators producing the full 64-bit range, so uniform01 is exact.
template <class G>
concept Full64BitGenerator = std::uniform_random_bit_generator<std::remove_cvref_t<G>> &&
                             (std::remove_cvref_t<G>::min() == 0) &&
                             (std::remove_cvref_t<G>::max() == std::numeric_limits<std::uint64_t>::max());

/// Uniform double in [0, 1) from the top 53 bits of one draw.
template <Full64BitGenerator G>
constexpr double uniform01(G& gen) noexcept {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Seed for record `ordinal` of a search seeded with `base`; independent of
/// the order in which records are processed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t ordinal) noexcept {
    return SplitMix64::finalize(base ^ SplitMix64::finalize(ordinal + 0x9e3779b97f4a7c15ULL));
}

}  // namespace slidealign
