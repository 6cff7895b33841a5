#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace arcane {

/// SplitMix64 finalizer. Full avalanche on 64-bit input.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t value) noexcept {
    return mix64(seed ^ mix64(value));
}

constexpr std::uint64_t hash_label(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

using Rng = std::mt19937_64;

/// Independent stream for (seed, entity). Adding entities never perturbs
/// the draws of existing ones.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t entity) {
    return Rng{combine(seed, entity)};
}

inline Rng derive_rng(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
    return Rng{combine(combine(seed, hash_label(label)), index)};
}

template <class Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>{0, bound - 1}(gen);
}

template <class Gen>
double uniform01(Gen& gen) {
    return std::uniform_real_distribution<double>{0.0, 1.0}(gen);
}

}  // namespace arcane
