#pragma once

// Deterministic random helpers.
//
// Everything downstream of a seed must be reproducible bit-for-bit across
// platforms and standard-library versions. std::mt19937_64 has a pinned
// output stream, but std::uniform_int_distribution / std::shuffle /
// std::uniform_real_distribution do not, so we only ever consume the raw
// 64-bit stream and do the reductions ourselves.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace newsprop::rng {

using Engine = std::mt19937_64;

// splitmix64 step (Steele, Lea, Flood 2014). Used to derive per-stage seeds
// from one root seed so that changing e.g. the mask seed does not perturb
// the factor initialization stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable seed for a named stage: fold the tag into the root seed with FNV-1a,
// then decorrelate with one splitmix64 step.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stage) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : stage) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::uint64_t state = root ^ h;
    return splitmix64(state);
}

// Unbiased integer in [0, n) by rejection sampling on the raw stream.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
    // n == 0 would be a caller bug; keep the check cheap.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t x;
    do {
        x = eng();
    } while (x > limit);
    return x % n;
}

// Uniform double in [0, 1) with 53 significant bits, independent of
// std::uniform_real_distribution's unspecified algorithm.
inline double uniform_unit(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates with our own index draws (std::shuffle is not pinned).
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// k distinct indices from [0, n), returned sorted ascending.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Engine& eng) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    shuffle(all, eng);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace newsprop::rng
