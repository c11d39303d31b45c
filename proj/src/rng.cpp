#include "abrupt/rng.hpp"

#include <cmath>

namespace abrupt {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

Engine make_engine(const SimSeed& seed) {
    const std::uint64_t s0 = mix_seed(seed.seed, seed.stream);
    const std::uint64_t s1 = splitmix64(s0);
    std::seed_seq seq{static_cast<std::uint32_t>(s0), static_cast<std::uint32_t>(s0 >> 32),
                      static_cast<std::uint32_t>(s1), static_cast<std::uint32_t>(s1 >> 32)};
    return Engine(seq);
}

double keyed_uniform(const SimSeed& seed, std::uint64_t key) {
    const std::uint64_t bits = splitmix64(mix_seed(seed.seed, seed.stream) ^ splitmix64(key));
    // 53 random bits, shifted off zero.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double keyed_exponential(const SimSeed& seed, std::uint64_t key) {
    return -std::log(keyed_uniform(seed, key));
}

}  // namespace abrupt
