#pragma once

// Reproducible randomness. A SimSeed names one stream; engines for distinct
// (seed, stream) pairs are seeded from well-mixed, independent states so that
// trial i of an experiment can run on any worker and still see stream i.

#include <cstdint>
#include <random>

namespace abrupt {

struct SimSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const SimSeed&, const SimSeed&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

// Hash of an ordered tuple of words; used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

using Engine = std::mt19937_64;

Engine make_engine(const SimSeed& seed);

// Counter-based draws: a pure function of (seed, key).
double keyed_uniform(const SimSeed& seed, std::uint64_t key);       // in (0, 1)
double keyed_exponential(const SimSeed& seed, std::uint64_t key);   // rate 1

}  // namespace abrupt
