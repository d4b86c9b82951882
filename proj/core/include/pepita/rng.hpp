#ifndef PEPITA_RNG_HPP
#define PEPITA_RNG_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace pepita {

// Deterministic xoshiro256++ generator seeded through splitmix64.
// std::mt19937_64 would also be portable, but the standard distributions are
// not bit-reproducible across library implementations, so the uniform/normal
// draws are spelled out here. Identical seed => identical stream everywhere.
//
// Streams are split per purpose so toggling one consumer (say dropout) never
// perturbs the draws seen by another (say the shuffle): substream(tag) derives
// an independently-seeded generator from this one's seed and the tag.
class Rng {
public:
    // Fixed purpose tags for the standard substreams.
    enum : std::uint64_t {
        kInit = 1,
        kDropout = 2,
        kShuffle = 3,
        kAttack = 4,
        kNoise = 5,
    };

    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double next_double();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi);

    // Unbiased uniform integer on [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n);

    // Standard normal via Box-Muller (one value per call, no caching, so the
    // stream position is a pure function of the call count).
    double next_gaussian();

    // Fisher-Yates, spelled out because std::shuffle's draw pattern is
    // implementation-defined.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[next_below(i)]);
    }

    // Independent generator derived from (seed, tag). Chains:
    // rng.substream(kAttack).substream(sample_id).
    Rng substream(std::uint64_t tag) const;

private:
    std::uint64_t seed_ = 0;
    std::array<std::uint64_t, 4> s_{};
};

// splitmix64 step; exposed for hashing-style seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a 64-bit over a byte range; used for config and model hashes.
std::uint64_t fnv1a64(const void* data, std::size_t len);

}  // namespace pepita

#endif
