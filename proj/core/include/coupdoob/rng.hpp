#ifndef COUPDOOB_RNG_HPP
#define COUPDOOB_RNG_HPP

#include <cstdint>

namespace coupdoob {

// SplitMix64: a 64-bit splittable generator with a strong output mixer.
// Streams are split per replica index: replica r draws from the generator
// seeded with (seed ^ r), so a replicated run can be partitioned across
// threads without any shared RNG state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static SplitMix64 stream(std::uint64_t seed, std::uint64_t replica) {
        return SplitMix64(seed ^ replica);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

} // namespace coupdoob

#endif
