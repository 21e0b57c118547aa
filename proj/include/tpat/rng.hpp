#ifndef TPAT_RNG_HPP_
#define TPAT_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <string_view>

namespace tpat {

// splitmix64 generator. Chosen over std::mt19937 so that streams are
// bit-identical across compilers and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // [0, 1) with 24 mantissa bits.
    float uniform() {
        return static_cast<float>(next_u64() >> 40) * 0x1.0p-24f;
    }

    float uniform(float lo, float hi) { return lo + (hi - lo) * uniform(); }

    // [0, 1) with 53 mantissa bits.
    double uniform_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Inclusive range.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    float normal() {
        // Box-Muller, one value per call; the pair's partner is discarded
        // to keep the stream position independent of call parity.
        double u1 = 1.0 - uniform_double();
        double u2 = uniform_double();
        return static_cast<float>(std::sqrt(-2.0 * std::log(u1)) *
                                  std::cos(6.283185307179586 * u2));
    }

private:
    std::uint64_t state_;
};

// FNV-1a over the name, mixed with the master seed. Gives every parameter
// tensor its own reproducible stream.
inline std::uint64_t seed_from_name(std::uint64_t master, std::string_view name) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h ^ (master * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
}

}  // namespace tpat

#endif  // TPAT_RNG_HPP_
