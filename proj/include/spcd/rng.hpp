#pragma once

#include <cmath>
#include <cstdint>

namespace spcd {

// Seed identifies one reproducible random stream. Identical (master, stream)
// gives bit-identical output on a given build; concurrent trials use
// disjoint stream values derived from the trial index.
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}
}  // namespace detail

// Stream for trial t of an experiment keyed by a master seed.
inline Seed stream_seed(std::uint64_t master, std::uint64_t trial) {
    return Seed{master, detail::mix64(trial + 0xD1B54A32D192ED03ULL)};
}

// Counter-based generator (SplitMix-style): output i is a pure function of
// (seed, i), so there is no shared mutable state to synchronize and any
// stream position can be recomputed.
class Rng {
  public:
    explicit Rng(Seed s)
        : base_(detail::mix64(s.master + 0x9E3779B97F4A7C15ULL) ^
                detail::mix64(s.stream + 0xD1B54A32D192ED03ULL)) {}

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return detail::mix64(base_ + counter_);
    }

    // Uniform on (0,1), both endpoints excluded: safe under log().
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Box-Muller. Pairs are generated together; the second value is cached
    // so one draw consumes exactly one or zero uniform pairs.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform on [-sqrt(3), sqrt(3)]: variance 1.
    double uniform_unitvar() {
        return (2.0 * uniform01() - 1.0) * 1.7320508075688772935;
    }

    double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

    bool bernoulli_half() { return (next_u64() >> 63) != 0; }

    // Uniform integer in [0, bound) by rejection; bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        for (;;) {
            std::uint64_t x = next_u64();
            if (x < limit) return x % bound;
        }
    }

  private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace spcd
