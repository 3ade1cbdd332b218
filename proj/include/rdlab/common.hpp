#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rdlab {

// ---- error taxonomy ------------------------------------------------------

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};
struct CorpusError : std::runtime_error {
    explicit CorpusError(const std::string& m) : std::runtime_error(m) {}
};
struct QuotaViolation : std::runtime_error {
    explicit QuotaViolation(const std::string& m) : std::runtime_error(m) {}
};
struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& m) : std::runtime_error(m) {}
};
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& m) : std::runtime_error(m) {}
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

// ---- hashing / seeding ---------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stage sub-seeds: every pipeline stage draws its own stream from the run
/// seed so that adding a stage never perturbs the streams of the others.
inline std::uint64_t sub_seed(std::uint64_t run_seed, std::string_view stage) {
    return splitmix64(run_seed ^ fnv1a64(stage));
}

/// Deterministic RNG wrapper. mt19937_64 output is pinned by the standard,
/// and all derived draws below avoid std::*_distribution (whose streams are
/// implementation-defined), so sequences reproduce across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return eng_(); }

    double uniform() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t uniform_int(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    /// Sample an index from an unnormalized non-negative weight vector.
    std::size_t categorical(const std::vector<double>& w) {
        double total = 0.0;
        for (double x : w) total += x;
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += w[i];
            if (u < acc) return i;
        }
        return w.empty() ? 0 : w.size() - 1;
    }

  private:
    std::mt19937_64 eng_;
};

// ---- number formatting ----------------------------------------------------

/// Round-trip-exact decimal form of a double (17 significant digits).
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace rdlab
