#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace intstab {

/// SplitMix64 finaliser. Used as the counter hash for all derived seeds.
std::uint64_t mix64(std::uint64_t x);

/// Combine a parent seed with a sequence of counters. The result only depends
/// on the values passed, never on how many other seeds were derived before.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> counters);

/// FNV-1a of a string, for mixing identifiers (preprocessing ids) into seeds.
std::uint64_t hash_id(std::string_view id);

/// Deterministic random source. std::mt19937_64 is fully specified by the
/// standard; the distributions below are implemented here so results do not
/// depend on the standard library vendor.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t index(std::size_t n);

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform();

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace intstab
