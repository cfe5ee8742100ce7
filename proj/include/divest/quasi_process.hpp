#ifndef DIVEST_QUASI_PROCESS_HPP
#define DIVEST_QUASI_PROCESS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "divest/levy_model.hpp"
#include "divest/rng.hpp"

namespace divest {

/// Permutation of {0..n-1}: position k of the quasi-path receives increment
/// mapping[k]. Indices are zero-based.
struct Permutation {
    std::vector<std::uint32_t> mapping;

    std::size_t size() const noexcept { return mapping.size(); }
    bool is_bijection() const;
    static Permutation identity(std::size_t n);
};

/**
 * Forward Fisher-Yates shuffle that hands out positions one at a time.
 * Position k is final as soon as it is returned, so callers may stop early;
 * drawing all n positions yields exactly sample_permutation's result.
 */
class LazyShuffle {
public:
    explicit LazyShuffle(std::size_t n);

    /// Restarts with a fresh identity array and the given stream.
    void reset(std::uint64_t seed);
    std::uint32_t next();
    std::size_t position() const noexcept { return pos_; }
    std::size_t size() const noexcept { return indices_.size(); }

private:
    std::vector<std::uint32_t> indices_;
    std::size_t pos_ = 0;
    Engine engine_;
};

/// Uniform permutation of n elements drawn from `engine`.
Permutation sample_permutation(std::size_t n, Engine& engine);

/// Seed of the k-th permutation of a set rooted at `root`.
constexpr std::uint64_t permutation_seed(std::uint64_t root, std::size_t k) noexcept {
    return derive_seed(root, static_cast<std::uint64_t>(k));
}

struct PermutationSet {
    std::vector<Permutation> perms;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

/// `alpha` i.i.d. uniform permutations (with replacement). Permutation k is
/// drawn from its own stream permutation_seed(seed, k), so prefixes of larger
/// sets coincide with smaller sets built from the same seed.
PermutationSet sample_permutation_set(std::size_t n, std::size_t alpha, std::uint64_t seed);

/// values[k] = u0 + sum_{j<k} deltas[perm.mapping[j]].
StepPath build_quasi_path(double u0, const IncrementSeries& increments, const Permutation& perm);

}  // namespace divest

#endif  // DIVEST_QUASI_PROCESS_HPP
