#include "divest/quasi_process.hpp"

#include <numeric>
#include <utility>

#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

#include "divest/error.hpp"

namespace divest {

bool Permutation::is_bijection() const {
    std::vector<bool> seen(mapping.size(), false);
    for (std::uint32_t i : mapping) {
        if (i >= mapping.size() || seen[i]) return false;
        seen[i] = true;
    }
    return true;
}

Permutation Permutation::identity(std::size_t n) {
    Permutation p;
    p.mapping.resize(n);
    std::iota(p.mapping.begin(), p.mapping.end(), std::uint32_t{0});
    return p;
}

LazyShuffle::LazyShuffle(std::size_t n) : indices_(n) {}

void LazyShuffle::reset(std::uint64_t seed) {
    std::iota(indices_.begin(), indices_.end(), std::uint32_t{0});
    pos_ = 0;
    engine_.seed(seed);
}

std::uint32_t LazyShuffle::next() {
    const std::size_t last = indices_.size() - 1;
    if (pos_ < last) {
        boost::random::uniform_int_distribution<std::size_t> pick(pos_, last);
        std::swap(indices_[pos_], indices_[pick(engine_)]);
    }
    return indices_[pos_++];
}

Permutation sample_permutation(std::size_t n, Engine& engine) {
    if (n < 1) throw Error(ErrorKind::NonPositive, "permutation size must be at least 1");
    Permutation p = Permutation::identity(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        boost::random::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(p.mapping[i], p.mapping[pick(engine)]);
    }
    return p;
}

PermutationSet sample_permutation_set(std::size_t n, std::size_t alpha, std::uint64_t seed) {
    if (n < 1) throw Error(ErrorKind::NonPositive, "permutation size must be at least 1");
    if (alpha < 1) throw Error(ErrorKind::NonPositive, "alpha must be at least 1");
    PermutationSet set;
    set.seed = seed;
    set.perms.reserve(alpha);
    for (std::size_t k = 0; k < alpha; ++k) {
        Engine engine = make_engine(permutation_seed(seed, k));
        set.perms.push_back(sample_permutation(n, engine));
    }
    if (n >= alpha) {
        set.warnings.push_back(fmt::format("permutation set is small relative to n (n={}, alpha={})", n, alpha));
    }
    return set;
}

StepPath build_quasi_path(double u0, const IncrementSeries& increments, const Permutation& perm) {
    if (perm.size() != increments.scheme.n || increments.deltas.size() != increments.scheme.n) {
        throw Error(ErrorKind::LengthMismatch, "permutation length differs from increment count");
    }
    StepPath path{u0, {}, increments.scheme};
    path.values.reserve(perm.size() + 1);
    double level = u0;
    path.values.push_back(level);
    for (std::uint32_t idx : perm.mapping) {
        level += increments.deltas[idx];
        path.values.push_back(level);
    }
    return path;
}

}  // namespace divest
