#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bhr/core.hpp"

// Enumeration of frequency partitions and hop multisets for a modulus p.
//
// Streams are lazy single-consumer iterators: unfiltered multiset counts grow
// into the billions by p=30, so nothing is materialized. Both streams restart
// deterministically from an index via skip(), which the batch harness uses to
// position per-worker streams.

namespace bhr {

struct RepresentativeNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All partitions of p-1 into at most floor(p/2) parts, yielded in strictly
// decreasing lexicographic order on the part tuple, starting with (p-1,).
class FpStream {
  public:
    explicit FpStream(const ProblemInstance& inst)
        : n_(inst.p - 1), max_parts_(inst.max_length) {
        current_.push_back(n_);  // first partition: one part, n
    }

    std::optional<FrequencyPartition> next() {
        if (done_) return std::nullopt;
        FrequencyPartition out{current_};
        done_ = !advance();
        return out;
    }

    void skip(std::uint64_t count) {
        while (count > 0 && !done_) {
            done_ = !advance();
            --count;
        }
    }

  private:
    // Successor in descending lex order among partitions of n_ with at most
    // max_parts_ parts. Scanning from the right, find the rightmost position i
    // whose value can drop by 1 while the suffix sum S still fits into the
    // remaining slots (S <= (a[i]-1) * (max_parts_ - i)); then refill the tail
    // greedily with the largest values allowed, which yields the lex-largest
    // smaller partition.
    bool advance() {
        auto& a = current_;
        std::int64_t suffix = 0;
        for (auto i = static_cast<std::int64_t>(a.size()) - 1; i >= 0; --i) {
            suffix += a[static_cast<std::size_t>(i)];
            const std::int64_t v = a[static_cast<std::size_t>(i)] - 1;
            if (v < 1) continue;
            if (suffix > v * (max_parts_ - i)) continue;
            a.resize(static_cast<std::size_t>(i));
            std::int64_t rem = suffix;
            while (rem > 0) {
                const auto part = static_cast<std::int32_t>(std::min<std::int64_t>(v, rem));
                a.push_back(part);
                rem -= part;
            }
            return true;
        }
        return false;
    }

    std::int32_t n_;
    std::int32_t max_parts_;
    std::vector<std::int32_t> current_;
    bool done_ = false;
};

inline FpStream generate_fps(const ProblemInstance& inst) { return FpStream(inst); }

// Canonical multiset for an FP: assign multiplicities in descending order to
// the lengths of a K-subset of {1..floor(p/2)} in ascending order. Subsets are
// tried in ascending lexicographic order, so {1..K} comes first and is almost
// always the answer; later subsets only matter if the divisor condition
// rejects the earlier ones.
inline HopMultiset representative_multiset(const FrequencyPartition& fp,
                                           const ProblemInstance& inst) {
    if (fp.sum() != inst.p - 1)
        throw std::invalid_argument("representative_multiset: partition sums to " +
                                    std::to_string(fp.sum()) + ", expected p-1 = " +
                                    std::to_string(inst.p - 1));
    const auto k = static_cast<std::int32_t>(fp.size());
    const Length m = inst.max_length;
    if (k > m)
        throw RepresentativeNotFound("representative_multiset: " + std::to_string(k) +
                                     " distinct lengths cannot fit in 1.." + std::to_string(m));

    std::vector<Length> subset(static_cast<std::size_t>(k));
    std::iota(subset.begin(), subset.end(), 1);
    for (;;) {
        std::vector<HopMultiset::Entry> entries;
        entries.reserve(static_cast<std::size_t>(k));
        for (std::int32_t i = 0; i < k; ++i)
            entries.push_back({subset[static_cast<std::size_t>(i)],
                               fp.parts()[static_cast<std::size_t>(i)]});
        HopMultiset candidate(inst.p, std::move(entries));
        if (divisor_condition(candidate, inst)) return candidate;

        // next K-combination of {1..m} in ascending lex order
        std::int32_t i = k - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == m - (k - 1 - i)) --i;
        if (i < 0)
            throw RepresentativeNotFound(
                "representative_multiset: no length assignment satisfies the divisor condition");
        ++subset[static_cast<std::size_t>(i)];
        for (std::int32_t j = i + 1; j < k; ++j)
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
}

enum class MultisetFilter { none, divisor_condition };

// All size-(p-1) multisets over a fixed support, in ascending lexicographic
// order on the sorted element list, optionally filtered by the divisor
// condition. The iteration state is an odometer over support indices.
class MultisetStream {
  public:
    MultisetStream(const ProblemInstance& inst, MultisetFilter filter)
        : MultisetStream(inst, full_support(inst), filter) {}

    MultisetStream(const ProblemInstance& inst, std::vector<Length> support,
                   MultisetFilter filter)
        : inst_(inst), support_(std::move(support)), filter_(filter) {
        if (support_.empty())
            throw std::invalid_argument("MultisetStream: empty support");
        for (std::size_t i = 0; i < support_.size(); ++i) {
            if (support_[i] < 1 || support_[i] > inst_.max_length)
                throw std::invalid_argument("MultisetStream: support length out of range");
            if (i > 0 && support_[i] <= support_[i - 1])
                throw std::invalid_argument("MultisetStream: support must be strictly ascending");
        }
        indices_.assign(static_cast<std::size_t>(inst_.p) - 1, 0);
    }

    std::optional<HopMultiset> next() {
        while (!done_) {
            HopMultiset out = materialize();
            done_ = !advance();
            if (filter_ == MultisetFilter::none || divisor_condition(out, inst_))
                return out;
        }
        return std::nullopt;
    }

    // Skip `count` items of the (filtered) stream.
    void skip(std::uint64_t count) {
        while (count > 0 && next().has_value()) --count;
    }

  private:
    static std::vector<Length> full_support(const ProblemInstance& inst) {
        std::vector<Length> s(static_cast<std::size_t>(inst.max_length));
        std::iota(s.begin(), s.end(), 1);
        return s;
    }

    HopMultiset materialize() const {
        std::vector<HopMultiset::Entry> entries;
        for (std::size_t i = 0; i < indices_.size();) {
            std::size_t j = i;
            while (j < indices_.size() && indices_[j] == indices_[i]) ++j;
            entries.push_back({support_[indices_[i]], static_cast<std::int32_t>(j - i)});
            i = j;
        }
        return HopMultiset(inst_.p, std::move(entries));
    }

    bool advance() {
        const std::size_t top = support_.size() - 1;
        auto i = static_cast<std::int64_t>(indices_.size()) - 1;
        while (i >= 0 && indices_[static_cast<std::size_t>(i)] == top) --i;
        if (i < 0) return false;
        const std::size_t bumped = ++indices_[static_cast<std::size_t>(i)];
        for (auto j = static_cast<std::size_t>(i) + 1; j < indices_.size(); ++j)
            indices_[j] = bumped;
        return true;
    }

    ProblemInstance inst_;
    std::vector<Length> support_;
    MultisetFilter filter_;
    std::vector<std::size_t> indices_;  // non-decreasing positions into support_
    bool done_ = false;
};

inline MultisetStream enumerate_multisets(const ProblemInstance& inst, MultisetFilter filter) {
    return MultisetStream(inst, filter);
}

// Support restricted to lengths coprime to p. Such multisets satisfy the
// divisor condition automatically: no length is a multiple of any d > 1
// dividing p, and the d = 1 bound p-1 is met with equality at worst.
inline MultisetStream enumerate_coprime_multisets(const ProblemInstance& inst) {
    std::vector<Length> support;
    for (Length k = 1; k <= inst.max_length; ++k)
        if (std::gcd(k, inst.p) == 1) support.push_back(k);
    return MultisetStream(inst, std::move(support), MultisetFilter::none);
}

}  // namespace bhr
