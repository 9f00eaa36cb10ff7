#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Domain types for Hamiltonian-path realization of cyclic edge-length
// multisets on the complete graph K_p with vertices {0..p-1}.
//
// All types are immutable values after construction and all operations are
// pure functions, so everything here is safe to share across threads.

namespace bhr {

using Vertex = std::int32_t;
using Length = std::int32_t;

// The modulus p, its divisors, and the valid length range 1..floor(p/2).
struct ProblemInstance {
    std::int32_t p;
    std::vector<std::int32_t> divisors;  // ascending, includes 1 and p
    Length max_length;                   // floor(p/2)

    explicit ProblemInstance(std::int32_t p_in) : p(p_in), max_length(p_in / 2) {
        if (p < 2)
            throw std::invalid_argument("ProblemInstance: p must be >= 2, got " +
                                        std::to_string(p_in));
        for (std::int32_t d = 1; d <= p; ++d)
            if (p % d == 0) divisors.push_back(d);
    }
};

// Canonical edge length between two distinct vertices: min(|x-y|, p-|x-y|),
// always in 1..floor(p/2).
inline Length cyclic_length(Vertex x, Vertex y, const ProblemInstance& inst) {
    if (x < 0 || x >= inst.p || y < 0 || y >= inst.p)
        throw std::invalid_argument("cyclic_length: vertex out of range 0.." +
                                    std::to_string(inst.p - 1));
    if (x == y)
        throw std::invalid_argument("cyclic_length: vertices must be distinct");
    const Length d = x > y ? x - y : y - x;
    return std::min(d, inst.p - d);
}

// Non-increasing tuple of positive multiplicities; a partition of p-1.
class FrequencyPartition {
  public:
    explicit FrequencyPartition(std::vector<std::int32_t> parts) : parts_(std::move(parts)) {
        if (parts_.empty())
            throw std::invalid_argument("FrequencyPartition: empty part list");
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] < 1)
                throw std::invalid_argument("FrequencyPartition: parts must be positive");
            if (i > 0 && parts_[i] > parts_[i - 1])
                throw std::invalid_argument("FrequencyPartition: parts must be non-increasing");
        }
    }

    const std::vector<std::int32_t>& parts() const { return parts_; }
    std::size_t size() const { return parts_.size(); }  // K, the distinct-length count
    std::int64_t sum() const {
        std::int64_t s = 0;
        for (auto v : parts_) s += v;
        return s;
    }

    bool operator==(const FrequencyPartition&) const = default;

  private:
    std::vector<std::int32_t> parts_;
};

// Multiset of p-1 cyclic edge lengths, keyed by length in 1..floor(p/2).
// Carries its modulus so cross-modulus mixups are rejected early.
class HopMultiset {
  public:
    struct Entry {
        Length length;
        std::int32_t count;
        bool operator==(const Entry&) const = default;
    };

    HopMultiset(std::int32_t p, std::vector<Entry> entries)
        : p_(p), entries_(std::move(entries)) {
        if (p_ < 2)
            throw std::invalid_argument("HopMultiset: p must be >= 2");
        std::sort(entries_.begin(), entries_.end(),
                  [](const Entry& a, const Entry& b) { return a.length < b.length; });
        const Length m = p_ / 2;
        std::int64_t total = 0;
        Length prev = 0;
        for (const Entry& e : entries_) {
            if (e.length < 1 || e.length > m)
                throw std::invalid_argument("HopMultiset: length " + std::to_string(e.length) +
                                            " outside 1.." + std::to_string(m));
            if (e.length == prev)
                throw std::invalid_argument("HopMultiset: duplicate length entry");
            if (e.count < 1)
                throw std::invalid_argument("HopMultiset: multiplicity must be >= 1");
            prev = e.length;
            total += e.count;
        }
        if (total != p_ - 1)
            throw std::invalid_argument("HopMultiset: total multiplicity " + std::to_string(total) +
                                        " != p-1 = " + std::to_string(p_ - 1));
    }

    // Run-length encode a list of lengths (any order).
    static HopMultiset from_lengths(std::int32_t p, std::vector<Length> lengths) {
        std::sort(lengths.begin(), lengths.end());
        std::vector<Entry> entries;
        for (std::size_t i = 0; i < lengths.size();) {
            std::size_t j = i;
            while (j < lengths.size() && lengths[j] == lengths[i]) ++j;
            entries.push_back({lengths[i], static_cast<std::int32_t>(j - i)});
            i = j;
        }
        return HopMultiset(p, std::move(entries));
    }

    std::int32_t p() const { return p_; }
    Length max_length() const { return p_ / 2; }
    std::int32_t total() const { return p_ - 1; }

    const std::vector<Entry>& entries() const { return entries_; }  // ascending by length
    std::size_t support_size() const { return entries_.size(); }

    std::int32_t count_of(Length l) const {
        for (const Entry& e : entries_) {
            if (e.length == l) return e.count;
            if (e.length > l) break;
        }
        return 0;
    }
    bool contains(Length l) const { return count_of(l) > 0; }

    // Counts indexed by length, size max_length()+1; index 0 unused.
    std::vector<std::int32_t> dense_counts() const {
        std::vector<std::int32_t> counts(static_cast<std::size_t>(max_length()) + 1, 0);
        for (const Entry& e : entries_) counts[static_cast<std::size_t>(e.length)] = e.count;
        return counts;
    }

    bool operator==(const HopMultiset&) const = default;

  private:
    std::int32_t p_;
    std::vector<Entry> entries_;
};

// A permutation of 0..p-1; p is implied by the sequence length.
class HamiltonianPath {
  public:
    explicit HamiltonianPath(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
        const auto n = static_cast<std::int32_t>(vertices_.size());
        if (n < 2)
            throw std::invalid_argument("HamiltonianPath: need at least 2 vertices");
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        for (Vertex v : vertices_) {
            if (v < 0 || v >= n)
                throw std::invalid_argument("HamiltonianPath: vertex " + std::to_string(v) +
                                            " outside 0.." + std::to_string(n - 1));
            if (seen[static_cast<std::size_t>(v)])
                throw std::invalid_argument("HamiltonianPath: duplicate vertex " +
                                            std::to_string(v));
            seen[static_cast<std::size_t>(v)] = true;
        }
    }

    std::int32_t p() const { return static_cast<std::int32_t>(vertices_.size()); }
    const std::vector<Vertex>& vertices() const { return vertices_; }

    bool operator==(const HamiltonianPath&) const = default;

  private:
    std::vector<Vertex> vertices_;
};

// Multiset of the p-1 consecutive cyclic lengths along a path.
inline HopMultiset path_hop_lengths(const HamiltonianPath& path, const ProblemInstance& inst) {
    if (path.p() != inst.p)
        throw std::invalid_argument("path_hop_lengths: path has " + std::to_string(path.p()) +
                                    " vertices, instance expects " + std::to_string(inst.p));
    std::vector<Length> lengths;
    lengths.reserve(static_cast<std::size_t>(inst.p) - 1);
    const auto& v = path.vertices();
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        lengths.push_back(cyclic_length(v[i], v[i + 1], inst));
    return HopMultiset::from_lengths(inst.p, std::move(lengths));
}

// The consecutive cyclic lengths of a path, in order.
inline std::vector<Length> path_hop_sequence(const HamiltonianPath& path,
                                             const ProblemInstance& inst) {
    if (path.p() != inst.p)
        throw std::invalid_argument("path_hop_sequence: modulus mismatch");
    std::vector<Length> hops;
    hops.reserve(static_cast<std::size_t>(inst.p) - 1);
    const auto& v = path.vertices();
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        hops.push_back(cyclic_length(v[i], v[i + 1], inst));
    return hops;
}

// True iff for every divisor d of p, the number of elements divisible by d
// is at most p-d. Necessary for realizability; conjecturally sufficient.
inline bool divisor_condition(const HopMultiset& ms, const ProblemInstance& inst) {
    if (ms.p() != inst.p)
        throw std::invalid_argument("divisor_condition: modulus mismatch");
    for (std::int32_t d : inst.divisors) {
        std::int64_t hits = 0;
        for (const auto& e : ms.entries())
            if (e.length % d == 0) hits += e.count;
        if (hits > inst.p - d) return false;
    }
    return true;
}

// Success check used after every solver and inductive result.
inline bool validate_realization(const HamiltonianPath& path, const HopMultiset& target,
                                 const ProblemInstance& inst) {
    if (target.p() != inst.p)
        throw std::invalid_argument("validate_realization: modulus mismatch");
    return path_hop_lengths(path, inst) == target;
}

// Multiplicities sorted non-increasing.
inline FrequencyPartition fp_of_multiset(const HopMultiset& ms) {
    std::vector<std::int32_t> parts;
    parts.reserve(ms.entries().size());
    for (const auto& e : ms.entries()) parts.push_back(e.count);
    std::sort(parts.begin(), parts.end(), std::greater<>());
    return FrequencyPartition(std::move(parts));
}

}  // namespace bhr
