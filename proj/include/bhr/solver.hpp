#pragma once

#include <cassert>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bhr/core.hpp"

// Depth-first realization of a target hop multiset as a Hamiltonian path.
//
// The search starts at vertex 0 and at each step spends one available hop h,
// moving from u to (u+h) mod p or (u-h) mod p. Recursion is an explicit stack
// so deep instances (p in the hundreds) cannot overflow call limits.

namespace bhr {

struct SearchLimits {
    std::optional<std::int64_t> max_backtracks;  // retraction budget
    std::optional<double> time_limit_seconds;
};

// A previously successful hop permutation; at depth i the solver tries the
// hint's i-th length first. Ordering advice only, never affects completeness.
struct Hint {
    std::vector<Length> hop_sequence;
};

enum class Termination { solved, exhausted, backtrack_limit, time_limit };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::solved: return "solved";
        case Termination::exhausted: return "exhausted";
        case Termination::backtrack_limit: return "backtrack-limit";
        case Termination::time_limit: return "time-limit";
    }
    return "?";
}

struct SearchResult {
    bool success = false;
    std::optional<HamiltonianPath> path;
    std::optional<std::vector<Length>> hop_permutation;
    std::int64_t backtracks = 0;  // one per retracted hop
    double elapsed_seconds = 0.0;
    Termination terminated_by = Termination::exhausted;
};

namespace detail {

class VisitedSet {
  public:
    explicit VisitedSet(std::int32_t n) : words_((static_cast<std::size_t>(n) + 63) / 64, 0) {}
    bool test(std::int32_t v) const {
        return (words_[static_cast<std::size_t>(v) >> 6] >> (v & 63)) & 1u;
    }
    void set(std::int32_t v) { words_[static_cast<std::size_t>(v) >> 6] |= 1ull << (v & 63); }
    void clear(std::int32_t v) { words_[static_cast<std::size_t>(v) >> 6] &= ~(1ull << (v & 63)); }

  private:
    std::vector<std::uint64_t> words_;
};

}  // namespace detail

// On success the returned path starts at vertex 0 and realizes the target
// exactly. Termination::exhausted is definitive: no realization starting at 0
// exists, and by translation invariance none exists at all.
//
// `symmetry_reduction` restricts the first move to the + direction; the
// reflection x -> (-x) mod p maps any path from 0 to one with identical hop
// lengths and flipped first direction, so no solutions are lost. The flag
// exists so tests can compare against the unreduced search.
inline SearchResult find_path(const HopMultiset& target, const ProblemInstance& inst,
                              const Hint* hint = nullptr, const SearchLimits& limits = {},
                              bool symmetry_reduction = true) {
    const auto start_time = std::chrono::steady_clock::now();
    const std::int32_t p = inst.p;
    const Length m = inst.max_length;
    if (target.p() != p)
        throw std::invalid_argument("find_path: target multiset is for p=" +
                                    std::to_string(target.p()) + ", instance has p=" +
                                    std::to_string(p));
    if (hint) {
        for (Length l : hint->hop_sequence)
            if (l < 1 || l > m)
                throw std::invalid_argument("find_path: hint length out of range");
    }
    if (limits.max_backtracks && *limits.max_backtracks < 0)
        throw std::invalid_argument("find_path: negative backtrack limit");

    std::vector<std::int32_t> remaining = target.dense_counts();
    detail::VisitedSet visited(p);
    std::vector<Vertex> path(static_cast<std::size_t>(p));
    std::vector<Length> hops(static_cast<std::size_t>(p) - 1);

    // Per-depth move iterator. Order: hint length (+ then -), then remaining
    // lengths ascending, + before -. The minus direction is skipped at depth 0
    // under symmetry reduction and whenever 2l == p (both directions reach the
    // same vertex).
    struct Frame {
        Length len;
        Length hint_len;  // 0 if no hint at this depth
        std::uint8_t dir;  // 0 = plus, 1 = minus
        bool scanning;     // false while trying the hint length
    };
    std::vector<Frame> frames(static_cast<std::size_t>(p) - 1);

    const std::size_t hint_size = hint ? hint->hop_sequence.size() : 0;
    auto init_frame = [&](std::int32_t depth) {
        Frame& f = frames[static_cast<std::size_t>(depth)];
        const Length h = static_cast<std::size_t>(depth) < hint_size
                             ? hint->hop_sequence[static_cast<std::size_t>(depth)]
                             : 0;
        f.hint_len = h;
        f.scanning = h == 0;
        f.len = h == 0 ? 1 : h;
        if (f.len == f.hint_len && f.scanning) ++f.len;
        f.dir = 0;
    };
    auto minus_allowed = [&](std::int32_t depth, Length l) {
        if (depth == 0 && symmetry_reduction) return false;
        return 2 * l != p;
    };
    auto advance_frame = [&](Frame& f, std::int32_t depth) {
        if (f.dir == 0 && minus_allowed(depth, f.len)) {
            f.dir = 1;
            return;
        }
        f.dir = 0;
        if (!f.scanning) {
            f.scanning = true;
            f.len = 1;
        } else {
            ++f.len;
        }
        if (f.len == f.hint_len) ++f.len;  // already tried as the hint
    };

    SearchResult result;
    std::int32_t depth = 0;  // hops placed so far
    path[0] = 0;
    visited.set(0);
    init_frame(0);

    const bool timed = limits.time_limit_seconds.has_value();
    const auto deadline =
        timed ? start_time + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(*limits.time_limit_seconds))
              : start_time;
    std::uint64_t steps = 0;

    auto finish = [&](Termination t) {
        result.terminated_by = t;
        result.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
        return result;
    };

    for (;;) {
        if (timed && (++steps & 0x3fff) == 0 && std::chrono::steady_clock::now() >= deadline)
            return finish(Termination::time_limit);

        Frame& f = frames[static_cast<std::size_t>(depth)];
        bool placed = false;
        while (f.len <= m) {
            const Length l = f.len;
            const bool minus = f.dir != 0;
            advance_frame(f, depth);
            if (remaining[static_cast<std::size_t>(l)] == 0) continue;
            const Vertex u = path[static_cast<std::size_t>(depth)];
            Vertex v = minus ? u - l : u + l;
            if (v < 0) v += p;
            else if (v >= p) v -= p;
            if (visited.test(v)) continue;

            visited.set(v);
            --remaining[static_cast<std::size_t>(l)];
            hops[static_cast<std::size_t>(depth)] = l;
            path[static_cast<std::size_t>(depth) + 1] = v;
            ++depth;
            placed = true;
            break;
        }

        if (placed) {
            if (depth == p - 1) {
                result.success = true;
                result.path = HamiltonianPath(path);
                result.hop_permutation = hops;
                assert(validate_realization(*result.path, target, inst));
                return finish(Termination::solved);
            }
            init_frame(depth);
            continue;
        }

        if (depth == 0) return finish(Termination::exhausted);

        if (limits.max_backtracks && result.backtracks == *limits.max_backtracks)
            return finish(Termination::backtrack_limit);
        --depth;
        const Length l = hops[static_cast<std::size_t>(depth)];
        ++remaining[static_cast<std::size_t>(l)];
        visited.clear(path[static_cast<std::size_t>(depth) + 1]);
        ++result.backtracks;
    }
}

// Brute-force reference: enumerate permutations of 0..p-1 with first vertex 0,
// pruned only by per-prefix length-count feasibility. Independent of the
// engine above; used for small-instance equivalence testing.
inline SearchResult oracle_find_path(const HopMultiset& target, const ProblemInstance& inst,
                                     std::int32_t max_p = 10) {
    const auto start_time = std::chrono::steady_clock::now();
    const std::int32_t p = inst.p;
    if (p > max_p)
        throw std::out_of_range("oracle_find_path: p=" + std::to_string(p) +
                                " exceeds oracle bound " + std::to_string(max_p));
    if (target.p() != p)
        throw std::invalid_argument("oracle_find_path: modulus mismatch");

    std::vector<std::int32_t> remaining = target.dense_counts();
    std::vector<bool> visited(static_cast<std::size_t>(p), false);
    std::vector<Vertex> path(static_cast<std::size_t>(p));
    path[0] = 0;
    visited[0] = true;
    SearchResult result;

    auto rec = [&](auto&& self, std::int32_t placed) -> bool {
        if (placed == p) return true;
        const Vertex u = path[static_cast<std::size_t>(placed) - 1];
        for (Vertex v = 0; v < p; ++v) {
            if (visited[static_cast<std::size_t>(v)]) continue;
            const Length l = cyclic_length(u, v, inst);
            auto& cnt = remaining[static_cast<std::size_t>(l)];
            if (cnt == 0) continue;
            visited[static_cast<std::size_t>(v)] = true;
            --cnt;
            path[static_cast<std::size_t>(placed)] = v;
            if (self(self, placed + 1)) return true;
            ++cnt;
            visited[static_cast<std::size_t>(v)] = false;
            ++result.backtracks;
        }
        return false;
    };

    if (rec(rec, 1)) {
        result.success = true;
        result.path = HamiltonianPath(path);
        result.hop_permutation = path_hop_sequence(*result.path, inst);
        result.terminated_by = Termination::solved;
    } else {
        result.terminated_by = Termination::exhausted;
    }
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return result;
}

}  // namespace bhr
