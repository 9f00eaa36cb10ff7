#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <numeric>
#include <vector>

#include "bhr/core.hpp"
#include "bhr/partitions.hpp"
#include "bhr/solver.hpp"

using namespace bhr;

TEST_CASE("all-ones multiset solves as the straight path", "[solver]") {
    const ProblemInstance inst(9);
    const SearchResult r = find_path(HopMultiset(9, {{1, 8}}), inst);
    REQUIRE(r.success);
    CHECK(r.terminated_by == Termination::solved);
    CHECK(r.backtracks == 0);
    std::vector<Vertex> expected(9);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(r.path->vertices() == expected);
    CHECK(r.hop_permutation == std::vector<Length>(8, 1));
}

TEST_CASE("uniform length-2 multiset at p=5", "[solver]") {
    const ProblemInstance inst(5);
    const SearchResult r = find_path(HopMultiset(5, {{2, 4}}), inst);
    REQUIRE(r.success);
    CHECK(r.backtracks == 0);
    CHECK(r.path->vertices() == std::vector<Vertex>{0, 2, 4, 1, 3});
}

TEST_CASE("divisor-violating multisets exhaust", "[solver]") {
    const ProblemInstance p6(6);
    for (const HopMultiset& ms : {HopMultiset(6, {{2, 5}}), HopMultiset(6, {{3, 5}}),
                                  HopMultiset(6, {{1, 1}, {3, 4}}),
                                  HopMultiset(6, {{2, 1}, {3, 4}})}) {
        const SearchResult r = find_path(ms, p6);
        CHECK_FALSE(r.success);
        CHECK(r.terminated_by == Termination::exhausted);
        CHECK_FALSE(r.path.has_value());
    }
    const SearchResult r4 = find_path(HopMultiset(4, {{2, 3}}), ProblemInstance(4));
    CHECK_FALSE(r4.success);
    CHECK(r4.terminated_by == Termination::exhausted);
}

TEST_CASE("solver agrees with the brute-force oracle", "[solver][oracle]") {
    // Also freezes the realizable counts; for these p the divisor condition
    // is known to match realizability exactly.
    const std::vector<std::pair<std::int32_t, std::uint64_t>> realizable = {
        {4, 3}, {5, 5}, {6, 17}, {7, 28}, {8, 105}};
    for (const auto& [p, expected] : realizable) {
        const ProblemInstance inst(p);
        std::uint64_t solved = 0;
        MultisetStream stream = enumerate_multisets(inst, MultisetFilter::none);
        while (auto ms = stream.next()) {
            CAPTURE(p, ms->entries());
            const SearchResult fast = find_path(*ms, inst);
            const SearchResult slow = oracle_find_path(*ms, inst);
            CHECK(fast.success == slow.success);
            CHECK(fast.success == divisor_condition(*ms, inst));
            if (fast.success) {
                ++solved;
                CHECK(validate_realization(*fast.path, *ms, inst));
                CHECK(validate_realization(*slow.path, *ms, inst));
            }
        }
        CHECK(solved == expected);
    }
}

TEST_CASE("symmetry reduction does not change solvability", "[solver][property]") {
    for (std::int32_t p = 4; p <= 8; ++p) {
        const ProblemInstance inst(p);
        MultisetStream stream = enumerate_multisets(inst, MultisetFilter::none);
        while (auto ms = stream.next()) {
            const SearchResult with = find_path(*ms, inst, nullptr, {}, true);
            const SearchResult without = find_path(*ms, inst, nullptr, {}, false);
            CAPTURE(p, ms->entries());
            CHECK(with.success == without.success);
            if (without.success) CHECK(validate_realization(*without.path, *ms, inst));
        }
    }
}

TEST_CASE("search is deterministic", "[solver]") {
    const ProblemInstance inst(21);
    const HopMultiset ms = representative_multiset(FrequencyPartition({2, 2, 2, 2, 2, 2, 2, 2, 2, 2}),
                                                   inst);
    const SearchResult a = find_path(ms, inst);
    const SearchResult b = find_path(ms, inst);
    REQUIRE(a.success);
    REQUIRE(b.success);
    CHECK(a.path->vertices() == b.path->vertices());
    CHECK(a.backtracks == b.backtracks);
    CHECK(a.hop_permutation == b.hop_permutation);
}

TEST_CASE("hints keep the solver correct", "[solver]") {
    const ProblemInstance inst(6);
    const HopMultiset ms(6, {{1, 4}, {2, 1}});

    // hint taken from an actual solution
    const Hint good{{1, 2, 1, 1, 1}};
    const SearchResult r1 = find_path(ms, inst, &good);
    REQUIRE(r1.success);
    CHECK(validate_realization(*r1.path, ms, inst));

    // misleading hint: still solves, just with different effort
    const Hint bad{{2, 2, 2, 2, 2}};
    const SearchResult r2 = find_path(ms, inst, &bad);
    REQUIRE(r2.success);
    CHECK(validate_realization(*r2.path, ms, inst));

    // hint lengths outside 1..p/2 are rejected
    const Hint broken{{0, 1, 1, 1, 1}};
    CHECK_THROWS_AS(find_path(ms, inst, &broken), std::invalid_argument);
}

TEST_CASE("replaying a solution as hint reaches the same path, no slower", "[solver]") {
    // The hint pins hop lengths but not directions, so the warm run can still
    // pay for doomed plus-branches — but only ones the cold run paid for too.
    const ProblemInstance inst(13);
    const HopMultiset ms = representative_multiset(FrequencyPartition({4, 4, 4}), inst);
    const SearchResult cold = find_path(ms, inst);
    REQUIRE(cold.success);
    const Hint hint{*cold.hop_permutation};
    const SearchResult warm = find_path(ms, inst, &hint);
    REQUIRE(warm.success);
    CHECK(warm.backtracks <= cold.backtracks);
    CHECK(warm.path->vertices() == cold.path->vertices());

    // straight-line instance: the hint replays with zero effort
    const HopMultiset line(9, {{1, 8}});
    const Hint line_hint{std::vector<Length>(8, 1)};
    const SearchResult replay = find_path(line, ProblemInstance(9), &line_hint);
    REQUIRE(replay.success);
    CHECK(replay.backtracks == 0);
}

TEST_CASE("backtrack limit bounds the retraction count", "[solver]") {
    const ProblemInstance inst(6);
    const HopMultiset ms(6, {{1, 1}, {2, 4}});  // needs a few retractions from 0

    const SearchResult unlimited = find_path(ms, inst);
    REQUIRE(unlimited.success);
    REQUIRE(unlimited.backtracks > 0);

    SearchLimits limits;
    limits.max_backtracks = 0;
    const SearchResult strangled = find_path(ms, inst, nullptr, limits);
    CHECK_FALSE(strangled.success);
    CHECK(strangled.terminated_by == Termination::backtrack_limit);
    CHECK(strangled.backtracks == 0);

    bool solved_before_limit = false;
    for (std::int64_t budget = 0; budget <= unlimited.backtracks + 2; ++budget) {
        limits.max_backtracks = budget;
        const SearchResult r = find_path(ms, inst, nullptr, limits);
        CAPTURE(budget);
        CHECK(r.backtracks <= budget);
        if (budget >= unlimited.backtracks) {
            CHECK(r.success);
            CHECK(r.backtracks == unlimited.backtracks);
        }
        if (r.success) solved_before_limit = true;
        if (!r.success) {
            CHECK_FALSE(solved_before_limit);  // success is monotone in the budget
            CHECK(r.terminated_by == Termination::backtrack_limit);
        }
    }
}

TEST_CASE("negative backtrack limit is rejected", "[solver]") {
    SearchLimits limits;
    limits.max_backtracks = -1;
    CHECK_THROWS_AS(find_path(HopMultiset(5, {{1, 4}}), ProblemInstance(5), nullptr, limits),
                    std::invalid_argument);
}

TEST_CASE("time limit interrupts a long march", "[solver]") {
    // long enough that the periodic deadline check fires before completion
    const std::int32_t p = 20000;
    const ProblemInstance inst(p);
    const HopMultiset ms(p, {{1, p - 1}});

    SearchLimits limits;
    limits.time_limit_seconds = 0.0;
    const SearchResult cut = find_path(ms, inst, nullptr, limits);
    CHECK_FALSE(cut.success);
    CHECK(cut.terminated_by == Termination::time_limit);

    const SearchResult full = find_path(ms, inst);
    CHECK(full.success);
}

TEST_CASE("oracle rejects instances beyond its bound", "[solver]") {
    const ProblemInstance inst(11);
    CHECK_THROWS_AS(oracle_find_path(HopMultiset(11, {{1, 10}}), inst), std::out_of_range);
    CHECK_NOTHROW(oracle_find_path(HopMultiset(11, {{1, 10}}), inst, 11));
}

TEST_CASE("solver rejects modulus mismatches", "[solver]") {
    CHECK_THROWS_AS(find_path(HopMultiset(5, {{1, 4}}), ProblemInstance(6)),
                    std::invalid_argument);
}

TEST_CASE("every reported success is a real realization", "[solver][property]") {
    for (std::int32_t p = 4; p <= 10; ++p) {
        const ProblemInstance inst(p);
        MultisetStream stream = enumerate_multisets(inst, MultisetFilter::divisor_condition);
        while (auto ms = stream.next()) {
            const SearchResult r = find_path(*ms, inst);
            CAPTURE(p, ms->entries());
            REQUIRE(r.success);  // the conjecture holds in this range
            CHECK(validate_realization(*r.path, *ms, inst));
            REQUIRE(r.hop_permutation.has_value());
            CHECK(HopMultiset::from_lengths(p, *r.hop_permutation) == *ms);
        }
    }
}
