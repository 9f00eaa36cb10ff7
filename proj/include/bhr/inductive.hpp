#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bhr/core.hpp"
#include "bhr/solver.hpp"

// Evolution of a solved instance (p, L, path) to p+1 by growing the target
// multiset one element at a time:
//
//   Scenario I  — bump the multiplicity of an existing length (support fixed)
//   Scenario II — add one new length with multiplicity 1 (support grows by 1)
//
// A hop multiset is always read under its own modulus. When p increments,
// every edge length is recomputed from the vertex labels at the new p, which
// is why cheap insertion can fail: a wrap edge with raw difference p-l turns
// into length l+1 under p+1.

namespace bhr {

struct NoAdmissibleTarget : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class EvolutionState {
  public:
    EvolutionState(ProblemInstance inst, HopMultiset target, HamiltonianPath path)
        : inst_(std::move(inst)),
          target_(std::move(target)),
          path_(std::move(path)),
          fp_(fp_of_multiset(target_)) {
        if (!validate_realization(path_, target_, inst_))
            throw std::invalid_argument("EvolutionState: path does not realize target");
    }

    const ProblemInstance& inst() const { return inst_; }
    const HopMultiset& target() const { return target_; }
    const HamiltonianPath& path() const { return path_; }
    const FrequencyPartition& fp() const { return fp_; }

  private:
    ProblemInstance inst_;
    HopMultiset target_;
    HamiltonianPath path_;
    FrequencyPartition fp_;
};

enum class Scenario { I, II };

inline const char* to_string(Scenario s) { return s == Scenario::I ? "I" : "II"; }

enum class SelectionPolicy { smallest_admissible, largest_admissible };

enum class EvolveMethod { reuse_insertion, heuristic, backtrack };

inline const char* to_string(EvolveMethod m) {
    switch (m) {
        case EvolveMethod::reuse_insertion: return "reuse-insertion";
        case EvolveMethod::heuristic: return "heuristic";
        case EvolveMethod::backtrack: return "backtrack";
    }
    return "?";
}

struct EvolutionStep {
    std::int32_t iteration;
    Scenario scenario;
    EvolveMethod method_used;
    std::int32_t p_new;
    FrequencyPartition fp_new;
    HopMultiset target_new;
    SearchResult result;
    std::chrono::system_clock::time_point timestamp;
};

namespace detail {

// Candidate lengths in policy order; returns the first whose evolved multiset
// passes the divisor condition under p+1, or nullopt.
inline std::optional<HopMultiset> admissible_evolution(const EvolutionState& state,
                                                       Scenario scenario,
                                                       SelectionPolicy policy) {
    const std::int32_t p_new = state.inst().p + 1;
    const ProblemInstance inst_new(p_new);
    const HopMultiset& cur = state.target();

    std::vector<Length> candidates;
    if (scenario == Scenario::I) {
        for (const auto& e : cur.entries()) candidates.push_back(e.length);
    } else {
        for (Length l = 1; l <= inst_new.max_length; ++l)
            if (!cur.contains(l)) candidates.push_back(l);
    }
    if (policy == SelectionPolicy::largest_admissible)
        std::reverse(candidates.begin(), candidates.end());

    for (Length l : candidates) {
        std::vector<HopMultiset::Entry> entries = cur.entries();
        if (scenario == Scenario::I) {
            for (auto& e : entries)
                if (e.length == l) ++e.count;
        } else {
            entries.push_back({l, 1});
        }
        HopMultiset evolved(p_new, std::move(entries));
        if (divisor_condition(evolved, inst_new)) return evolved;
    }
    return std::nullopt;
}

}  // namespace detail

// New target of size p for modulus p+1. Scenario I keeps the support and bumps
// one multiplicity; Scenario II adds one absent length with multiplicity 1.
inline HopMultiset evolve_target(const EvolutionState& state, Scenario scenario,
                                 SelectionPolicy policy = SelectionPolicy::smallest_admissible) {
    auto evolved = detail::admissible_evolution(state, scenario, policy);
    if (!evolved)
        throw NoAdmissibleTarget(
            std::string("evolve_target: no admissible scenario-") + to_string(scenario) +
            " target at p=" + std::to_string(state.inst().p + 1));
    return *evolved;
}

// Try the new vertex label p at every insertion position of the old path
// (front, between each pair, back). Each candidate has all its hop lengths
// recomputed under p+1 and succeeds only on an exact multiset match.
// A failure is exhaustion over insertion positions, not a non-existence proof.
inline SearchResult reuse_insertion(const EvolutionState& state, const HopMultiset& target_new) {
    const auto start_time = std::chrono::steady_clock::now();
    const std::int32_t p_old = state.inst().p;
    if (target_new.p() != p_old + 1)
        throw std::invalid_argument("reuse_insertion: target must have modulus p+1");
    const ProblemInstance inst_new(p_old + 1);
    const std::vector<Vertex>& old_vertices = state.path().vertices();

    SearchResult result;
    for (std::int32_t pos = 0; pos <= p_old; ++pos) {
        std::vector<Vertex> candidate;
        candidate.reserve(old_vertices.size() + 1);
        candidate.insert(candidate.end(), old_vertices.begin(),
                         old_vertices.begin() + pos);
        candidate.push_back(p_old);
        candidate.insert(candidate.end(), old_vertices.begin() + pos, old_vertices.end());
        HamiltonianPath path(std::move(candidate));
        if (path_hop_lengths(path, inst_new) == target_new) {
            result.success = true;
            result.hop_permutation = path_hop_sequence(path, inst_new);
            result.path = std::move(path);
            result.terminated_by = Termination::solved;
            break;
        }
        ++result.backtracks;  // rejected insertion position
    }
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return result;
}

struct ScoredInsertion {
    std::int32_t position;
    std::int64_t deviation;  // L1 distance to the target multiset
};

struct HeuristicInsertionResult {
    SearchResult result;
    std::vector<ScoredInsertion> top_candidates;  // ascending deviation
};

// Score every insertion position by the L1 distance between the candidate's
// hop multiset (under p+1) and the target; succeed on the first position with
// deviation 0. On failure the best `beam` candidates are reported back for
// diagnostics.
inline HeuristicInsertionResult heuristic_insertion(const EvolutionState& state,
                                                    const HopMultiset& target_new,
                                                    std::int32_t beam = 5) {
    const auto start_time = std::chrono::steady_clock::now();
    if (beam < 1) throw std::invalid_argument("heuristic_insertion: beam must be >= 1");
    const std::int32_t p_old = state.inst().p;
    if (target_new.p() != p_old + 1)
        throw std::invalid_argument("heuristic_insertion: target must have modulus p+1");
    const ProblemInstance inst_new(p_old + 1);
    const std::vector<Vertex>& old_vertices = state.path().vertices();
    const std::vector<std::int32_t> want = target_new.dense_counts();

    HeuristicInsertionResult out;
    std::vector<ScoredInsertion> scored;
    for (std::int32_t pos = 0; pos <= p_old; ++pos) {
        std::vector<Vertex> candidate;
        candidate.reserve(old_vertices.size() + 1);
        candidate.insert(candidate.end(), old_vertices.begin(),
                         old_vertices.begin() + pos);
        candidate.push_back(p_old);
        candidate.insert(candidate.end(), old_vertices.begin() + pos, old_vertices.end());
        HamiltonianPath path(std::move(candidate));

        std::vector<std::int32_t> got(want.size(), 0);
        const auto& v = path.vertices();
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            ++got[static_cast<std::size_t>(cyclic_length(v[i], v[i + 1], inst_new))];
        std::int64_t deviation = 0;
        for (std::size_t l = 1; l < want.size(); ++l)
            deviation += std::abs(static_cast<std::int64_t>(got[l]) - want[l]);

        if (deviation == 0) {
            out.result.success = true;
            out.result.hop_permutation = path_hop_sequence(path, inst_new);
            out.result.path = std::move(path);
            out.result.terminated_by = Termination::solved;
            break;
        }
        ++out.result.backtracks;
        scored.push_back({pos, deviation});
    }
    if (!out.result.success) {
        std::stable_sort(scored.begin(), scored.end(),
                         [](const ScoredInsertion& a, const ScoredInsertion& b) {
                             return a.deviation < b.deviation;
                         });
        if (static_cast<std::int32_t>(scored.size()) > beam)
            scored.resize(static_cast<std::size_t>(beam));
        out.top_candidates = std::move(scored);
    }
    out.result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return out;
}

struct EvolveOptions {
    SelectionPolicy policy = SelectionPolicy::smallest_admissible;
    SearchLimits limits;
    bool heuristic_in_scenario_I = false;  // the cheap reuse pass runs in both scenarios
    std::int32_t beam = 5;
};

// One evolution step: pick the new target, then try reuse-insertion,
// heuristic-scored insertion (Scenario II unless configured otherwise), and
// finally the backtracking solver seeded with the old hop permutation as a
// hint. On failure the input state is returned unchanged.
inline std::pair<EvolutionState, EvolutionStep> evolve_step(const EvolutionState& state,
                                                            Scenario scenario,
                                                            const EvolveOptions& options = {},
                                                            std::int32_t iteration = 1) {
    HopMultiset target_new = evolve_target(state, scenario, options.policy);
    const std::int32_t p_new = state.inst().p + 1;
    const ProblemInstance inst_new(p_new);

    EvolveMethod method = EvolveMethod::reuse_insertion;
    SearchResult result = reuse_insertion(state, target_new);
    if (!result.success && (scenario == Scenario::II || options.heuristic_in_scenario_I)) {
        method = EvolveMethod::heuristic;
        result = heuristic_insertion(state, target_new, options.beam).result;
    }
    if (!result.success) {
        method = EvolveMethod::backtrack;
        Hint hint{path_hop_sequence(state.path(), state.inst())};
        result = find_path(target_new, inst_new, &hint, options.limits);
    }

    EvolutionStep step{iteration,
                       scenario,
                       method,
                       p_new,
                       fp_of_multiset(target_new),
                       target_new,
                       result,
                       std::chrono::system_clock::now()};
    if (!result.success) return {state, std::move(step)};

    EvolutionState next(inst_new, std::move(target_new), *step.result.path);
    return {std::move(next), std::move(step)};
}

enum class ScenarioSchedule { automatic, always_I, always_II, alternate };

inline const char* to_string(ScenarioSchedule s) {
    switch (s) {
        case ScenarioSchedule::automatic: return "auto";
        case ScenarioSchedule::always_I: return "I";
        case ScenarioSchedule::always_II: return "II";
        case ScenarioSchedule::alternate: return "alternate";
    }
    return "?";
}

// Scenario for a given 1-based iteration. `automatic` prefers Scenario II
// whenever an admissible absent length exists, falling back to Scenario I;
// `alternate` runs I on odd iterations and II on even ones.
inline Scenario pick_scenario(const EvolutionState& state, ScenarioSchedule schedule,
                              std::int32_t iteration, SelectionPolicy policy) {
    switch (schedule) {
        case ScenarioSchedule::always_I: return Scenario::I;
        case ScenarioSchedule::always_II: return Scenario::II;
        case ScenarioSchedule::alternate:
            return iteration % 2 == 1 ? Scenario::I : Scenario::II;
        case ScenarioSchedule::automatic:
            return detail::admissible_evolution(state, Scenario::II, policy).has_value()
                       ? Scenario::II
                       : Scenario::I;
    }
    return Scenario::I;
}

// Repeated evolve_step; stops early on the first failed step. Step records for
// every attempted iteration (including a trailing failure) are returned.
inline std::vector<EvolutionStep> evolve_chain(EvolutionState state, std::int32_t iterations,
                                               ScenarioSchedule schedule = ScenarioSchedule::automatic,
                                               const EvolveOptions& options = {}) {
    std::vector<EvolutionStep> steps;
    for (std::int32_t it = 1; it <= iterations; ++it) {
        const Scenario scenario = pick_scenario(state, schedule, it, options.policy);
        auto [next, step] = evolve_step(state, scenario, options, it);
        const bool ok = step.result.success;
        steps.push_back(std::move(step));
        if (!ok) break;
        state = std::move(next);
    }
    return steps;
}

}  // namespace bhr
