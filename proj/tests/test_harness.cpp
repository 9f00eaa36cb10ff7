#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhr/harness.hpp"

using namespace bhr;
using nlohmann::json;

namespace {

std::chrono::system_clock::time_point at_seconds(std::time_t s) {
    return std::chrono::system_clock::from_time_t(s);
}

RunRecord sample_success_record() {
    return RunRecord{6,
                     RunMode::fp,
                     3,
                     FrequencyPartition({4, 1}),
                     HopMultiset(6, {{1, 4}, {2, 1}}),
                     true,
                     0,
                     0.0042,
                     "backtrack",
                     Termination::solved,
                     at_seconds(7 * 3600 + 9 * 60 + 57),
                     HamiltonianPath({0, 5, 1, 2, 3, 4}),
                     std::vector<Length>{1, 2, 1, 1, 1}};
}

std::vector<json> parse_records(const std::string& jsonl) {
    std::vector<json> out;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

std::filesystem::path temp_file(const std::string& name) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove(path);
    return path;
}

// the fields that must be identical across job counts and resume splits
json stable_view(const json& record) {
    json out;
    for (const char* key :
         {"schema_version", "p", "mode", "item_index", "fp", "target", "success", "backtracks",
          "method_used", "terminated_by", "path", "hop_permutation"})
        out[key] = record.at(key);
    return out;
}

}  // namespace

TEST_CASE("elapsed-time formatting truncates to hundredths", "[harness]") {
    CHECK(format_elapsed(0.0) == "0.00");
    CHECK(format_elapsed(0.034) == "0.03");
    CHECK(format_elapsed(0.039) == "0.03");
    CHECK(format_elapsed(1.999) == "1.99");
    CHECK(format_elapsed(12.3456) == "12.34");
    CHECK(format_elapsed(-0.5) == "0.00");
}

TEST_CASE("tuple, list and counter formatting", "[harness]") {
    CHECK(format_fp_tuple(FrequencyPartition({30})) == "(30,)");
    CHECK(format_fp_tuple(FrequencyPartition({29, 1})) == "(29, 1)");
    CHECK(format_fp_tuple(FrequencyPartition({2, 2, 1})) == "(2, 2, 1)");
    CHECK(format_list(std::vector<std::int32_t>{0, 5, 1}) == "[0, 5, 1]");
    CHECK(format_list(std::vector<std::int32_t>{7}) == "[7]");
    CHECK(format_multiset(HopMultiset(6, {{2, 1}, {1, 4}})) == "{1: 4, 2: 1}");
    CHECK(format_counter(HopMultiset(8, {{1, 4}, {2, 2}, {3, 1}})) ==
          "Counter({1: 4, 2: 2, 3: 1})");
    // descending count, ties broken by ascending length
    CHECK(format_counter(HopMultiset(6, {{3, 2}, {2, 1}, {1, 2}})) ==
          "Counter({1: 2, 3: 2, 2: 1})");
}

TEST_CASE("clock and timestamp formatting", "[harness]") {
    CHECK(format_clock(at_seconds(0)) == "[00:00:00]");
    CHECK(format_clock(at_seconds(7 * 3600 + 9 * 60 + 57)) == "[07:09:57]");
    CHECK(format_iso8601(at_seconds(0)) == "1970-01-01T00:00:00Z");
    CHECK(format_iso8601(at_seconds(86399)) == "1970-01-01T23:59:59Z");
}

TEST_CASE("run mode names", "[harness]") {
    CHECK(std::string(to_string(RunMode::fp)) == "fp");
    CHECK(std::string(to_string(RunMode::all_multisets)) == "all-multisets");
    CHECK(std::string(to_string(RunMode::coprime)) == "coprime");
    CHECK(parse_run_mode("fp") == RunMode::fp);
    CHECK(parse_run_mode("all-multisets") == RunMode::all_multisets);
    CHECK(parse_run_mode("coprime") == RunMode::coprime);
    CHECK(parse_run_mode("evolve") == RunMode::evolve);
    CHECK_FALSE(parse_run_mode("everything").has_value());
}

TEST_CASE("log line for a solved item", "[harness]") {
    CHECK(emit_log_line(sample_success_record()) ==
          "[07:09:57] Path found for FP=(4, 1) in 0.00s with 0 backtracks\n"
          "Permutation: [1, 2, 1, 1, 1]\n"
          "Path: [0, 5, 1, 2, 3, 4]");
}

TEST_CASE("log line for failures and multiset-labeled items", "[harness]") {
    RunRecord failed = sample_success_record();
    failed.success = false;
    failed.backtracks = 12;
    failed.terminated_by = Termination::exhausted;
    failed.fp = FrequencyPartition({2, 2, 1});
    CHECK(emit_log_line(failed) == "[07:09:57] FAILED FP=(2, 2, 1) after 12 backtracks (exhausted)");

    failed.terminated_by = Termination::backtrack_limit;
    failed.fp.reset();
    CHECK(emit_log_line(failed) ==
          "[07:09:57] FAILED L={1: 4, 2: 1} after 12 backtracks (backtrack-limit)");
}

TEST_CASE("record serialization", "[harness]") {
    const json j = json::parse(record_to_json(sample_success_record()).dump());
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("p") == 6);
    CHECK(j.at("mode") == "fp");
    CHECK(j.at("item_index") == 3);
    CHECK(j.at("fp") == json::array({4, 1}));
    CHECK(j.at("target") == json({{"1", 4}, {"2", 1}}));
    CHECK(j.at("success") == true);
    CHECK(j.at("backtracks") == 0);
    CHECK(j.at("elapsed_seconds") == 0.0042);
    CHECK(j.at("method_used") == "backtrack");
    CHECK(j.at("terminated_by") == "solved");
    CHECK(j.at("timestamp") == "1970-01-01T07:09:57Z");
    CHECK(j.at("path") == json::array({0, 5, 1, 2, 3, 4}));
    CHECK(j.at("hop_permutation") == json::array({1, 2, 1, 1, 1}));

    RunRecord anon = sample_success_record();
    anon.fp.reset();
    anon.path.reset();
    anon.hop_permutation.reset();
    const json j2 = json::parse(record_to_json(anon).dump());
    CHECK(j2.at("fp").is_null());
    CHECK(j2.at("path").is_null());
    CHECK(j2.at("hop_permutation").is_null());
}

TEST_CASE("checkpoint roundtrip", "[harness]") {
    Checkpoint c;
    c.p = 16;
    c.mode = "all-multisets";
    c.completed_through = 999;
    c.solved = 990;
    c.exhausted = 4;
    c.limit_terminated = 6;
    c.max_backtracks_seen = 123456;
    c.hint = std::vector<Length>{1, 2, 3};
    c.hints_enabled = false;
    c.symmetry_enabled = true;

    const auto path = temp_file("bhr_test_checkpoint.json");
    c.save(path);
    const Checkpoint back = Checkpoint::load(path);
    CHECK(back.p == 16);
    CHECK(back.mode == "all-multisets");
    CHECK(back.completed_through == 999);
    CHECK(back.solved == 990);
    CHECK(back.exhausted == 4);
    CHECK(back.limit_terminated == 6);
    CHECK(back.max_backtracks_seen == 123456);
    CHECK(back.hint == std::vector<Length>{1, 2, 3});
    CHECK_FALSE(back.hints_enabled);
    CHECK(back.symmetry_enabled);
    std::filesystem::remove(path);

    json bad = c.to_json();
    bad["format_version"] = 99;
    CHECK_THROWS_AS(Checkpoint::from_json(bad), std::runtime_error);
}

TEST_CASE("item source enumerates fp items with representatives", "[harness]") {
    const ProblemInstance inst(8);
    ItemSource source(inst, RunMode::fp);
    FpStream fps = generate_fps(inst);
    std::uint64_t index = 0;
    while (auto fp = fps.next()) {
        auto item = source.next();
        REQUIRE(item.has_value());
        CHECK(item->index == index++);
        REQUIRE(item->fp.has_value());
        CHECK(*item->fp == *fp);
        CHECK(item->target == representative_multiset(*fp, inst));
    }
    CHECK_FALSE(source.next().has_value());

    ItemSource skipper(inst, RunMode::fp);
    skipper.skip_to(3);
    auto item = skipper.next();
    REQUIRE(item.has_value());
    CHECK(item->index == 3);
    CHECK_THROWS_AS(skipper.skip_to(1), std::logic_error);
    CHECK_THROWS_AS(ItemSource(inst, RunMode::evolve), std::invalid_argument);
}

TEST_CASE("count reports", "[harness]") {
    const CountReport fp31 = count_items(ProblemInstance(31), RunMode::fp);
    CHECK(fp31.generated == 5096);
    CHECK_FALSE(fp31.divisor_ok.has_value());

    const CountReport all8 = count_items(ProblemInstance(8), RunMode::all_multisets);
    CHECK(all8.generated == 120);
    CHECK(all8.divisor_ok == 105);

    const CountReport cop30 = count_items(ProblemInstance(30), RunMode::coprime);
    CHECK(cop30.generated == 4960);

    CHECK(total_items(ProblemInstance(8), RunMode::all_multisets) == 105);
    CHECK(total_items(ProblemInstance(8), RunMode::fp) == 11);
}

TEST_CASE("sequential verify solves everything for a small p", "[harness]") {
    const ProblemInstance inst(7);
    std::ostringstream log, records;
    VerifyOptions opt;
    opt.human_log = &log;
    opt.records_out = &records;

    const VerifySummary summary = verify_all(inst, opt);
    CHECK(summary.total == 7);
    CHECK(summary.solved == 7);
    CHECK(summary.exhausted == 0);
    CHECK(summary.limit_terminated == 0);
    CHECK(summary.finished);
    CHECK(summary.completed_through == 6);

    const auto lines = parse_records(records.str());
    REQUIRE(lines.size() == 7);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        CHECK(lines[i].at("item_index") == i);
        CHECK(lines[i].at("p") == 7);
        CHECK(lines[i].at("mode") == "fp");
        CHECK(lines[i].at("success") == true);
        CHECK(lines[i].at("terminated_by") == "solved");
        CHECK(lines[i].at("path").is_array());
    }
    CHECK(lines.front().at("fp") == json::array({6}));

    CHECK(log.str().find("Starting search for p=7, total 7 FPs") != std::string::npos);
    CHECK(log.str().find("Total FPs fixed: 7 / 7") != std::string::npos);
    CHECK(log.str().find("Path found for FP=(6,)") != std::string::npos);
}

TEST_CASE("verify in all-multisets mode attempts only admissible items", "[harness]") {
    const ProblemInstance inst(6);
    std::ostringstream records;
    VerifyOptions opt;
    opt.mode = RunMode::all_multisets;
    opt.records_out = &records;

    const VerifySummary summary = verify_all(inst, opt);
    CHECK(summary.total == 17);
    CHECK(summary.solved == 17);
    CHECK(summary.finished);
    CHECK(parse_records(records.str()).size() == 17);
}

TEST_CASE("parallel verify writes records in item order", "[harness]") {
    const ProblemInstance inst(8);
    std::ostringstream seq_records, par_records;

    VerifyOptions seq;
    seq.mode = RunMode::all_multisets;
    seq.hints = false;  // hint chaining would make sequential results order-dependent
    seq.records_out = &seq_records;
    const VerifySummary s1 = verify_all(inst, seq);

    VerifyOptions par = seq;
    par.jobs = 3;
    par.records_out = &par_records;
    const VerifySummary s2 = verify_all(inst, par);

    CHECK(s1.total == 105);
    CHECK(s2.total == 105);
    CHECK(s1.solved == s2.solved);
    CHECK(s2.finished);

    const auto a = parse_records(seq_records.str());
    const auto b = parse_records(par_records.str());
    REQUIRE(a.size() == 105);
    REQUIRE(b.size() == 105);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i].at("item_index") == i);
        CHECK(stable_view(a[i]) == stable_view(b[i]));
    }
}

TEST_CASE("checkpointed run resumes into identical records", "[harness]") {
    const ProblemInstance inst(10);
    const auto ckpt = temp_file("bhr_test_resume.json");

    std::ostringstream full_records;
    VerifyOptions base;
    base.mode = RunMode::fp;
    base.checkpoint_interval = 2;

    VerifyOptions full = base;
    full.records_out = &full_records;
    const VerifySummary whole = verify_all(inst, full);
    REQUIRE(whole.finished);
    REQUIRE(whole.total > 6);

    std::ostringstream part1;
    VerifyOptions first = base;
    first.records_out = &part1;
    first.checkpoint_path = ckpt;
    first.stop_after_items = 5;
    const VerifySummary s1 = verify_all(inst, first);
    CHECK_FALSE(s1.finished);
    CHECK(s1.completed_through == 4);
    REQUIRE(std::filesystem::exists(ckpt));

    const Checkpoint loaded = Checkpoint::load(ckpt);
    CHECK(loaded.completed_through == 4);
    CHECK(loaded.mode == "fp");

    std::ostringstream part2;
    VerifyOptions second = base;
    second.records_out = &part2;
    second.checkpoint_path = ckpt;
    const VerifySummary s2 = verify_all(inst, second, loaded);
    CHECK(s2.finished);
    CHECK(s2.solved == whole.solved);
    CHECK(s2.total == whole.total);

    const auto expected = parse_records(full_records.str());
    const auto joined = parse_records(part1.str() + part2.str());
    REQUIRE(joined.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(stable_view(joined[i]) == stable_view(expected[i]));

    std::filesystem::remove(ckpt);
}

TEST_CASE("resume validates the checkpoint against the run configuration", "[harness]") {
    Checkpoint c;
    c.p = 9;
    c.mode = "fp";
    c.completed_through = 2;
    c.hints_enabled = true;
    c.symmetry_enabled = true;

    VerifyOptions opt;  // matches c
    CHECK_THROWS_AS(verify_all(ProblemInstance(10), opt, c), std::invalid_argument);

    VerifyOptions wrong_mode;
    wrong_mode.mode = RunMode::all_multisets;
    CHECK_THROWS_AS(verify_all(ProblemInstance(9), wrong_mode, c), std::invalid_argument);

    VerifyOptions no_hints;
    no_hints.hints = false;
    CHECK_THROWS_AS(verify_all(ProblemInstance(9), no_hints, c), std::invalid_argument);

    CHECK_NOTHROW(verify_all(ProblemInstance(9), opt, c));
}

TEST_CASE("a pre-set interrupt flag stops the run before any item", "[harness]") {
    std::atomic<bool> stop{true};
    VerifyOptions opt;
    opt.interrupt = &stop;
    const VerifySummary s = verify_all(ProblemInstance(12), opt);
    CHECK_FALSE(s.finished);
    CHECK(s.completed_through == -1);
    CHECK(s.solved == 0);
}

TEST_CASE("balanced partition", "[harness]") {
    CHECK(balanced_partition(ProblemInstance(30)).parts() ==
          std::vector<std::int32_t>{2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 1});
    CHECK(balanced_partition(ProblemInstance(31)).parts() == std::vector<std::int32_t>(15, 2));
    CHECK(balanced_partition(ProblemInstance(5)).parts() == std::vector<std::int32_t>{2, 2});
    CHECK(balanced_partition(ProblemInstance(2)).parts() == std::vector<std::int32_t>{1});

    // it is exactly the final element of the fp stream
    FpStream stream = generate_fps(ProblemInstance(16));
    FrequencyPartition last({1});
    while (auto fp = stream.next()) last = *fp;
    CHECK(balanced_partition(ProblemInstance(16)) == last);
}

TEST_CASE("evolution run grows to the requested size", "[harness]") {
    std::ostringstream log, records;
    EvolveRunOptions opt;
    opt.iterations = 3;
    opt.human_log = &log;
    opt.records_out = &records;

    const EvolveRunResult result = run_evolution(5, opt);
    CHECK(result.all_success);
    REQUIRE(result.steps.size() == 3);
    CHECK(result.steps.back().p_new == 8);
    REQUIRE(result.final_state.has_value());
    CHECK(result.final_state->inst().p == 8);

    CHECK(log.str().find("=== Inductive evolution from p = 5 ===") != std::string::npos);
    CHECK(log.str().find("=== Iteration 1 ===") != std::string::npos);
    CHECK(log.str().find("Result: SUCCESS") != std::string::npos);
    CHECK(log.str().find("Summary of inductive run:") != std::string::npos);

    const auto lines = parse_records(records.str());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].at("mode") == "evolve");
    CHECK(lines[0].at("p") == 6);
    CHECK(lines[2].at("p") == 8);
    CHECK(lines[0].at("item_index") == 1);  // iteration number
}

TEST_CASE("evolution step formatting", "[harness]") {
    EvolutionStep step{9,
                       Scenario::I,
                       EvolveMethod::backtrack,
                       7,
                       FrequencyPartition({5, 1}),
                       HopMultiset(7, {{1, 5}, {2, 1}}),
                       SearchResult{true,
                                    HamiltonianPath({0, 1, 2, 3, 4, 6, 5}),
                                    std::vector<Length>{1, 1, 1, 1, 2, 1},
                                    3,
                                    0.034,
                                    Termination::solved},
                       at_seconds(20 * 3600 + 19 * 60 + 41)};
    CHECK(format_evolution_step(step) ==
          "=== Iteration 9 ===\n"
          "Timestamp: 20:19:41\n"
          "Method used: Backtrack\n"
          "p (vertices): 7\n"
          "Evolved FP: Counter({1: 5, 2: 1})\n"
          "HP: [0, 1, 2, 3, 4, 6, 5]\n"
          "HP freq: Counter({1: 5, 2: 1})\n"
          "Backtracks: 3\n"
          "Time: 0.03 sec\n"
          "Result: SUCCESS\n");

    step.result.success = false;
    step.result.path.reset();
    step.result.hop_permutation.reset();
    step.result.terminated_by = Termination::backtrack_limit;
    const std::string block = format_evolution_step(step);
    CHECK(block.find("Result: FAILURE (backtrack-limit)") != std::string::npos);
    CHECK(block.find("HP:") == std::string::npos);
}

TEST_CASE("unsolvable starting state is reported", "[harness]") {
    EvolveRunOptions opt;
    opt.iterations = 1;
    opt.step.limits.max_backtracks = 0;  // balanced start at p=6 needs retractions
    CHECK_THROWS_AS(run_evolution(6, opt), StartingStateUnsolvable);

    EvolveRunOptions bad;
    bad.iterations = 1;
    bad.start_fp = std::vector<std::int32_t>{3};  // sums to 3, not 5
    CHECK_THROWS_AS(run_evolution(6, bad), std::invalid_argument);
}

TEST_CASE("oracle sweep agrees on tiny instances", "[harness]") {
    const auto reports = oracle_check(4, 5);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].p == 4);
    CHECK(reports[0].multisets == 4);
    CHECK(reports[0].disagreements == 0);
    CHECK(reports[1].p == 5);
    CHECK(reports[1].multisets == 5);
    CHECK(reports[1].disagreements == 0);
}
