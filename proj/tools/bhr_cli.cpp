// Command-line front end: verify / evolve / count / oracle-check.
//
// Exit codes: 0 every attempted item solved, 2 some item definitively
// unsolvable (search space exhausted), 3 limit-terminated or interrupted
// items remain (rerun with higher limits or --resume), 4 usage or I/O error.

#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bhr/core.hpp"
#include "bhr/harness.hpp"
#include "bhr/inductive.hpp"
#include "bhr/partitions.hpp"
#include "bhr/solver.hpp"

namespace {

std::atomic<bool> g_interrupt{false};

void on_signal(int) { g_interrupt.store(true); }

struct VerifyArgs {
    std::int32_t p = 0;
    std::string mode = "fp";
    std::int32_t jobs = 1;
    std::optional<std::int64_t> max_backtracks;
    std::optional<double> time_limit;
    std::string resume_path;
    std::string out_path;
    bool no_hints = false;
    bool no_symmetry = false;
    std::optional<std::uint64_t> stop_after;  // mainly for checkpoint testing
    std::uint64_t checkpoint_interval = 1000;
};

struct EvolveArgs {
    std::int32_t start_p = 0;
    std::int32_t iterations = 1;
    std::string scenario = "auto";
    std::string policy = "smallest";
    std::vector<std::int32_t> start_fp;
    std::string out_path;
    std::optional<std::int64_t> max_backtracks;
    std::optional<double> time_limit;
};

// Keep only the first n lines of a records file. A resumed run appends
// starting at checkpoint.completed_through + 1, so any tail written after
// the checkpoint (e.g. a hard kill) must go first.
void trim_records_file(const std::filesystem::path& path, std::uint64_t lines_to_keep) {
    if (!std::filesystem::exists(path)) return;
    std::ifstream in(path);
    std::ostringstream kept;
    std::string line;
    std::uint64_t n = 0;
    while (n < lines_to_keep && std::getline(in, line)) {
        kept << line << "\n";
        ++n;
    }
    const bool more = static_cast<bool>(std::getline(in, line));
    in.close();
    if (n < lines_to_keep)
        std::cerr << "warning: " << path.string() << " has " << n << " records, checkpoint expects "
                  << lines_to_keep << "; resuming anyway\n";
    if (!more && n <= lines_to_keep) return;  // nothing to trim
    std::ofstream out(path, std::ios::trunc);
    out << kept.str();
}

int run_verify(const VerifyArgs& args) {
    const auto mode = bhr::parse_run_mode(args.mode);
    if (!mode || *mode == bhr::RunMode::evolve) {
        std::cerr << "error: invalid --mode '" << args.mode
                  << "' (expected fp, all-multisets, or coprime)\n";
        return 4;
    }
    const bhr::ProblemInstance inst(args.p);

    bhr::VerifyOptions opt;
    opt.mode = *mode;
    opt.jobs = args.jobs;
    opt.hints = !args.no_hints;
    opt.symmetry = !args.no_symmetry;
    opt.limits.max_backtracks = args.max_backtracks;
    opt.limits.time_limit_seconds = args.time_limit;
    opt.stop_after_items = args.stop_after;
    opt.checkpoint_interval = args.checkpoint_interval;
    opt.interrupt = &g_interrupt;
    opt.human_log = &std::cout;
    if (args.jobs > 1 && !args.no_hints)
        std::cerr << "note: hints are disabled with --jobs > 1 (hint chaining is sequential)\n";

    std::optional<bhr::Checkpoint> resume;
    if (!args.resume_path.empty()) {
        opt.checkpoint_path = args.resume_path;
        if (std::filesystem::exists(args.resume_path)) {
            resume = bhr::Checkpoint::load(args.resume_path);
            if (!args.out_path.empty())
                trim_records_file(args.out_path,
                                  static_cast<std::uint64_t>(resume->completed_through + 1));
        }
    }

    std::ofstream records;
    if (!args.out_path.empty()) {
        records.open(args.out_path, resume ? std::ios::app : std::ios::trunc);
        if (!records) {
            std::cerr << "error: cannot open " << args.out_path << " for writing\n";
            return 4;
        }
        opt.records_out = &records;
    }

    const bhr::VerifySummary summary = bhr::verify_all(inst, opt, resume);

    if (!summary.finished) return 3;
    if (summary.exhausted > 0) return 2;
    if (summary.limit_terminated > 0) return 3;
    return 0;
}

int run_evolve(const EvolveArgs& args) {
    bhr::EvolveRunOptions opt;
    opt.iterations = args.iterations;
    if (args.scenario == "auto")
        opt.schedule = bhr::ScenarioSchedule::automatic;
    else if (args.scenario == "I")
        opt.schedule = bhr::ScenarioSchedule::always_I;
    else if (args.scenario == "II")
        opt.schedule = bhr::ScenarioSchedule::always_II;
    else if (args.scenario == "alternate")
        opt.schedule = bhr::ScenarioSchedule::alternate;
    else {
        std::cerr << "error: invalid --scenario '" << args.scenario
                  << "' (expected auto, I, II, or alternate)\n";
        return 4;
    }
    if (args.policy == "smallest")
        opt.step.policy = bhr::SelectionPolicy::smallest_admissible;
    else if (args.policy == "largest")
        opt.step.policy = bhr::SelectionPolicy::largest_admissible;
    else {
        std::cerr << "error: invalid --policy '" << args.policy
                  << "' (expected smallest or largest)\n";
        return 4;
    }
    opt.step.limits.max_backtracks = args.max_backtracks;
    opt.step.limits.time_limit_seconds = args.time_limit;
    if (!args.start_fp.empty()) opt.start_fp = args.start_fp;
    opt.human_log = &std::cout;

    std::ofstream records;
    if (!args.out_path.empty()) {
        records.open(args.out_path, std::ios::trunc);
        if (!records) {
            std::cerr << "error: cannot open " << args.out_path << " for writing\n";
            return 4;
        }
        opt.records_out = &records;
    }

    try {
        const bhr::EvolveRunResult result = bhr::run_evolution(args.start_p, opt);
        if (result.all_success) return 0;
        return result.steps.back().result.terminated_by == bhr::Termination::exhausted ? 2 : 3;
    } catch (const bhr::StartingStateUnsolvable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const bhr::NoAdmissibleTarget& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_count(std::int32_t p, const std::string& mode_name) {
    const auto mode = bhr::parse_run_mode(mode_name);
    if (!mode || *mode == bhr::RunMode::evolve) {
        std::cerr << "error: invalid --mode '" << mode_name
                  << "' (expected fp, all-multisets, or coprime)\n";
        return 4;
    }
    const bhr::ProblemInstance inst(p);
    const bhr::CountReport report = bhr::count_items(inst, *mode);
    if (report.divisor_ok)
        std::cout << "p=" << p << " mode=" << mode_name << " generated=" << report.generated
                  << " divisor_ok=" << *report.divisor_ok << "\n";
    else
        std::cout << "p=" << p << " mode=" << mode_name << " count=" << report.generated << "\n";
    return 0;
}

int run_oracle_check(std::int32_t min_p, std::int32_t max_p) {
    const auto reports = bhr::oracle_check(min_p, max_p);
    std::uint64_t bad = 0;
    for (const auto& r : reports) {
        std::cout << "p=" << r.p << " multisets=" << r.multisets
                  << " disagreements=" << r.disagreements << "\n";
        bad += r.disagreements;
    }
    std::cout << (bad == 0 ? "oracle-check: OK" : "oracle-check: MISMATCH") << "\n";
    return bad == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    CLI::App app{"BHR conjecture search: batch verification and inductive evolution"};
    app.require_subcommand(1);

    VerifyArgs vargs;
    CLI::App* verify = app.add_subcommand("verify", "Realize every admissible multiset for one p");
    verify->add_option("--p", vargs.p, "Number of vertices")->required();
    verify->add_option("--mode", vargs.mode, "fp | all-multisets | coprime")
        ->default_val("fp");
    verify->add_option("--jobs", vargs.jobs, "Worker threads")->default_val(1);
    verify->add_option("--max-backtracks", vargs.max_backtracks, "Per-item backtrack budget");
    verify->add_option("--time-limit", vargs.time_limit, "Per-item time budget (seconds)");
    verify->add_option("--resume", vargs.resume_path,
                       "Checkpoint file: resume from it if present, write checkpoints to it");
    verify->add_option("--out", vargs.out_path, "Results file (JSON, one record per line)");
    verify->add_flag("--no-hints", vargs.no_hints, "Disable hop-permutation hint chaining");
    verify->add_flag("--no-symmetry", vargs.no_symmetry, "Disable reflection symmetry reduction");
    verify->add_option("--stop-after", vargs.stop_after,
                       "Stop (as if interrupted) after this many items");
    verify->add_option("--checkpoint-interval", vargs.checkpoint_interval,
                       "Items between checkpoint writes")
        ->default_val(1000);

    EvolveArgs eargs;
    CLI::App* evolve = app.add_subcommand("evolve", "Grow a solved instance one vertex at a time");
    evolve->add_option("--start-p", eargs.start_p, "Starting number of vertices")->required();
    evolve->add_option("--iterations", eargs.iterations, "Evolution steps")->required();
    evolve->add_option("--scenario", eargs.scenario, "auto | I | II | alternate")
        ->default_val("auto");
    evolve->add_option("--policy", eargs.policy, "smallest | largest (admissible target choice)")
        ->default_val("smallest");
    evolve->add_option("--start-fp", eargs.start_fp,
                       "Starting frequency partition (default: most balanced)");
    evolve->add_option("--out", eargs.out_path, "Results file (JSON, one record per line)");
    evolve->add_option("--max-backtracks", eargs.max_backtracks, "Per-step backtrack budget");
    evolve->add_option("--time-limit", eargs.time_limit, "Per-step time budget (seconds)");

    std::int32_t count_p = 0;
    std::string count_mode = "fp";
    CLI::App* count = app.add_subcommand("count", "Count enumeration items without solving");
    count->add_option("--p", count_p, "Number of vertices")->required();
    count->add_option("--mode", count_mode, "fp | all-multisets | coprime")->default_val("fp");

    std::int32_t ocheck_min = 4;
    std::int32_t ocheck_max = 8;
    CLI::App* ocheck =
        app.add_subcommand("oracle-check", "Compare solver against brute-force oracle");
    ocheck->add_option("--min-p", ocheck_min, "Smallest p to sweep")->default_val(4);
    ocheck->add_option("--max-p", ocheck_max, "Largest p to sweep")->default_val(8);

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return run_verify(vargs);
        if (evolve->parsed()) return run_evolve(eargs);
        if (count->parsed()) return run_count(count_p, count_mode);
        if (ocheck->parsed()) return run_oracle_check(ocheck_min, ocheck_max);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 4;
}
