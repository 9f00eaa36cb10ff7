#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bhr/core.hpp"
#include "bhr/inductive.hpp"
#include "bhr/partitions.hpp"
#include "bhr/solver.hpp"

// Batch orchestration: enumerate items for a modulus, realize each one with
// the solver, and stream results out as a human-readable log plus
// line-delimited JSON records. Long runs checkpoint every N items and on
// interrupt, and resume from the checkpoint with identical records.
//
// Concurrency: a coordinator hands out item-index ranges; each worker owns a
// private solver and a private stream positioned by skip-count. Completed
// records are folded back in index order by a single writer, so record files
// are deterministic for any job count (timestamps and elapsed aside).

namespace bhr {

enum class RunMode { fp, all_multisets, coprime, evolve };

inline const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::fp: return "fp";
        case RunMode::all_multisets: return "all-multisets";
        case RunMode::coprime: return "coprime";
        case RunMode::evolve: return "evolve";
    }
    return "?";
}

inline std::optional<RunMode> parse_run_mode(const std::string& s) {
    if (s == "fp") return RunMode::fp;
    if (s == "all-multisets") return RunMode::all_multisets;
    if (s == "coprime") return RunMode::coprime;
    if (s == "evolve") return RunMode::evolve;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// formatting

// Two decimals, truncated toward zero: 0.034 -> "0.03".
inline std::string format_elapsed(double seconds) {
    if (seconds < 0) seconds = 0;
    const auto hundredths = static_cast<long long>(seconds * 100.0);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%lld.%02lld", hundredths / 100, hundredths % 100);
    return buf;
}

// Python tuple style: (30,) for one part, (29, 1) otherwise.
inline std::string format_fp_tuple(const FrequencyPartition& fp) {
    std::string out = "(";
    for (std::size_t i = 0; i < fp.parts().size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(fp.parts()[i]);
    }
    if (fp.parts().size() == 1) out += ",";
    out += ")";
    return out;
}

template <typename T>
std::string format_list(const std::vector<T>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(values[i]);
    }
    out += "]";
    return out;
}

// "{1: 2, 2: 1}", ascending by length.
inline std::string format_multiset(const HopMultiset& ms) {
    std::string out = "{";
    for (std::size_t i = 0; i < ms.entries().size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(ms.entries()[i].length) + ": " +
               std::to_string(ms.entries()[i].count);
    }
    out += "}";
    return out;
}

// Counter repr: entries by descending count, ties by ascending length.
inline std::string format_counter(const HopMultiset& ms) {
    std::vector<HopMultiset::Entry> entries = ms.entries();
    std::stable_sort(entries.begin(), entries.end(),
                     [](const HopMultiset::Entry& a, const HopMultiset::Entry& b) {
                         return a.count > b.count;
                     });
    std::string out = "Counter({";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(entries[i].length) + ": " + std::to_string(entries[i].count);
    }
    out += "})";
    return out;
}

inline std::tm utc_tm(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return tm;
}

// "[HH:MM:SS]" wall-clock, UTC.
inline std::string format_clock(std::chrono::system_clock::time_point tp) {
    const std::tm tm = utc_tm(tp);
    char buf[48];
    std::snprintf(buf, sizeof buf, "[%02d:%02d:%02d]", tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

inline std::string format_iso8601(std::chrono::system_clock::time_point tp) {
    const std::tm tm = utc_tm(tp);
    char buf[80];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

// ---------------------------------------------------------------------------
// records

struct RunRecord {
    std::int32_t p;
    RunMode mode;
    std::uint64_t item_index;
    std::optional<FrequencyPartition> fp;
    HopMultiset target;
    bool success;
    std::int64_t backtracks;
    double elapsed_seconds;
    std::string method_used;
    Termination terminated_by;
    std::chrono::system_clock::time_point timestamp;
    std::optional<HamiltonianPath> path;  // realization certificate, when found
    std::optional<std::vector<Length>> hop_permutation;
};

// Human log entry in the verification-log format. Success:
//   [HH:MM:SS] Path found for FP=(30,) in 0.00s with 0 backtracks
//   Permutation: [...]
//   Path: [...]
// Failure:
//   [HH:MM:SS] FAILED FP=(...) after N backtracks (exhausted)
// Items without an FP (multiset modes) are labeled L={length: count, ...}.
inline std::string emit_log_line(const RunRecord& record) {
    const std::string label =
        record.fp ? "FP=" + format_fp_tuple(*record.fp) : "L=" + format_multiset(record.target);
    std::string out = format_clock(record.timestamp);
    if (record.success) {
        out += " Path found for " + label + " in " + format_elapsed(record.elapsed_seconds) +
               "s with " + std::to_string(record.backtracks) + " backtracks";
        if (record.hop_permutation) out += "\nPermutation: " + format_list(*record.hop_permutation);
        if (record.path) out += "\nPath: " + format_list(record.path->vertices());
    } else {
        out += " FAILED " + label + " after " + std::to_string(record.backtracks) +
               " backtracks (" + to_string(record.terminated_by) + ")";
    }
    return out;
}

inline nlohmann::ordered_json record_to_json(const RunRecord& record) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["p"] = record.p;
    j["mode"] = to_string(record.mode);
    j["item_index"] = record.item_index;
    if (record.fp)
        j["fp"] = record.fp->parts();
    else
        j["fp"] = nullptr;
    nlohmann::ordered_json target = nlohmann::ordered_json::object();
    for (const auto& e : record.target.entries())
        target[std::to_string(e.length)] = e.count;
    j["target"] = std::move(target);
    j["success"] = record.success;
    j["backtracks"] = record.backtracks;
    j["elapsed_seconds"] = record.elapsed_seconds;
    j["method_used"] = record.method_used;
    j["terminated_by"] = to_string(record.terminated_by);
    j["timestamp"] = format_iso8601(record.timestamp);
    if (record.path)
        j["path"] = record.path->vertices();
    else
        j["path"] = nullptr;
    if (record.hop_permutation)
        j["hop_permutation"] = *record.hop_permutation;
    else
        j["hop_permutation"] = nullptr;
    return j;
}

// ---------------------------------------------------------------------------
// checkpoints

struct Checkpoint {
    std::int32_t format_version = 1;
    std::int32_t p = 0;
    std::string mode;
    std::int64_t completed_through = -1;  // all items 0..completed_through are folded
    std::uint64_t solved = 0;
    std::uint64_t exhausted = 0;
    std::uint64_t limit_terminated = 0;
    std::int64_t max_backtracks_seen = 0;
    std::optional<std::vector<Length>> hint;  // last successful hop permutation
    bool hints_enabled = true;
    bool symmetry_enabled = true;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["format_version"] = format_version;
        j["p"] = p;
        j["mode"] = mode;
        j["completed_through"] = completed_through;
        j["solved"] = solved;
        j["exhausted"] = exhausted;
        j["limit_terminated"] = limit_terminated;
        j["max_backtracks_seen"] = max_backtracks_seen;
        if (hint)
            j["hint"] = *hint;
        else
            j["hint"] = nullptr;
        j["hints_enabled"] = hints_enabled;
        j["symmetry_enabled"] = symmetry_enabled;
        return j;
    }

    static Checkpoint from_json(const nlohmann::json& j) {
        Checkpoint c;
        c.format_version = j.at("format_version").get<std::int32_t>();
        if (c.format_version != 1)
            throw std::runtime_error("Checkpoint: unsupported format_version " +
                                     std::to_string(c.format_version));
        c.p = j.at("p").get<std::int32_t>();
        c.mode = j.at("mode").get<std::string>();
        c.completed_through = j.at("completed_through").get<std::int64_t>();
        c.solved = j.at("solved").get<std::uint64_t>();
        c.exhausted = j.at("exhausted").get<std::uint64_t>();
        c.limit_terminated = j.at("limit_terminated").get<std::uint64_t>();
        c.max_backtracks_seen = j.at("max_backtracks_seen").get<std::int64_t>();
        if (!j.at("hint").is_null()) c.hint = j.at("hint").get<std::vector<Length>>();
        c.hints_enabled = j.at("hints_enabled").get<bool>();
        c.symmetry_enabled = j.at("symmetry_enabled").get<bool>();
        return c;
    }

    // Write-then-rename so an interrupt never leaves a torn file.
    void save(const std::filesystem::path& path) const {
        const std::filesystem::path tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out) throw std::runtime_error("Checkpoint: cannot write " + tmp.string());
            out << to_json().dump(2) << "\n";
        }
        std::filesystem::rename(tmp, path);
    }

    static Checkpoint load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("Checkpoint: cannot read " + path.string());
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }
};

// ---------------------------------------------------------------------------
// work items

struct WorkItem {
    std::uint64_t index;
    std::optional<FrequencyPartition> fp;
    HopMultiset target;
};

// Uniform view over the per-mode streams. Position only moves forward;
// skip_to is how parallel workers land on their assigned index ranges.
class ItemSource {
  public:
    ItemSource(const ProblemInstance& inst, RunMode mode) : inst_(inst), mode_(mode) {
        switch (mode) {
            case RunMode::fp:
                fps_.emplace(generate_fps(inst));
                break;
            case RunMode::all_multisets:
                multisets_.emplace(enumerate_multisets(inst, MultisetFilter::divisor_condition));
                break;
            case RunMode::coprime:
                multisets_.emplace(enumerate_coprime_multisets(inst));
                break;
            case RunMode::evolve:
                throw std::invalid_argument("ItemSource: evolve mode is not item-based");
        }
    }

    std::uint64_t position() const { return position_; }

    void skip_to(std::uint64_t index) {
        if (index < position_)
            throw std::logic_error("ItemSource: cannot skip backwards");
        if (fps_)
            fps_->skip(index - position_);
        else
            multisets_->skip(index - position_);
        position_ = index;
    }

    std::optional<WorkItem> next() {
        if (fps_) {
            auto fp = fps_->next();
            if (!fp) return std::nullopt;
            HopMultiset target = representative_multiset(*fp, inst_);
            return WorkItem{position_++, std::move(fp), std::move(target)};
        }
        auto ms = multisets_->next();
        if (!ms) return std::nullopt;
        return WorkItem{position_++, std::nullopt, std::move(*ms)};
    }

  private:
    ProblemInstance inst_;
    RunMode mode_;
    std::optional<FpStream> fps_;
    std::optional<MultisetStream> multisets_;
    std::uint64_t position_ = 0;
};

// ---------------------------------------------------------------------------
// counting

struct CountReport {
    std::uint64_t generated = 0;                  // items before filtering
    std::optional<std::uint64_t> divisor_ok{};    // all-multisets mode only
};

inline CountReport count_items(const ProblemInstance& inst, RunMode mode) {
    CountReport report;
    switch (mode) {
        case RunMode::fp: {
            FpStream fps = generate_fps(inst);
            while (fps.next()) ++report.generated;
            break;
        }
        case RunMode::all_multisets: {
            MultisetStream all = enumerate_multisets(inst, MultisetFilter::none);
            std::uint64_t ok = 0;
            while (auto ms = all.next()) {
                ++report.generated;
                if (divisor_condition(*ms, inst)) ++ok;
            }
            report.divisor_ok = ok;
            break;
        }
        case RunMode::coprime: {
            MultisetStream stream = enumerate_coprime_multisets(inst);
            while (stream.next()) ++report.generated;
            break;
        }
        case RunMode::evolve:
            throw std::invalid_argument("count_items: evolve mode is not item-based");
    }
    return report;
}

// Number of items verify_all will attempt for this instance and mode.
inline std::uint64_t total_items(const ProblemInstance& inst, RunMode mode) {
    const CountReport report = count_items(inst, mode);
    return mode == RunMode::all_multisets ? *report.divisor_ok : report.generated;
}

// ---------------------------------------------------------------------------
// batch verification

struct VerifyOptions {
    RunMode mode = RunMode::fp;
    SearchLimits limits{};
    std::int32_t jobs = 1;
    bool hints = true;  // effective only with jobs == 1 (the hint chain is sequential)
    bool symmetry = true;
    std::uint64_t checkpoint_interval = 1000;
    std::optional<std::uint64_t> stop_after_items{};  // graceful stop for tests/signals
    std::atomic<bool>* interrupt = nullptr;
    std::ostream* human_log = nullptr;
    std::ostream* records_out = nullptr;
    std::optional<std::filesystem::path> checkpoint_path{};
};

struct VerifySummary {
    std::uint64_t total = 0;
    std::uint64_t solved = 0;
    std::uint64_t exhausted = 0;
    std::uint64_t limit_terminated = 0;
    std::int64_t max_backtracks = 0;
    double wall_seconds = 0.0;
    std::int64_t completed_through = -1;
    bool finished = false;
};

namespace detail {

inline RunRecord solve_item(const ProblemInstance& inst, RunMode mode, WorkItem&& item,
                            const Hint* hint, const SearchLimits& limits, bool symmetry) {
    SearchResult r = find_path(item.target, inst, hint, limits, symmetry);
    if (r.success && !validate_realization(*r.path, item.target, inst))
        throw std::logic_error("verify_all: solver returned an invalid realization");
    return RunRecord{inst.p,
                     mode,
                     item.index,
                     std::move(item.fp),
                     std::move(item.target),
                     r.success,
                     r.backtracks,
                     r.elapsed_seconds,
                     "backtrack",
                     r.terminated_by,
                     std::chrono::system_clock::now(),
                     std::move(r.path),
                     std::move(r.hop_permutation)};
}

// Folds completed records back into index order: counters, hint chain, log
// and record emission, periodic checkpoints. One instance, one lock.
class RecordFolder {
  public:
    RecordFolder(const VerifyOptions& opt, std::int32_t p, std::int64_t start_frontier,
                 const Checkpoint* resume, bool hints_on)
        : opt_(opt), p_(p), frontier_(start_frontier), hints_on_(hints_on) {
        if (resume) {
            solved_ = resume->solved;
            exhausted_ = resume->exhausted;
            limit_terminated_ = resume->limit_terminated;
            max_backtracks_ = resume->max_backtracks_seen;
            if (resume->hint) hint_ = Hint{*resume->hint};
        }
    }

    void fold(RunRecord&& record) {
        std::lock_guard<std::mutex> lock(mutex_);
        pending_.emplace(record.item_index, std::move(record));
        for (auto it = pending_.find(static_cast<std::uint64_t>(frontier_ + 1));
             it != pending_.end();
             it = pending_.find(static_cast<std::uint64_t>(frontier_ + 1))) {
            const RunRecord& r = it->second;
            if (r.success) {
                ++solved_;
                if (hints_on_ && r.hop_permutation) hint_ = Hint{*r.hop_permutation};
            } else if (r.terminated_by == Termination::exhausted) {
                ++exhausted_;
            } else {
                ++limit_terminated_;
            }
            max_backtracks_ = std::max(max_backtracks_, r.backtracks);
            if (opt_.human_log) *opt_.human_log << emit_log_line(r) << "\n\n";
            if (opt_.records_out) *opt_.records_out << record_to_json(r).dump() << "\n";
            ++frontier_;
            pending_.erase(it);
            if (opt_.checkpoint_path && ++since_checkpoint_ >= opt_.checkpoint_interval) {
                write_checkpoint();
                since_checkpoint_ = 0;
            }
        }
    }

    // Hint for the item that will be solved next (meaningful only while the
    // caller runs strictly in index order, i.e. jobs == 1).
    std::optional<Hint> current_hint() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return hint_;
    }

    std::int64_t frontier() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return frontier_;
    }

    void write_checkpoint() {
        if (!opt_.checkpoint_path) return;
        Checkpoint c;
        c.p = p_;
        c.mode = to_string(opt_.mode);
        c.completed_through = frontier_;
        c.solved = solved_;
        c.exhausted = exhausted_;
        c.limit_terminated = limit_terminated_;
        c.max_backtracks_seen = max_backtracks_;
        if (hint_) c.hint = hint_->hop_sequence;
        c.hints_enabled = hints_on_;
        c.symmetry_enabled = opt_.symmetry;
        c.save(*opt_.checkpoint_path);
    }

    void finalize_checkpoint() {
        std::lock_guard<std::mutex> lock(mutex_);
        write_checkpoint();
    }

    void fill_summary(VerifySummary& s) const {
        std::lock_guard<std::mutex> lock(mutex_);
        s.solved = solved_;
        s.exhausted = exhausted_;
        s.limit_terminated = limit_terminated_;
        s.max_backtracks = max_backtracks_;
        s.completed_through = frontier_;
    }

  private:
    const VerifyOptions& opt_;
    std::int32_t p_;
    mutable std::mutex mutex_;
    std::map<std::uint64_t, RunRecord> pending_;
    std::int64_t frontier_;
    std::uint64_t solved_ = 0;
    std::uint64_t exhausted_ = 0;
    std::uint64_t limit_terminated_ = 0;
    std::int64_t max_backtracks_ = 0;
    std::uint64_t since_checkpoint_ = 0;
    std::optional<Hint> hint_;
    bool hints_on_;
};

}  // namespace detail

// Realize every item of the selected stream. Exit state:
//   finished        — the stream was fully consumed
//   solved == total — every item realized (the verification claim)
// An interrupted or stop_after_items run folds what completed contiguously,
// writes a checkpoint, and reports finished = false.
inline VerifySummary verify_all(const ProblemInstance& inst, const VerifyOptions& opt,
                                const std::optional<Checkpoint>& resume = std::nullopt) {
    const auto wall_start = std::chrono::steady_clock::now();
    if (opt.jobs < 1) throw std::invalid_argument("verify_all: jobs must be >= 1");
    if (opt.mode == RunMode::evolve)
        throw std::invalid_argument("verify_all: use run_evolution for evolve mode");
    const bool hints_on = opt.hints && opt.jobs == 1;

    std::uint64_t start_index = 0;
    if (resume) {
        if (resume->p != inst.p)
            throw std::invalid_argument("verify_all: checkpoint is for p=" +
                                        std::to_string(resume->p));
        if (resume->mode != to_string(opt.mode))
            throw std::invalid_argument("verify_all: checkpoint mode '" + resume->mode +
                                        "' does not match requested mode");
        if (resume->hints_enabled != hints_on || resume->symmetry_enabled != opt.symmetry)
            throw std::invalid_argument(
                "verify_all: checkpoint hint/symmetry settings do not match this run");
        start_index = static_cast<std::uint64_t>(resume->completed_through + 1);
    }

    VerifySummary summary;
    summary.total = total_items(inst, opt.mode);
    const char* noun = opt.mode == RunMode::fp ? "FPs" : "multisets";
    if (opt.human_log) {
        *opt.human_log << "=== BHR Conjecture Verification for p = " << inst.p << " ===\n";
        *opt.human_log << format_clock(std::chrono::system_clock::now()) << " Starting search for p="
                       << inst.p << ", total " << summary.total << " " << noun << "\n";
        if (start_index > 0)
            *opt.human_log << "Resuming from checkpoint: items 0.." << start_index - 1
                           << " already completed\n";
        *opt.human_log << "\n";
    }

    std::uint64_t stop_index = summary.total;
    if (opt.stop_after_items)
        stop_index = std::min(stop_index, start_index + *opt.stop_after_items);

    detail::RecordFolder folder(opt, inst.p, static_cast<std::int64_t>(start_index) - 1,
                                resume ? &*resume : nullptr, hints_on);
    auto interrupted = [&] { return opt.interrupt && opt.interrupt->load(); };

    if (opt.jobs == 1) {
        ItemSource source(inst, opt.mode);
        source.skip_to(start_index);
        for (std::uint64_t idx = start_index; idx < stop_index; ++idx) {
            if (interrupted()) break;
            auto item = source.next();
            if (!item) break;
            const std::optional<Hint> hint = hints_on ? folder.current_hint() : std::nullopt;
            folder.fold(detail::solve_item(inst, opt.mode, std::move(*item),
                                           hint ? &*hint : nullptr, opt.limits, opt.symmetry));
        }
    } else {
        constexpr std::uint64_t kChunk = 16;
        std::atomic<std::uint64_t> next_start{start_index};
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(opt.jobs));
        for (std::int32_t w = 0; w < opt.jobs; ++w) {
            workers.emplace_back([&] {
                ItemSource source(inst, opt.mode);
                for (;;) {
                    if (interrupted()) return;
                    const std::uint64_t s = next_start.fetch_add(kChunk);
                    if (s >= stop_index) return;
                    const std::uint64_t e = std::min(s + kChunk, stop_index);
                    source.skip_to(s);
                    for (std::uint64_t idx = s; idx < e; ++idx) {
                        if (interrupted()) return;
                        auto item = source.next();
                        if (!item) return;
                        folder.fold(detail::solve_item(inst, opt.mode, std::move(*item), nullptr,
                                                       opt.limits, opt.symmetry));
                    }
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    folder.finalize_checkpoint();
    folder.fill_summary(summary);
    summary.finished =
        summary.completed_through == static_cast<std::int64_t>(summary.total) - 1;
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

    if (opt.human_log) {
        if (!summary.finished)
            *opt.human_log << "Stopped after item " << summary.completed_through
                           << (opt.checkpoint_path ? " (checkpoint written)" : "") << "\n";
        *opt.human_log << format_clock(std::chrono::system_clock::now()) << " Total "
                       << (opt.mode == RunMode::fp ? "FPs" : "multisets") << " fixed: "
                       << summary.solved << " / " << summary.total << "\n";
        *opt.human_log << "Max backtracks: " << summary.max_backtracks << "\n";
        *opt.human_log << "Total time: " << format_elapsed(summary.wall_seconds) << "s\n";
    }
    return summary;
}

// ---------------------------------------------------------------------------
// inductive runs

struct StartingStateUnsolvable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Default start: the most balanced partition of p-1 into max_length parts
// (the final one in descending lexicographic order).
inline FrequencyPartition balanced_partition(const ProblemInstance& inst) {
    const std::int32_t n = inst.p - 1;
    const std::int32_t k = std::min(inst.max_length, n);
    const std::int32_t q = n / k;
    const std::int32_t r = n % k;
    std::vector<std::int32_t> parts;
    parts.reserve(static_cast<std::size_t>(k));
    for (std::int32_t i = 0; i < r; ++i) parts.push_back(q + 1);
    for (std::int32_t i = r; i < k; ++i) parts.push_back(q);
    return FrequencyPartition(std::move(parts));
}

struct EvolveRunOptions {
    std::int32_t iterations = 1;
    ScenarioSchedule schedule = ScenarioSchedule::automatic;
    EvolveOptions step{};
    std::optional<std::vector<std::int32_t>> start_fp{};  // parts, non-increasing
    std::ostream* human_log = nullptr;
    std::ostream* records_out = nullptr;
};

struct EvolveRunResult {
    std::vector<EvolutionStep> steps;
    std::optional<EvolutionState> final_state;
    bool all_success = false;
};

inline const char* method_display_name(EvolveMethod m) {
    switch (m) {
        case EvolveMethod::reuse_insertion: return "Reuse-Insertion";
        case EvolveMethod::heuristic: return "Heuristic";
        case EvolveMethod::backtrack: return "Backtrack";
    }
    return "?";
}

// Per-iteration block in the inductive-run log format.
inline std::string format_evolution_step(const EvolutionStep& step) {
    std::string out;
    out += "=== Iteration " + std::to_string(step.iteration) + " ===\n";
    const std::tm tm = utc_tm(step.timestamp);
    char ts[48];
    std::snprintf(ts, sizeof ts, "%02d:%02d:%02d", tm.tm_hour, tm.tm_min, tm.tm_sec);
    out += std::string("Timestamp: ") + ts + "\n";
    out += std::string("Method used: ") + method_display_name(step.method_used) + "\n";
    out += "p (vertices): " + std::to_string(step.p_new) + "\n";
    out += "Evolved FP: " + format_counter(step.target_new) + "\n";
    if (step.result.success) {
        out += "HP: " + format_list(step.result.path->vertices()) + "\n";
        out += "HP freq: " +
               format_counter(path_hop_lengths(*step.result.path, ProblemInstance(step.p_new))) +
               "\n";
    }
    out += "Backtracks: " + std::to_string(step.result.backtracks) + "\n";
    out += "Time: " + format_elapsed(step.result.elapsed_seconds) + " sec\n";
    out += std::string("Result: ") +
           (step.result.success
                ? "SUCCESS"
                : "FAILURE (" + std::string(to_string(step.result.terminated_by)) + ")") +
           "\n";
    return out;
}

inline RunRecord record_of_step(const EvolutionStep& step) {
    return RunRecord{step.p_new,
                     RunMode::evolve,
                     static_cast<std::uint64_t>(step.iteration),
                     step.fp_new,
                     step.target_new,
                     step.result.success,
                     step.result.backtracks,
                     step.result.elapsed_seconds,
                     to_string(step.method_used),
                     step.result.terminated_by,
                     step.timestamp,
                     step.result.path,
                     step.result.hop_permutation};
}

// Solve the starting FP at start_p, then evolve one vertex per iteration.
// Emits one formatted block per iteration and a closing summary table.
inline EvolveRunResult run_evolution(std::int32_t start_p, const EvolveRunOptions& opt) {
    const ProblemInstance inst(start_p);
    const FrequencyPartition start_fp =
        opt.start_fp ? FrequencyPartition(*opt.start_fp) : balanced_partition(inst);
    if (start_fp.sum() != inst.p - 1)
        throw std::invalid_argument("run_evolution: start FP sums to " +
                                    std::to_string(start_fp.sum()) + ", expected " +
                                    std::to_string(inst.p - 1));
    const HopMultiset start_target = representative_multiset(start_fp, inst);
    const SearchResult start_result = find_path(start_target, inst, nullptr, opt.step.limits);
    if (!start_result.success)
        throw StartingStateUnsolvable("run_evolution: starting FP " + format_fp_tuple(start_fp) +
                                      " not solved at p=" + std::to_string(start_p) + " (" +
                                      to_string(start_result.terminated_by) + ")");

    if (opt.human_log) {
        *opt.human_log << "=== Inductive evolution from p = " << start_p << " ===\n";
        *opt.human_log << "Start FP: " << format_fp_tuple(start_fp) << "\n";
        *opt.human_log << "Start multiset: " << format_counter(start_target) << "\n";
        *opt.human_log << format_clock(std::chrono::system_clock::now())
                       << " Start state solved in " << format_elapsed(start_result.elapsed_seconds)
                       << "s with " << start_result.backtracks << " backtracks\n";
        *opt.human_log << "Start HP: " << format_list(start_result.path->vertices()) << "\n\n";
    }

    EvolveRunResult out;
    EvolutionState state(inst, start_target, *start_result.path);
    out.all_success = true;
    for (std::int32_t it = 1; it <= opt.iterations; ++it) {
        const Scenario scenario = pick_scenario(state, opt.schedule, it, opt.step.policy);
        auto [next, step] = evolve_step(state, scenario, opt.step, it);
        if (opt.human_log) *opt.human_log << format_evolution_step(step) << "\n";
        if (opt.records_out) *opt.records_out << record_to_json(record_of_step(step)).dump() << "\n";
        const bool ok = step.result.success;
        out.steps.push_back(std::move(step));
        if (!ok) {
            out.all_success = false;
            break;
        }
        state = std::move(next);
    }
    out.final_state = std::move(state);

    if (opt.human_log) {
        *opt.human_log << "Summary of inductive run:\n";
        *opt.human_log << "Iteration |    p | Backtracks\n";
        for (const auto& step : out.steps) {
            char row[96];
            std::snprintf(row, sizeof row, "%9d | %4d | %10lld\n", step.iteration, step.p_new,
                          static_cast<long long>(step.result.backtracks));
            *opt.human_log << row;
        }
        *opt.human_log << (out.all_success ? "All iterations SUCCESS\n" : "Run stopped on failure\n");
    }
    return out;
}

// ---------------------------------------------------------------------------
// solver-vs-oracle equivalence sweep

struct OracleCheckReport {
    std::int32_t p;
    std::uint64_t multisets = 0;
    std::uint64_t disagreements = 0;
};

// Compare find_path and oracle_find_path on every size-(p-1) multiset over
// {1..floor(p/2)}, unfiltered, for each p in [min_p, max_p].
inline std::vector<OracleCheckReport> oracle_check(std::int32_t min_p, std::int32_t max_p) {
    std::vector<OracleCheckReport> reports;
    for (std::int32_t p = min_p; p <= max_p; ++p) {
        const ProblemInstance inst(p);
        OracleCheckReport report{p};
        MultisetStream stream = enumerate_multisets(inst, MultisetFilter::none);
        while (auto ms = stream.next()) {
            ++report.multisets;
            const SearchResult fast = find_path(*ms, inst);
            const SearchResult slow = oracle_find_path(*ms, inst, max_p);
            if (fast.success != slow.success) ++report.disagreements;
        }
        reports.push_back(report);
    }
    return reports;
}

}  // namespace bhr
