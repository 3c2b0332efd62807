#pragma once

#include "vecsr/executor.hpp"
#include "vecsr/optimizer.hpp"
#include "vecsr/planner.hpp"

#include <string>
#include <vector>

namespace vecsr {

// Timing sweep configuration: tasks x levels, repeated plans per cell.
struct BenchSpec {
    std::vector<std::string> tasks;
    std::vector<OptLevel> levels;
    int repetitions = 5;
    double timeout_s = 600.0;
    PlanLimits limits; // wall_timeout_s is replaced by timeout_s per run
};

enum class BenchStatus : std::uint8_t { Ok, Timeout, Failure };

const char* bench_status_name(BenchStatus s);

struct BenchRow {
    std::string task;
    OptLevel level = OptLevel::Standard;
    BenchStatus status = BenchStatus::Ok;
    double compile_s = 0.0;
    // Timing over successful repetitions; meaningless unless status == Ok.
    double median_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
    std::string detail; // failure reason, empty when ok
};

struct BenchReport {
    std::vector<BenchRow> rows; // sorted by task name, then level
    bool had_timeouts = false;
};

// Runs every cell sequentially; a failing cell becomes a row with a non-ok
// status, never an aborted sweep.
BenchReport run_bench(const BenchSpec& spec, const Program& p,
                      const FactBase& f, const SceneGraph& scene);

// Byte-stable header; one data row per cell plus one "average" row per level
// covering the ok rows of that level. Timeout and failure rows carry no
// timing columns.
std::string render_bench_csv(const BenchReport& report);

// One holdout task's outcome under the shipped planning configuration.
struct HoldoutResult {
    std::string task;
    bool solved = false;
    int plan_len = 0;
    std::string failure; // reason + detail when unsolved
    std::vector<std::string> gaps;
};

struct HoldoutReport {
    std::vector<HoldoutResult> results; // in input task order
    int solved_count = 0;
    double fraction = 0.0;
};

// Plans each task (with the fallback ladder) and replays the result through
// the simulator; solved means planned, executed, and goal satisfied. Tasks
// are independent, so parallel > 1 distributes them across threads.
HoldoutReport run_generalize(const Program& kb, const FactBase& f,
                             const SceneGraph& scene,
                             const std::vector<TaskDef>& tasks, OptLevel level,
                             const PlanLimits& limits, int parallel = 1);

std::string render_holdout_report(const HoldoutReport& report);

} // namespace vecsr
