#include "vecsr/bench.hpp"

#include "vecsr/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

namespace vecsr {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_s(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n == 0)
        return 0.0;
    if (n % 2 == 1)
        return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

BenchRow run_cell(const std::string& task_name, OptLevel level,
                  const BenchSpec& spec, const Program& p, const FactBase& f,
                  const SceneGraph& scene) {
    BenchRow row;
    row.task = task_name;
    row.level = level;

    const TaskDef* task = p.find_task(intern(task_name));
    if (!task) {
        row.status = BenchStatus::Failure;
        row.detail = "unknown task " + task_name;
        return row;
    }

    try {
        auto t0 = Clock::now();
        CompiledKB kb = optimize(p, f, scene, *task, level);
        row.compile_s = seconds_since(t0);

        PlanLimits limits = spec.limits;
        limits.wall_timeout_s = spec.timeout_s;

        std::vector<double> times;
        for (int rep = 0; rep < spec.repetitions; ++rep) {
            PlanResult res = plan(kb, *task, limits);
            if (res.ok()) {
                times.push_back(res.seconds);
                continue;
            }
            if (res.failure->reason == FailureReason::Timeout) {
                row.status = BenchStatus::Timeout;
                row.detail = "timeout after " + format_s(spec.timeout_s) + " s";
            } else {
                row.status = BenchStatus::Failure;
                row.detail = failure_reason_name(res.failure->reason) +
                             std::string(": ") + res.failure->detail;
            }
            return row;
        }
        row.median_s = median_of(times);
        row.min_s = *std::min_element(times.begin(), times.end());
        row.max_s = *std::max_element(times.begin(), times.end());
    } catch (const std::exception& e) {
        row.status = BenchStatus::Failure;
        row.detail = e.what();
    }
    return row;
}

} // namespace

const char* bench_status_name(BenchStatus s) {
    switch (s) {
    case BenchStatus::Ok:
        return "ok";
    case BenchStatus::Timeout:
        return "timeout";
    case BenchStatus::Failure:
        return "failure";
    }
    return "?";
}

BenchReport run_bench(const BenchSpec& spec, const Program& p,
                      const FactBase& f, const SceneGraph& scene) {
    if (spec.repetitions < 1)
        throw std::invalid_argument("bench repetitions must be positive");
    if (spec.timeout_s <= 0.0)
        throw std::invalid_argument("bench timeout must be positive");

    std::vector<std::string> tasks = spec.tasks;
    std::sort(tasks.begin(), tasks.end());

    BenchReport report;
    for (const std::string& t : tasks)
        for (OptLevel level : spec.levels) {
            BenchRow row = run_cell(t, level, spec, p, f, scene);
            report.had_timeouts |= row.status == BenchStatus::Timeout;
            report.rows.push_back(std::move(row));
        }
    return report;
}

std::string render_bench_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "task,level,status,compile_s,plan_median_s,plan_min_s,plan_max_s,"
           "total_s\n";
    for (const BenchRow& r : report.rows) {
        out << r.task << ',' << opt_level_name(r.level) << ','
            << bench_status_name(r.status) << ',' << format_s(r.compile_s);
        if (r.status == BenchStatus::Ok)
            out << ',' << format_s(r.median_s) << ',' << format_s(r.min_s)
                << ',' << format_s(r.max_s) << ','
                << format_s(r.compile_s + r.median_s);
        else
            out << ",,,,";
        out << '\n';
    }

    // Per-level averages over ok rows; timed-out cells do not contribute.
    std::map<OptLevel, std::vector<const BenchRow*>> by_level;
    for (const BenchRow& r : report.rows)
        if (r.status == BenchStatus::Ok)
            by_level[r.level].push_back(&r);
    for (const auto& [level, rows] : by_level) {
        double compile = 0.0, med = 0.0, mn = 0.0, mx = 0.0;
        for (const BenchRow* r : rows) {
            compile += r->compile_s;
            med += r->median_s;
            mn += r->min_s;
            mx += r->max_s;
        }
        double n = static_cast<double>(rows.size());
        out << "average," << opt_level_name(level) << ",ok,"
            << format_s(compile / n) << ',' << format_s(med / n) << ','
            << format_s(mn / n) << ',' << format_s(mx / n) << ','
            << format_s((compile + med) / n) << '\n';
    }
    return out.str();
}

HoldoutReport run_generalize(const Program& kb, const FactBase& f,
                             const SceneGraph& scene,
                             const std::vector<TaskDef>& tasks, OptLevel level,
                             const PlanLimits& limits, int parallel) {
    HoldoutReport report;
    report.results.resize(tasks.size());

    auto run_one = [&](std::size_t i) {
        const TaskDef& task = tasks[i];
        HoldoutResult& out = report.results[i];
        out.task = symbol_name(task.name);
        try {
            FallbackResult fb =
                plan_with_fallback(kb, f, scene, task, level, limits);
            if (!fb.result.ok()) {
                const PlanFailure& fail = *fb.result.failure;
                out.failure = failure_reason_name(fail.reason) +
                              std::string(": ") + fail.detail;
                out.gaps = fail.capability_gaps;
                return;
            }
            // Replay through the simulator: solved means the plan actually
            // runs and leaves the goal satisfied.
            WorldModel world = make_world(scene, kb);
            ExecutionResult exec = execute(world, *fb.result.plan);
            if (!exec.completed) {
                out.failure = "plan not executable: step " +
                              std::to_string(exec.failed_step) + " (" +
                              exec.reason + ")";
                return;
            }
            if (!provable(kb, world.facts, exec.final_state, task.goal)) {
                out.failure = "executed but goal unsatisfied";
                return;
            }
            out.solved = true;
            out.plan_len = static_cast<int>(fb.result.plan->steps.size());
        } catch (const std::exception& e) {
            out.failure = e.what();
        }
    };

    if (parallel <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::size_t stride = static_cast<std::size_t>(parallel);
        for (std::size_t w = 0; w < stride; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < tasks.size(); i += stride)
                    run_one(i);
            });
        for (std::thread& t : pool)
            t.join();
    }

    for (const HoldoutResult& r : report.results)
        report.solved_count += r.solved ? 1 : 0;
    report.fraction = tasks.empty() ? 0.0
                                    : static_cast<double>(report.solved_count) /
                                          static_cast<double>(tasks.size());
    return report;
}

std::string render_holdout_report(const HoldoutReport& report) {
    std::ostringstream out;
    std::map<std::string, std::vector<std::string>> by_gap;
    for (const HoldoutResult& r : report.results) {
        if (r.solved) {
            out << r.task << ": solved (" << r.plan_len << " steps)\n";
        } else {
            out << r.task << ": unsolved - " << r.failure;
            if (!r.gaps.empty()) {
                out << "; gaps:";
                for (const std::string& g : r.gaps) {
                    out << ' ' << g;
                    by_gap[g].push_back(r.task);
                }
            }
            out << '\n';
        }
    }
    char pct[32];
    std::snprintf(pct, sizeof(pct), "%.2f%%", report.fraction * 100.0);
    out << "solved " << report.solved_count << '/' << report.results.size()
        << " (" << pct << ")\n";
    for (const auto& [gap, names] : by_gap) {
        out << "missing capability [" << gap << "]:";
        for (const std::string& n : names)
            out << ' ' << n;
        out << '\n';
    }
    return out.str();
}

} // namespace vecsr
