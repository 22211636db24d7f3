#pragma once

// Runs every (problem, config, variant, seed) cell of a plan on a worker
// pool, persisting each finished run before the next manifest update.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "svmdmoea/dmoea.hpp"
#include "svmdmoea/plan.hpp"
#include "svmdmoea/records.hpp"

namespace svmdmoea {

struct RunTask {
    RunKey key;
    ProblemId problem;
    EnvironmentConfig config;
    VariantKind variant;
    std::uint64_t seed;
};

inline std::vector<RunTask> expand(ExperimentPlan const& plan) {
    std::vector<RunTask> tasks;
    tasks.reserve(plan.run_count());
    for (auto problem : plan.problems) {
        for (auto const& config : plan.configs) {
            for (auto variant : plan.variants) {
                for (auto seed : plan.seeds) {
                    RunKey key{std::string(to_string(problem)), config.id, std::string(to_string(variant)), seed};
                    tasks.push_back({std::move(key), problem, config, variant, seed});
                }
            }
        }
    }
    return tasks;
}

/// One run, never throwing: failures come back as failed records.
inline MetricRecord execute_one(ExperimentPlan const& plan, RunTask const& task) {
    try {
        auto const results =
            run(plan.variant(task.variant), make_problem(task.problem), task.config, plan.run_settings(), task.seed);
        return make_record(task.key, results);
    } catch (std::exception const& err) {
        return make_failure(task.key, err.what());
    }
}

class OutputConflict : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExecuteOptions {
    std::size_t jobs = 1;
    std::optional<std::filesystem::path> out_dir; // unset: plan.output_dir
    bool persist = true;
    std::function<void(MetricRecord const&, bool reused)> on_finish;
    std::function<MetricRecord(ExperimentPlan const&, RunTask const&)> runner; // unset: execute_one
};

struct ExecuteReport {
    std::vector<MetricRecord> records; // plan order
    std::size_t executed = 0;
    std::size_t reused = 0;
    std::size_t failed = 0;
};

/// Completed runs already present in the output directory are loaded instead
/// of recomputed, provided the directory was produced with the same settings.
inline ExecuteReport execute(ExperimentPlan const& plan, ExecuteOptions const& options = {}) {
    namespace fs = std::filesystem;
    auto const tasks = expand(plan);
    fs::path const dir = options.out_dir.value_or(fs::path(plan.output_dir));

    Manifest manifest;
    manifest.plan_text = to_text(plan);
    if (options.persist) {
        fs::create_directories(dir);
        if (fs::exists(dir / kManifestName)) {
            auto previous = load_manifest(dir);
            ExperimentPlan old;
            try {
                old = parse_plan(previous.plan_text);
            } catch (PlanError const& err) {
                throw OutputConflict(dir.string() + " holds a manifest with an unreadable plan: " + err.what());
            }
            if (!old.same_settings(plan)) {
                throw OutputConflict(dir.string() + " holds results produced with different settings");
            }
            for (auto& [key, rec] : previous.runs) {
                if (!rec.failed) {
                    manifest.runs.emplace(key, std::move(rec));
                }
            }
        }
    }

    ExecuteReport report;
    report.records.resize(tasks.size());
    std::vector<bool> pending(tasks.size(), true);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (auto it = manifest.runs.find(tasks[i].key); it != manifest.runs.end()) {
            report.records[i] = it->second;
            pending[i] = false;
            ++report.reused;
            if (options.on_finish) {
                options.on_finish(it->second, true);
            }
        }
    }

    std::mutex mutex;
    std::exception_ptr io_error;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            auto const i = next.fetch_add(1);
            if (i >= tasks.size()) {
                return;
            }
            if (!pending[i]) {
                continue;
            }
            auto rec = options.runner ? options.runner(plan, tasks[i]) : execute_one(plan, tasks[i]);
            std::lock_guard lock(mutex);
            try {
                if (options.persist) {
                    auto const marker = dir / (rec.key.stem() + ".failed");
                    if (rec.failed) {
                        write_atomically(marker, rec.error + "\n");
                    } else {
                        write_record_file(dir, rec);
                        fs::remove(marker);
                    }
                    manifest.runs.insert_or_assign(rec.key, rec);
                    write_atomically(dir / kManifestName, manifest_text(manifest));
                }
            } catch (...) {
                if (!io_error) {
                    io_error = std::current_exception();
                }
            }
            ++report.executed;
            report.failed += rec.failed ? 1 : 0;
            if (options.on_finish) {
                options.on_finish(rec, false);
            }
            report.records[i] = std::move(rec);
        }
    };

    auto const width = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(1, tasks.size()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < width; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }
    if (io_error) {
        std::rethrow_exception(io_error);
    }
    return report;
}

} // namespace svmdmoea
