// Experiment driver: runs plans, summarizes result directories and lists
// the built-in problems and environment configurations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "svmdmoea/svmdmoea.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kPlanError = 1;
constexpr int kPartialFailure = 2;

int cmd_run(std::string const& plan_path, std::size_t jobs, std::string const& out_dir) {
    using namespace svmdmoea;
    std::ifstream is(plan_path);
    if (!is) {
        std::cerr << "cannot open plan file " << plan_path << "\n";
        return kPlanError;
    }
    std::stringstream buf;
    buf << is.rdbuf();
    ExperimentPlan plan;
    try {
        plan = parse_plan(buf.str());
    } catch (PlanError const& err) {
        std::cerr << plan_path << ": " << err.what() << "\n";
        return kPlanError;
    }

    ExecuteOptions options;
    options.jobs = jobs;
    if (!out_dir.empty()) {
        options.out_dir = out_dir;
    }
    std::size_t done = 0;
    auto const total = plan.run_count();
    options.on_finish = [&](MetricRecord const& rec, bool reused) {
        ++done;
        std::cerr << "[" << done << "/" << total << "] " << rec.key.label() << ": ";
        if (rec.failed) {
            std::cerr << "FAILED " << rec.error << "\n";
        } else {
            std::cerr << (reused ? "reused" : "done") << " migd=" << rec.migd << "\n";
        }
    };

    ExecuteReport report;
    try {
        report = execute(plan, options);
    } catch (std::exception const& err) {
        std::cerr << err.what() << "\n";
        return kPlanError;
    }
    std::cerr << report.executed << " executed, " << report.reused << " reused, " << report.failed << " failed\n";
    return report.failed > 0 ? kPartialFailure : kOk;
}

int cmd_summarize(std::string const& in_dir, std::string const& format) {
    using namespace svmdmoea;
    std::vector<MetricRecord> records;
    try {
        records = load_records(in_dir);
    } catch (std::exception const& err) {
        std::cerr << err.what() << "\n";
        return kPlanError;
    }
    auto const summary = summarize(records);
    std::cout << (format == "csv" ? render_csv(summary) : render_markdown(summary));
    return kOk;
}

int cmd_list_problems() {
    using namespace svmdmoea;
    std::printf("%-10s %5s %10s  %s\n", "problem", "dim", "objectives", "type");
    for (auto id : kAllProblems) {
        auto const& t = traits(id);
        std::printf("%-10s %5zu %10zu  %s\n", std::string(t.name).c_str(), t.decision_dim, t.objective_count,
                    std::string(to_string(t.type)).c_str());
    }
    return kOk;
}

int cmd_list_configs() {
    using namespace svmdmoea;
    std::printf("%-4s %5s %6s %6s %13s\n", "id", "n_t", "tau_t", "tau_T", "environments");
    for (auto const& c : builtin_configs()) {
        std::printf("%-4s %5d %6d %6d %13zu\n", c.id.c_str(), c.n_t, c.tau_t, c.tau_T, c.environment_count());
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SVM-seeded dynamic multi-objective optimization experiments"};
    app.require_subcommand(1);

    std::string plan_path;
    std::size_t jobs = 1;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "execute every run of a plan");
    run->add_option("--plan", plan_path, "plan file")->required();
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "output directory (overrides the plan)");

    std::string in_dir;
    std::string format = "md";
    auto* summarize = app.add_subcommand("summarize", "aggregate a result directory into tables");
    summarize->add_option("--in", in_dir, "result directory")->required();
    summarize->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "md"}));

    auto* list_problems = app.add_subcommand("list-problems", "list the benchmark problems");
    auto* list_configs = app.add_subcommand("list-configs", "list the built-in environment configurations");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& err) {
        return app.exit(err) == 0 ? kOk : kPlanError;
    }

    if (run->parsed()) {
        return cmd_run(plan_path, jobs, out_dir);
    }
    if (summarize->parsed()) {
        return cmd_summarize(in_dir, format);
    }
    if (list_problems->parsed()) {
        return cmd_list_problems();
    }
    if (list_configs->parsed()) {
        return cmd_list_configs();
    }
    return kPlanError;
}
