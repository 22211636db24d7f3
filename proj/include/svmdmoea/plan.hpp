#pragma once

// Experiment plan: a line-oriented key/value file with [section] headers.
// Grammar and examples live in docs/plan-format.md.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "svmdmoea/dmoea.hpp"

namespace svmdmoea {

class PlanError : public std::runtime_error {
public:
    PlanError(std::size_t line, std::string key, std::string const& message)
        : std::runtime_error(format(line, key, message)), line_(line), key_(std::move(key)) {}

    /// 1-based line of the offending entry, 0 when the problem is a missing key.
    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::string const& key() const { return key_; }

private:
    static std::string format(std::size_t line, std::string const& key, std::string const& message) {
        std::string out = "plan error";
        if (line > 0) {
            out += " at line " + std::to_string(line);
        }
        if (!key.empty()) {
            out += " (key '" + key + "')";
        }
        return out + ": " + message;
    }

    std::size_t line_;
    std::string key_;
};

/// Filter settings as written in a plan; unset fields follow the population size.
struct PlanFilter {
    std::optional<std::size_t> candidate_count;
    std::size_t max_attempts = 10;
    std::optional<std::size_t> min_accept;

    [[nodiscard]] FilterParams resolve(std::size_t pop_size) const {
        auto fp = FilterParams::defaults_for(pop_size);
        fp.candidate_count = candidate_count.value_or(fp.candidate_count);
        fp.max_attempts = max_attempts;
        fp.min_accept = min_accept.value_or(fp.min_accept);
        return fp;
    }

    friend bool operator==(PlanFilter const&, PlanFilter const&) = default;
};

struct ExperimentPlan {
    std::vector<ProblemId> problems;
    std::vector<EnvironmentConfig> configs;
    std::vector<VariantKind> variants;
    std::vector<std::uint64_t> seeds;
    GAParams ga;
    SvmSettings svm;
    PlanFilter filter;
    double replace_fraction = 0.2;
    std::size_t reference_samples = kDefaultReferenceSamples;
    std::string output_dir = "results";

    [[nodiscard]] AlgorithmVariant variant(VariantKind kind) const { return {kind, replace_fraction}; }

    [[nodiscard]] RunSettings run_settings() const {
        RunSettings s;
        s.ga = ga;
        s.filter = filter.resolve(ga.pop_size);
        s.svm = svm;
        s.reference_samples = reference_samples;
        return s;
    }

    /// Everything except the grid lists and the output directory. Two plans
    /// with equal settings produce identical records for a shared grid cell.
    [[nodiscard]] bool same_settings(ExperimentPlan const& o) const {
        return ga == o.ga && svm == o.svm && filter == o.filter && replace_fraction == o.replace_fraction
            && reference_samples == o.reference_samples;
    }

    [[nodiscard]] std::size_t run_count() const {
        return problems.size() * configs.size() * variants.size() * seeds.size();
    }

    friend bool operator==(ExperimentPlan const&, ExperimentPlan const&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        auto const comma = value.find(',', pos);
        auto const item = trim(value.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        out.push_back(item);
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

inline std::string format_number(double v) {
    char buf[64];
    auto const r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

struct Entry {
    std::string value;
    std::size_t line = 0;
};

class PlanReader {
public:
    PlanReader(std::string section, std::map<std::string, Entry> entries)
        : section_(std::move(section)), entries_(std::move(entries)) {}

    [[nodiscard]] Entry const* find(std::string const& key) const {
        auto const it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] std::string qualified(std::string const& key) const { return section_ + "." + key; }

    [[noreturn]] void fail(std::string const& key, std::string const& message) const {
        auto const* e = find(key);
        throw PlanError(e ? e->line : 0, qualified(key), message);
    }

    template <typename T>
    T number(std::string const& key, std::string_view token) const {
        T v{};
        auto const* first = token.data();
        auto const* last = token.data() + token.size();
        if constexpr (std::is_floating_point_v<T>) {
            auto const r = std::from_chars(first, last, v);
            if (token.empty() || r.ec != std::errc{} || r.ptr != last || !std::isfinite(v)) {
                fail(key, "expected a number, got '" + std::string(token) + "'");
            }
        } else {
            auto const r = std::from_chars(first, last, v);
            if (token.empty() || r.ec != std::errc{} || r.ptr != last) {
                fail(key, "expected a non-negative integer, got '" + std::string(token) + "'");
            }
        }
        return v;
    }

    template <typename T>
    void get(std::string const& key, T& out) const {
        if (auto const* e = find(key)) {
            out = number<T>(key, e->value);
        }
    }

    template <typename T>
    void get_positive(std::string const& key, T& out) const {
        get(key, out);
        if (find(key) && !(out > T{})) {
            fail(key, "must be positive");
        }
    }

    template <typename T>
    void get_auto(std::string const& key, std::optional<T>& out) const {
        if (auto const* e = find(key)) {
            out = detail::iequals(e->value, "auto") ? std::nullopt : std::optional<T>(number<T>(key, e->value));
        }
    }

private:
    std::string section_;
    std::map<std::string, Entry> entries_;
};

inline std::map<std::string, std::set<std::string>> const& plan_schema() {
    static std::map<std::string, std::set<std::string>> const schema = {
        {"experiment", {"problems", "configs", "variants", "seeds", "output_dir"}},
        {"ga", {"pop_size", "crossover_prob", "mutation_prob", "eta_c", "eta_m"}},
        {"svm", {"kernel", "gamma", "degree", "coef0", "C", "tolerance", "max_passes", "max_iterations"}},
        {"filter", {"candidate_count", "max_attempts", "min_accept"}},
        {"baselines", {"replace_fraction"}},
        {"metrics", {"reference_samples"}},
    };
    return schema;
}

inline std::vector<std::uint64_t> parse_seeds(PlanReader const& r, std::string const& key, std::string_view value) {
    std::vector<std::uint64_t> seeds;
    for (auto item : split_list(value)) {
        auto const dots = item.find("..");
        if (dots == std::string_view::npos) {
            seeds.push_back(r.number<std::uint64_t>(key, item));
            continue;
        }
        auto const lo = r.number<std::uint64_t>(key, trim(item.substr(0, dots)));
        auto const hi = r.number<std::uint64_t>(key, trim(item.substr(dots + 2)));
        if (hi < lo || hi - lo >= 100000) {
            r.fail(key, "bad seed range '" + std::string(item) + "'");
        }
        for (auto s = lo; s <= hi; ++s) {
            seeds.push_back(s);
        }
    }
    return seeds;
}

template <typename T, typename Parse, typename Name>
std::vector<T> parse_names(PlanReader const& r, std::string const& key, std::string_view value, char const* what,
                           Parse parse, Name name) {
    std::vector<T> out;
    for (auto item : split_list(value)) {
        auto parsed = parse(item);
        if (!parsed) {
            r.fail(key, std::string("unknown ") + what + " '" + std::string(item) + "'");
        }
        bool const repeated = std::any_of(out.begin(), out.end(), [&](T const& o) { return name(o) == name(*parsed); });
        if (repeated) {
            r.fail(key, std::string("duplicate ") + what + " '" + std::string(item) + "'");
        }
        out.push_back(std::move(*parsed));
    }
    return out;
}

} // namespace detail

inline ExperimentPlan parse_plan(std::string_view text) {
    using detail::Entry;
    using detail::PlanReader;

    std::map<std::string, std::map<std::string, Entry>> sections;
    std::string current;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto const nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (auto const hash = raw.find_first_of("#;"); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        auto const line = detail::trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw PlanError(line_no, "", "malformed section header '" + std::string(line) + "'");
            }
            current = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (!detail::plan_schema().contains(current)) {
                throw PlanError(line_no, current, "unknown section '" + current + "'");
            }
            if (sections.contains(current)) {
                throw PlanError(line_no, current, "section '" + current + "' appears twice");
            }
            sections[current];
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw PlanError(line_no, "", "expected 'key = value', got '" + std::string(line) + "'");
        }
        std::string const key(detail::trim(line.substr(0, eq)));
        std::string const value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw PlanError(line_no, "", "missing key before '='");
        }
        if (current.empty()) {
            throw PlanError(line_no, key, "entry outside of any section");
        }
        auto const qualified = current + "." + key;
        if (!detail::plan_schema().at(current).contains(key)) {
            throw PlanError(line_no, qualified, "unknown key '" + key + "' in section [" + current + "]");
        }
        if (value.empty()) {
            throw PlanError(line_no, qualified, "empty value");
        }
        auto [it, inserted] = sections[current].try_emplace(key, Entry{value, line_no});
        if (!inserted) {
            throw PlanError(line_no, qualified, "key given twice (first at line " + std::to_string(it->second.line) + ")");
        }
    }

    auto reader = [&](std::string const& name) { return PlanReader(name, sections[name]); };
    ExperimentPlan plan;

    auto const ex = reader("experiment");
    for (char const* key : {"problems", "configs", "variants", "seeds"}) {
        if (!ex.find(key)) {
            throw PlanError(0, ex.qualified(key), "required key is missing");
        }
    }
    plan.problems = detail::parse_names<ProblemId>(ex, "problems", ex.find("problems")->value, "problem", parse_problem,
                                                   [](ProblemId id) { return id; });
    plan.configs = detail::parse_names<EnvironmentConfig>(ex, "configs", ex.find("configs")->value, "config",
                                                          parse_environment_config,
                                                          [](EnvironmentConfig const& c) { return c.id; });
    plan.variants = detail::parse_names<VariantKind>(ex, "variants", ex.find("variants")->value, "variant",
                                                     parse_variant, [](VariantKind k) { return k; });
    plan.seeds = detail::parse_seeds(ex, "seeds", ex.find("seeds")->value);
    {
        std::set<std::uint64_t> seen;
        for (auto s : plan.seeds) {
            if (!seen.insert(s).second) {
                ex.fail("seeds", "duplicate seed " + std::to_string(s));
            }
        }
    }
    if (auto const* e = ex.find("output_dir")) {
        plan.output_dir = e->value;
    }

    auto const ga = reader("ga");
    ga.get_positive("pop_size", plan.ga.pop_size);
    ga.get("crossover_prob", plan.ga.crossover_prob);
    ga.get_auto("mutation_prob", plan.ga.mutation_prob);
    ga.get_positive("eta_c", plan.ga.eta_c);
    ga.get_positive("eta_m", plan.ga.eta_m);
    if (plan.ga.crossover_prob < 0.0 || plan.ga.crossover_prob > 1.0) {
        ga.fail("crossover_prob", "must lie in [0, 1]");
    }
    if (plan.ga.mutation_prob && (*plan.ga.mutation_prob < 0.0 || *plan.ga.mutation_prob > 1.0)) {
        ga.fail("mutation_prob", "must lie in [0, 1] or be 'auto'");
    }

    auto const svm = reader("svm");
    if (auto const* e = svm.find("kernel")) {
        if (detail::iequals(e->value, "rbf")) {
            plan.svm.kernel.kind = KernelKind::Rbf;
        } else if (detail::iequals(e->value, "linear")) {
            plan.svm.kernel.kind = KernelKind::Linear;
        } else if (detail::iequals(e->value, "polynomial")) {
            plan.svm.kernel.kind = KernelKind::Polynomial;
        } else {
            svm.fail("kernel", "unknown kernel '" + e->value + "' (rbf, linear, polynomial)");
        }
    }
    svm.get_auto("gamma", plan.svm.kernel.gamma);
    if (plan.svm.kernel.gamma && !(*plan.svm.kernel.gamma > 0.0)) {
        svm.fail("gamma", "must be positive or 'auto'");
    }
    svm.get_positive("degree", plan.svm.kernel.degree);
    svm.get("coef0", plan.svm.kernel.coef0);
    svm.get_positive("C", plan.svm.smo.C);
    svm.get_positive("tolerance", plan.svm.smo.tolerance);
    svm.get_positive("max_passes", plan.svm.smo.max_passes);
    svm.get_positive("max_iterations", plan.svm.smo.max_iterations);

    auto const fl = reader("filter");
    fl.get_auto("candidate_count", plan.filter.candidate_count);
    fl.get_positive("max_attempts", plan.filter.max_attempts);
    fl.get_auto("min_accept", plan.filter.min_accept);
    if (plan.filter.candidate_count == std::size_t{0}) {
        fl.fail("candidate_count", "must be positive");
    }
    if (plan.filter.min_accept == std::size_t{0}) {
        fl.fail("min_accept", "must be positive");
    }
    try {
        plan.filter.resolve(plan.ga.pop_size).validate(plan.ga.pop_size);
    } catch (std::invalid_argument const& err) {
        fl.fail(plan.filter.min_accept ? "min_accept" : "candidate_count", err.what());
    }

    auto const bl = reader("baselines");
    bl.get("replace_fraction", plan.replace_fraction);
    if (!(plan.replace_fraction > 0.0 && plan.replace_fraction < 1.0)) {
        bl.fail("replace_fraction", "must lie strictly between 0 and 1");
    }

    auto const me = reader("metrics");
    me.get_positive("reference_samples", plan.reference_samples);

    return plan;
}

/// Canonical text form; parse_plan(to_text(p)) == p.
inline std::string to_text(ExperimentPlan const& plan) {
    using detail::format_number;
    auto join = [](auto const& items, auto name) {
        std::string out;
        for (auto const& item : items) {
            out += (out.empty() ? "" : ", ") + std::string(name(item));
        }
        return out;
    };
    auto opt = [](auto const& v) { return v ? format_number(static_cast<double>(*v)) : std::string("auto"); };

    std::ostringstream os;
    os << "[experiment]\n"
       << "problems = " << join(plan.problems, [](ProblemId id) { return to_string(id); }) << "\n"
       << "configs = " << join(plan.configs, [](EnvironmentConfig const& c) { return c.id; }) << "\n"
       << "variants = " << join(plan.variants, [](VariantKind k) { return to_string(k); }) << "\n"
       << "seeds = " << join(plan.seeds, [](std::uint64_t s) { return std::to_string(s); }) << "\n"
       << "output_dir = " << plan.output_dir << "\n\n";
    os << "[ga]\n"
       << "pop_size = " << plan.ga.pop_size << "\n"
       << "crossover_prob = " << format_number(plan.ga.crossover_prob) << "\n"
       << "mutation_prob = " << opt(plan.ga.mutation_prob) << "\n"
       << "eta_c = " << format_number(plan.ga.eta_c) << "\n"
       << "eta_m = " << format_number(plan.ga.eta_m) << "\n\n";
    char const* kernel = plan.svm.kernel.kind == KernelKind::Rbf      ? "rbf"
                         : plan.svm.kernel.kind == KernelKind::Linear ? "linear"
                                                                      : "polynomial";
    os << "[svm]\n"
       << "kernel = " << kernel << "\n"
       << "gamma = " << opt(plan.svm.kernel.gamma) << "\n"
       << "degree = " << plan.svm.kernel.degree << "\n"
       << "coef0 = " << format_number(plan.svm.kernel.coef0) << "\n"
       << "C = " << format_number(plan.svm.smo.C) << "\n"
       << "tolerance = " << format_number(plan.svm.smo.tolerance) << "\n"
       << "max_passes = " << plan.svm.smo.max_passes << "\n"
       << "max_iterations = " << plan.svm.smo.max_iterations << "\n\n";
    os << "[filter]\n"
       << "candidate_count = " << (plan.filter.candidate_count ? std::to_string(*plan.filter.candidate_count) : "auto")
       << "\n"
       << "max_attempts = " << plan.filter.max_attempts << "\n"
       << "min_accept = " << (plan.filter.min_accept ? std::to_string(*plan.filter.min_accept) : "auto") << "\n\n";
    os << "[baselines]\n"
       << "replace_fraction = " << format_number(plan.replace_fraction) << "\n\n";
    os << "[metrics]\n"
       << "reference_samples = " << plan.reference_samples << "\n";
    return os.str();
}

} // namespace svmdmoea
