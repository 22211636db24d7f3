#pragma once

// SVM-DMOEA orchestration and the restart baselines it is compared with.
//
// After each environment change the previous environment's Pareto set is
// used as the positive class, dominated solutions as the negative class.
// The trained classifier screens uniformly random candidates for the new
// environment and the accepted ones seed NSGA-II.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svmdmoea/classifier.hpp"
#include "svmdmoea/evolution.hpp"
#include "svmdmoea/metrics.hpp"
#include "svmdmoea/problems.hpp"
#include "svmdmoea/random.hpp"

namespace svmdmoea {

// ---------------------------------------------------------------------------
// Environment configurations

struct EnvironmentConfig {
    std::string id = "custom";
    int n_t = 10;
    int tau_t = 5;
    int tau_T = 25;

    [[nodiscard]] TimeController clock() const { return TimeController(n_t, tau_t, tau_T); }
    [[nodiscard]] std::size_t environment_count() const { return static_cast<std::size_t>(tau_T / tau_t); }

    friend bool operator==(EnvironmentConfig const&, EnvironmentConfig const&) = default;
};

inline std::array<EnvironmentConfig, 8> const& builtin_configs() {
    static std::array<EnvironmentConfig, 8> const table = {{
        {"C1", 10, 5, 25},
        {"C2", 10, 10, 50},
        {"C3", 10, 25, 125},
        {"C4", 10, 50, 250},
        {"C5", 1, 5, 25},
        {"C6", 1, 10, 50},
        {"C7", 20, 25, 125},
        {"C8", 20, 50, 250},
    }};
    return table;
}

/// "C1".."C8" (case-insensitive) or "custom:<n_t>:<tau_t>:<tau_T>".
inline std::optional<EnvironmentConfig> parse_environment_config(std::string_view token) {
    for (auto const& c : builtin_configs()) {
        if (detail::iequals(c.id, token)) {
            return c;
        }
    }
    constexpr std::string_view prefix = "custom:";
    if (token.size() > prefix.size() && detail::iequals(token.substr(0, prefix.size()), prefix)) {
        std::string rest(token.substr(prefix.size()));
        std::array<int, 3> v{};
        std::size_t pos = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            auto const colon = rest.find(':', pos);
            auto const part = rest.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
            if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos || part.size() > 9) {
                return std::nullopt;
            }
            v[k] = std::stoi(part);
            if ((k < 2) == (colon == std::string::npos)) {
                return std::nullopt;
            }
            pos = colon + 1;
        }
        if (v[0] <= 0 || v[1] <= 0 || v[2] <= 0 || v[2] % v[1] != 0) {
            return std::nullopt;
        }
        auto id = "custom:" + std::to_string(v[0]) + ":" + std::to_string(v[1]) + ":" + std::to_string(v[2]);
        return EnvironmentConfig{std::move(id), v[0], v[1], v[2]};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Algorithm variants

enum class VariantKind { PlainNsga2, DnsgaIIA, DnsgaIIB, Rnd, SvmDmoea };

struct AlgorithmVariant {
    VariantKind kind = VariantKind::SvmDmoea;
    double replace_fraction = 0.2; // DNSGA-II-A / -B only

    static AlgorithmVariant svm_dmoea() { return {VariantKind::SvmDmoea, 0.2}; }
    static AlgorithmVariant plain_nsga2() { return {VariantKind::PlainNsga2, 0.2}; }
    static AlgorithmVariant rnd() { return {VariantKind::Rnd, 0.2}; }
    static AlgorithmVariant dnsga2_a(double fraction = 0.2) { return {VariantKind::DnsgaIIA, fraction}; }
    static AlgorithmVariant dnsga2_b(double fraction = 0.2) { return {VariantKind::DnsgaIIB, fraction}; }

    void validate() const {
        if ((kind == VariantKind::DnsgaIIA || kind == VariantKind::DnsgaIIB)
            && !(replace_fraction > 0.0 && replace_fraction < 1.0)) {
            throw std::invalid_argument("AlgorithmVariant: replace_fraction must lie in (0, 1)");
        }
    }

    friend bool operator==(AlgorithmVariant const&, AlgorithmVariant const&) = default;
};

inline constexpr std::array kAllVariantKinds = {VariantKind::PlainNsga2, VariantKind::DnsgaIIA, VariantKind::DnsgaIIB,
                                                VariantKind::Rnd, VariantKind::SvmDmoea};

/// Short identifier used in plans, file names and CSV records.
inline std::string_view to_string(VariantKind kind) {
    switch (kind) {
    case VariantKind::PlainNsga2: return "nsga2";
    case VariantKind::DnsgaIIA: return "dnsga2-a";
    case VariantKind::DnsgaIIB: return "dnsga2-b";
    case VariantKind::Rnd: return "rnd";
    case VariantKind::SvmDmoea: return "svm-dmoea";
    }
    return "?";
}

/// Column heading used in summary tables.
inline std::string_view display_name(VariantKind kind) {
    switch (kind) {
    case VariantKind::PlainNsga2: return "NSGA2";
    case VariantKind::DnsgaIIA: return "DNSGA-II-A";
    case VariantKind::DnsgaIIB: return "DNSGA-II-B";
    case VariantKind::Rnd: return "RND";
    case VariantKind::SvmDmoea: return "SVM-DMOEA";
    }
    return "?";
}

inline std::optional<VariantKind> parse_variant(std::string_view token) {
    for (auto kind : kAllVariantKinds) {
        if (detail::iequals(to_string(kind), token) || detail::iequals(display_name(kind), token)) {
            return kind;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Settings

struct FilterParams {
    std::size_t candidate_count = 1000; // candidates drawn per attempt
    std::size_t max_attempts = 10;
    std::size_t min_accept = 50;

    static FilterParams defaults_for(std::size_t pop_size) {
        return {10 * pop_size, 10, std::max<std::size_t>(1, pop_size / 2)};
    }

    void validate(std::size_t pop_size) const {
        if (candidate_count == 0 || max_attempts == 0 || min_accept == 0) {
            throw std::invalid_argument("FilterParams: all fields must be positive");
        }
        if (min_accept > pop_size || pop_size > candidate_count * max_attempts) {
            throw std::invalid_argument("FilterParams: need min_accept <= pop_size <= candidate_count * max_attempts");
        }
    }

    friend bool operator==(FilterParams const&, FilterParams const&) = default;
};

/// Kernel choice with the RBF width left open until the feature dimension is known.
struct KernelSpec {
    KernelKind kind = KernelKind::Rbf;
    std::optional<double> gamma; // unset: 1 / feature dimension
    int degree = 3;
    double coef0 = 1.0;

    [[nodiscard]] Kernel resolve(std::size_t dimension) const {
        switch (kind) {
        case KernelKind::Linear: return Kernel::linear();
        case KernelKind::Polynomial: return Kernel::polynomial(degree, coef0);
        case KernelKind::Rbf: return Kernel::rbf(gamma.value_or(1.0 / static_cast<double>(dimension)));
        }
        throw std::logic_error("KernelSpec: unknown kernel");
    }

    friend bool operator==(KernelSpec const&, KernelSpec const&) = default;
};

struct SvmSettings {
    KernelSpec kernel;
    SmoParams smo;
    friend bool operator==(SvmSettings const&, SvmSettings const&) = default;
};

// ---------------------------------------------------------------------------
// Training-set construction and seeding

/// Componentwise map of x onto [0, 1] using the problem bounds.
inline FeatureVector normalize(ProblemInstance const& p, std::span<double const> x) {
    FeatureVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto const [lo, hi] = p.bounds[i];
        out[i] = std::clamp((x[i] - lo) / (hi - lo), 0.0, 1.0);
    }
    return out;
}

struct EnvironmentResult {
    std::size_t env_index = 0;
    double time = 0.0;
    std::vector<Individual> pos;
    Population final_pop;
    double igd = 0.0;
    double initial_igd = 0.0;       // rank-0 front of the seeded population
    std::vector<double> igd_trace;  // per generation, filled when RunSettings::trace_generations
    std::size_t optimizer_evals = 0; // offspring evaluations inside NSGA-II
    std::size_t seeding_evals = 0;   // evaluations spent building the initial population
    std::size_t filter_accepted = 0; // SvmDmoea: candidates accepted by the classifier
    bool degenerate_fallback = false;
};

struct TrainingSetBuild {
    TrainingSet data;
    std::size_t mined_negatives = 0;
    std::size_t generated_negatives = 0;
    std::size_t evaluations = 0;
};

/// Positives: the environment's Pareto set. Negatives: dominated members of
/// the final population, topped up with random vectors dominated by the Pareto
/// set until the classes balance.
template <typename Engine>
TrainingSetBuild build_training_set(EnvironmentResult const& res, ProblemInstance const& p, FilterParams const& fp,
                                    Engine& rng) {
    if (res.final_pop.empty()) {
        throw std::invalid_argument("build_training_set: empty final population");
    }
    TrainingSetBuild out;
    std::set<DecisionVector> positives;
    for (auto const& ind : res.pos) {
        out.data.samples.push_back(normalize(p, ind.x));
        out.data.labels.push_back(1);
        positives.insert(ind.x);
    }
    std::size_t negatives = 0;
    for (auto const& ind : res.final_pop.members) {
        if (ind.rank > 0 && !positives.contains(ind.x)) {
            out.data.samples.push_back(normalize(p, ind.x));
            out.data.labels.push_back(-1);
            ++negatives;
        }
    }
    out.mined_negatives = negatives;

    std::size_t const budget = fp.candidate_count * fp.max_attempts;
    for (std::size_t draws = 0; negatives < res.pos.size() && draws < budget; ++draws) {
        auto x = random_decision(p, rng);
        auto const f = evaluate(p, x, res.time);
        ++out.evaluations;
        bool const dominated = std::any_of(res.pos.begin(), res.pos.end(),
                                           [&](Individual const& ind) { return dominates(ind.f, f); });
        if (dominated && !positives.contains(x)) {
            out.data.samples.push_back(normalize(p, x));
            out.data.labels.push_back(-1);
            ++negatives;
            ++out.generated_negatives;
        }
    }
    if (negatives == 0 || res.pos.empty()) {
        throw DegenerateTrainingSet("no negative examples found for " + std::string(p.name));
    }
    return out;
}

struct SeedResult {
    Population pop;
    std::size_t accepted = 0;
    std::size_t evaluations = 0;
    bool starved = false; // fewer than min_accept candidates passed the filter
};

/// Screens batches of random candidates with the classifier; accepted ones
/// are evaluated at t_next. Any shortfall is filled with unfiltered random
/// vectors so the result always holds exactly pop_size members, accepted
/// members first.
template <typename Engine>
SeedResult seed_population(SvmModel const& model, ProblemInstance const& p, double t_next, FilterParams const& fp,
                           std::size_t pop_size, Engine& rng) {
    SeedResult out;
    out.pop.capacity = pop_size;
    out.pop.members.reserve(pop_size);
    for (std::size_t attempt = 0; attempt < fp.max_attempts && out.pop.size() < pop_size; ++attempt) {
        for (std::size_t c = 0; c < fp.candidate_count && out.pop.size() < pop_size; ++c) {
            auto x = random_decision(p, rng);
            if (predict(model, normalize(p, x)) != 1) {
                continue;
            }
            Individual ind;
            ind.f = evaluate(p, x, t_next);
            ind.x = std::move(x);
            ++out.evaluations;
            out.pop.members.push_back(std::move(ind));
        }
    }
    out.accepted = out.pop.size();
    out.starved = out.accepted < fp.min_accept;
    while (out.pop.size() < pop_size) {
        Individual ind;
        ind.x = random_decision(p, rng);
        ind.f = evaluate(p, ind.x, t_next);
        ++out.evaluations;
        out.pop.members.push_back(std::move(ind));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full run

struct RunSettings {
    GAParams ga;
    std::optional<FilterParams> filter; // unset: FilterParams::defaults_for(ga.pop_size)
    SvmSettings svm;
    std::size_t reference_samples = kDefaultReferenceSamples;
    bool trace_generations = false;
};

namespace detail {

inline Population carry_forward(Population const& prev, ProblemInstance const& p, double t, std::size_t& evals) {
    Population pop = prev;
    for (auto& ind : pop.members) {
        ind.f = evaluate(p, ind.x, t);
        ++evals;
    }
    return pop;
}

// Distinct member indices chosen uniformly at random.
template <typename Engine>
std::vector<std::size_t> pick_members(std::size_t size, std::size_t count, Engine& rng) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(idx[i], idx[i + rnd::below(rng, size - i)]);
    }
    idx.resize(count);
    return idx;
}

} // namespace detail

/// Runs one algorithm variant across every environment of the configuration.
/// Deterministic in (variant, problem, config, settings, seed).
inline std::vector<EnvironmentResult> run(AlgorithmVariant const& variant, ProblemInstance const& problem,
                                          EnvironmentConfig const& config, RunSettings const& settings,
                                          std::uint64_t seed) {
    variant.validate();
    GAParams ga = settings.ga;
    ga.generations_per_env = static_cast<std::size_t>(config.tau_t);
    ga.validate();
    FilterParams const fp = settings.filter.value_or(FilterParams::defaults_for(ga.pop_size));
    fp.validate(ga.pop_size);
    auto const clock = config.clock();

    ProblemInstance p = problem;
    p.variable_seed = rnd::mix(seed, 0x6d4f5033ULL);
    Rng rng(rnd::mix(seed));

    std::size_t const n = ga.pop_size;
    std::vector<EnvironmentResult> results;
    results.reserve(clock.environment_count());

    for (long env = 0; env < clock.environment_count(); ++env) {
        EnvironmentResult res;
        res.env_index = static_cast<std::size_t>(env);
        res.time = time_of_environment(config.n_t, env);
        Population pop;

        if (env == 0) {
            pop = random_population(p, res.time, n, rng);
            res.seeding_evals = n;
        } else {
            auto const& prev = results.back();
            switch (variant.kind) {
            case VariantKind::PlainNsga2:
                pop = detail::carry_forward(prev.final_pop, p, res.time, res.seeding_evals);
                break;
            case VariantKind::Rnd:
                pop = random_population(p, res.time, n, rng);
                res.seeding_evals = n;
                break;
            case VariantKind::DnsgaIIA:
            case VariantKind::DnsgaIIB: {
                pop = prev.final_pop;
                auto const k = static_cast<std::size_t>(std::lround(variant.replace_fraction * static_cast<double>(n)));
                for (auto i : detail::pick_members(pop.size(), std::min(k, pop.size()), rng)) {
                    auto& x = pop.members[i].x;
                    x = variant.kind == VariantKind::DnsgaIIA ? random_decision(p, rng)
                                                              : polynomial_mutation(x, p.bounds, ga, rng);
                }
                for (auto& ind : pop.members) {
                    ind.f = evaluate(p, ind.x, res.time);
                    ++res.seeding_evals;
                }
                break;
            }
            case VariantKind::SvmDmoea: {
                try {
                    auto build = build_training_set(prev, p, fp, rng);
                    res.seeding_evals += build.evaluations;
                    auto const kernel = settings.svm.kernel.resolve(p.decision_dim);
                    auto const model = train(build.data, kernel, settings.svm.smo, rng);
                    auto seeded = seed_population(model, p, res.time, fp, n, rng);
                    res.seeding_evals += seeded.evaluations;
                    res.filter_accepted = seeded.accepted;
                    pop = std::move(seeded.pop);
                } catch (DegenerateTrainingSet const&) {
                    res.degenerate_fallback = true;
                    pop = random_population(p, res.time, n, rng);
                    res.seeding_evals += n;
                }
                break;
            }
            }
        }

        auto const reference = reference_front(p, res.time, settings.reference_samples);
        auto const front_igd = [&](Population const& q) {
            std::vector<ObjectiveVector> front;
            for (auto const& ind : q.members) {
                if (ind.rank == 0) {
                    front.push_back(ind.f);
                }
            }
            return igd(reference, front);
        };
        rank_population(pop);
        res.initial_igd = front_igd(pop);

        auto out = nsga2_run(std::move(pop), p, res.time, ga, rng, [&](std::size_t, Population const& q) {
            if (settings.trace_generations) {
                res.igd_trace.push_back(front_igd(q));
            }
        });
        res.optimizer_evals = out.evaluations;
        std::vector<ObjectiveVector> approx;
        approx.reserve(out.pos.size());
        for (auto const& ind : out.pos) {
            approx.push_back(ind.f);
        }
        res.igd = igd(reference, approx);
        res.pos = std::move(out.pos);
        res.final_pop = std::move(out.final_pop);
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace svmdmoea
