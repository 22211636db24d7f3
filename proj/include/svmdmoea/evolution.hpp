#pragma once

// NSGA-II: dominance, fast nondominated sorting, crowding distance,
// SBX / polynomial-mutation variation and the (mu + lambda) generational
// loop, run against a problem frozen at one time value.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "svmdmoea/problems.hpp"
#include "svmdmoea/random.hpp"

namespace svmdmoea {

inline constexpr double kInfiniteCrowding = std::numeric_limits<double>::infinity();

struct Individual {
    DecisionVector x;
    ObjectiveVector f;
    std::size_t rank = 0;
    double crowding = 0.0;
};

struct Population {
    std::vector<Individual> members;
    std::size_t capacity = 0;

    [[nodiscard]] std::size_t size() const { return members.size(); }
    [[nodiscard]] bool empty() const { return members.empty(); }
};

struct GAParams {
    std::size_t pop_size = 100;
    double crossover_prob = 0.9;
    std::optional<double> mutation_prob; // unset: 1 / decision_dim
    double eta_c = 20.0;
    double eta_m = 20.0;
    std::size_t generations_per_env = 5;

    [[nodiscard]] double mutation_rate(std::size_t decision_dim) const {
        return mutation_prob.value_or(1.0 / static_cast<double>(decision_dim));
    }

    void validate() const {
        if (pop_size == 0) {
            throw std::invalid_argument("GAParams: pop_size must be positive");
        }
        if (crossover_prob < 0.0 || crossover_prob > 1.0) {
            throw std::invalid_argument("GAParams: crossover_prob outside [0, 1]");
        }
        if (mutation_prob && (*mutation_prob < 0.0 || *mutation_prob > 1.0)) {
            throw std::invalid_argument("GAParams: mutation_prob outside [0, 1]");
        }
        if (!(eta_c > 0.0) || !(eta_m > 0.0)) {
            throw std::invalid_argument("GAParams: distribution indices must be positive");
        }
    }

    friend bool operator==(GAParams const&, GAParams const&) = default;
};

// ---------------------------------------------------------------------------
// Dominance and sorting

/// Pareto dominance for minimization.
inline bool dominates(std::span<double const> a, std::span<double const> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dominates: objective vectors differ in length");
    }
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) {
            return false;
        }
        if (a[i] < b[i]) {
            strictly_better = true;
        }
    }
    return strictly_better;
}

using Fronts = std::vector<std::vector<std::size_t>>;

/// Deb's O(M N^2) sort over a list of objective vectors.
inline Fronts nondominated_fronts(std::span<ObjectiveVector const> objectives) {
    std::size_t const n = objectives.size();
    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    Fronts fronts;
    if (n == 0) {
        return fronts;
    }
    fronts.emplace_back();
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(objectives[p], objectives[q])) {
                dominated_by_me[p].push_back(q);
                ++domination_count[q];
            } else if (dominates(objectives[q], objectives[p])) {
                dominated_by_me[q].push_back(p);
                ++domination_count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (domination_count[p] == 0) {
            fronts[0].push_back(p);
        }
    }
    for (std::size_t k = 0; !fronts[k].empty(); ++k) {
        std::vector<std::size_t> next;
        for (auto p : fronts[k]) {
            for (auto q : dominated_by_me[p]) {
                if (--domination_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

/// Sorts the population into fronts and writes each member's rank.
inline Fronts fast_nondominated_sort(Population& pop) {
    std::vector<ObjectiveVector> objectives;
    objectives.reserve(pop.size());
    for (auto const& ind : pop.members) {
        objectives.push_back(ind.f);
    }
    auto fronts = nondominated_fronts(objectives);
    for (std::size_t k = 0; k < fronts.size(); ++k) {
        for (auto i : fronts[k]) {
            pop.members[i].rank = k;
        }
    }
    return fronts;
}

/// Crowding distance of each member of one front; output order follows input.
inline std::vector<double> crowding_distance(std::span<ObjectiveVector const> front) {
    std::size_t const n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n == 0) {
        return distance;
    }
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), kInfiniteCrowding);
        return distance;
    }
    std::size_t const m = front.front().size();
    std::vector<std::size_t> order(n);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][obj] < front[b][obj]; });
        double const lo = front[order.front()][obj];
        double const hi = front[order.back()][obj];
        distance[order.front()] = kInfiniteCrowding;
        distance[order.back()] = kInfiniteCrowding;
        double const range = hi - lo;
        if (!(range > 0.0)) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            auto const i = order[k];
            if (distance[i] != kInfiniteCrowding) {
                distance[i] += (front[order[k + 1]][obj] - front[order[k - 1]][obj]) / range;
            }
        }
    }
    return distance;
}

inline void assign_crowding(Population& pop, Fronts const& fronts) {
    std::vector<ObjectiveVector> objs;
    for (auto const& front : fronts) {
        objs.clear();
        for (auto i : front) {
            objs.push_back(pop.members[i].f);
        }
        auto const d = crowding_distance(objs);
        for (std::size_t k = 0; k < front.size(); ++k) {
            pop.members[front[k]].crowding = d[k];
        }
    }
}

/// Rank-0 members of an already ranked population.
inline std::vector<Individual> first_front(Population const& pop) {
    std::vector<Individual> out;
    for (auto const& ind : pop.members) {
        if (ind.rank == 0) {
            out.push_back(ind);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variation

template <typename Engine>
DecisionVector random_decision(ProblemInstance const& p, Engine& rng) {
    DecisionVector x(p.decision_dim);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rnd::uniform(rng, p.bounds[i].lower, p.bounds[i].upper);
    }
    return x;
}

/// Simulated binary crossover with bound-aware spread (Deb & Agrawal).
template <typename Engine>
std::pair<DecisionVector, DecisionVector> sbx_crossover(DecisionVector const& p1, DecisionVector const& p2,
                                                        std::span<Bound const> bounds, GAParams const& params,
                                                        Engine& rng) {
    if (p1.size() != p2.size() || p1.size() != bounds.size()) {
        throw std::invalid_argument("sbx_crossover: parent/bound length mismatch");
    }
    DecisionVector c1 = p1;
    DecisionVector c2 = p2;
    if (!rnd::coin(rng, params.crossover_prob)) {
        return {c1, c2};
    }
    double const eta = params.eta_c;
    for (std::size_t i = 0; i < p1.size(); ++i) {
        if (!rnd::coin(rng, 0.5) || std::fabs(p1[i] - p2[i]) <= 1e-14) {
            continue;
        }
        double const y1 = std::min(p1[i], p2[i]);
        double const y2 = std::max(p1[i], p2[i]);
        double const lo = bounds[i].lower;
        double const hi = bounds[i].upper;
        double const u = rnd::unit(rng);

        auto spread = [&](double beta) {
            double const alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            double const betaq = u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                                  : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
            return betaq;
        };
        double const gap = y2 - y1;
        double const bq1 = spread(1.0 + 2.0 * (y1 - lo) / gap);
        double const bq2 = spread(1.0 + 2.0 * (hi - y2) / gap);
        double a = 0.5 * ((y1 + y2) - bq1 * gap);
        double b = 0.5 * ((y1 + y2) + bq2 * gap);
        a = std::clamp(a, lo, hi);
        b = std::clamp(b, lo, hi);
        if (rnd::coin(rng, 0.5)) {
            std::swap(a, b);
        }
        c1[i] = a;
        c2[i] = b;
    }
    return {c1, c2};
}

/// Deb's bounded polynomial mutation.
template <typename Engine>
DecisionVector polynomial_mutation(DecisionVector x, std::span<Bound const> bounds, GAParams const& params,
                                   Engine& rng) {
    if (x.size() != bounds.size()) {
        throw std::invalid_argument("polynomial_mutation: bound length mismatch");
    }
    double const pm = params.mutation_rate(x.size());
    double const eta = params.eta_m;
    double const power = 1.0 / (eta + 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!rnd::coin(rng, pm)) {
            continue;
        }
        double const lo = bounds[i].lower;
        double const hi = bounds[i].upper;
        double const width = hi - lo;
        double const y = x[i];
        double const d1 = (y - lo) / width;
        double const d2 = (hi - y) / width;
        double const u = rnd::unit(rng);
        double deltaq = 0.0;
        if (u < 0.5) {
            double const v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
            deltaq = std::pow(v, power) - 1.0;
        } else {
            double const v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            deltaq = 1.0 - std::pow(v, power);
        }
        x[i] = std::clamp(y + deltaq * width, lo, hi);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Generational loop

template <typename Engine>
Population random_population(ProblemInstance const& p, double t, std::size_t size, Engine& rng) {
    Population pop;
    pop.capacity = size;
    pop.members.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        Individual ind;
        ind.x = random_decision(p, rng);
        ind.f = evaluate(p, ind.x, t);
        pop.members.push_back(std::move(ind));
    }
    return pop;
}

/// Ranks and crowding for a freshly evaluated population.
inline void rank_population(Population& pop) {
    auto const fronts = fast_nondominated_sort(pop);
    assign_crowding(pop, fronts);
}

struct Nsga2Result {
    Population final_pop;
    std::vector<Individual> pos;
    std::size_t evaluations = 0;
};

struct NoObserver {
    void operator()(std::size_t /*generation*/, Population const& /*pop*/) const {}
};

namespace detail {

template <typename Engine>
std::size_t tournament(Population const& pop, Engine& rng) {
    auto const a = static_cast<std::size_t>(rnd::below(rng, pop.size()));
    auto const b = static_cast<std::size_t>(rnd::below(rng, pop.size()));
    auto const& ia = pop.members[a];
    auto const& ib = pop.members[b];
    if (ia.rank != ib.rank) {
        return ia.rank < ib.rank ? a : b;
    }
    if (ia.crowding != ib.crowding) {
        return ia.crowding > ib.crowding ? a : b;
    }
    return rnd::coin(rng, 0.5) ? a : b;
}

// (mu + lambda) survival: whole fronts first, the split front by crowding.
inline Population environmental_selection(Population merged, std::size_t capacity) {
    auto const fronts = fast_nondominated_sort(merged);
    assign_crowding(merged, fronts);
    Population next;
    next.capacity = capacity;
    next.members.reserve(capacity);
    for (auto const& front : fronts) {
        if (next.size() + front.size() <= capacity) {
            for (auto i : front) {
                next.members.push_back(std::move(merged.members[i]));
            }
            continue;
        }
        std::vector<std::size_t> order = front;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return merged.members[a].crowding > merged.members[b].crowding;
        });
        for (auto i : order) {
            if (next.size() == capacity) {
                break;
            }
            next.members.push_back(std::move(merged.members[i]));
        }
        break;
    }
    return next;
}

} // namespace detail

/// Runs params.generations_per_env generations of NSGA-II on p frozen at t.
/// pop0 must already be evaluated at t.
template <typename Engine, typename Observer = NoObserver>
Nsga2Result nsga2_run(Population pop0, ProblemInstance const& p, double t, GAParams const& params, Engine& rng,
                      Observer&& observer = {}) {
    params.validate();
    if (pop0.empty()) {
        throw std::invalid_argument("nsga2_run: empty initial population");
    }
    Nsga2Result result;
    Population pop = std::move(pop0);
    pop.capacity = params.pop_size;
    if (pop.size() > pop.capacity) {
        pop = detail::environmental_selection(std::move(pop), pop.capacity);
    }
    rank_population(pop);
    observer(std::size_t{0}, static_cast<Population const&>(pop));

    std::size_t const n = params.pop_size;
    for (std::size_t gen = 0; gen < params.generations_per_env; ++gen) {
        Population merged = pop;
        merged.members.reserve(pop.size() + n);
        std::size_t produced = 0;
        while (produced < n) {
            auto const& a = pop.members[detail::tournament(pop, rng)];
            auto const& b = pop.members[detail::tournament(pop, rng)];
            auto [c1, c2] = sbx_crossover(a.x, b.x, p.bounds, params, rng);
            for (auto* child : {&c1, &c2}) {
                if (produced == n) {
                    break;
                }
                Individual ind;
                ind.x = polynomial_mutation(std::move(*child), p.bounds, params, rng);
                ind.f = evaluate(p, ind.x, t);
                ++result.evaluations;
                merged.members.push_back(std::move(ind));
                ++produced;
            }
        }
        pop = detail::environmental_selection(std::move(merged), n);
        observer(gen + 1, static_cast<Population const&>(pop));
    }

    result.pos = first_front(pop);
    result.final_pop = std::move(pop);
    return result;
}

} // namespace svmdmoea
