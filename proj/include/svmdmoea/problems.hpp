#pragma once

// Dynamic multi-objective benchmark suite (the twelve functions of the
// CEC 2015 dynamic MOO competition), the environment clock that drives
// them, and analytic Pareto-front samplers used by the IGD metric.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svmdmoea/random.hpp"

namespace svmdmoea {

using DecisionVector = std::vector<double>;
using ObjectiveVector = std::vector<double>;

struct Bound {
    double lower;
    double upper;
    friend bool operator==(Bound const&, Bound const&) = default;
};

// ---------------------------------------------------------------------------
// Environment clock

struct TimeController {
    int n_t = 10;   // severity of change
    int tau_t = 5;  // generations between changes
    int tau_T = 25; // total generations
    long generation = 0;

    TimeController() = default;
    TimeController(int severity, int frequency, int max_generations, long gen = 0)
        : n_t(severity), tau_t(frequency), tau_T(max_generations), generation(gen) {
        if (n_t <= 0 || tau_t <= 0 || tau_T <= 0) {
            throw std::invalid_argument("TimeController: n_t, tau_t and tau_T must be positive");
        }
        if (tau_T % tau_t != 0) {
            throw std::invalid_argument("TimeController: tau_T must be a multiple of tau_t");
        }
        if (gen < 0) {
            throw std::invalid_argument("TimeController: negative generation");
        }
    }

    [[nodiscard]] long environment_index() const { return generation / tau_t; }
    [[nodiscard]] long environment_count() const { return tau_T / tau_t; }
    [[nodiscard]] bool finished() const { return generation >= tau_T; }

    void advance(long generations = 1) { generation += generations; }
};

/// t = (1/n_t) * floor(generation / tau_t)
inline double current_time(TimeController const& tc) {
    return static_cast<double>(tc.environment_index()) / static_cast<double>(tc.n_t);
}

inline double time_of_environment(int n_t, long env_index) {
    return static_cast<double>(env_index) / static_cast<double>(n_t);
}

// ---------------------------------------------------------------------------
// Problem catalogue

enum class ProblemId { FDA4, FDA5, FDA5_iso, FDA5_dec, DIMP2, dMOP2, dMOP2_iso, dMOP2_dec, dMOP3, HE2, HE7, HE9 };

enum class DmopType { TypeI, TypeII, TypeIII };

inline constexpr std::array kAllProblems = {
    ProblemId::FDA4,  ProblemId::FDA5,      ProblemId::FDA5_iso,  ProblemId::FDA5_dec,
    ProblemId::DIMP2, ProblemId::dMOP2,     ProblemId::dMOP2_iso, ProblemId::dMOP2_dec,
    ProblemId::dMOP3, ProblemId::HE2,       ProblemId::HE7,       ProblemId::HE9,
};

struct ProblemTraits {
    ProblemId id;
    std::string_view name;
    std::size_t decision_dim;
    std::size_t objective_count;
    DmopType type;
};

inline constexpr std::array<ProblemTraits, 12> kProblemTable = {{
    {ProblemId::FDA4, "FDA4", 12, 3, DmopType::TypeI},
    {ProblemId::FDA5, "FDA5", 12, 3, DmopType::TypeII},
    {ProblemId::FDA5_iso, "FDA5_iso", 12, 3, DmopType::TypeII},
    {ProblemId::FDA5_dec, "FDA5_dec", 12, 3, DmopType::TypeII},
    {ProblemId::DIMP2, "DIMP2", 10, 2, DmopType::TypeI},
    {ProblemId::dMOP2, "dMOP2", 10, 2, DmopType::TypeII},
    {ProblemId::dMOP2_iso, "dMOP2_iso", 10, 2, DmopType::TypeII},
    {ProblemId::dMOP2_dec, "dMOP2_dec", 10, 2, DmopType::TypeII},
    {ProblemId::dMOP3, "dMOP3", 10, 2, DmopType::TypeI},
    {ProblemId::HE2, "HE2", 30, 2, DmopType::TypeIII},
    {ProblemId::HE7, "HE7", 10, 2, DmopType::TypeIII},
    {ProblemId::HE9, "HE9", 10, 2, DmopType::TypeIII},
}};

inline ProblemTraits const& traits(ProblemId id) {
    return kProblemTable[static_cast<std::size_t>(id)];
}

inline std::string_view to_string(ProblemId id) { return traits(id).name; }

inline std::string_view to_string(DmopType type) {
    switch (type) {
    case DmopType::TypeI: return "TYPE I";
    case DmopType::TypeII: return "TYPE II";
    case DmopType::TypeIII: return "TYPE III";
    }
    return "?";
}

namespace detail {
inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}
} // namespace detail

/// Case-insensitive lookup of a problem identifier.
inline std::optional<ProblemId> parse_problem(std::string_view name) {
    for (auto const& row : kProblemTable) {
        if (detail::iequals(row.name, name)) {
            return row.id;
        }
    }
    return std::nullopt;
}

/// Parameters of the isolated/deceptive bias transforms; A is G(t) and is
/// resolved at evaluation time.
struct SeverityParams {
    double b = 0.001;
    double c = 0.05;
    friend bool operator==(SeverityParams const&, SeverityParams const&) = default;
};

struct ProblemInstance {
    ProblemId id = ProblemId::dMOP2;
    std::string_view name;
    std::size_t decision_dim = 0;
    std::size_t objective_count = 0;
    DmopType type = DmopType::TypeI;
    std::vector<Bound> bounds;
    std::optional<SeverityParams> severity;
    // Picks dMOP3's position-related variable for each environment.
    std::uint64_t variable_seed = 0;

    friend bool operator==(ProblemInstance const&, ProblemInstance const&) = default;
};

inline ProblemInstance make_problem(ProblemId id, std::uint64_t variable_seed = 0) {
    auto const& row = traits(id);
    ProblemInstance p;
    p.id = id;
    p.name = row.name;
    p.decision_dim = row.decision_dim;
    p.objective_count = row.objective_count;
    p.type = row.type;
    p.variable_seed = variable_seed;
    p.bounds.assign(p.decision_dim, Bound{0.0, 1.0});
    switch (id) {
    case ProblemId::DIMP2:
        std::fill(p.bounds.begin() + 1, p.bounds.end(), Bound{-2.0, 2.0});
        break;
    case ProblemId::HE7:
    case ProblemId::HE9:
        std::fill(p.bounds.begin() + 1, p.bounds.end(), Bound{-1.0, 1.0});
        break;
    case ProblemId::FDA5_iso:
    case ProblemId::FDA5_dec:
    case ProblemId::dMOP2_iso:
    case ProblemId::dMOP2_dec:
        p.severity = SeverityParams{};
        break;
    default:
        break;
    }
    return p;
}

inline std::vector<Bound> const& bounds(ProblemInstance const& p) { return p.bounds; }

// ---------------------------------------------------------------------------
// Objective functions

namespace detail {

inline constexpr double kPi = std::numbers::pi;

// |sin(0.5 pi t)|, the FDA distance function
inline double fda_g(double t) { return std::fabs(std::sin(0.5 * kPi * t)); }
// sin(0.5 pi t), the dMOP distance function
inline double dmop_g(double t) { return std::sin(0.5 * kPi * t); }
inline double he_h(double t) { return 0.75 * std::sin(0.5 * kPi * t) + 1.25; }

// Flat-region (isolated optimum) bias: y == a for x in [b, c].
inline double isolated(double x, double a, double b, double c) {
    return a + std::min(0.0, std::floor(x - b)) * a * (b - x) / b
           - std::min(0.0, std::floor(c - x)) * (1.0 - a) * (x - c) / (1.0 - c);
}

// Deceptive bias: global minimum 0 at x == a, deceptive basins at the bounds.
inline double deceptive(double x, double a, double b, double c) {
    double const left = std::floor(x - a + b) * (1.0 - c + (a - b) / b) / (a - b);
    double const right = std::floor(a + b - x) * (1.0 - c + (1.0 - a - b) / b) / (1.0 - a - b);
    return 1.0 + (std::fabs(x - a) - b) * (left + right + 1.0 / b);
}

inline double distance_term(ProblemInstance const& p, double x, double g_t) {
    if (!p.severity) {
        return x;
    }
    switch (p.id) {
    case ProblemId::FDA5_iso:
    case ProblemId::dMOP2_iso:
        return isolated(x, g_t, p.severity->b, p.severity->c);
    case ProblemId::FDA5_dec:
    case ProblemId::dMOP2_dec:
        return deceptive(x, g_t, p.severity->b, p.severity->c);
    default:
        return x;
    }
}

inline ObjectiveVector fda_sphere(double radius, double y1, double y2) {
    double const a = 0.5 * kPi * y1;
    double const b = 0.5 * kPi * y2;
    return {radius * std::cos(a) * std::cos(b), radius * std::cos(a) * std::sin(b), radius * std::sin(a)};
}

inline std::size_t dmop3_position_variable(ProblemInstance const& p, double t) {
    return static_cast<std::size_t>(rnd::mix(p.variable_seed, std::bit_cast<std::uint64_t>(t)) % p.decision_dim);
}

} // namespace detail

/// Index of the variable dMOP3 treats as f1 at time t. Fixed per (seed, t).
inline std::size_t dmop3_position_variable(ProblemInstance const& p, double t) {
    return detail::dmop3_position_variable(p, t);
}

inline ObjectiveVector evaluate(ProblemInstance const& p, std::span<double const> x, double t) {
    using detail::kPi;
    if (x.size() != p.decision_dim) {
        throw std::invalid_argument("evaluate: " + std::string(p.name) + " expects " + std::to_string(p.decision_dim)
                                    + " decision variables, got " + std::to_string(x.size()));
    }
    std::size_t const n = x.size();

    switch (p.id) {
    case ProblemId::FDA4: {
        double const G = detail::fda_g(t);
        double g = 0.0;
        for (std::size_t i = 2; i < n; ++i) {
            g += (x[i] - G) * (x[i] - G);
        }
        return detail::fda_sphere(1.0 + g, x[0], x[1]);
    }
    case ProblemId::FDA5:
    case ProblemId::FDA5_iso:
    case ProblemId::FDA5_dec: {
        double const G = detail::fda_g(t);
        double const F = 1.0 + 100.0 * std::pow(std::sin(0.5 * kPi * t), 4);
        double g = G;
        for (std::size_t i = 2; i < n; ++i) {
            double const y = detail::distance_term(p, x[i], G);
            g += (y - G) * (y - G);
        }
        return detail::fda_sphere(1.0 + g, std::pow(x[0], F), std::pow(x[1], F));
    }
    case ProblemId::DIMP2: {
        double g = 1.0 + 2.0 * static_cast<double>(n - 1);
        for (std::size_t i = 1; i < n; ++i) {
            // 1-based variable index i+1
            double const s = std::sin(0.5 * kPi * t + 2.0 * kPi * static_cast<double>(i + 1) / static_cast<double>(n + 1));
            double const d = x[i] - s * s;
            g += d * d - 2.0 * std::cos(3.0 * kPi * d);
        }
        double const f1 = x[0];
        return {f1, g * (1.0 - std::sqrt(f1 / g))};
    }
    case ProblemId::dMOP2:
    case ProblemId::dMOP2_iso:
    case ProblemId::dMOP2_dec: {
        double const G = detail::dmop_g(t);
        double const H = detail::he_h(t);
        double g = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            double const y = detail::distance_term(p, x[i], G);
            g += (y - G) * (y - G);
        }
        g = 1.0 + 9.0 * g;
        double const f1 = x[0];
        return {f1, g * (1.0 - std::pow(f1 / g, H))};
    }
    case ProblemId::dMOP3: {
        double const G = detail::dmop_g(t);
        std::size_t const r = detail::dmop3_position_variable(p, t);
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != r) {
                g += (x[i] - G) * (x[i] - G);
            }
        }
        g = 1.0 + 9.0 * g;
        double const f1 = x[r];
        return {f1, g * (1.0 - std::sqrt(f1 / g))};
    }
    case ProblemId::HE2: {
        double const H = detail::he_h(t);
        double sum = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            sum += x[i];
        }
        double const g = 1.0 + 9.0 / static_cast<double>(n - 1) * sum;
        double const f1 = x[0];
        double const r = f1 / g;
        double const h = 1.0 - std::pow(std::sqrt(r), H) - std::pow(r, H) * std::sin(10.0 * kPi * f1);
        return {f1, g * h};
    }
    case ProblemId::HE7:
    case ProblemId::HE9: {
        // j runs over 1-based indices 2..n; odd j feed f1, even j feed g.
        double const x1 = x[0];
        double odd = 0.0;
        double even = 0.0;
        std::size_t n_odd = 0;
        std::size_t n_even = 0;
        for (std::size_t i = 1; i < n; ++i) {
            double const j = static_cast<double>(i + 1);
            double const phase = 6.0 * kPi * x1 + j * kPi / static_cast<double>(n);
            double target = 0.0;
            if (p.id == ProblemId::HE7) {
                double const amp = 0.3 * x1 * x1 * std::cos(4.0 * phase) + 0.6 * x1;
                target = ((i + 1) % 2 == 1) ? amp * std::cos(phase) : amp * std::sin(phase);
            } else {
                target = std::sin(phase);
            }
            double const d = (x[i] - target) * (x[i] - target);
            if ((i + 1) % 2 == 1) {
                odd += d;
                ++n_odd;
            } else {
                even += d;
                ++n_even;
            }
        }
        double const f1 = x1 + (n_odd ? 2.0 / static_cast<double>(n_odd) * odd : 0.0);
        double const base = p.id == ProblemId::HE7 ? 2.0 - std::sqrt(x1) : 2.0 - x1 * x1;
        double const g = base + (n_even ? 2.0 / static_cast<double>(n_even) * even : 0.0);
        double const H = detail::he_h(t);
        return {f1, g * (1.0 - std::pow(f1 / g, H))};
    }
    }
    throw std::logic_error("evaluate: unknown problem");
}

// ---------------------------------------------------------------------------
// Reference fronts

inline constexpr std::size_t kDefaultReferenceSamples = 1000;

struct ReferenceFront {
    std::vector<ObjectiveVector> points;
    double time = 0.0;
    std::string problem_name;
    std::size_t sample_count = 0;
};

namespace detail {

// f2 on the Pareto-optimal curve as a function of f1 (distance terms zero).
inline double pof_curve(ProblemInstance const& p, double f1, double t) {
    switch (p.id) {
    case ProblemId::DIMP2:
    case ProblemId::dMOP3:
        return 1.0 - std::sqrt(f1);
    case ProblemId::dMOP2:
    case ProblemId::dMOP2_iso:
    case ProblemId::dMOP2_dec:
        return 1.0 - std::pow(f1, he_h(t));
    case ProblemId::HE2: {
        double const H = he_h(t);
        return 1.0 - std::pow(std::sqrt(f1), H) - std::pow(f1, H) * std::sin(10.0 * kPi * f1);
    }
    case ProblemId::HE7: {
        double const g = 2.0 - std::sqrt(f1);
        return g * (1.0 - std::pow(f1 / g, he_h(t)));
    }
    case ProblemId::HE9: {
        double const g = 2.0 - f1 * f1;
        return g * (1.0 - std::pow(f1 / g, he_h(t)));
    }
    default:
        throw std::logic_error("pof_curve: not a bi-objective problem");
    }
}

template <typename T>
std::vector<T> pick_evenly(std::vector<T> const& pool, std::size_t n) {
    std::vector<T> out;
    out.reserve(n);
    if (n == 1) {
        out.push_back(pool.front());
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        auto const idx = static_cast<std::size_t>(
            std::llround(static_cast<double>(k) * static_cast<double>(pool.size() - 1) / static_cast<double>(n - 1)));
        out.push_back(pool[idx]);
    }
    return out;
}

inline std::vector<ObjectiveVector> curve_front(ProblemInstance const& p, double t, std::size_t n) {
    // Dense uniform grid over f1, keep the nondominated part, then thin to n.
    std::size_t const dense = std::max<std::size_t>(100'000, 20 * n);
    std::vector<ObjectiveVector> kept;
    double best_f2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dense; ++i) {
        double const f1 = static_cast<double>(i) / static_cast<double>(dense - 1);
        double const f2 = pof_curve(p, f1, t);
        if (f2 < best_f2) {
            best_f2 = f2;
            kept.push_back({f1, f2});
        }
    }
    return pick_evenly(kept, n);
}

inline std::vector<ObjectiveVector> sphere_front(double radius, std::size_t n) {
    // Elevation levels equally spaced; azimuth count per level shrinks with
    // cos(elevation) so arc spacing stays roughly constant.
    std::vector<ObjectiveVector> grid;
    for (std::size_t levels = 2;; ++levels) {
        grid.clear();
        double const step = 1.0 / static_cast<double>(levels - 1);
        for (std::size_t i = 0; i < levels; ++i) {
            double const a = 0.5 * kPi * static_cast<double>(i) * step;
            auto const m = static_cast<std::size_t>(std::floor(std::cos(a) * static_cast<double>(levels - 1) + 1e-9)) + 1;
            for (std::size_t j = 0; j < m; ++j) {
                double const b = m == 1 ? 0.0 : 0.5 * kPi * static_cast<double>(j) / static_cast<double>(m - 1);
                grid.push_back({radius * std::cos(a) * std::cos(b), radius * std::cos(a) * std::sin(b), radius * std::sin(a)});
            }
        }
        if (grid.size() >= n) {
            break;
        }
    }
    return pick_evenly(grid, n);
}

} // namespace detail

/// n points from the analytic Pareto-optimal front of p at time t.
inline ReferenceFront reference_front(ProblemInstance const& p, double t, std::size_t n = kDefaultReferenceSamples) {
    if (n == 0) {
        throw std::invalid_argument("reference_front: n must be positive");
    }
    ReferenceFront rf;
    rf.time = t;
    rf.problem_name = std::string(p.name);
    switch (p.id) {
    case ProblemId::FDA4:
        rf.points = detail::sphere_front(1.0, n);
        break;
    case ProblemId::FDA5:
    case ProblemId::FDA5_iso:
    case ProblemId::FDA5_dec:
        rf.points = detail::sphere_front(1.0 + detail::fda_g(t), n);
        break;
    default:
        rf.points = detail::curve_front(p, t, n);
        break;
    }
    rf.sample_count = rf.points.size();
    return rf;
}

} // namespace svmdmoea
