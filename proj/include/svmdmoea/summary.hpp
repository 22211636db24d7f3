#pragma once

// Aggregation of run records into comparison tables: DMIGD per problem and
// variant (mean and median over seeds) plus MIGD detail per configuration.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "svmdmoea/dmoea.hpp"
#include "svmdmoea/metrics.hpp"
#include "svmdmoea/records.hpp"

namespace svmdmoea {

struct SeedStats {
    std::map<std::uint64_t, double> per_seed;
    double mean = 0.0;
    double median = 0.0;

    void finish() {
        std::vector<double> v;
        v.reserve(per_seed.size());
        for (auto const& [seed, value] : per_seed) {
            v.push_back(value);
        }
        double sum = 0.0;
        for (double x : v) {
            sum += x;
        }
        mean = sum / static_cast<double>(v.size());
        std::sort(v.begin(), v.end());
        auto const mid = v.size() / 2;
        median = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
    }

    friend bool operator==(SeedStats const&, SeedStats const&) = default;
};

using CellKey = std::pair<std::string, std::string>; // (problem, variant)

struct Summary {
    std::vector<std::string> problems; // table row order
    std::vector<std::string> variants; // table column order
    std::vector<std::string> configs;
    std::map<CellKey, SeedStats> dmigd;
    std::map<std::string, std::map<CellKey, SeedStats>> migd; // by config
    std::size_t failed_runs = 0;

    enum class Statistic { Mean, Median };

    /// Variants attaining the row minimum (several on exact ties).
    [[nodiscard]] std::vector<std::string> best(std::map<CellKey, SeedStats> const& table, std::string const& problem,
                                                Statistic stat) const {
        std::optional<double> lo;
        for (auto const& v : variants) {
            if (auto it = table.find({problem, v}); it != table.end()) {
                double const x = stat == Statistic::Mean ? it->second.mean : it->second.median;
                lo = lo ? std::min(*lo, x) : x;
            }
        }
        std::vector<std::string> out;
        for (auto const& v : variants) {
            if (auto it = table.find({problem, v}); it != table.end()) {
                double const x = stat == Statistic::Mean ? it->second.mean : it->second.median;
                if (x == *lo) {
                    out.push_back(v);
                }
            }
        }
        return out;
    }

    friend bool operator==(Summary const&, Summary const&) = default;
};

namespace detail {

// Known names first in catalogue order, anything else alphabetically after.
template <typename Known>
std::vector<std::string> ordered(std::vector<std::string> names, Known rank) {
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    std::stable_sort(names.begin(), names.end(),
                     [&](std::string const& a, std::string const& b) { return rank(a) < rank(b); });
    return names;
}

inline std::size_t problem_rank(std::string const& name) {
    auto const id = parse_problem(name);
    return id ? static_cast<std::size_t>(*id) : kAllProblems.size();
}

inline std::size_t variant_rank(std::string const& name) {
    auto const kind = parse_variant(name);
    if (!kind) {
        return kAllVariantKinds.size();
    }
    return static_cast<std::size_t>(std::find(kAllVariantKinds.begin(), kAllVariantKinds.end(), *kind)
                                    - kAllVariantKinds.begin());
}

inline std::size_t config_rank(std::string const& id) {
    auto const& table = builtin_configs();
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].id == id) {
            return i;
        }
    }
    return table.size();
}

} // namespace detail

/// Pure function of the record set; the order of `records` is irrelevant.
/// Failed records are counted and otherwise ignored.
inline Summary summarize(std::span<MetricRecord const> records) {
    Summary s;
    std::vector<std::string> problems, variants, configs;
    // (problem, variant, seed) -> config -> migd
    std::map<std::tuple<std::string, std::string, std::uint64_t>, std::map<std::string, double>> by_seed;
    for (auto const& rec : records) {
        if (rec.failed) {
            ++s.failed_runs;
            continue;
        }
        auto const& k = rec.key;
        problems.push_back(k.problem);
        variants.push_back(k.variant);
        configs.push_back(k.config);
        auto& slot = s.migd[k.config][{k.problem, k.variant}].per_seed;
        if (!slot.emplace(k.seed, rec.migd).second) {
            throw std::invalid_argument("summarize: duplicate record for " + k.label());
        }
        by_seed[{k.problem, k.variant, k.seed}][k.config] = rec.migd;
    }
    s.problems = detail::ordered(std::move(problems), detail::problem_rank);
    s.variants = detail::ordered(std::move(variants), detail::variant_rank);
    s.configs = detail::ordered(std::move(configs), detail::config_rank);

    for (auto& [config, table] : s.migd) {
        for (auto& [cell, stats] : table) {
            stats.finish();
        }
    }
    for (auto const& [key, per_config] : by_seed) {
        auto const& [problem, variant, seed] = key;
        s.dmigd[{problem, variant}].per_seed[seed] = svmdmoea::dmigd(per_config);
    }
    for (auto& [cell, stats] : s.dmigd) {
        stats.finish();
    }
    return s;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::string cell_display(std::string const& variant) {
    auto const kind = parse_variant(variant);
    return kind ? std::string(display_name(*kind)) : variant;
}

inline void markdown_table(std::ostringstream& os, Summary const& s, std::map<CellKey, SeedStats> const& table,
                           Summary::Statistic stat, std::string const& corner) {
    os << "| " << corner << " |";
    for (auto const& v : s.variants) {
        os << ' ' << cell_display(v) << " |";
    }
    os << "\n|---|";
    for (std::size_t i = 0; i < s.variants.size(); ++i) {
        os << "---:|";
    }
    os << '\n';
    for (auto const& p : s.problems) {
        bool any = false;
        for (auto const& v : s.variants) {
            any = any || table.contains({p, v});
        }
        if (!any) {
            continue;
        }
        auto const best = s.best(table, p, stat);
        os << "| " << p << " |";
        for (auto const& v : s.variants) {
            auto it = table.find({p, v});
            if (it == table.end()) {
                os << " - |";
                continue;
            }
            auto const text = fixed4(stat == Summary::Statistic::Mean ? it->second.mean : it->second.median);
            bool const flagged = std::find(best.begin(), best.end(), v) != best.end();
            os << ' ' << (flagged ? "**" + text + "**" : text) << " |";
        }
        os << '\n';
    }
}

} // namespace detail

inline std::string render_markdown(Summary const& s) {
    using Stat = Summary::Statistic;
    std::ostringstream os;
    os << "## DMIGD, mean over seeds\n\n";
    detail::markdown_table(os, s, s.dmigd, Stat::Mean, "DMIGD");
    os << "\n## DMIGD, median over seeds\n\n";
    detail::markdown_table(os, s, s.dmigd, Stat::Median, "DMIGD");
    os << "\n## DMIGD per seed\n\n| problem | variant | seed | DMIGD |\n|---|---|---:|---:|\n";
    for (auto const& p : s.problems) {
        for (auto const& v : s.variants) {
            if (auto it = s.dmigd.find({p, v}); it != s.dmigd.end()) {
                for (auto const& [seed, value] : it->second.per_seed) {
                    os << "| " << p << " | " << detail::cell_display(v) << " | " << seed << " | "
                       << detail::fixed4(value) << " |\n";
                }
            }
        }
    }
    for (auto const& c : s.configs) {
        auto const& table = s.migd.at(c);
        os << "\n## MIGD under " << c << ", mean over seeds\n\n";
        detail::markdown_table(os, s, table, Stat::Mean, "MIGD");
        os << "\n## MIGD under " << c << ", median over seeds\n\n";
        detail::markdown_table(os, s, table, Stat::Median, "MIGD");
    }
    if (s.failed_runs > 0) {
        os << "\n" << s.failed_runs << " failed run(s) excluded.\n";
    }
    return os.str();
}

/// Long format: one row per statistic, for external plotting.
inline std::string render_csv(Summary const& s) {
    using Stat = Summary::Statistic;
    std::ostringstream os;
    os << "table,problem,variant,config,seed,statistic,value,best\n";
    auto emit_stats = [&](std::string const& table_name, std::string const& config,
                          std::map<CellKey, SeedStats> const& table) {
        for (auto const& p : s.problems) {
            auto const best_mean = s.best(table, p, Stat::Mean);
            auto const best_median = s.best(table, p, Stat::Median);
            for (auto const& v : s.variants) {
                auto it = table.find({p, v});
                if (it == table.end()) {
                    continue;
                }
                auto flag = [&](std::vector<std::string> const& b) {
                    return std::find(b.begin(), b.end(), v) != b.end() ? 1 : 0;
                };
                os << table_name << ',' << p << ',' << v << ',' << config << ",,mean,"
                   << detail::shortest(it->second.mean) << ',' << flag(best_mean) << '\n';
                os << table_name << ',' << p << ',' << v << ',' << config << ",,median,"
                   << detail::shortest(it->second.median) << ',' << flag(best_median) << '\n';
                for (auto const& [seed, value] : it->second.per_seed) {
                    os << table_name << ',' << p << ',' << v << ',' << config << ',' << seed << ",seed,"
                       << detail::shortest(value) << ",0\n";
                }
            }
        }
    };
    emit_stats("dmigd", "all", s.dmigd);
    for (auto const& c : s.configs) {
        emit_stats("migd", c, s.migd.at(c));
    }
    return os.str();
}

} // namespace svmdmoea
