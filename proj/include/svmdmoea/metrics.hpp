#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "svmdmoea/problems.hpp"

namespace svmdmoea {

class EmptyApproximation : public std::invalid_argument {
public:
    EmptyApproximation() : std::invalid_argument("igd: empty approximation") {}
};

/// Inverted generational distance: mean over reference points of the
/// Euclidean distance to the closest approximation point.
inline double igd(std::span<ObjectiveVector const> reference, std::span<ObjectiveVector const> approx) {
    if (reference.empty()) {
        throw std::invalid_argument("igd: empty reference front");
    }
    if (approx.empty()) {
        throw EmptyApproximation{};
    }
    std::size_t const m = reference.front().size();
    double total = 0.0;
    for (auto const& r : reference) {
        double best = std::numeric_limits<double>::infinity();
        for (auto const& a : approx) {
            if (a.size() != m || r.size() != m) {
                throw std::invalid_argument("igd: objective count mismatch");
            }
            double d2 = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                double const d = r[k] - a[k];
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
        total += std::sqrt(best);
    }
    return total / static_cast<double>(reference.size());
}

inline double igd(ReferenceFront const& ref, std::span<ObjectiveVector const> approx) {
    return igd(std::span<ObjectiveVector const>(ref.points), approx);
}

struct TimedIgd {
    double time = 0.0;
    double igd = 0.0;
    friend bool operator==(TimedIgd const&, TimedIgd const&) = default;
};

/// Mean IGD over the environments of one run.
inline double migd(std::span<TimedIgd const> series) {
    if (series.empty()) {
        throw std::invalid_argument("migd: empty series");
    }
    double sum = 0.0;
    for (auto const& s : series) {
        sum += s.igd;
    }
    return sum / static_cast<double>(series.size());
}

/// Mean of per-configuration MIGD values.
template <typename Key>
double dmigd(std::map<Key, double> const& migds_by_config) {
    if (migds_by_config.empty()) {
        throw std::invalid_argument("dmigd: no configurations");
    }
    double sum = 0.0;
    for (auto const& [config, value] : migds_by_config) {
        sum += value;
    }
    return sum / static_cast<double>(migds_by_config.size());
}

} // namespace svmdmoea
