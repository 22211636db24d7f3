#pragma once

// Test-side reference implementations, written independently of the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline bool weakly_better_everywhere(std::vector<double> const& a, std::vector<double> const& b) {
    bool strict = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) {
            return false;
        }
        strict = strict || a[k] < b[k];
    }
    return strict;
}

/// Rank by repeated peeling: a point's rank is the number of peels before no
/// remaining point dominates it.
inline std::vector<std::size_t> peel_ranks(std::vector<std::vector<double>> const& f) {
    std::size_t const n = f.size();
    std::vector<std::size_t> rank(n, std::numeric_limits<std::size_t>::max());
    std::size_t assigned = 0;
    for (std::size_t level = 0; assigned < n; ++level) {
        std::vector<std::size_t> layer;
        for (std::size_t i = 0; i < n; ++i) {
            if (rank[i] != std::numeric_limits<std::size_t>::max()) {
                continue;
            }
            bool dominated = false;
            for (std::size_t j = 0; j < n && !dominated; ++j) {
                dominated = rank[j] == std::numeric_limits<std::size_t>::max() && j != i
                            && weakly_better_everywhere(f[j], f[i]);
            }
            if (!dominated) {
                layer.push_back(i);
            }
        }
        for (auto i : layer) {
            rank[i] = level;
        }
        assigned += layer.size();
    }
    return rank;
}

/// Dual objective sum(a) - 0.5 a'Qa with Q_ij = y_i y_j K_ij.
inline double dual_value(Eigen::MatrixXd const& Q, Eigen::VectorXd const& a) { return a.sum() - 0.5 * a.dot(Q * a); }

/// Exact maximum of the soft-margin dual for small sets. Every alpha is
/// either 0, C or free; for each of the 3^n patterns the free block solves
/// the equality-constrained stationarity system, and feasible solutions
/// compete on objective value.
inline std::optional<double> dual_maximum(Eigen::MatrixXd const& K, std::vector<int> const& y, double C) {
    int const n = static_cast<int>(y.size());
    Eigen::MatrixXd Q(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Q(i, j) = y[i] * y[j] * K(i, j);
        }
    }
    std::optional<double> best;
    std::vector<int> state(n, 0); // 0: at zero, 1: at C, 2: free
    long total = 1;
    for (int i = 0; i < n; ++i) {
        total *= 3;
    }
    for (long code = 0; code < total; ++code) {
        long c = code;
        std::vector<int> free_idx;
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            state[i] = static_cast<int>(c % 3);
            c /= 3;
            if (state[i] == 1) {
                a(i) = C;
            } else if (state[i] == 2) {
                free_idx.push_back(i);
            }
        }
        int const m = static_cast<int>(free_idx.size());
        if (m > 0) {
            // [Q_FF  y_F] [a_F]   [1 - Q_FB a_B]
            // [y_F'   0 ] [nu ] = [ -y_B' a_B  ]
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
            Eigen::VectorXd rhs(m + 1);
            double yb = 0.0;
            for (int i = 0; i < n; ++i) {
                yb += y[i] * a(i);
            }
            for (int r = 0; r < m; ++r) {
                int const i = free_idx[r];
                double fixed = 0.0;
                for (int j = 0; j < n; ++j) {
                    fixed += Q(i, j) * a(j);
                }
                rhs(r) = 1.0 - fixed;
                for (int s = 0; s < m; ++s) {
                    A(r, s) = Q(i, free_idx[s]);
                }
                A(r, m) = y[i];
                A(m, r) = y[i];
            }
            rhs(m) = -yb;
            Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
            if ((A * sol - rhs).norm() > 1e-8) {
                continue;
            }
            bool feasible = true;
            for (int r = 0; r < m; ++r) {
                double const v = sol(r);
                if (v < -1e-9 || v > C + 1e-9) {
                    feasible = false;
                }
                a(free_idx[r]) = std::clamp(v, 0.0, C);
            }
            if (!feasible) {
                continue;
            }
        }
        double eq = 0.0;
        for (int i = 0; i < n; ++i) {
            eq += y[i] * a(i);
        }
        if (std::abs(eq) > 1e-7) {
            continue;
        }
        double const v = dual_value(Q, a);
        if (!best || v > *best) {
            best = v;
        }
    }
    return best;
}

} // namespace oracle
