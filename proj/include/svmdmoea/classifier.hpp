#pragma once

// Soft-margin kernel SVM. The dual
//
//   max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j k(x_i, x_j)
//   s.t. sum(a_i y_i) = 0,  0 <= a_i <= C
//
// is solved by sequential minimal optimization: each step picks the
// maximally KKT-violating index and a partner by second-order gain, and
// updates the pair analytically.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "svmdmoea/random.hpp"

namespace svmdmoea {

using FeatureVector = std::vector<double>;

enum class KernelKind { Linear, Polynomial, Rbf };

struct Kernel {
    KernelKind kind = KernelKind::Rbf;
    int degree = 3;
    double coef0 = 1.0;
    double gamma = 1.0;

    static Kernel linear() { return {KernelKind::Linear, 1, 0.0, 1.0}; }
    static Kernel polynomial(int degree, double coef0) { return {KernelKind::Polynomial, degree, coef0, 1.0}; }
    static Kernel rbf(double gamma) { return {KernelKind::Rbf, 3, 1.0, gamma}; }

    void validate() const {
        if (kind == KernelKind::Rbf && !(gamma > 0.0)) {
            throw std::invalid_argument("Kernel: gamma must be positive");
        }
        if (kind == KernelKind::Polynomial && degree < 1) {
            throw std::invalid_argument("Kernel: degree must be >= 1");
        }
    }

    friend bool operator==(Kernel const&, Kernel const&) = default;
};

inline double kernel_eval(Kernel const& k, std::span<double const> a, std::span<double const> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("kernel_eval: feature vectors differ in length");
    }
    switch (k.kind) {
    case KernelKind::Linear:
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    case KernelKind::Polynomial: {
        double const dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
        return std::pow(dot + k.coef0, k.degree);
    }
    case KernelKind::Rbf: {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double const d = a[i] - b[i];
            d2 += d * d;
        }
        return std::exp(-k.gamma * d2);
    }
    }
    throw std::logic_error("kernel_eval: unknown kernel");
}

struct TrainingSet {
    std::vector<FeatureVector> samples;
    std::vector<int> labels; // +1 / -1

    [[nodiscard]] std::size_t size() const { return samples.size(); }
    [[nodiscard]] std::size_t dimension() const { return samples.empty() ? 0 : samples.front().size(); }
};

struct SmoParams {
    double C = 10.0;
    double tolerance = 1e-3;
    int max_passes = 5;
    long max_iterations = 100'000;

    void validate() const {
        if (!(C > 0.0) || !(tolerance > 0.0) || max_passes <= 0 || max_iterations <= 0) {
            throw std::invalid_argument("SmoParams: all parameters must be positive");
        }
    }

    friend bool operator==(SmoParams const&, SmoParams const&) = default;
};

class DegenerateTrainingSet : public std::runtime_error {
public:
    explicit DegenerateTrainingSet(std::string const& what) : std::runtime_error("degenerate training set: " + what) {}
};

/// Solution of the dual before pruning to support vectors.
struct DualSolution {
    std::vector<double> alpha;
    double bias = 0.0;
    double objective = 0.0;
    long iterations = 0;
    bool converged = false;
};

struct SvmModel {
    std::vector<FeatureVector> support_vectors;
    std::vector<double> alphas;
    std::vector<int> sv_labels;
    double bias = 0.0;
    Kernel kernel;
    double C = 1.0;

    [[nodiscard]] std::size_t dimension() const {
        return support_vectors.empty() ? 0 : support_vectors.front().size();
    }
};

namespace detail {

inline void check_training_set(TrainingSet const& data) {
    if (data.samples.size() != data.labels.size()) {
        throw std::invalid_argument("train: sample/label count mismatch");
    }
    bool pos = false;
    bool neg = false;
    for (auto y : data.labels) {
        if (y == 1) {
            pos = true;
        } else if (y == -1) {
            neg = true;
        } else {
            throw std::invalid_argument("train: labels must be +1 or -1");
        }
    }
    if (!pos || !neg) {
        throw DegenerateTrainingSet("both classes must be present");
    }
    std::size_t const d = data.dimension();
    for (auto const& s : data.samples) {
        if (s.size() != d) {
            throw std::invalid_argument("train: ragged feature vectors");
        }
    }
}

} // namespace detail

/// Solves the dual; rng fixes the scan order used to break selection ties.
template <typename Engine>
DualSolution train_dual(TrainingSet const& data, Kernel const& kernel, SmoParams const& params, Engine& rng) {
    detail::check_training_set(data);
    kernel.validate();
    params.validate();

    std::size_t const n = data.size();
    double const C = params.C;
    double const tau = 1e-12;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<double>(data.labels[i]);
    }

    // Q_ij = y_i y_j k(x_i, x_j)
    std::vector<double> Q(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double const v = y[i] * y[j] * kernel_eval(kernel, data.samples[i], data.samples[j]);
            Q[i * n + j] = v;
            Q[j * n + i] = v;
        }
    }
    auto q = [&](std::size_t i, std::size_t j) { return Q[i * n + j]; };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rnd::shuffle(std::span<std::size_t>(order), rng);

    DualSolution sol;
    sol.alpha.assign(n, 0.0);
    auto& alpha = sol.alpha;
    std::vector<double> G(n, -1.0); // gradient of 1/2 a'Qa - sum(a)

    auto in_up = [&](std::size_t i) { return (y[i] > 0 && alpha[i] < C) || (y[i] < 0 && alpha[i] > 0); };
    auto in_low = [&](std::size_t i) { return (y[i] > 0 && alpha[i] > 0) || (y[i] < 0 && alpha[i] < C); };

    auto refresh_gradient = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            double g = -1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (alpha[j] != 0.0) {
                    g += q(i, j) * alpha[j];
                }
            }
            G[i] = g;
        }
    };

    // Returns false once the violation gap drops below tolerance.
    auto select = [&](std::size_t& out_i, std::size_t& out_j) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (auto t : order) {
            if (in_up(t) && -y[t] * G[t] > gmax) {
                gmax = -y[t] * G[t];
                i = t;
            }
        }
        if (i == n) {
            return false;
        }
        std::size_t j = n;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (auto t : order) {
            if (!in_low(t)) {
                continue;
            }
            double const score = -y[t] * G[t];
            gmin = std::min(gmin, score);
            double const b = gmax - score;
            if (b > 0.0) {
                double a = q(i, i) + q(t, t) - 2.0 * y[i] * y[t] * q(i, t);
                if (a <= 0.0) {
                    a = tau;
                }
                double const gain = b * b / a;
                if (gain > best_gain) {
                    best_gain = gain;
                    j = t;
                }
            }
        }
        if (gmax - gmin < params.tolerance || j == n) {
            return false;
        }
        out_i = i;
        out_j = j;
        return true;
    };

    auto step = [&](std::size_t i, std::size_t j) {
        double const old_i = alpha[i];
        double const old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) {
                quad = tau;
            }
            double const delta = (-G[i] - G[j]) / quad;
            double const diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) {
                quad = tau;
            }
            double const delta = (G[i] - G[j]) / quad;
            double const sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        double const di = alpha[i] - old_i;
        double const dj = alpha[j] - old_j;
        for (std::size_t k = 0; k < n; ++k) {
            G[k] += q(k, i) * di + q(k, j) * dj;
        }
    };

    int passes = 0;
    while (true) {
        std::size_t i = 0;
        std::size_t j = 0;
        while (sol.iterations < params.max_iterations && select(i, j)) {
            step(i, j);
            ++sol.iterations;
        }
        // Incremental updates drift; re-check against an exact gradient.
        refresh_gradient();
        if (!select(i, j)) {
            sol.converged = true;
            break;
        }
        if (++passes >= params.max_passes || sol.iterations >= params.max_iterations) {
            break;
        }
    }

    // Bias from free coefficients, else the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double const yg = y[i] * G[i];
        if (alpha[i] >= C) {
            if (y[i] < 0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else if (alpha[i] <= 0.0) {
            if (y[i] > 0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    double const rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
    sol.bias = -rho;

    double sum_alpha = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_alpha += alpha[i];
        quad += alpha[i] * (G[i] + 1.0);
    }
    sol.objective = sum_alpha - 0.5 * quad;
    return sol;
}

/// Dual objective of an arbitrary coefficient vector.
inline double dual_objective(TrainingSet const& data, Kernel const& kernel, std::span<double const> alpha) {
    double value = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.size(); ++j) {
            value -= 0.5 * alpha[i] * alpha[j] * data.labels[i] * data.labels[j]
                     * kernel_eval(kernel, data.samples[i], data.samples[j]);
        }
    }
    return value;
}

template <typename Engine>
SvmModel train(TrainingSet const& data, Kernel const& kernel, SmoParams const& params, Engine& rng) {
    auto const sol = train_dual(data, kernel, params, rng);
    SvmModel model;
    model.kernel = kernel;
    model.C = params.C;
    model.bias = sol.bias;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (sol.alpha[i] > 0.0) {
            model.support_vectors.push_back(data.samples[i]);
            model.alphas.push_back(sol.alpha[i]);
            model.sv_labels.push_back(data.labels[i]);
        }
    }
    return model;
}

/// sum_i y_i a_i k(x, x_i) + b
inline double decision_value(SvmModel const& m, std::span<double const> x) {
    if (!m.support_vectors.empty() && x.size() != m.dimension()) {
        throw std::invalid_argument("decision_value: expected " + std::to_string(m.dimension()) + " features, got "
                                    + std::to_string(x.size()));
    }
    double value = m.bias;
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
        value += m.sv_labels[i] * m.alphas[i] * kernel_eval(m.kernel, x, m.support_vectors[i]);
    }
    return value;
}

/// Sign of the decision value; an exact zero is accepted as +1.
inline int predict(SvmModel const& m, std::span<double const> x) {
    return decision_value(m, x) >= 0.0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Text serialization
//
//   svm-model 1
//   kernel rbf <gamma> | kernel linear | kernel polynomial <degree> <coef0>
//   C <value>
//   bias <value>
//   support_vectors <count> <dimension>
//   <label> <alpha> <x_1> ... <x_d>      (one line per support vector)

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string const& token) {
    double v = 0.0;
    auto const res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw std::runtime_error("cannot parse number '" + token + "'");
    }
    return v;
}

} // namespace detail

inline void write_model(std::ostream& os, SvmModel const& m) {
    using detail::format_double;
    os << "svm-model 1\n";
    switch (m.kernel.kind) {
    case KernelKind::Linear: os << "kernel linear\n"; break;
    case KernelKind::Polynomial:
        os << "kernel polynomial " << m.kernel.degree << ' ' << format_double(m.kernel.coef0) << '\n';
        break;
    case KernelKind::Rbf: os << "kernel rbf " << format_double(m.kernel.gamma) << '\n'; break;
    }
    os << "C " << format_double(m.C) << '\n';
    os << "bias " << format_double(m.bias) << '\n';
    os << "support_vectors " << m.support_vectors.size() << ' ' << m.dimension() << '\n';
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
        os << m.sv_labels[i] << ' ' << format_double(m.alphas[i]);
        for (double v : m.support_vectors[i]) {
            os << ' ' << format_double(v);
        }
        os << '\n';
    }
}

inline SvmModel read_model(std::istream& is) {
    using detail::parse_double;
    auto expect = [&](std::string const& word) {
        std::string token;
        if (!(is >> token) || token != word) {
            throw std::runtime_error("read_model: expected '" + word + "'");
        }
    };
    auto next = [&] {
        std::string token;
        if (!(is >> token)) {
            throw std::runtime_error("read_model: unexpected end of input");
        }
        return token;
    };

    SvmModel m;
    expect("svm-model");
    if (next() != "1") {
        throw std::runtime_error("read_model: unsupported version");
    }
    expect("kernel");
    auto const kind = next();
    if (kind == "linear") {
        m.kernel = Kernel::linear();
    } else if (kind == "polynomial") {
        int const degree = std::stoi(next());
        m.kernel = Kernel::polynomial(degree, parse_double(next()));
    } else if (kind == "rbf") {
        m.kernel = Kernel::rbf(parse_double(next()));
    } else {
        throw std::runtime_error("read_model: unknown kernel '" + kind + "'");
    }
    expect("C");
    m.C = parse_double(next());
    expect("bias");
    m.bias = parse_double(next());
    expect("support_vectors");
    auto const count = std::stoul(next());
    auto const dim = std::stoul(next());
    for (std::size_t i = 0; i < count; ++i) {
        m.sv_labels.push_back(std::stoi(next()));
        m.alphas.push_back(parse_double(next()));
        FeatureVector x(dim);
        for (auto& v : x) {
            v = parse_double(next());
        }
        m.support_vectors.push_back(std::move(x));
    }
    return m;
}

} // namespace svmdmoea
