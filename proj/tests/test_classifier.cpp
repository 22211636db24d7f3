#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "svmdmoea/classifier.hpp"

using namespace svmdmoea;

namespace {

TrainingSet separable_set(Rng& rng, std::size_t n, double gap) {
    double const angle = rnd::uniform(rng, 0.0, 2.0 * std::numbers::pi);
    double const w0 = std::cos(angle), w1 = std::sin(angle);
    double const b = -(w0 * 0.5 + w1 * 0.5) + rnd::uniform(rng, -0.1, 0.1);
    TrainingSet data;
    while (data.size() < n) {
        FeatureVector x{rnd::unit(rng), rnd::unit(rng)};
        double const s = w0 * x[0] + w1 * x[1] + b;
        if (std::fabs(s) < gap) {
            continue;
        }
        int const label = s > 0 ? 1 : -1;
        // keep both classes represented
        if (data.size() == n - 1 && std::all_of(data.labels.begin(), data.labels.end(), [&](int l) { return l == label; })) {
            continue;
        }
        data.samples.push_back(x);
        data.labels.push_back(label);
    }
    return data;
}

TrainingSet random_set(Rng& rng, std::size_t n, std::size_t dim) {
    TrainingSet data;
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector x(dim);
        for (auto& v : x) {
            v = rnd::unit(rng);
        }
        data.samples.push_back(x);
        data.labels.push_back(i == 0 ? 1 : i == 1 ? -1 : (rnd::coin(rng, 0.5) ? 1 : -1));
    }
    return data;
}

void expect_feasible_and_kkt(TrainingSet const& data, Kernel const& kernel, SmoParams const& params,
                             DualSolution const& sol) {
    double balance = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        balance += sol.alpha[i] * data.labels[i];
        EXPECT_GE(sol.alpha[i], 0.0);
        EXPECT_LE(sol.alpha[i], params.C);
    }
    EXPECT_LE(std::fabs(balance), 1e-6);

    SvmModel full;
    full.kernel = kernel;
    full.C = params.C;
    full.bias = sol.bias;
    full.support_vectors = data.samples;
    full.alphas = sol.alpha;
    full.sv_labels = data.labels;
    double const tol = params.tolerance;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double const margin = data.labels[i] * decision_value(full, data.samples[i]);
        if (sol.alpha[i] <= 0.0) {
            EXPECT_GE(margin, 1.0 - tol) << "point " << i;
        } else if (sol.alpha[i] >= params.C) {
            EXPECT_LE(margin, 1.0 + tol) << "point " << i;
        } else {
            EXPECT_NEAR(margin, 1.0, tol) << "point " << i;
        }
    }
}

} // namespace

TEST(Kernel, Examples) {
    std::vector<double> a{0.3, 0.7}, b{1.0, 0.0}, c{0.0, 1.0}, ones{1.0, 1.0};
    EXPECT_EQ(kernel_eval(Kernel::rbf(3.7), a, a), 1.0);
    EXPECT_EQ(kernel_eval(Kernel::linear(), b, c), 0.0);
    EXPECT_DOUBLE_EQ(kernel_eval(Kernel::polynomial(2, 1.0), ones, ones), 9.0);
    EXPECT_THROW(kernel_eval(Kernel::linear(), a, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Kernel, SymmetryAndGaussianBounds) {
    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> a(4), b(4);
        for (std::size_t i = 0; i < 4; ++i) {
            a[i] = rnd::unit(rng);
            b[i] = rnd::unit(rng);
        }
        for (auto const& k : {Kernel::linear(), Kernel::polynomial(3, 0.5), Kernel::rbf(0.25), Kernel::rbf(4.0)}) {
            EXPECT_EQ(kernel_eval(k, a, b), kernel_eval(k, b, a));
        }
        double const g = kernel_eval(Kernel::rbf(2.0), a, b);
        EXPECT_GT(g, 0.0);
        EXPECT_LE(g, 1.0);
    }
}

TEST(Kernel, ValidationRejectsBadParameters) {
    EXPECT_THROW(Kernel::rbf(0.0).validate(), std::invalid_argument);
    EXPECT_THROW(Kernel::polynomial(0, 1.0).validate(), std::invalid_argument);
}

TEST(Svm, TwoPointSeparatorAtMidpoint) {
    TrainingSet data{{{0.0}, {1.0}}, {-1, 1}};
    SmoParams params;
    params.C = 10.0;
    Rng rng(1);
    auto const model = train(data, Kernel::linear(), params, rng);
    EXPECT_EQ(predict(model, std::vector{0.25}), -1);
    EXPECT_EQ(predict(model, std::vector{0.75}), 1);
    EXPECT_NEAR(decision_value(model, std::vector{0.5}), 0.0, 1e-6);
}

TEST(Svm, SeparableSetsAreFitExactly) {
    Rng rng(42);
    SmoParams params;
    params.C = 100.0;
    for (int trial = 0; trial < 50; ++trial) {
        auto const data = separable_set(rng, 20, 0.1);
        auto const sol = train_dual(data, Kernel::linear(), params, rng);
        expect_feasible_and_kkt(data, Kernel::linear(), params, sol);
        Rng again(trial);
        auto const model = train(data, Kernel::linear(), params, again);
        for (std::size_t i = 0; i < data.size(); ++i) {
            EXPECT_EQ(predict(model, data.samples[i]), data.labels[i]) << "trial " << trial << " point " << i;
        }
    }
}

TEST(Svm, KktOnNoisyData) {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto const data = random_set(rng, 40, 3);
        SmoParams params;
        params.C = trial % 2 == 0 ? 1.0 : 10.0;
        for (auto const& k : {Kernel::rbf(1.0 / 3.0), Kernel::linear(), Kernel::polynomial(2, 1.0)}) {
            auto const sol = train_dual(data, k, params, rng);
            EXPECT_TRUE(sol.converged);
            expect_feasible_and_kkt(data, k, params, sol);
        }
    }
}

TEST(Svm, DualObjectiveMatchesBruteForce) {
    Rng rng(8);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t const n = 2 + trial % 7;
        auto const data = random_set(rng, n, 2);
        SmoParams params;
        params.C = std::vector{0.5, 1.0, 10.0}[trial % 3];
        Kernel const kernel = std::vector{Kernel::linear(), Kernel::rbf(0.5), Kernel::polynomial(2, 1.0)}[trial % 3];
        Eigen::MatrixXd K(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                K(i, j) = kernel_eval(kernel, data.samples[i], data.samples[j]);
            }
        }
        auto const best = oracle::dual_maximum(K, data.labels, params.C);
        ASSERT_TRUE(best.has_value());
        auto const sol = train_dual(data, kernel, params, rng);
        EXPECT_NEAR(sol.objective, *best, 1e-3) << "trial " << trial << " n=" << n;
        EXPECT_NEAR(dual_objective(data, kernel, sol.alpha), sol.objective, 1e-9);
    }
}

TEST(Svm, PrunedModelKeepsOnlyPositiveCoefficients) {
    Rng rng(9);
    auto const data = random_set(rng, 30, 2);
    auto const model = train(data, Kernel::rbf(0.5), SmoParams{}, rng);
    ASSERT_EQ(model.alphas.size(), model.support_vectors.size());
    ASSERT_EQ(model.sv_labels.size(), model.support_vectors.size());
    for (double a : model.alphas) {
        EXPECT_GT(a, 0.0);
        EXPECT_LE(a, model.C);
    }
}

TEST(Svm, SingleClassIsDegenerate) {
    TrainingSet data{{{0.1}, {0.2}}, {1, 1}};
    Rng rng(1);
    EXPECT_THROW(train(data, Kernel::linear(), SmoParams{}, rng), DegenerateTrainingSet);
}

TEST(Svm, ZeroDecisionValueIsAccepted) {
    SvmModel model;
    model.kernel = Kernel::linear();
    EXPECT_EQ(predict(model, std::vector{0.3, 0.3}), 1);
    model.bias = -1e-300;
    EXPECT_EQ(predict(model, std::vector{0.3, 0.3}), -1);
}

TEST(Svm, DecisionDimensionMismatch) {
    TrainingSet data{{{0.0, 0.0}, {1.0, 1.0}}, {-1, 1}};
    Rng rng(1);
    auto const model = train(data, Kernel::linear(), SmoParams{}, rng);
    EXPECT_THROW(decision_value(model, std::vector{0.5}), std::invalid_argument);
}

TEST(Svm, DeterministicForSeed) {
    Rng data_rng(4);
    auto const data = random_set(data_rng, 25, 3);
    Rng a(10), b(10);
    auto const ma = train(data, Kernel::rbf(0.3), SmoParams{}, a);
    auto const mb = train(data, Kernel::rbf(0.3), SmoParams{}, b);
    EXPECT_EQ(ma.alphas, mb.alphas);
    EXPECT_EQ(ma.bias, mb.bias);
}

TEST(SvmModel, TextRoundTrip) {
    Rng rng(6);
    for (auto const& kernel : {Kernel::rbf(1.0 / 7.0), Kernel::linear(), Kernel::polynomial(3, 0.25)}) {
        auto const data = random_set(rng, 25, 4);
        auto const model = train(data, kernel, SmoParams{}, rng);
        std::stringstream ss;
        write_model(ss, model);
        auto const back = read_model(ss);
        EXPECT_EQ(back.kernel, model.kernel);
        EXPECT_NEAR(back.C, model.C, 1e-12);
        EXPECT_NEAR(back.bias, model.bias, 1e-12);
        ASSERT_EQ(back.support_vectors.size(), model.support_vectors.size());
        for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
            EXPECT_EQ(back.sv_labels[i], model.sv_labels[i]);
            EXPECT_NEAR(back.alphas[i], model.alphas[i], 1e-12);
            for (std::size_t k = 0; k < model.support_vectors[i].size(); ++k) {
                EXPECT_NEAR(back.support_vectors[i][k], model.support_vectors[i][k], 1e-12);
            }
        }
        for (auto const& x : data.samples) {
            EXPECT_NEAR(decision_value(back, x), decision_value(model, x), 1e-12);
        }
    }
}

TEST(SvmModel, ReadRejectsGarbage) {
    std::stringstream ss("not-a-model 1\n");
    EXPECT_THROW(read_model(ss), std::runtime_error);
}
