#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "svmdmoea/problems.hpp"

using namespace svmdmoea;

TEST(TimeController, CurrentTimeExamples) {
    EXPECT_EQ(current_time(TimeController(10, 5, 25, 0)), 0.0);
    EXPECT_DOUBLE_EQ(current_time(TimeController(10, 5, 25, 12)), 0.2);
    EXPECT_DOUBLE_EQ(current_time(TimeController(1, 10, 50, 49)), 4.0);
}

TEST(TimeController, ChangesExactlyEveryWindow) {
    for (int n_t : {1, 10, 20}) {
        for (int tau_t : {5, 10, 25, 50}) {
            TimeController tc(n_t, tau_t, 5 * tau_t);
            double prev = current_time(tc);
            for (long g = 1; g < tc.tau_T; ++g) {
                tc.advance();
                double const now = current_time(tc);
                EXPECT_GE(now, prev);
                EXPECT_EQ(now != prev, g % tau_t == 0) << "n_t=" << n_t << " tau_t=" << tau_t << " g=" << g;
                prev = now;
            }
        }
    }
}

TEST(TimeController, RejectsBadSchedules) {
    EXPECT_THROW(TimeController(0, 5, 25), std::invalid_argument);
    EXPECT_THROW(TimeController(10, 0, 25), std::invalid_argument);
    EXPECT_THROW(TimeController(10, 5, 24), std::invalid_argument);
    EXPECT_THROW(TimeController(10, 5, 25, -1), std::invalid_argument);
}

TEST(Catalogue, MatchesExpectedRows) {
    struct Row {
        char const* name;
        std::size_t dim;
        std::size_t m;
        DmopType type;
    };
    Row const expected[] = {
        {"FDA4", 12, 3, DmopType::TypeI},       {"FDA5", 12, 3, DmopType::TypeII},
        {"FDA5_iso", 12, 3, DmopType::TypeII},  {"FDA5_dec", 12, 3, DmopType::TypeII},
        {"DIMP2", 10, 2, DmopType::TypeI},      {"dMOP2", 10, 2, DmopType::TypeII},
        {"dMOP2_iso", 10, 2, DmopType::TypeII}, {"dMOP2_dec", 10, 2, DmopType::TypeII},
        {"dMOP3", 10, 2, DmopType::TypeI},      {"HE2", 30, 2, DmopType::TypeIII},
        {"HE7", 10, 2, DmopType::TypeIII},      {"HE9", 10, 2, DmopType::TypeIII},
    };
    ASSERT_EQ(std::size(expected), kAllProblems.size());
    for (std::size_t i = 0; i < kAllProblems.size(); ++i) {
        auto const p = make_problem(kAllProblems[i]);
        EXPECT_EQ(p.name, expected[i].name);
        EXPECT_EQ(p.decision_dim, expected[i].dim) << p.name;
        EXPECT_EQ(p.objective_count, expected[i].m) << p.name;
        EXPECT_EQ(p.type, expected[i].type) << p.name;
    }
}

TEST(Catalogue, NamesParseCaseInsensitively) {
    for (auto id : kAllProblems) {
        std::string upper(to_string(id));
        for (auto& c : upper) {
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        EXPECT_EQ(parse_problem(upper), id);
        EXPECT_EQ(parse_problem(to_string(id)), id);
    }
    EXPECT_FALSE(parse_problem("FDA9").has_value());
}

TEST(Catalogue, SeverityOnlyOnBiasedVariants) {
    std::set<ProblemId> const biased = {ProblemId::FDA5_iso, ProblemId::FDA5_dec, ProblemId::dMOP2_iso,
                                        ProblemId::dMOP2_dec};
    for (auto id : kAllProblems) {
        auto const p = make_problem(id);
        EXPECT_EQ(p.severity.has_value(), biased.contains(id)) << p.name;
        if (p.severity) {
            EXPECT_EQ(p.severity->b, 0.001);
            EXPECT_EQ(p.severity->c, 0.05);
        }
    }
}

TEST(Bounds, Examples) {
    auto const fda4 = bounds(make_problem(ProblemId::FDA4));
    ASSERT_EQ(fda4.size(), 12u);
    for (auto const& b : fda4) {
        EXPECT_EQ(b, (Bound{0.0, 1.0}));
    }
    EXPECT_EQ(bounds(make_problem(ProblemId::HE2)).size(), 30u);
    for (auto id : kAllProblems) {
        auto const p = make_problem(id);
        ASSERT_EQ(bounds(p).size(), p.decision_dim);
        for (auto const& b : bounds(p)) {
            EXPECT_LT(b.lower, b.upper) << p.name;
        }
    }
}

TEST(Evaluate, Fda4AtOrigin) {
    auto const p = make_problem(ProblemId::FDA4);
    std::vector<double> x(12, 0.0);
    auto const f = evaluate(p, x, 0.0);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_NEAR(f[0], 1.0, 1e-12);
    EXPECT_NEAR(f[1], 0.0, 1e-12);
    EXPECT_NEAR(f[2], 0.0, 1e-12);
}

TEST(Evaluate, Dmop2AtTimeZero) {
    auto const p = make_problem(ProblemId::dMOP2);
    std::vector<double> x(10, 0.0);
    x[0] = 0.5;
    auto const f = evaluate(p, x, 0.0);
    EXPECT_NEAR(f[0], 0.5, 1e-12);
    EXPECT_NEAR(f[1], 1.0 - std::pow(0.5, 1.25), 1e-12);
}

TEST(Evaluate, DimensionMismatchIsRejected) {
    auto const p = make_problem(ProblemId::dMOP2);
    std::vector<double> x(9, 0.0);
    EXPECT_THROW(evaluate(p, x, 0.0), std::invalid_argument);
}

TEST(Evaluate, PureAndCorrectLength) {
    Rng rng(7);
    for (auto id : kAllProblems) {
        auto const p = make_problem(id, 99);
        for (int k = 0; k < 20; ++k) {
            std::vector<double> x(p.decision_dim);
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = rnd::uniform(rng, p.bounds[i].lower, p.bounds[i].upper);
            }
            double const t = 0.1 * k;
            auto const a = evaluate(p, x, t);
            auto const b = evaluate(p, x, t);
            ASSERT_EQ(a.size(), p.objective_count);
            for (std::size_t m = 0; m < a.size(); ++m) {
                EXPECT_EQ(std::bit_cast<std::uint64_t>(a[m]), std::bit_cast<std::uint64_t>(b[m]));
                EXPECT_TRUE(std::isfinite(a[m])) << p.name;
            }
        }
    }
}

TEST(Evaluate, ParetoSetMapsOntoReferenceCurve) {
    // Every distance variable at its optimum lands on the analytic front. The
    // isolated variant is optimal anywhere on its flat region.
    for (auto id : {ProblemId::dMOP2, ProblemId::dMOP2_iso}) {
        auto const p = make_problem(id);
        for (double t : {0.0, 0.3, 1.0}) {
            double const G = std::sin(0.5 * std::numbers::pi * t);
            double const H = 0.75 * G + 1.25;
            std::vector<double> x(10, id == ProblemId::dMOP2 ? G : 0.02);
            x[0] = 0.37;
            auto const f = evaluate(p, x, t);
            EXPECT_NEAR(f[1], 1.0 - std::pow(0.37, H), 1e-9) << p.name << " t=" << t;
        }
    }
}

TEST(Evaluate, Dmop3PositionVariableFollowsSeedAndTime) {
    auto const a = make_problem(ProblemId::dMOP3, 1);
    auto const b = make_problem(ProblemId::dMOP3, 1);
    std::set<std::size_t> seen;
    for (int k = 0; k < 40; ++k) {
        double const t = 0.1 * k;
        EXPECT_EQ(dmop3_position_variable(a, t), dmop3_position_variable(b, t));
        seen.insert(dmop3_position_variable(a, t));
    }
    EXPECT_GT(seen.size(), 3u);
}

TEST(Evaluate, MatchesGoldenFixture) {
    std::ifstream is(std::string(SVMDMOEA_FIXTURE_DIR) + "/benchmark_golden.txt");
    ASSERT_TRUE(is) << "missing fixture";
    std::string line;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string name;
        double t = 0.0;
        ls >> name >> t;
        auto const id = parse_problem(name);
        ASSERT_TRUE(id) << name;
        auto const p = make_problem(*id, 0);
        std::vector<double> x;
        std::vector<double> expected;
        std::string token;
        bool objectives = false;
        while (ls >> token) {
            if (token == "|") {
                objectives = true;
                continue;
            }
            (objectives ? expected : x).push_back(std::stod(token));
        }
        auto const f = evaluate(p, x, t);
        ASSERT_EQ(f.size(), expected.size()) << line;
        for (std::size_t m = 0; m < f.size(); ++m) {
            EXPECT_NEAR(f[m], expected[m], 1e-12 * std::max(1.0, std::fabs(expected[m])))
                << name << " t=" << t << " objective " << m;
        }
        ++rows;
    }
    EXPECT_EQ(rows, 240u);
}

TEST(ReferenceFront, Fda4LiesOnUnitSphere) {
    auto const p = make_problem(ProblemId::FDA4);
    for (double t : {0.0, 0.3, 2.0}) {
        auto const rf = reference_front(p, t);
        EXPECT_GE(rf.points.size(), 500u);
        for (auto const& q : rf.points) {
            EXPECT_NEAR(q[0] * q[0] + q[1] * q[1] + q[2] * q[2], 1.0, 1e-9);
        }
    }
}

TEST(ReferenceFront, Fda5RadiusFollowsTime) {
    auto const p = make_problem(ProblemId::FDA5);
    double const t = 0.5;
    double const r = 1.0 + std::fabs(std::sin(0.25 * std::numbers::pi));
    for (auto const& q : reference_front(p, t).points) {
        EXPECT_NEAR(std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]), r, 1e-9);
    }
}

TEST(ReferenceFront, SingletonAndDeterministic) {
    for (auto id : kAllProblems) {
        auto const p = make_problem(id);
        EXPECT_EQ(reference_front(p, 0.2, 1).points.size(), 1u);
        auto const a = reference_front(p, 0.2, 300);
        auto const b = reference_front(p, 0.2, 300);
        EXPECT_EQ(a.points, b.points);
        EXPECT_EQ(a.sample_count, 300u);
        EXPECT_EQ(a.problem_name, p.name);
    }
    EXPECT_THROW(reference_front(make_problem(ProblemId::FDA4), 0.0, 0), std::invalid_argument);
}

TEST(ReferenceFront, PointsMutuallyNondominated) {
    auto dominates = [](ObjectiveVector const& a, ObjectiveVector const& b) {
        bool strict = false;
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a[k] > b[k]) {
                return false;
            }
            strict = strict || a[k] < b[k];
        }
        return strict;
    };
    for (auto id : kAllProblems) {
        auto const p = make_problem(id);
        auto const rf = reference_front(p, 0.3, 500);
        for (std::size_t i = 0; i < rf.points.size(); ++i) {
            for (std::size_t j = 0; j < rf.points.size(); ++j) {
                ASSERT_FALSE(dominates(rf.points[i], rf.points[j])) << p.name << " " << i << " " << j;
            }
        }
    }
}

TEST(ReferenceFront, StaticFrontsForTypeOne) {
    for (auto id : {ProblemId::FDA4, ProblemId::DIMP2, ProblemId::dMOP3}) {
        auto const p = make_problem(id);
        auto const base = reference_front(p, 0.0, 500).points;
        for (double t : {0.1, 0.4, 1.0, 3.0}) {
            EXPECT_EQ(reference_front(p, t, 500).points, base) << p.name << " t=" << t;
        }
    }
}

TEST(ReferenceFront, MovingFrontsForTypeThree) {
    // H(t) depends on t only through sin(pi t / 2), so the times compared
    // here have pairwise distinct sines.
    for (auto id : {ProblemId::HE2, ProblemId::HE7, ProblemId::HE9}) {
        auto const p = make_problem(id);
        std::vector<double> const times = {0.0, 0.1, 0.2, 0.3, 0.4, 1.0};
        for (std::size_t a = 0; a < times.size(); ++a) {
            for (std::size_t b = a + 1; b < times.size(); ++b) {
                EXPECT_NE(reference_front(p, times[a], 500).points, reference_front(p, times[b], 500).points)
                    << p.name << " " << times[a] << " vs " << times[b];
            }
        }
    }
}

TEST(ReferenceFront, CurveFrontIsAttainable) {
    // Every reference point of the dMOP2 family is the image of a Pareto-optimal decision vector.
    auto const p = make_problem(ProblemId::dMOP2);
    double const t = 0.2;
    double const G = std::sin(0.5 * std::numbers::pi * t);
    for (auto const& q : reference_front(p, t, 200).points) {
        std::vector<double> x(10, G);
        x[0] = q[0];
        auto const f = evaluate(p, x, t);
        EXPECT_NEAR(f[1], q[1], 1e-9);
    }
}
