#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "degen/error.hpp"
#include "degen/krein.hpp"

using namespace degen;

namespace {

Coefficient unit(double a, double b) {
    return Coefficient::piecewise({Piece{a, b, Polynomial{{1.0}}}}, Domain::interval(a, b));
}

Coefficient half(double d) { return Coefficient::power_law(PowerLaw{1, d, 1, d, 0}, Domain::half_line(Side::right)); }

Coefficient sym(double d) { return Coefficient::power_law(PowerLaw{1, d, 1, d, 0}); }

Mesh half_mesh(double L = 20.0, int n = 1000) { return build_mesh(Geometry::half_line(Side::right, L), n, 0.9); }

}  // namespace

TEST(Resolvent, ZeroOperatorScales) {
    auto op = zero_operator(build_mesh(Geometry::interval(0, 1, false, false), 16, 0.9));
    Resolvent r(op, 2.0);
    for (double v : r.apply(std::vector<double>(op.size(), 1.0))) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Resolvent, EigenvectorsMapToReciprocals) {
    auto op = assemble(half(0.5), half_mesh(8.0, 300), BoundaryCondition::robin(1, 1));
    auto ev = lowest_eigenpairs(op, 3);
    Resolvent r(op, 1.5);
    for (const auto& p : ev) {
        auto u = r.apply(p.vector);
        for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], p.vector[i] / (p.value + 1.5), 1e-9);
    }
}

TEST(Resolvent, PoleBelowGroundState) {
    auto op = assemble(unit(0, 1), build_mesh(Geometry::interval(0, 1, false, false), 50, 0.9),
                       BoundaryCondition::robin(-1, 1), BoundaryCondition::neumann());
    double l1 = lowest_eigenpairs(op, 1).front().value;
    ASSERT_LT(l1, 0.0);
    EXPECT_NO_THROW(Resolvent(op, -2.0 * l1));
    try {
        Resolvent(op, -0.5 * l1);
        FAIL() << "expected a pole";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::resolvent_pole);
    }
}

TEST(Krein, NeumannMatchesFriedrichsInCaseTwo) {
    auto d = krein_check(half(1.25), 0.0, 1.0, 1.0, half_mesh());
    EXPECT_LT(std::abs(d.kappa), 1e-12);
}

TEST(Krein, RobinDifferenceIsRankOne) {
    auto d = krein_check(half(0.5), 1.0, 1.0, 1.0, half_mesh());
    EXPECT_GE(d.kappa, -1e-10);
    EXPECT_GT(d.kappa, 1e-6);
    EXPECT_LT(d.rank_ratio, 1e-6);
    EXPECT_GT(d.range_alignment, 0.999);
    EXPECT_NE(d.baseline.find("dirichlet"), std::string::npos);  // the Friedrichs end resolves to Dirichlet here
}

TEST(Krein, LineJumpDifferenceIsRankOne) {
    auto d = krein_check(sym(0.5), 1.0, 1.0, 1.0, build_mesh(Geometry::line(20.0), 1000, 0.9));
    EXPECT_GE(d.kappa, -1e-10);
    EXPECT_LT(d.rank_ratio, 1e-6);
    EXPECT_TRUE(std::isnan(d.range_alignment));
}

TEST(Krein, CaseOneRefused) {
    try {
        krein_check(half(2.0), 1.0, 1.0, 1.0, half_mesh());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unsupported);
        EXPECT_STREQ(e.what(), "case I has a unique extension; nothing to compare");
    }
}

TEST(Krein, CaseTwoWithAlphaRefused) {
    try {
        krein_check(half(1.25), 1.0, 1.0, 1.0, half_mesh());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unsupported);
    }
}

TEST(Krein, NonPositiveGammaRejected) { EXPECT_THROW(krein_check(half(0.5), 1.0, 1.0, 0.0, half_mesh()), Error); }

// Properties.

TEST(Property, RankOneAcrossParameters) {
    for (double d : {0.25, 0.5, 0.75})
        for (double a : {0.1, 1.0, 10.0})
            for (double b : {1.0, 2.0}) {
                auto r = krein_check(half(d), a, b, 1.0, half_mesh(15.0, 600));
                EXPECT_GE(r.kappa, -1e-10) << d << ' ' << a << ' ' << b;
                EXPECT_LT(r.rank_ratio, 1e-6) << d << ' ' << a << ' ' << b;
                EXPECT_GT(r.range_alignment, 0.999) << d << ' ' << a << ' ' << b;
            }
}

TEST(Property, ResolventPositivityAndContraction) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double gamma = 10.0;
    for (double alpha : {0.0, 0.5, 3.0, -0.5}) {
        auto op = assemble(half(0.5), half_mesh(8.0, 300), BoundaryCondition::robin(alpha, 1.0));
        Resolvent r(op, gamma);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> f(op.size());
            for (double& v : f) v = u(rng);
            for (double v : r.apply(f)) EXPECT_GE(v, 0.0) << alpha;
        }
        auto one = r.apply(std::vector<double>(op.size(), 1.0));
        double sup = gamma * *std::max_element(one.begin(), one.end());
        if (alpha >= 0)
            EXPECT_LE(sup, 1.0 + 1e-10) << alpha;
        else
            EXPECT_GT(sup, 1.0) << alpha;
    }
}
