#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "degen/coeff.hpp"
#include "degen/error.hpp"
#include "degen/pchip.hpp"

using namespace degen;

namespace {

Coefficient power(double al, double dl, double ar, double dr) {
    return Coefficient::power_law(PowerLaw{al, dl, ar, dr, 0.0});
}

Coefficient bump() {  // x²(1−x)² on [0, 1]
    return Coefficient::piecewise({Piece{0.0, 1.0, Polynomial{{0, 0, 1, -2, 1}}}}, Domain::interval(0, 1));
}

}  // namespace

TEST(Eval, PowerLawAtOrigin) { EXPECT_EQ(power(1, 1, 1, 1).eval(0.0), 0.0); }

TEST(Eval, PowerLawRightBranch) { EXPECT_DOUBLE_EQ(power(1, 1, 1, 2).eval(0.5), 0.25); }

TEST(Eval, PowerLawLeftBranchUsesAbsoluteValue) { EXPECT_DOUBLE_EQ(power(3, 0.5, 1, 2).eval(-4.0), 6.0); }

TEST(Eval, TableHitsNodes) {
    auto c = Coefficient::tabulated({0, 0.5, 1}, {0, 0.25, 1});
    EXPECT_DOUBLE_EQ(c.eval(0.5), 0.25);
}

TEST(Eval, OutsideDomainThrows) {
    EXPECT_THROW(bump().eval(1.5), Error);
    auto half = Coefficient::power_law(PowerLaw{1, 1, 1, 1, 0}, Domain::half_line(Side::right));
    EXPECT_THROW(half.eval(-0.1), Error);
}

TEST(Derivative, Square) { EXPECT_DOUBLE_EQ(power(1, 1, 1, 2).derivative(0.5), 1.0); }

TEST(Derivative, AbsoluteValueLeft) { EXPECT_DOUBLE_EQ(power(1, 1, 1, 1).derivative(-0.25), -1.0); }

TEST(Derivative, FlatAtOriginForHighExponent) { EXPECT_EQ(power(1, 2, 1, 2).derivative(0.0), 0.0); }

TEST(Derivative, KinkReportsBothSides) {
    try {
        power(1, 1, 1, 1).derivative(0.0);
        FAIL() << "expected a derivative jump";
    } catch (const DerivativeJump& e) {
        EXPECT_EQ(e.kind(), ErrorKind::derivative_jump);
        EXPECT_DOUBLE_EQ(e.left, -1.0);
        EXPECT_DOUBLE_EQ(e.right, 1.0);
    }
}

TEST(Derivative, PiecewiseJointIsRecorded) {
    auto c = Coefficient::piecewise({Piece{-1, 0, Polynomial{{1, -1}}}, Piece{0, 1, Polynomial{{1, 2}}}},
                                    Domain::interval(-1, 1));
    ASSERT_EQ(c.joints().size(), 1u);
    EXPECT_DOUBLE_EQ(c.joints()[0].slope_left, -1.0);
    EXPECT_DOUBLE_EQ(c.joints()[0].slope_right, 2.0);
    EXPECT_THROW(c.derivative(0.0), DerivativeJump);
    EXPECT_DOUBLE_EQ(c.derivative(0.5), 2.0);
}

TEST(Piecewise, DiscontinuousJointRejected) {
    EXPECT_THROW(Coefficient::piecewise({Piece{-1, 0, Polynomial{{1}}}, Piece{0, 1, Polynomial{{2}}}},
                                        Domain::interval(-1, 1)),
                 Error);
}

TEST(Piecewise, GapRejected) {
    EXPECT_THROW(Coefficient::piecewise({Piece{-1, 0, Polynomial{{1}}}, Piece{0.5, 1, Polynomial{{1}}}},
                                        Domain::interval(-1, 1)),
                 Error);
}

TEST(ZeroSet, PowerLawDeclaredOrigin) {
    ZeroSet z = power(1, 1, 1, 1).zero_set(1e-12);
    ASSERT_EQ(z.points.size(), 1u);
    EXPECT_EQ(z.points[0], 0.0);
    EXPECT_TRUE(z.plateaus.empty());
}

TEST(ZeroSet, PowerLawInvariantUnderTolerance) {
    auto c = power(2, 0.7, 0.5, 1.3);
    for (double tol : {1e-12, 1e-9, 1e-6}) {
        ZeroSet z = c.zero_set(tol);
        ASSERT_EQ(z.points.size(), 1u);
        EXPECT_EQ(z.points[0], 0.0);
    }
}

TEST(ZeroSet, TablePlateau) {
    std::vector<double> x, v;
    for (int i = 0; i <= 80; ++i) {
        x.push_back(-2.0 + i * 0.05);
        v.push_back(std::max(0.0, std::abs(x.back()) - 1.0));
    }
    ZeroSet z = Coefficient::tabulated(x, v).zero_set(1e-12);
    ASSERT_EQ(z.plateaus.size(), 1u);
    EXPECT_NEAR(z.plateaus[0].first, -1.0, 1e-12);
    EXPECT_NEAR(z.plateaus[0].second, 1.0, 1e-12);
}

TEST(ZeroSet, BumpHasEndpointZeros) {
    ZeroSet z = bump().zero_set(1e-12);
    ASSERT_EQ(z.points.size(), 2u);
    EXPECT_NEAR(z.points[0], 0.0, 1e-9);
    EXPECT_NEAR(z.points[1], 1.0, 1e-9);
}

TEST(ZeroSet, InteriorDoubleRootRefined) {
    auto c = Coefficient::piecewise({Piece{-1, 2, Polynomial{{0.09, -0.6, 1}}}}, Domain::interval(-1, 2));  // (x−0.3)²
    ZeroSet z = c.zero_set(1e-12);
    ASSERT_EQ(z.points.size(), 1u);
    EXPECT_NEAR(z.points[0], 0.3, 1e-6);
}

TEST(ZeroSet, PiecewisePlateau) {
    auto c = Coefficient::piecewise({Piece{-3, -1, Polynomial{{1, 2, 1}}}, Piece{-1, 1, Polynomial{{0}}},
                                     Piece{1, 3, Polynomial{{1, -2, 1}}}},
                                    Domain::interval(-3, 3));
    ZeroSet z = c.zero_set(1e-12);
    ASSERT_EQ(z.plateaus.size(), 1u);
    EXPECT_DOUBLE_EQ(z.plateaus[0].first, -1.0);
    EXPECT_DOUBLE_EQ(z.plateaus[0].second, 1.0);
    EXPECT_TRUE(z.points.empty());
}

TEST(LocalPower, PolynomialAtBothEndsOfBump) {
    auto c = bump();
    auto lo = c.local_power(0.0, Side::right);
    auto hi = c.local_power(1.0, Side::left);
    ASSERT_TRUE(lo && hi);
    EXPECT_DOUBLE_EQ(lo->exponent, 2.0);
    EXPECT_DOUBLE_EQ(lo->amplitude, 1.0);
    EXPECT_DOUBLE_EQ(hi->exponent, 2.0);
    EXPECT_NEAR(hi->amplitude, 1.0, 1e-12);
}

TEST(LocalPower, PowerLawSides) {
    auto c = power(3, 0.25, 2, 1.75);
    EXPECT_DOUBLE_EQ(c.local_power(0, Side::left)->exponent, 0.25);
    EXPECT_DOUBLE_EQ(c.local_power(0, Side::right)->amplitude, 2.0);
}

TEST(LocalPower, TableHasNoExactPower) {
    EXPECT_FALSE(Coefficient::tabulated({0, 1, 2}, {0, 1, 4}).local_power(0, Side::right));
}

TEST(Scaled, MultipliesValues) {
    auto c = power(1, 1, 2, 1.5);
    auto s = c.scaled(3.0);
    for (double x : {-2.0, -0.1, 0.3, 5.0}) EXPECT_NEAR(s.eval(x), 3.0 * c.eval(x), 1e-14 * s.eval(x));
}

// Properties.

TEST(Property, PowerLawDerivativeMatchesCentredDifference) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ex(0.0, 3.0), amp(0.1, 5.0), pos(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto c = power(amp(rng), ex(rng), amp(rng), ex(rng));
        double x = pos(rng);
        if (std::abs(x) < 1e-3) continue;
        double h = 1e-6 * std::abs(x);
        double fd = (c.eval(x + h) - c.eval(x - h)) / (2 * h);
        double d = c.derivative(x);
        EXPECT_NEAR(fd, d, 1e-6 * std::max(1.0, std::abs(d))) << "x=" << x;
    }
}

TEST(Property, EvalNonNegative) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x, v;
    for (int i = 0; i < 30; ++i) {
        x.push_back(i * 0.1);
        v.push_back(i % 7 == 0 ? 0.0 : u(rng));
    }
    auto t = Coefficient::tabulated(x, v);
    auto p = power(1, 0.3, 2, 2.5);
    for (int i = 0; i < 2000; ++i) {
        double s = 2.9 * u(rng);
        EXPECT_GE(t.eval(s), 0.0);
        EXPECT_GE(p.eval(6 * u(rng) - 3), 0.0);
    }
}

TEST(MonotoneCubic, PreservesMonotoneData) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x{0.0}, y{0.0};
        for (int i = 1; i < 12; ++i) {
            x.push_back(x.back() + 0.05 + u(rng));
            y.push_back(y.back() + (u(rng) < 0.3 ? 0.0 : u(rng)));
        }
        MonotoneCubic m(x, y);
        double prev = m(x.front());
        for (int i = 1; i <= 2000; ++i) {
            double s = x.front() + (x.back() - x.front()) * i / 2000.0;
            double v = m(s);
            EXPECT_GE(v, prev - 1e-14);
            prev = v;
        }
    }
}

TEST(MonotoneCubic, TwoPointsIsLinear) {
    MonotoneCubic m({0.0, 2.0}, {1.0, 5.0});
    EXPECT_DOUBLE_EQ(m(0.5), 2.0);
    EXPECT_DOUBLE_EQ(m.derivative(1.3), 2.0);
}

TEST(Eval, RelativeAccuracyNextToDoubleRoot) {
    auto c = Coefficient::piecewise({Piece{-1, 2, Polynomial{{0.09, -0.6, 1}}}}, Domain::interval(-1, 2));
    double z = c.zero_set(1e-12).points.at(0);
    EXPECT_EQ(c.eval(z), 0.0);
    for (double t : {1e-12, 1e-9, 1e-6}) {
        EXPECT_NEAR(c.eval_local(z, Side::right, t), t * t, 1e-6 * t * t);
        EXPECT_NEAR(c.eval_local(z, Side::left, t), t * t, 1e-6 * t * t);
    }
}

TEST(Eval, LocalCoordinateAtRightEnd) {
    auto c = bump();
    EXPECT_NEAR(c.eval_local(1.0, Side::left, 1e-13), 1e-26, 1e-32);
}

TEST(MonotoneCubic, AccurateNextToZeroNode) {
    MonotoneCubic m({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0});  // d = 0 at the middle node
    for (double t : {1e-15, 1e-10, 1e-5}) {
        EXPECT_GT(m(-t), 0.0);
        EXPECT_NEAR(m(-t), m(t), 1e-12 * m(t));
    }
}
