#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "degen/decompose.hpp"
#include "degen/error.hpp"
#include "degen/evolve.hpp"

using namespace degen;

namespace {

Coefficient bump(int p) {  // (x(1 − x))^p on [0, 1], p = 1 or 2
    Polynomial poly = p == 1 ? Polynomial{{0, 1, -1}} : Polynomial{{0, 0, 1, -2, 1}};
    return Coefficient::piecewise({Piece{0.0, 1.0, poly}}, Domain::interval(0, 1));
}

// (x + 1)² left of −1, 0 on [−1, 1], (x − 1)² right of 1, on [−3, 3].
Coefficient plateau() {
    return Coefficient::piecewise({Piece{-3, -1, Polynomial{{1, 2, 1}}}, Piece{-1, 1, Polynomial{{0}}},
                                   Piece{1, 3, Polynomial{{1, -2, 1}}}},
                                  Domain::interval(-3, 3));
}

bool flagged(const Decomposition& d, const std::string& text) {
    for (const auto& f : d.flags)
        if (f.find(text) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST(Decompose, BumpIsOneUniqueComponent) {
    auto d = decompose(bump(2));
    ASSERT_EQ(d.components.size(), 1u);
    const auto& c = d.components[0];
    EXPECT_EQ(c.lo, 0.0);
    EXPECT_EQ(c.hi, 1.0);
    EXPECT_EQ(c.lo_end.kind, ComponentEnd::Kind::degenerate);
    EXPECT_EQ(c.hi_end.kind, ComponentEnd::Kind::degenerate);
    EXPECT_EQ(c.report.kase, Case::I);
    EXPECT_TRUE(c.report.unique_submarkovian);
    EXPECT_TRUE(d.lipschitz);
    EXPECT_TRUE(d.plateau_blocks.empty());
}

TEST(Decompose, LinearBumpIsCaseTwo) {
    auto d = decompose(bump(1));
    ASSERT_EQ(d.components.size(), 1u);
    EXPECT_EQ(d.components[0].report.kase, Case::II);
    EXPECT_TRUE(d.components[0].report.unique_submarkovian);
    ASSERT_TRUE(d.components[0].lo_end.profile.has_value());
    EXPECT_DOUBLE_EQ(d.components[0].lo_end.profile->exponent, 1.0);
}

TEST(Decompose, PlateauSplitsTheDomain) {
    auto d = decompose(plateau());
    ASSERT_EQ(d.components.size(), 2u);
    ASSERT_EQ(d.plateau_blocks.size(), 1u);
    EXPECT_DOUBLE_EQ(d.plateau_blocks[0].first, -1.0);
    EXPECT_DOUBLE_EQ(d.plateau_blocks[0].second, 1.0);
    const auto& left = d.components[0];
    EXPECT_EQ(left.lo_end.kind, ComponentEnd::Kind::regular);
    EXPECT_EQ(left.hi_end.kind, ComponentEnd::Kind::degenerate);
    EXPECT_TRUE(left.hi_end.plateau_edge);
    EXPECT_EQ(left.report.kase, Case::I);
    EXPECT_FALSE(left.report.unique_submarkovian);  // the regular end still admits a choice
    EXPECT_TRUE(d.components[1].lo_end.plateau_edge);
}

TEST(Decompose, InteriorDoubleRoot) {
    auto c = Coefficient::piecewise({Piece{-1, 2, Polynomial{{0.09, -0.6, 1}}}}, Domain::interval(-1, 2));
    auto d = decompose(c);
    ASSERT_EQ(d.components.size(), 2u);
    EXPECT_NEAR(d.components[0].hi, 0.3, 1e-6);
    EXPECT_NEAR(d.components[1].lo, 0.3, 1e-6);
    ASSERT_EQ(d.zero_points.size(), 1u);
}

TEST(Decompose, SquareRootFlagsLipschitz) {
    auto d = decompose(Coefficient::power_law(PowerLaw{1, 0.5, 1, 0.5, 0}));
    EXPECT_FALSE(d.lipschitz);
    EXPECT_TRUE(flagged(d, "Lipschitz hypothesis fails"));
    ASSERT_EQ(d.components.size(), 2u);
    EXPECT_EQ(d.components[0].lo_end.kind, ComponentEnd::Kind::infinite);
    EXPECT_EQ(d.components[0].report.kase, Case::III);
    EXPECT_EQ(d.components[1].report.kase, Case::III);
}

TEST(Decompose, SteepTableFlagsLipschitz) {
    std::vector<double> x, v;
    for (int i = 0; i <= 200; ++i) {
        x.push_back(-1.0 + 0.01 * i);
        v.push_back(std::sqrt(std::abs(x.back())));
    }
    x[100] = 0.0;
    v[100] = 0.0;
    auto d = decompose(Coefficient::tabulated(x, v));
    EXPECT_FALSE(d.lipschitz);
}

TEST(Decompose, PositiveCoefficientHasNoFeatures) {
    auto c = Coefficient::piecewise({Piece{0, 1, Polynomial{{1, 1}}}}, Domain::interval(0, 1));
    auto d = decompose(c);
    ASSERT_EQ(d.components.size(), 1u);
    EXPECT_EQ(d.components[0].lo_end.kind, ComponentEnd::Kind::regular);
    EXPECT_EQ(d.components[0].hi_end.kind, ComponentEnd::Kind::regular);
}

TEST(DirectSum, BlocksCoverEveryPiece) {
    auto c = plateau();
    auto ds = assemble_direct_sum(c, decompose(c));
    ASSERT_EQ(ds.blocks.size(), 3u);
    EXPECT_FALSE(ds.blocks[0].plateau);
    EXPECT_TRUE(ds.blocks[1].plateau);
    EXPECT_FALSE(ds.blocks[2].plateau);
    std::size_t total = 0;
    for (const auto& b : ds.blocks) {
        EXPECT_EQ(b.offset, total);
        total += b.op.size();
    }
    EXPECT_EQ(total, ds.global.size());
    // Zero coupling at block seams.
    for (std::size_t i = 1; i < ds.blocks.size(); ++i) EXPECT_EQ(ds.global.a.k[ds.blocks[i].offset - 1], 0.0);
}

TEST(DirectSum, GlobalEvolutionEqualsBlockwise) {
    auto c = plateau();
    auto ds = assemble_direct_sum(c, decompose(c));
    auto phi0 = ds.global.sample(Datum::gaussian(0.0, 1.5));
    auto whole = evolve(ds.global, phi0, 1.0, 50).snapshots.back();
    for (std::size_t b = 0; b < ds.blocks.size(); ++b) {
        auto part = evolve(ds.blocks[b].op, ds.restrict_to(b, phi0), 1.0, 50).snapshots.back();
        auto mine = ds.restrict_to(b, whole);
        for (std::size_t i = 0; i < part.size(); ++i) EXPECT_NEAR(mine[i], part[i], 1e-12);
    }
}

TEST(DirectSum, PlateauIsFrozenAndMassStaysPut) {
    auto c = plateau();
    auto ds = assemble_direct_sum(c, decompose(c));
    auto phi0 = ds.global.sample(Datum::gaussian(-0.5, 1.0));
    auto tr = evolve(ds.global, phi0, 2.0, 40);
    for (std::size_t b = 0; b < ds.blocks.size(); ++b) {
        const auto& op = ds.blocks[b].op;
        auto start = ds.restrict_to(b, phi0);
        auto end = ds.restrict_to(b, tr.snapshots.back());
        double m0 = measure(op, start).integral, m1 = measure(op, end).integral;
        EXPECT_NEAR(m1, m0, 1e-10 * std::max(1.0, std::abs(m0))) << "block " << b;
        if (ds.blocks[b].plateau)
            for (std::size_t i = 0; i < end.size(); ++i) EXPECT_DOUBLE_EQ(end[i], start[i]);
    }
}

// Properties.

TEST(Property, ComponentsTileTheDomain) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> r(-0.8, 0.8);
    for (int trial = 0; trial < 10; ++trial) {
        double z1 = r(rng), z2 = r(rng);
        if (std::abs(z1 - z2) < 0.1) continue;
        if (z1 > z2) std::swap(z1, z2);
        // (x − z1)²(x − z2)² on [−1, 1].
        double s = z1 + z2, p = z1 * z2;
        Polynomial q{{p * p, -2 * p * s, s * s + 2 * p, -2 * s, 1}};
        auto c = Coefficient::piecewise({Piece{-1, 1, q}}, Domain::interval(-1, 1));
        auto d = decompose(c);
        ASSERT_EQ(d.components.size(), 3u);
        EXPECT_EQ(d.components.front().lo, -1.0);
        EXPECT_EQ(d.components.back().hi, 1.0);
        for (std::size_t i = 1; i < d.components.size(); ++i)
            EXPECT_EQ(d.components[i].lo, d.components[i - 1].hi);
        EXPECT_NEAR(d.components[0].hi, z1, 1e-6);
        EXPECT_NEAR(d.components[1].hi, z2, 1e-6);
        for (const auto& comp : d.components) EXPECT_EQ(comp.report.kase, Case::I);
    }
}
