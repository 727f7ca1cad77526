#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "degen/classify.hpp"
#include "degen/error.hpp"

using namespace degen;

namespace {

Coefficient power(double al, double dl, double ar, double dr) {
    return Coefficient::power_law(PowerLaw{al, dl, ar, dr, 0.0});
}

Coefficient sym(double d) { return power(1, d, 1, d); }

Coefficient half(double d) { return Coefficient::power_law(PowerLaw{1, d, 1, d, 0}, Domain::half_line(Side::right)); }

// x^δ + x² on [0, 2]: no closed form for ν, so quadrature is exercised.
Coefficient mixed(double d) {
    std::vector<double> x, v;
    for (int i = 0; i <= 400; ++i) {
        double t = 1e-9 * std::pow(10.0, 9.3 * i / 400.0);
        x.push_back(t);
        v.push_back(std::pow(t, d) + t * t);
    }
    x.insert(x.begin(), 0.0);
    v.insert(v.begin(), 0.0);
    return Coefficient::tabulated(x, v);
}

}  // namespace

TEST(Nu, ClosedFormBelowCritical) { EXPECT_NEAR(nu(sym(1.25), Side::right, 1e-4), 36.0, 1e-10); }

TEST(Nu, LogarithmicAtUnitExponent) { EXPECT_NEAR(nu(sym(1.0), Side::right, std::exp(-1.0)), 1.0, 1e-12); }

TEST(Nu, VanishesAtReach) { EXPECT_EQ(nu(sym(0.5), Side::left, 1.0), 0.0); }

TEST(Nu, LeftSideUsesLeftAmplitude) {
    // Left branch 4|x|^{1/2}: ν(t) = (1 − √t)/2.
    EXPECT_NEAR(nu(power(4, 0.5, 1, 2), Side::left, 0.25), 0.25, 1e-12);
}

TEST(Nu, QuadratureAgreesWithTanhSinh) {
    auto c = Coefficient::piecewise({Piece{0, 2, Polynomial{{0, 1, 1}}}}, Domain::interval(0, 2));  // x(1 + x)
    boost::math::quadrature::tanh_sinh<double> ts;
    double oracle = ts.integrate([&](double s) { return 1.0 / c.eval(s); }, 0.05, 1.0);
    EXPECT_NEAR(nu(c, Endpoint{0.0, Side::right, 1.0}, 0.05), oracle, 1e-9 * oracle);
}

TEST(Mu, LogarithmForSquare) { EXPECT_NEAR(mu(sym(2.0), Side::right, std::exp(1.0)), 1.0, 1e-12); }

TEST(Mu, ConstantCoefficient) { EXPECT_NEAR(mu(sym(0.0), Side::right, 3.0), 4.0, 1e-12); }

TEST(Mu, RejectsPointsBelowOne) { EXPECT_THROW(mu(sym(1.0), Side::right, 0.5), Error); }

TEST(Membership, NormOfNuBelowCritical) {
    // ν = 4(t^{-1/4} − 1): ∫₀¹ ν² = 16/3.
    HarmonicProfile h = membership(sym(1.25), Side::right);
    EXPECT_TRUE(h.nu_in_l2);
    EXPECT_FALSE(h.nu_in_linf);
    EXPECT_NEAR(h.nu_l2_norm_sq, 16.0 / 3.0, 1e-6);
}

TEST(Membership, BoundedBelowOne) {
    HarmonicProfile h = membership(sym(0.5), Side::right);
    EXPECT_TRUE(h.nu_in_linf);
    EXPECT_TRUE(h.nu_in_l2);
    EXPECT_NEAR(h.nu_sup, 2.0, 1e-9);
}

TEST(Membership, CriticalExponentNotSquareIntegrable) {
    for (double d : {1.5, 2.0, 3.0}) {
        HarmonicProfile h = membership(sym(d), Side::right);
        EXPECT_FALSE(h.nu_in_l2) << d;
        EXPECT_TRUE(std::isinf(h.nu_l2_norm_sq)) << d;
    }
}

TEST(Membership, GrowthAtInfinity) {
    HarmonicProfile h = membership(sym(2.5), Side::right);
    ASSERT_TRUE(h.mu_available);
    EXPECT_TRUE(h.mu_in_linf);
    HarmonicProfile g = membership(sym(1.0), Side::right);
    EXPECT_FALSE(g.mu_in_linf);
}

TEST(Membership, TableEstimateFindsExponent) {
    HarmonicProfile h = membership(mixed(1.25), Endpoint{0.0, Side::right, 1.0});
    EXPECT_EQ(h.basis, Basis::estimated);
    EXPECT_NEAR(h.exponent, 1.25, 0.02);
    EXPECT_TRUE(h.nu_in_l2);
    EXPECT_FALSE(h.nu_in_linf);
}

TEST(Membership, ScatteredSlopesAreIndeterminate) {
    std::vector<double> x{0.0}, v{0.0};
    for (int i = 0; i <= 120; ++i) {
        double t = 1e-6 * std::pow(10.0, 6.0 * i / 120.0);
        x.push_back(t);
        v.push_back(t * (2.0 + std::sin(10.0 * std::log(t))));
    }
    auto c = Coefficient::tabulated(x, v);
    try {
        membership(c, Endpoint{0.0, Side::right, 1.0});
        FAIL() << "expected an indeterminate exponent";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::indeterminate);
    }
}

TEST(Classify, TrichotomyExamples) {
    auto a = classify(sym(0.5));
    EXPECT_EQ(a.kase, Case::III);
    EXPECT_FALSE(a.unique_submarkovian);
    EXPECT_EQ(a.deficiency_indices, (std::pair{1, 1}));

    auto b = classify(sym(1.0));
    EXPECT_EQ(b.kase, Case::II);
    EXPECT_TRUE(b.unique_submarkovian);
    EXPECT_FALSE(b.essentially_self_adjoint);

    auto d = classify(power(1, 2, 1, 0.5));
    EXPECT_EQ(d.kase, Case::I);  // the square side separates
    EXPECT_TRUE(d.essentially_self_adjoint);
    EXPECT_EQ(d.deficiency_indices, (std::pair{0, 0}));
}

TEST(Classify, HalfLineHasOneProfile) {
    auto r = classify(half(1.25));
    EXPECT_TRUE(r.half_line);
    EXPECT_TRUE(r.right.has_value());
    EXPECT_FALSE(r.left.has_value());
    EXPECT_EQ(r.kase, Case::II);
}

TEST(Classify, BoundaryExponents) {
    EXPECT_EQ(classify(sym(1.5)).kase, Case::I);
    EXPECT_EQ(classify(sym(1.0)).kase, Case::II);
    EXPECT_EQ(classify(sym(0.999)).kase, Case::III);
}

TEST(Classify, OffOriginZeroRejected) {
    auto c = Coefficient::power_law(PowerLaw{1, 1, 1, 1, 0.3});
    EXPECT_THROW(classify(c), Error);
}

TEST(Classify, IntervalDomainUnsupported) {
    auto c = Coefficient::piecewise({Piece{0, 1, Polynomial{{0, 1}}}}, Domain::interval(0, 1));
    EXPECT_THROW(classify(c), Error);
}

TEST(CaseFrom, Table) {
    EXPECT_EQ(case_from(false, false), Case::I);
    EXPECT_EQ(case_from(true, false), Case::II);
    EXPECT_EQ(case_from(true, true), Case::III);
}

TEST(Cutoff, LogarithmicEnergy) {
    // δ = 1: ν_n = ln n, energy 1/ln n.
    EXPECT_NEAR(cutoff_energy(sym(1.0), Side::right, std::exp(3.0)), 1.0 / 3.0, 1e-9);
}

TEST(Cutoff, EnergyEqualsReciprocalNu) {
    for (double d : {1.0, 1.25, 1.5, 2.0})
        for (double n : {1e2, 1e4, 1e6}) {
            double e = cutoff_energy(sym(d), Side::right, n);
            double nn = nu(sym(d), Side::right, 1.0 / n);
            EXPECT_NEAR(e * nn, 1.0, 1e-8) << "d=" << d << " n=" << n;
        }
}

TEST(Cutoff, RefusedWithPositiveCapacity) {
    try {
        cutoff_energy(sym(0.5), Side::right, 100);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::hypothesis);
    }
}

TEST(Cutoff, SmallIndexRejected) { EXPECT_THROW(cutoff_energy(sym(1.0), Side::right, 1.5), Error); }

TEST(SmoothCutoff, SquaredProfileAgainstFiniteDifferences) {
    // ξ = (1 − ln(1/t)/ν_n)² with ν_n = 3; total variation of c ξ′ on (1/n, 1).
    const double nn = 3.0;
    auto flux = [&](double t) {
        double h = 1e-7 * t;
        auto xi = [&](double s) {
            double q = 1.0 - std::log(1.0 / s) / nn;
            return q * q;
        };
        return t * (xi(t + h) - xi(t - h)) / (2 * h);
    };
    double tv = 0.0;
    const int m = 20000;
    double t0 = std::exp(-nn);
    double prev = flux(t0 * (1 + 1e-9));
    for (int i = 1; i <= m; ++i) {
        double t = t0 * std::pow(1.0 / t0, double(i) / m);
        if (i == m) t *= 1 - 1e-9;
        double f = flux(t);
        tv += std::abs(f - prev);
        prev = f;
    }
    SmoothCutoff s = smooth_cutoff_l1(sym(1.0), Side::right, std::exp(nn));
    EXPECT_NEAR(s.nu_n, nn, 1e-12);
    EXPECT_NEAR(s.xi_flux_divergence_l1, tv, 1e-5);
    EXPECT_NEAR(s.xi_flux_divergence_l1, 2.0 / nn, 1e-9);
}

TEST(SmoothCutoff, ProfileEndsAtZeroAndOne) {
    SmoothCutoff s = smooth_cutoff_l1(sym(1.25), Side::right, 1e4);
    ASSERT_FALSE(s.x.empty());
    EXPECT_EQ(s.phi.front(), 0.0);
    EXPECT_EQ(s.phi.back(), 1.0);
    for (std::size_t i = 1; i < s.x.size(); ++i) EXPECT_GT(s.x[i], s.x[i - 1]);
    for (double p : s.phi) {
        EXPECT_GE(p, -1e-12);
        EXPECT_LE(p, 1.0 + 1e-12);
    }
}

TEST(SmoothCutoff, FluxDivergenceShrinksWithIndex) {
    double prev = INFINITY;
    for (double n : {1e2, 1e4, 1e6, 1e8}) {
        SmoothCutoff s = smooth_cutoff_l1(sym(1.25), Side::right, n);
        EXPECT_LT(s.flux_divergence_l1, prev);
        EXPECT_NEAR(s.leading_term * s.nu_n, 1.0, 1e-14);
        prev = s.flux_divergence_l1;
    }
}

// Properties.

TEST(Property, NuNonIncreasingMuNonDecreasing) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ex(0.0, 3.0), amp(0.2, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
        auto c = power(amp(rng), ex(rng), amp(rng), ex(rng));
        for (Side side : {Side::left, Side::right}) {
            HarmonicProfile h = membership(c, side);
            for (std::size_t i = 1; i < h.nu_values.size(); ++i) EXPECT_LE(h.nu_values[i], h.nu_values[i - 1]);
            for (std::size_t i = 1; i < h.mu_values.size(); ++i) EXPECT_GE(h.mu_values[i], h.mu_values[i - 1]);
            if (h.nu_in_linf) EXPECT_TRUE(h.nu_in_l2);
        }
    }
}

TEST(Property, ScalingLeavesCaseAndRescalesNu) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ex(0.0, 3.0), lam(0.1, 10.0), pos(1e-6, 0.9);
    for (int trial = 0; trial < 30; ++trial) {
        double d = ex(rng), l = lam(rng), t = pos(rng);
        auto c = sym(d);
        auto s = c.scaled(l);
        EXPECT_EQ(classify(c).kase, classify(s).kase);
        double a = nu(c, Side::right, t), b = nu(s, Side::right, t);
        EXPECT_NEAR(b * l, a, 1e-10 * std::max(1.0, a));
    }
}

TEST(Property, HalfRootNuDecays) {
    // x^{1/2}ν(x) → 0 whenever ν ∈ L2; the rate is x^{3/2−δ} for 1 < δ < 3/2.
    for (double d : {0.5, 1.0, 1.25, 1.4}) {
        auto c = sym(d);
        auto g = [&](double t) { return std::sqrt(t) * nu(c, Side::right, t); };
        EXPECT_LT(g(1e-12), g(1e-6)) << d;
        EXPECT_LT(g(1e-6), g(1e-2)) << d;
        if (d > 1.0) {
            double slope = std::log(g(1e-12) / g(1e-10)) / std::log(1e-2);
            EXPECT_NEAR(slope, 1.5 - d, 0.02) << d;
        }
    }
    EXPECT_LT(std::sqrt(1e-12) * nu(sym(1.0), Side::right, 1e-12), 1e-3);
}
