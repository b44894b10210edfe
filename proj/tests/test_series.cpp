#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "specrec/errors.hpp"
#include "specrec/series.hpp"

using namespace specrec;

namespace {
constexpr double kZeta3 = 1.2020569031595942854;
}

TEST(Zeta, KnownValues) {
    EXPECT_NEAR(zeta(2.0).real(), std::numbers::pi * std::numbers::pi / 6.0, 1e-15);
    EXPECT_NEAR(zeta(3.0).real(), kZeta3, 1e-15);
    // mpmath
    const cd z = zeta(cd(0.5, 14.0));
    EXPECT_NEAR(z.real(), 0.022241142609993589246, 1e-13);
    EXPECT_NEAR(z.imag(), -0.10325812326645005790, 1e-13);
    EXPECT_NEAR(zeta(-2.5).real(), 0.0085169287778503305424, 1e-15);
    EXPECT_THROW(zeta(1.0), PoleAtOne);
}

TEST(Hurwitz, KnownValues) {
    EXPECT_NEAR(hurwitz(3.0, 1.0 / 3.0).real(), 27.561061199700803776, 1e-12);
    EXPECT_NEAR(hurwitz(2.0, 0.25).real(), 17.197329154507110739, 1e-12);
    EXPECT_THROW(hurwitz(2.0, 0.0), PreconditionViolated);
}

TEST(Hurwitz, AveragingIdentity) {
    for (int m = 1; m <= 12; ++m)
        for (cd s : {cd(2.0), cd(3.5), cd(0.5, 3.0), cd(-1.5), cd(1.2, -7.0)}) {
            cd sum = 0.0;
            for (int b = 1; b <= m; ++b) sum += hurwitz(s, double(b) / m);
            const cd rhs = std::pow(double(m), s) * zeta(s);
            EXPECT_LT(std::abs(sum - rhs), 1e-10 * std::max(1.0, std::abs(rhs))) << m << " " << s;
        }
}

TEST(Hurwitz, LaurentCoefficients) {
    const auto one = hurwitz_laurent(1.0);
    EXPECT_NEAR(one.psi_val, -kEulerGamma, 1e-11);
    EXPECT_NEAR(one.gamma_val, -0.072815845483676724861, 1e-10);
    const auto third = hurwitz_laurent(1.0 / 3.0);
    EXPECT_NEAR(third.psi_val, -3.1320337800208063230, 1e-11);
    EXPECT_NEAR(third.gamma_val, -3.2595575159179101953, 1e-10);
}

TEST(Hurwitz, DigammaAverage) {
    for (int m = 1; m <= 12; ++m) {
        double psi_sum = 0.0, gam_sum = 0.0;
        for (int b = 1; b <= m; ++b) {
            const auto L = hurwitz_laurent(double(b) / m);
            psi_sum += L.psi_val;
            gam_sum += L.gamma_val;
        }
        const double lm = std::log(double(m));
        EXPECT_NEAR(psi_sum, -m * (kEulerGamma + lm), 1e-8) << m;
        const double g1 = hurwitz_laurent(1.0).gamma_val;
        EXPECT_NEAR(gam_sum, -0.5 * m * lm * lm - kEulerGamma * m * lm + m * g1, 1e-8) << m;
    }
}

TEST(Tau3Tail, MatchesDirectPartialSums) {
    // tail beyond 100 minus tail beyond 200 is the block sum
    double block = 0.0;
    for (u64 n = 101; n <= 200; ++n) block += double(tau3(n)) * std::pow(double(n), -3.0);
    EXPECT_NEAR(tau3_tail(3.0, 100) - tau3_tail(3.0, 200), block, 1e-13);
    EXPECT_GT(tau3_tail(3.0, 100), block);
}

TEST(PhiSeries, EisensteinClosedForms) {
    const auto F = Gl3Form::e0();
    const auto a = phi_series(F, 1, 1, 1, 1, 3.0, 20000);
    EXPECT_LT(std::abs(a.value - std::pow(kZeta3, 3)), a.tail + 1e-12);
    EXPECT_LT(a.tail, 1e-6);
    // e(n/2) = (-1)^n
    const auto b = phi_series(F, 2, 1, 1, 1, 3.0, 20000);
    EXPECT_LT(std::abs(b.value - (-0.59027497008994325930)), b.tail + 1e-12);
    EXPECT_THROW(phi_series(F, 2, 1, 1, 1, 1.0, 10), OutsideConvergence);
}

TEST(XiSeries, EisensteinClosedForm) {
    const auto F = Gl3Form::e0();
    const auto x = xi_series(F, 1, 1, 1, 1, 2.0, 20000);
    EXPECT_LT(std::abs(x.value - std::pow(kZeta3, 3)), x.tail + 1e-12);
}

TEST(XiSeries, TailBoundsTruncationError) {
    const auto F = Gl3Form::satake(7);
    const auto lo = xi_series(F, 3, 2, -1, 2, cd(2.5, 1.0), 2000);
    const auto hi = xi_series(F, 3, 2, -1, 2, cd(2.5, 1.0), 20000);
    EXPECT_LT(std::abs(lo.value - hi.value), lo.tail);
}

TEST(DSeries, RepresentationsAgreeOnSharedBox) {
    const auto F = Gl3Form::satake(11);
    const DBox box{20, 6, 300, 30};
    for (auto [q, ell] : {std::pair<u64, u64>{1, 1}, {2, 3}, {4, 3}})
        for (int sign : {1, -1}) {
            const auto d = D_series_def(F, q, ell, 3.0, -1.0, 3.0, sign, box);
            const auto a = D_series_alt(F, q, ell, 3.0, -1.0, 3.0, sign, box);
            EXPECT_LT(std::abs(d.value - a.value), 1e-10 * std::max(1.0, std::abs(a.value)))
                << q << " " << ell << " " << sign;
            EXPECT_GT(std::abs(a.value), 1e-3);
        }
}

TEST(DSeries, RegionChecks) {
    const auto F = Gl3Form::e0();
    EXPECT_THROW(D_series_alt(F, 1, 1, 3.0, 0.0, 3.0, 1), OutsideConvergence);
    EXPECT_THROW(D_series_def(F, 1, 1, 1.0, -1.0, 3.0, 1), OutsideConvergence);
}

TEST(Bijection, RoundTripsForSmallEntries) {
    for (auto [q, ell] : {std::pair<u64, u64>{1, 1}, {2, 3}, {4, 3}, {6, 2}}) {
        const auto rep = bijection_check(q, ell, 20);
        EXPECT_EQ(rep.failures, 0u) << q << " " << ell;
        EXPECT_GT(rep.quintuples, 0u);
        EXPECT_GT(rep.triples, 0u);
    }
    const Quintuple x{5, 2, 3, 7, 4};
    const auto y = quintuple_to_triple(x);
    EXPECT_EQ(y.n1, 14u);
    EXPECT_EQ(y.r, 30u);
    EXPECT_EQ(y.c, 12u);
}

TEST(Bump, EisensteinLevelOne) {
    const auto r = bump_check(Gl3Form::e0(), 1, 2.0, 2.0, 2000);
    EXPECT_NEAR(r.rhs.real(), 1.6009387438412156606, 1e-12);
    EXPECT_LT(std::abs(r.lhs - r.rhs), r.tail + 1e-12);
    EXPECT_LT(r.tail, 1e-5);
}

TEST(Bump, HigherLevels) {
    for (u64 ell : {2, 3, 6})
        for (const auto& F : {Gl3Form::e0(), Gl3Form::satake(5)}) {
            const auto r = bump_check(F, ell, 2.0, 2.0, 1500);
            EXPECT_LT(std::abs(r.lhs - r.rhs), r.tail + 1e-12) << ell;
        }
}

TEST(CoefficientCache, PersistsAcrossInstances) {
    const auto dir = std::filesystem::temp_directory_path() / "specrec_cache_test";
    std::filesystem::remove_all(dir);
    const auto F = Gl3Form::satake(3);
    {
        CoefficientCache c(dir.string());
        EXPECT_EQ(c.get(F, 12, 18), F.A(12, 18));
        c.flush();
    }
    EXPECT_TRUE(std::filesystem::exists(CoefficientCache(dir.string()).path_for(F)));
    CoefficientCache c2(dir.string());
    EXPECT_EQ(c2.get(F, 12, 18), F.A(12, 18));
    EXPECT_EQ(std::filesystem::file_size(c2.path_for(F)), 32u);
    std::filesystem::remove_all(dir);
}
