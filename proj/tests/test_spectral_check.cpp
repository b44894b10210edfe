#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "specrec/errors.hpp"
#include "specrec/series.hpp"
#include "specrec/spectral_check.hpp"

using namespace specrec;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(DeltaCoeffs, KnownValues) {
    const auto q = delta_coeffs(5000);
    EXPECT_EQ(q.size(), 5000u);
    EXPECT_EQ(int128_to_string(q.tau[1]), "1");
    EXPECT_EQ(int128_to_string(q.tau[2]), "-24");
    EXPECT_EQ(int128_to_string(q.tau[3]), "252");
    EXPECT_EQ(int128_to_string(q.tau[10]), "-115920");
    // sigma_5 / sigma_11 convolution identity, python big integers
    EXPECT_EQ(int128_to_string(q.tau[997]), "-21400415987399554");
    EXPECT_EQ(int128_to_string(q.tau[4096]), "-71957818786545926144");
    EXPECT_EQ(int128_to_string(q.tau[5000]), "-41301931521259200000");
    EXPECT_THROW(delta_coeffs(100001), PreconditionViolated);
}

TEST(DeltaCoeffs, HeckeRelations) {
    const auto q = delta_coeffs(20000);
    for (u64 m = 1; m <= 140; ++m)
        for (u64 n = 1; n <= 140; ++n)
            if (gcd(i64(m), i64(n)) == 1) EXPECT_EQ(q.tau[m * n], q.tau[m] * q.tau[n]);
    for (u64 p : {2, 3, 5, 7, 11, 13, 101, 139}) {
        __int128 p11 = 1;
        for (int i = 0; i < 11; ++i) p11 *= p;
        EXPECT_EQ(q.tau[p * p], q.tau[p] * q.tau[p] - p11) << p;
    }
    EXPECT_NEAR(q.lambda[6], q.lambda[2] * q.lambda[3], 1e-12);
    for (u64 p : {2, 3, 5, 7, 19997}) EXPECT_LE(std::abs(q.lambda[p]), 2.0);
}

TEST(Petersson, RankOneAtLevelOne) {
    double rhs[21][21];
    for (u64 n = 1; n <= 20; ++n)
        for (u64 m = 1; m <= 20; ++m) rhs[n][m] = petersson_rhs(n, m, 12, 1);
    EXPECT_GT(rhs[1][1], 0.0);
    double worst = 0.0;
    for (u64 n = 1; n <= 20; ++n)
        for (u64 m = 1; m <= 20; ++m) worst = std::max(worst, std::abs(rhs[n][m] * rhs[1][1] - rhs[n][1] * rhs[1][m]));
    EXPECT_LT(worst, 1e-8);
    const auto q = delta_coeffs(20);
    for (u64 n = 1; n <= 20; ++n) EXPECT_NEAR(rhs[n][1] / rhs[1][1], q.lambda[n], 1e-7) << n;
    EXPECT_NEAR(rhs[2][1] / rhs[1][1], -24.0 / std::pow(2.0, 5.5), 1e-7);
}

TEST(Petersson, WeightEightLevelTwo) {
    // S_8(Gamma_0(2)) is spanned by (eta(z) eta(2z))^8
    const double a[] = {0, 1, -8, 12, 64, -210, -96, 1016, -512, -2043, 1680, 1092, 768};
    const double r11 = petersson_rhs(1, 1, 8, 2);
    EXPECT_GT(r11, 0.0);
    for (u64 n = 1; n <= 12; ++n)
        EXPECT_NEAR(petersson_rhs(n, 1, 8, 2) / r11, a[n] / std::pow(double(n), 3.5), 1e-7) << n;
}

TEST(Petersson, TailCertificate) {
    EXPECT_THROW(petersson_rhs(20, 20, 12, 1, 10), TailNotCertified);
    EXPECT_THROW(petersson_rhs(1, 1, 2, 1), TailNotCertified);
    const u64 cap = petersson_cap(20, 20, 12, 3);
    EXPECT_EQ(cap % 3, 0u);
    EXPECT_NO_THROW(petersson_rhs(20, 20, 12, 3, cap));
    EXPECT_THROW(petersson_rhs(20, 20, 12, 3, cap - 3), TailNotCertified);
}

TEST(Characters, KroneckerSymbol) {
    // (-4 / n) is the non-trivial character mod 4
    for (i64 n = 1; n < 40; ++n) EXPECT_EQ(kronecker_symbol(-4, n), n % 2 == 0 ? 0 : (n % 4 == 1 ? 1 : -1));
    // (5 / p) by quadratic reciprocity
    EXPECT_EQ(kronecker_symbol(5, 11), 1);
    EXPECT_EQ(kronecker_symbol(5, 7), -1);
    EXPECT_EQ(kronecker_symbol(5, 2), -1);
    EXPECT_EQ(kronecker_symbol(8, 3), -1);
    EXPECT_EQ(kronecker_symbol(-3, -1), -1);
    EXPECT_NO_THROW(DirichletChar::kronecker(-3));
    EXPECT_NO_THROW(DirichletChar::kronecker(8));
    EXPECT_THROW(DirichletChar::kronecker(20), PreconditionViolated);
    EXPECT_THROW(DirichletChar::kronecker(9), PreconditionViolated);
    const auto chi = DirichletChar::kronecker(-3);
    for (i64 m = 1; m < 30; ++m)
        for (i64 n = 1; n < 30; ++n) EXPECT_EQ(chi(m * n), chi(m) * chi(n));
}

TEST(Eisenstein, LevelOneDivisorSum) {
    const auto chi = DirichletChar::trivial();
    for (double t : {0.3, 1.0, 5.5})
        for (i64 n = 1; n <= 60; ++n) {
            cd s = 0.0;
            for (u64 c : divisors(u64(n))) s += std::pow(double(c), cd(0.0, -2.0 * t));
            const cd expect = std::pow(double(n), cd(0.0, t)) * s / zeta(cd(1.0, 2.0 * t));
            EXPECT_LT(std::abs(eisenstein_rho(chi, 1, 1, n, t) - expect), 1e-13) << n;
            EXPECT_LT(std::abs(eisenstein_rho(chi, 1, 1, -n, t) - expect), 1e-13) << n;
        }
    EXPECT_EQ(eisenstein_rho(chi, 1, 1, 5, 0.0), cd(0.0));
}

TEST(Eisenstein, AgreesWithExponentialSumForm) {
    struct Case {
        i64 D;
        u64 N;
    };
    for (auto [D, N] : {Case{1, 12}, Case{1, 8}, Case{1, 18}, Case{-4, 32}, Case{-4, 48}, Case{-3, 18},
                        Case{-3, 27}, Case{5, 50}, Case{-8, 64}}) {
        const auto chi = D == 1 ? DirichletChar::trivial() : DirichletChar::kronecker(D);
        const u64 cc = chi.conductor();
        for (u64 M : divisors(N)) {
            if (M % (cc * cc)) continue;
            for (i64 n : {1, 2, 3, 4, 6, 8, 9, 12, 16, 18, 24, 27, 30, 36, -12, -7})
                for (double t : {0.4, 2.5}) {
                    const cd a = eisenstein_rho(chi, M, N, n, t);
                    const cd b = eisenstein_rho_expsum(chi, M, N, n, t);
                    EXPECT_NEAR(std::abs(a), std::abs(b), 1e-12) << D << " " << N << " " << M << " " << n;
                }
        }
    }
}

TEST(Eisenstein, VanishingBranches) {
    const auto chi = DirichletChar::kronecker(-4);
    // M = 16: M1 = 4, so 4 | n is required
    for (i64 n : {1, 2, 3, 5, 6, 7, 10, -2})
        EXPECT_EQ(eisenstein_rho(chi, 16, 32, n, 0.7), cd(0.0)) << n;
    EXPECT_NE(eisenstein_rho(chi, 16, 32, 4, 0.7), cd(0.0));
    EXPECT_THROW(eisenstein_rho(chi, 8, 32, 4, 0.7), DivisibilityViolated);
    EXPECT_THROW(eisenstein_rho(DirichletChar::trivial(), 5, 12, 4, 0.7), DivisibilityViolated);
}

TEST(Eisenstein, BoundMonitor) {
    for (u64 N : {1, 6, 12, 16, 30})
        for (u64 M : divisors(N))
            for (double t : {0.5, 3.0, 20.0})
                for (i64 n = 1; n <= 48; ++n) {
                    const double r = std::abs(eisenstein_rho(DirichletChar::trivial(), M, N, n, t));
                    const double env = double(divisor_count(u64(n))) * std::sqrt(double(M) / double(N)) *
                                       std::log(3.0 + t);
                    EXPECT_LT(r, 4.0 * env) << N << " " << M << " " << n << " " << t;
                }
}

TEST(MainTerm, DeltaPair) {
    EXPECT_NEAR(main_term_N(delta_pair(12)), 11.0 / (2.0 * kPi * kPi), 1e-15);
}

TEST(MainTerm, QuadratureReferenceValues) {
    // mpmath
    TestFunctionPair g;
    g.h = [](cd t) { return std::exp(-t * t); };
    EXPECT_NEAR(main_term_N(g), 0.0470317957791592353467, 1e-13);
    TestFunctionPair r;
    r.h = [](cd t) { return std::pow(1.0 + t * t, -8); };
    r.decay_exponent = 16;
    EXPECT_NEAR(main_term_N(r), 0.00515382308200406882484, 1e-13);
}

TEST(MainTerm, Linearity) {
    TestFunctionPair a;
    a.h = [](cd t) { return std::exp(-t * t); };
    a.h_hol = [](int k) { return cd(k == 10 ? 2.0 : 0.0); };
    a.hol_k_max = 10;
    TestFunctionPair b;
    b.h = [](cd t) { return std::exp(-2.0 * t * t) * (1.0 + t * t); };
    TestFunctionPair c;
    c.h = [&](cd t) { return 3.0 * a.h(t) - 0.5 * b.h(t); };
    c.h_hol = [&](int k) { return 3.0 * a.h_hol(k); };
    c.hol_k_max = 10;
    EXPECT_NEAR(main_term_N(c), 3.0 * main_term_N(a) - 0.5 * main_term_N(b), 1e-14);
}
