#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "specrec/errors.hpp"
#include "specrec/special.hpp"
#include "specrec/transforms.hpp"

using namespace specrec;

namespace {

constexpr double kPi = std::numbers::pi;
const cd I{0.0, 1.0};

double rel(cd a, cd b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

SpectralParams random_mu(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(-5.0 / 14.0, 5.0 / 14.0), im(-3.0, 3.0);
    SpectralParams p;
    for (;;) {
        p.mu[0] = cd(re(rng), im(rng));
        p.mu[1] = cd(re(rng), im(rng));
        p.mu[2] = -p.mu[0] - p.mu[1];
        if (std::abs(p.mu[2].real()) <= 5.0 / 14.0) return p;
    }
}

}  // namespace

// Reference values below were computed once with mpmath at 30 digits.

TEST(Gamma, ReferenceValues) {
    EXPECT_LT(rel(gamma_c(1.0), 1.0), 1e-14);
    EXPECT_LT(rel(gamma_c(0.5), std::sqrt(kPi)), 1e-14);
    EXPECT_LT(rel(gamma_c({3.0, 4.0}), {0.0052255384713692142, -0.17254707929430019}), 1e-12);
    EXPECT_LT(rel(gamma_c({-2.5, 0.3}), {-0.61382299743774149, -0.21123261493704178}), 1e-12);
    EXPECT_LT(rel(gamma_c({0.5, 40.0}), {9.5295510494311588e-28, 8.7375682018384418e-28}), 1e-11);
}

TEST(Gamma, RecursionReflectionDuplication) {
    const cd z(3.0, 4.0);
    EXPECT_LT(rel(gamma_c(z), gamma_c(z + 1.0) / z), 1e-13);
    for (double x = -4.7; x < 5.0; x += 0.63)
        for (double y : {-3.0, -0.4, 0.0, 1.1, 7.5}) {
            const cd s(x, y);
            EXPECT_LT(std::abs(gamma_c(s) * gamma_c(1.0 - s) * std::sin(kPi * s) / kPi - 1.0), 1e-10);
            const cd dup = std::sqrt(kPi) * std::pow(2.0, 1.0 - 2.0 * s) * gamma_c(2.0 * s);
            EXPECT_LT(rel(gamma_c(s) * gamma_c(s + 0.5), dup), 1e-10);
        }
}

TEST(Gamma, PolesRaise) {
    EXPECT_THROW(gamma_c(0.0), PoleAtNonpositiveInteger);
    EXPECT_THROW(gamma_c(cd(-3.0, 1e-12)), PoleAtNonpositiveInteger);
    EXPECT_NO_THROW(gamma_c(cd(-3.0, 1e-6)));
    EXPECT_EQ(rgamma_c(-2.0), cd(0.0));
}

TEST(GammaFactors, GpmValuesAndSum) {
    EXPECT_LT(std::abs(G_pm(1.0, +1) - I / (2.0 * kPi)), 1e-15);
    const cd s(0.7, 2.0);
    EXPECT_LT(rel(G_pm(s, +1) + G_pm(s, -1), G0(s)), 1e-13);
    EXPECT_THROW(G_pm(-2.0, -1), PoleHit);
}

TEST(GammaFactors, GplusDecayShape) {
    // |G+(sigma + it)| <= C (1+|s|)^{sigma-1/2} e^{-pi t/2} for |t| >= 3
    for (double sigma : {0.5, 1.5})
        for (double t : {-20.0, -10.0, -5.0, 5.0, 10.0, 20.0}) {
            const cd s(sigma, t);
            const double r = std::abs(G_pm(s, +1)) * std::exp(kPi * t / 2.0) / std::pow(1.0 + std::abs(s), sigma - 0.5);
            EXPECT_LT(r, 1.0) << sigma << " " << t;
        }
}

TEST(CalG, TrivialParameters) {
    SpectralParams zero;
    const cd s(0.6, 1.0);
    const cd g0 = G0(s);
    EXPECT_LT(rel(calG(zero, s, +1) + calG(zero, s, -1), g0 * g0 * g0), 1e-12);
}

TEST(CalG, PoleDetection) {
    SpectralParams p;
    p.mu = {cd(0.1, 0.5), cd(-0.2, 1.0), cd(0.1, -1.5)};
    EXPECT_THROW(calG(p, -2.0 - p.mu[1], +1), PoleHit);
    EXPECT_THROW(calG(p, -p.mu[0] + cd(0.0, 5e-9), -1), PoleHit);
    EXPECT_NO_THROW(calG(p, -p.mu[0] + cd(0.0, 1e-6), -1));
}

TEST(Scattering, LowOrderValues) {
    std::mt19937_64 rng(5);
    const SpectralParams p = random_mu(rng);
    const cd v(0.4, 0.3);
    EXPECT_LT(std::abs(scattering_product(p, v, 0, +1) - 1.0), 1e-10);
    EXPECT_LT(std::abs(scattering_product(p, v, 0, -1)), 1e-10);
    const cd n1 = std::pow(2.0 * kPi, -3.0) * (v - 1.0 + p.mu[0]) * (v - 1.0 + p.mu[1]) * (v - 1.0 + p.mu[2]);
    EXPECT_LT(std::abs(scattering_product(p, v, 1, +1) - n1), 1e-10);
    EXPECT_LT(std::abs(scattering_product(p, v, 2, -1)), 1e-10);
}

TEST(Scattering, RandomDrawsMatchClosedForm) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> vr(-0.3, 0.8), vi(-4.0, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const SpectralParams p = random_mu(rng);
        const cd v(vr(rng), vi(rng));
        for (int n = 0; n <= 2; ++n)
            for (int e : {+1, -1})
                worst = std::max(worst, std::abs(scattering_product(p, v, n, e) - scattering_closed_form(p, v, n, e)));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Bessel, ReferenceValues) {
    EXPECT_LT(rel(bessel_j(0.0, 1e-10), 1.0), 1e-15);
    EXPECT_LT(rel(bessel_j(11.0, 4.0 * kPi), 0.29133796793896608), 1e-11);
    EXPECT_LT(rel(bessel_j({0.0, 2.6}, 4.0 * kPi), {3.2189049953327731, -5.7741818314179488}), 1e-11);
    EXPECT_LT(rel(bessel_j({0.0, 3.0}, 60.0), {-4.8768268537890904, 3.0077690019196981}), 1e-10);
    EXPECT_LT(rel(bessel_j(7.5, 100.0), 0.077399827825100083), 1e-10);
    // between the series and the large-argument regimes
    EXPECT_LT(rel(bessel_j(19.0, 55.0), -0.092147543103916510), 1e-11);
    EXPECT_LT(rel(bessel_j(19.0, 58.9), 0.10668097857856714), 1e-11);
    EXPECT_LT(rel(bessel_k({0.0, 2.0}, 1.5), 0.069331857212619632), 1e-11);
    EXPECT_LT(rel(bessel_k({0.0, 0.5}, 7.0), 0.00041774011872577946), 1e-10);
    EXPECT_LT(rel(bessel_k(1.3, 0.4), 3.3464012093811537), 1e-11);
    EXPECT_LT(rel(bessel(BesselKind::J, 11.0, 4.0 * kPi), bessel_j(11.0, 4.0 * kPi)), 1e-15);
}

TEST(Bessel, KRealForImaginaryOrder) {
    for (double t : {0.3, 1.0, 4.0})
        for (double x : {0.2, 1.0, 3.0, 9.0}) EXPECT_LT(std::abs(bessel_k(cd(0.0, 2.0 * t), x).imag()), 1e-15);
}

TEST(Bessel, OutsideEnvelopeRaises) {
    EXPECT_THROW(bessel_j(500.0, 1.0), RangeUnsupported);
    EXPECT_THROW(bessel_k(cd(0.0, 80.0), 1.0), RangeUnsupported);
    EXPECT_THROW(bessel_j(1.0, -1.0), RangeUnsupported);
}

TEST(Bessel, J11ViaMellinBarnes) {
    // inverse Mellin of the holomorphic kernel's closed form at x = 1
    auto What = [](cd u) { return mellin_kernel(KernelKind::Hol, u, 12); };
    const cd back = mellin_inverse(What, 1.0, -5.0);
    EXPECT_LT(rel(back, 2.0 * kPi * bessel_j(11.0, 4.0 * kPi)), 1e-9);
}

TEST(Kernels, ReferenceValues) {
    EXPECT_LT(rel(kernel_plus(0.3, 1.2), -1.8780811622858584), 1e-11);
    EXPECT_LT(rel(kernel_plus(0.7, {2.0, 0.375}), {-1.2765382546375753, 0.37622554491658655}), 1e-11);
    EXPECT_LT(rel(kernel_minus(0.25, 0.8), 0.51044578931064634), 1e-11);
}

TEST(Kernels, HolomorphicIsPlusAtImaginaryPoint) {
    for (int k : {2, 4, 12})
        for (double x : {0.1, 1.0, 5.0}) {
            const cd t = cd(k - 1.0, 0.0) / (2.0 * I);
            EXPECT_LT(std::abs(kernel_hol(x, k) - kernel_plus(x, t)), 1e-9) << k << " " << x;
        }
}

TEST(Kernels, PlusIsEvenAndSmooth) {
    for (double x : {0.05, 0.5, 2.0}) {
        EXPECT_LT(std::abs(kernel_plus(x, 0.7) - kernel_plus(x, -0.7)), 1e-12);
        // near the removable point at t = 0: quadratic in t^2 through larger t
        const double t2[3] = {9e-6, 3.6e-5, 8.1e-5};
        cd f[3];
        for (int i = 0; i < 3; ++i) f[i] = kernel_plus(x, std::sqrt(t2[i]));
        for (double t : {0.0, 5e-4, 9.9e-4, 1.01e-3}) {
            const double z = t * t;
            cd p = 0.0;
            for (int i = 0; i < 3; ++i) {
                double w = 1.0;
                for (int j = 0; j < 3; ++j)
                    if (j != i) w *= (z - t2[j]) / (t2[i] - t2[j]);
                p += w * f[i];
            }
            EXPECT_LT(rel(kernel_plus(x, t), p), 1e-9) << x << " " << t;
        }
    }
}

TEST(MellinKernel, ClosedForms) {
    const cd u(1.2, 0.0);
    const cd g = std::exp(-u * std::log(2.0 * kPi)) * gamma_c(u / 2.0 + I) * gamma_c(u / 2.0 - I);
    EXPECT_LT(rel(mellin_kernel(KernelKind::Plus, u, 1.0), g * std::cos(kPi * u / 2.0)), 1e-13);
    const cd u2(0.8, 0.4);
    const cd g0 = gamma_c(u2 / 2.0);
    EXPECT_LT(rel(mellin_kernel(KernelKind::Minus, u2, 0.0), std::exp(-u2 * std::log(2.0 * kPi)) * g0 * g0), 1e-13);
    EXPECT_THROW(mellin_kernel(KernelKind::Minus, 0.0, 0.0), PoleHit);
}

TEST(MellinKernel, HolomorphicAgainstQuadrature) {
    const cd q = mellin_hat([](double x) { return kernel_hol(x, 12); }, 1.0, {-11.0, 1.5}, 0.25);
    EXPECT_LT(std::abs(q - mellin_kernel(KernelKind::Hol, 1.0, 12)), 1e-8);
}

TEST(Hyper, ClosedValues) {
    const HyperResult r = hyper_integral(1.0, 1.0, 2.0, 2.0, 0.0);
    EXPECT_LT(std::abs(r.closed_form - 0.5), 1e-14);
    EXPECT_LT(std::abs(r.quadrature - 0.5), 1e-8);
    const cd a(0.7, 0.2), b(0.9, -0.5);
    const HyperResult s = hyper_integral(a, b, a + 1.0, b + 1.0, 0.1);
    EXPECT_LT(std::abs(s.closed_form - 1.0 / (a + b)), 1e-12);
    EXPECT_LT(std::abs(s.quadrature - s.closed_form), 1e-8);
}

TEST(Hyper, PreconditionsAndBlowUp) {
    EXPECT_THROW(hyper_integral(1.0, 1.0, 1.5, 1.4, 0.0), PreconditionViolated);
    EXPECT_THROW(hyper_integral(1.0, 1.0, 2.0, 2.0, 1.5), PreconditionViolated);
    const double small = std::abs(hyper_closed_form(0.01, 0.01, 2.0, 2.0));
    const double tiny = std::abs(hyper_closed_form(0.001, 0.001, 2.0, 2.0));
    EXPECT_GT(tiny, 5.0 * small);
}
