#pragma once

#include <array>
#include <complex>

namespace specrec {

using cd = std::complex<double>;

inline constexpr double kPoleTol = 1e-8;

/// Archimedean parameters of a GL(3) form together with the exponents
/// towards Ramanujan for GL(3) and GL(2).
struct SpectralParams {
    std::array<cd, 3> mu{};
    double theta = 5.0 / 14.0;
    double vartheta = 7.0 / 64.0;

    SpectralParams negated() const;
    void validate() const;  // throws PreconditionViolated
};

cd gamma_c(cd z);
cd lgamma_c(cd z);   // a logarithm of Gamma; exp(lgamma_c(z)) == Gamma(z)
cd rgamma_c(cd z);   // 1/Gamma(z), entire
cd lgamma_ratio(cd z, cd a, cd c);  // log Gamma(z+a) - log Gamma(z+c)
cd gamma_quotient(cd x, cd y);      // Gamma(x) / Gamma(y), safe for large |Im|

cd G0(cd s);
cd G1(cd s);
cd G_pm(cd s, int sign);

/// The GL(3) gamma factor combination with sign +1 or -1.
/// Throws PoleHit within kPoleTol of s = -n - mu_k.
cd calG(const SpectralParams& mu, cd s, int sign);

cd scattering_product(const SpectralParams& mu, cd v, int n, int eps2);
cd scattering_closed_form(const SpectralParams& mu, cd v, int n, int eps2);

enum class BesselKind { J, K };
cd bessel_j(cd nu, double x);
cd bessel_k(cd nu, double x);
cd bessel(BesselKind kind, cd order, double x);

// Kuznetsov and Petersson kernels. t may be complex for the + kernel.
cd kernel_plus(double x, cd t);
cd kernel_minus(double x, double t);
cd kernel_hol(double x, int k);

enum class KernelKind { Plus, Minus, Hol };

/// Closed-form Mellin transforms of the three kernels. For Hol the last
/// argument is the weight k.
cd mellin_kernel(KernelKind kind, cd u, double t_or_k);

struct HyperResult {
    cd quadrature;
    cd closed_form;
    double error_estimate;
};

/// Vertical-line integral of Gamma(a+s)Gamma(b-s)/(Gamma(c+s)Gamma(d-s))
/// over Re s = sigma together with its closed-form evaluation.
HyperResult hyper_integral(cd a, cd b, cd c, cd d, double sigma);
cd hyper_closed_form(cd a, cd b, cd c, cd d);

}  // namespace specrec
