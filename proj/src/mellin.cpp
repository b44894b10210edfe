#include <cmath>
#include <numbers>

#include "specrec/errors.hpp"
#include "specrec/quadrature.hpp"
#include "specrec/special.hpp"

namespace specrec {

namespace {

constexpr double kPi = std::numbers::pi;
const cd kI{0.0, 1.0};

void pole_guard(cd z, const char* what) {
    const double n = std::round(z.real());
    if (n <= 0.0 && std::abs(z - cd(n, 0.0)) < kPoleTol) throw PoleHit(what);
}

// Bernoulli polynomial B_n(a) for n <= 8.
cd bernoulli_poly(int n, cd a) {
    static const double B[] = {1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0, 0.0, -1.0 / 30.0};
    cd s = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        s += binom * B[k] * std::pow(a, n - k);
        binom = binom * (n - k) / (k + 1);
    }
    return s;
}

}  // namespace

/// log Gamma(z + a) - log Gamma(z + c) without cancellation for large |z|.
cd lgamma_ratio(cd z, cd a, cd c) {
    if (std::abs(z) < 1e3) return lgamma_c(z + a) - lgamma_c(z + c);
    cd s = (a - c) * std::log(z);
    cd zp = z;
    for (int n = 1; n <= 7; ++n) {
        const double sgn = (n % 2) ? 1.0 : -1.0;
        s += sgn * (bernoulli_poly(n + 1, a) - bernoulli_poly(n + 1, c)) / (double(n) * (n + 1) * zp);
        zp *= z;
    }
    return s;
}

cd gamma_quotient(cd x, cd y) {
    pole_guard(x, "gamma_quotient: numerator at a pole");
    const double n = std::round(y.real());
    if (n <= 0.0 && std::abs(y - cd(n, 0.0)) < 1e-12) return 0.0;
    return std::exp(lgamma_c(x) - lgamma_c(y));
}

cd mellin_kernel(KernelKind kind, cd u, double t_or_k) {
    switch (kind) {
        case KernelKind::Plus:
        case KernelKind::Minus: {
            const double t = t_or_k;
            const cd z1 = u / 2.0 + kI * t, z2 = u / 2.0 - kI * t;
            pole_guard(z1, "mellin_kernel: Gamma(u/2 + it)");
            pole_guard(z2, "mellin_kernel: Gamma(u/2 - it)");
            const cd g = std::exp(-u * std::log(2.0 * kPi) + lgamma_c(z1) + lgamma_c(z2));
            return kind == KernelKind::Plus ? g * std::cos(kPi * u / 2.0) : g * std::cosh(kPi * t);
        }
        case KernelKind::Hol: {
            const int k = static_cast<int>(std::lround(t_or_k));
            const cd z = (u + double(k) - 1.0) / 2.0;
            pole_guard(z, "mellin_kernel: Gamma((u + k - 1)/2)");
            return std::pow(kI, k) * std::exp(-u * std::log(2.0 * kPi)) * kPi *
                   gamma_quotient(z, (1.0 + double(k) - u) / 2.0);
        }
    }
    return 0.0;
}

cd hyper_closed_form(cd a, cd b, cd c, cd d) {
    return gamma_c(a + b) * gamma_c(c + d - 1.0 - a - b) * rgamma_c(c - a) * rgamma_c(d - b) *
           rgamma_c(d + c - 1.0);
}

HyperResult hyper_integral(cd a, cd b, cd c, cd d, double sigma) {
    const double excess = (c + d - 1.0 - a - b).real();
    if (!(excess > 0.0) || !((a + b).real() > 0.0))
        throw PreconditionViolated("hyper_integral: need Re(c+d)-1 > Re(a+b) > 0");
    if (!(b.real() > sigma && sigma > -a.real()))
        throw PreconditionViolated("hyper_integral: contour does not separate the poles");

    // s = sigma + i sinh(w): the integrand decays like exp(-excess |w|) in w.
    auto integrand = [&](double w) -> cd {
        const double tau = std::sinh(w);
        const cd s(sigma, tau);
        const cd lg = lgamma_ratio(s, a, c) + lgamma_ratio(-s, b, d);
        return std::exp(lg) * std::cosh(w) / (2.0 * kPi);
    };
    double W = 4.0;
    while (std::exp(-excess * W) / excess > 1e-14 && W < 700.0) W += 2.0;
    QuadOptions opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 1e-12;
    opt.initial_panels = 16 + static_cast<int>(W);
    const QuadResult q = integrate(integrand, -W, W, opt);
    return {q.value, hyper_closed_form(a, b, c, d), q.error_estimate};
}

}  // namespace specrec
