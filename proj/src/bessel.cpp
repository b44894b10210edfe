#include <cmath>
#include <numbers>

#include "specrec/errors.hpp"
#include "specrec/quadrature.hpp"
#include "specrec/special.hpp"

namespace specrec {

namespace {

constexpr double kPi = std::numbers::pi;
const cd kI{0.0, 1.0};

// Arguments up to this size go through the power series; the alternating
// terms reach about e^x, so the sum is accumulated in quad precision.
constexpr double kSeriesLimit = 40.0;

using q128 = __float128;

struct QComplex {
    q128 re, im;
};

// Power series sum_k (-+x^2/4)^k / (k! (nu+1)_k) in quad precision (minus
// for J, plus for I). Reports the largest term magnitude so the caller can
// judge cancellation.
cd series_sum(cd nu, double x, double& max_term, double& sum_mag, int sign = -1) {
    const q128 z = sign * (q128)x * (q128)x / 4;
    QComplex term{1, 0}, sum{1, 0};
    const q128 nr = nu.real(), ni = nu.imag();
    max_term = 1.0;
    for (int k = 1; k < 2000; ++k) {
        const q128 dr = (q128)k * ((q128)k + nr), di = (q128)k * ni;
        const q128 den = dr * dr + di * di;
        const q128 tr = term.re * z, ti = term.im * z;
        term.re = (tr * dr + ti * di) / den;
        term.im = (ti * dr - tr * di) / den;
        sum.re += term.re;
        sum.im += term.im;
        const double mag = std::hypot((double)term.re, (double)term.im);
        max_term = std::max(max_term, mag);
        if (k > x && mag < 1e-33 * max_term) break;
    }
    const cd out((double)sum.re, (double)sum.im);
    sum_mag = std::abs(out);
    return out;
}

bool is_negative_integer(cd nu, int& n) {
    if (nu.imag() != 0.0 || nu.real() >= 0.0) return false;
    const double r = std::round(nu.real());
    if (r != nu.real()) return false;
    n = static_cast<int>(-r);
    return true;
}

bool bessel_j_series(cd nu, double x, cd& out) {
    double max_term = 0.0, sum_mag = 0.0;
    const cd s = series_sum(nu, x, max_term, sum_mag);
    if (sum_mag == 0.0) return false;
    const cd pre = std::exp(nu * std::log(x / 2.0) - lgamma_c(nu + 1.0));
    out = pre * s;
    // judged against the oscillation envelope so values near a zero are kept
    const double envelope = std::sqrt(2.0 / (kPi * x)) * std::cosh(kPi * nu.imag() / 2.0);
    return std::abs(pre) * max_term * 4e-33 <= 1e-13 * std::max(std::abs(out), envelope);
}

// Hankel's expansion for large argument.
bool bessel_j_asymptotic(cd nu, double x, cd& out) {
    const cd m = 4.0 * nu * nu;
    cd P = 1.0, Q = 0.0, term = 1.0;
    double prev = 1e300;
    bool converged = false;
    for (int k = 1; k < 200; ++k) {
        term *= (m - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (static_cast<double>(k) * 8.0 * x);
        const double mag = std::abs(term);
        // terms grow while (2k-1)^2 < |4 nu^2|; divergence only counts after that
        if (mag > prev && (2.0 * k - 1.0) * (2.0 * k - 1.0) > std::abs(m)) break;
        prev = mag;
        const cd signed_term = ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        if (k % 2 == 0)
            P += signed_term;
        else
            Q += signed_term;
        if (mag < 1e-17 * std::max(std::abs(P), std::abs(Q))) {
            converged = true;
            break;
        }
    }
    if (!converged && prev > 1e-13) return false;
    const cd chi = x - nu * kPi / 2.0 - kPi / 4.0;
    out = std::sqrt(2.0 / (kPi * x)) * (P * std::cos(chi) - Q * std::sin(chi));
    return true;
}

}  // namespace

cd bessel_j(cd nu, double x) {
    if (!(x > 0.0)) throw RangeUnsupported("bessel_j: x must be positive");
    if (std::abs(nu) > 400.0) throw RangeUnsupported("bessel_j: order too large");
    int n = 0;
    if (is_negative_integer(nu, n)) return (n % 2 ? -1.0 : 1.0) * bessel_j(cd(n, 0.0), x);
    cd out;
    if (x <= kSeriesLimit + std::abs(nu) && bessel_j_series(nu, x, out)) return out;
    if (bessel_j_asymptotic(nu, x, out)) return out;
    throw RangeUnsupported("bessel_j: no accurate method for this (order, x)");
}

// I_nu(x) from its power series; no cancellation for real x.
static cd bessel_i_series(cd nu, double x) {
    double max_term = 0.0, sum_mag = 0.0;
    const cd s = series_sum(nu, x, max_term, sum_mag, +1);
    return std::exp(nu * std::log(x / 2.0) - lgamma_c(nu + 1.0)) * s;
}

cd bessel_k(cd nu, double x) {
    if (!(x > 0.0)) throw RangeUnsupported("bessel_k: x must be positive");
    if (std::abs(nu) > 60.0) throw RangeUnsupported("bessel_k: order too large");
    // small argument: K_nu = pi (I_{-nu} - I_nu) / (2 sin(nu pi))
    const cd sn = std::sin(nu * kPi);
    if (x <= 2.0 && std::abs(sn) > 1e-3)
        return kPi * (bessel_i_series(-nu, x) - bessel_i_series(nu, x)) / (2.0 * sn);
    // K_nu(x) = int_0^inf exp(-x cosh u) cosh(nu u) du
    const double a = std::abs(nu.real());
    double U = 1.0;
    while (x * std::cosh(U) - a * U < 60.0 + std::log(1.0 + a)) U += 0.5;
    QuadOptions opt;
    opt.abs_tol = 1e-17;
    opt.rel_tol = 1e-13;
    opt.initial_panels = 8 + static_cast<int>(std::abs(nu.imag()) * U / kPi);
    return integrate([&](double u) { return std::exp(-x * std::cosh(u)) * std::cosh(nu * u); }, 0.0, U,
                     opt)
        .value;
}

cd bessel(BesselKind kind, cd order, double x) {
    return kind == BesselKind::J ? bessel_j(order, x) : bessel_k(order, x);
}

namespace {

cd kernel_plus_direct(double y, cd t) {
    const cd nu = 2.0 * kI * t;
    cd diff;
    if (t.imag() == 0.0) {
        diff = 2.0 * kI * bessel_j(nu, y).imag();
    } else {
        diff = bessel_j(nu, y) - bessel_j(-nu, y);
    }
    return kPi * kI / std::sinh(kPi * t) * diff;
}

}  // namespace

cd kernel_plus(double x, cd t) {
    const double y = 4.0 * kPi * x;
    if (std::abs(t) >= 1e-3) return kernel_plus_direct(y, t);
    // even and analytic in t: quadratic interpolation in t^2 away from the
    // removable point
    const double z[3] = {1e-6, 4e-6, 9e-6};
    const cd zt = t * t;
    cd out = 0.0;
    for (int i = 0; i < 3; ++i) {
        cd w = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= (zt - z[j]) / (z[i] - z[j]);
        out += w * kernel_plus_direct(y, std::sqrt(z[i]));
    }
    return out;
}

cd kernel_minus(double x, double t) {
    return 4.0 * std::cosh(kPi * t) * bessel_k(cd(0.0, 2.0 * t), 4.0 * kPi * x);
}

cd kernel_hol(double x, int k) {
    return 2.0 * kPi * std::pow(kI, k) * bessel_j(cd(k - 1, 0.0), 4.0 * kPi * x);
}

}  // namespace specrec
