#include <cmath>
#include <numbers>

#include "specrec/errors.hpp"
#include "specrec/special.hpp"

namespace specrec {

namespace {

constexpr double kPi = std::numbers::pi;
const cd kI{0.0, 1.0};

// B_{2k} / (2k (2k - 1)) for k = 1..10
constexpr double kStirling[] = {
    1.0 / 12.0,         -1.0 / 360.0,          1.0 / 1260.0,         -1.0 / 1680.0,
    1.0 / 1188.0,       -691.0 / 360360.0,     1.0 / 156.0,          -3617.0 / 122400.0,
    43867.0 / 244188.0, -174611.0 / 125400.0,
};

bool near_nonpositive_integer(cd z, double tol) {
    if (z.real() > 0.5) return false;
    const double n = std::round(z.real());
    return n <= 0.0 && std::abs(z - cd(n, 0.0)) < tol;
}

cd lgamma_right(cd z) {
    // Re z >= 1/2: shift up until Stirling's series is accurate.
    cd shift = 0.0;
    while (std::abs(z) < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    const cd zi = 1.0 / z, zi2 = zi * zi;
    cd series = 0.0, p = zi;
    for (double c : kStirling) {
        series += c * p;
        p *= zi2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift;
}

cd log_sin_pi(cd z) {
    const double y = z.imag();
    if (std::abs(y) < 20.0) return std::log(std::sin(kPi * z));
    if (y > 0) return -kI * kPi * z + std::log((std::exp(2.0 * kI * kPi * z) - 1.0) / (2.0 * kI));
    return kI * kPi * z + std::log((1.0 - std::exp(-2.0 * kI * kPi * z)) / (2.0 * kI));
}

}  // namespace

cd lgamma_c(cd z) {
    if (near_nonpositive_integer(z, 1e-10))
        throw PoleAtNonpositiveInteger("Gamma pole near " + std::to_string(z.real()));
    if (z.real() >= 0.5) return lgamma_right(z);
    return std::log(kPi) - log_sin_pi(z) - lgamma_right(1.0 - z);
}

cd gamma_c(cd z) { return std::exp(lgamma_c(z)); }

cd rgamma_c(cd z) {
    if (z.real() >= 0.5) return std::exp(-lgamma_right(z));
    const double n = std::round(z.real());
    if (n <= 0.0 && z == cd(n, 0.0)) return 0.0;
    if (std::abs(z.imag()) < 20.0) return std::sin(kPi * z) / kPi * std::exp(lgamma_right(1.0 - z));
    return std::exp(log_sin_pi(z) - std::log(kPi) + lgamma_right(1.0 - z));
}

cd G0(cd s) { return 2.0 * std::exp(-s * std::log(2.0 * kPi) + lgamma_c(s)) * std::cos(kPi * s / 2.0); }

cd G1(cd s) { return 2.0 * std::exp(-s * std::log(2.0 * kPi) + lgamma_c(s)) * std::sin(kPi * s / 2.0); }

cd G_pm(cd s, int sign) {
    const double e = sign >= 0 ? 1.0 : -1.0;
    return std::exp(lgamma_c(s) - s * std::log(2.0 * kPi) + e * kI * kPi * s / 2.0);
}

SpectralParams SpectralParams::negated() const {
    SpectralParams out = *this;
    for (auto& m : out.mu) m = -m;
    return out;
}

void SpectralParams::validate() const {
    if (std::abs(mu[0] + mu[1] + mu[2]) > 1e-12)
        throw PreconditionViolated("spectral parameters must sum to zero");
    for (const auto& m : mu)
        if (std::abs(m.real()) > theta + 1e-12)
            throw PreconditionViolated("|Re mu_j| exceeds theta");
}

cd calG(const SpectralParams& p, cd s, int sign) {
    cd lg = -3.0 * s * std::log(2.0 * kPi);
    cd cprod = 1.0, sprod = 1.0;
    for (const cd& m : p.mu) {
        const cd z = s + m;
        if (near_nonpositive_integer(z, kPoleTol)) throw PoleHit("calG: s = -n - mu_k");
        lg += lgamma_c(z);
        cprod *= std::cos(kPi * z / 2.0);
        sprod *= std::sin(kPi * z / 2.0);
    }
    const double e = sign >= 0 ? 1.0 : -1.0;
    return 4.0 * std::exp(lg) * (cprod + e * sprod / kI);
}

cd scattering_product(const SpectralParams& mu, cd v, int n, int eps2) {
    const SpectralParams neg = mu.negated();
    cd total = 0.0;
    for (int e1 : {1, -1}) {
        const cd phase = std::exp(static_cast<double>(e1) * kI * kPi * static_cast<double>(n) / 2.0);
        total += phase * calG(neg, 1.0 - v + static_cast<double>(n), -e1) * calG(mu, v, e1 * eps2);
    }
    return total;
}

cd scattering_closed_form(const SpectralParams& mu, cd v, int n, int eps2) {
    if (eps2 < 0) return 0.0;
    cd prod = std::pow(2.0 * kPi, -3.0 * n);
    for (const cd& m : mu.mu)
        for (int j = 1; j <= n; ++j) prod *= v - static_cast<double>(j) + m;
    return prod;
}

}  // namespace specrec
