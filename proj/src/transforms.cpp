#include "specrec/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "specrec/errors.hpp"
#include "specrec/quadrature.hpp"

namespace specrec {

namespace {

constexpr double kPi = std::numbers::pi;
const cd kI{0.0, 1.0};

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// log of the bound |J_nu(y)| <= (y/2)^nu / nu! for integer nu >= 0
double log_j_bound(int nu, double y) { return nu * std::log(y / 2.0) - log_factorial(nu); }

// Integral over a vertical ray start + i*dir*tau, tau in [0, T], of f dxi,
// using tau = sinh(w).
cd ray_integral(const std::function<cd(cd)>& f, cd start, int dir, double T) {
    const double W = std::asinh(T);
    QuadOptions opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-12;
    opt.initial_panels = 12 + static_cast<int>(W);
    const cd d = cd(0.0, static_cast<double>(dir));
    const QuadResult r = integrate(
        [&](double w) { return f(start + d * std::sinh(w)) * std::cosh(w); }, 0.0, W, opt);
    return r.value * d;
}

// Truncation height for an integrand decaying like |Im xi|^{-1-kappa}: the
// discarded tail is below 1e-12 relative to the decay constant, capped where
// log-gamma evaluations lose their accuracy.
double ray_height(double kappa, double cap) {
    if (cap > 0.0) return cap;
    const double k = std::max(kappa, 1e-3);
    return std::min(1e10, std::pow(1e-12 * k, -1.0 / k));
}

}  // namespace

ContourSpec ContourSpec::default_polygon() {
    ContourSpec c;
    c.kind = Kind::Polygonal;
    c.vertices = {cd(-0.6, -1.0), cd(0.1, 0.0), cd(-0.6, 1.0)};
    return c;
}

ContourSpec ContourSpec::vertical(double sigma) {
    ContourSpec c;
    c.kind = Kind::Vertical;
    c.sigma = sigma;
    return c;
}

cd mellin_hat(const std::function<cd(double)>& H, cd s, std::pair<double, double> tail_bounds,
              double half_period) {
    const auto [a, b] = tail_bounds;
    if (!(a < s.real() && s.real() < b)) throw OutsideStrip("mellin_hat: need a < Re s < b");
    QuadOptions opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-12;
    opt.initial_panels = 16;

    // (0, 1]: x = exp(-v)
    const double V0 = std::min(700.0, 36.0 / (s.real() - a));
    cd total = integrate([&](double v) { return H(std::exp(-v)) * std::exp(-s * v); }, 0.0, V0, opt)
                   .value;

    if (half_period > 0.0) {
        const double X0 = 1.0 + 16.0 * half_period;
        auto g = [&](double x) { return H(x) * std::exp((s - 1.0) * std::log(x)); };
        total += integrate(g, 1.0, X0, opt).value;
        total += integrate_oscillatory_tail(g, X0, half_period, 80, opt).value;
        return total;
    }
    if (std::isinf(b)) {
        double X = 2.0;
        while (X < 1e6 && std::abs(H(X)) * std::pow(X, s.real()) > 1e-18) X *= 1.5;
        opt.initial_panels = 32;
        total += integrate([&](double x) { return H(x) * std::exp((s - 1.0) * std::log(x)); }, 1.0, X,
                           opt)
                     .value;
        return total;
    }
    const double V1 = std::min(700.0, 36.0 / (b - s.real()));
    total += integrate([&](double v) { return H(std::exp(v)) * std::exp(s * v); }, 0.0, V1, opt).value;
    return total;
}

cd mellin_inverse(const std::function<cd(cd)>& What, double x, double sigma) {
    auto f = [&](double w) {
        const double tau = std::sinh(w);
        const cd s(sigma, tau);
        return What(s) * std::exp(-s * std::log(x)) * std::cosh(w) / (2.0 * kPi);
    };
    double peak = std::max(std::abs(f(0.0)), 1e-300);
    double W = 2.0;
    for (;; W += 0.5) {
        if (W > 60.0) throw DecayInsufficient("mellin_inverse: integrand does not decay");
        const double edge = std::max(std::abs(f(W)), std::abs(f(-W)));
        peak = std::max(peak, std::max(std::abs(f(W - 0.25)), std::abs(f(0.25 - W))));
        if (edge < 1e-14 * peak) break;
    }
    QuadOptions opt;
    opt.abs_tol = 1e-14 * peak * W;
    opt.rel_tol = 1e-12;
    opt.initial_panels = 8 + static_cast<int>(W);
    return integrate(f, -W, W, opt).value;
}

cd K_transform(const std::function<cd(cd)>& h, double x, double decay_exponent,
               double contour_shift) {
    const double D = decay_exponent;
    if (!(D > 2.0)) throw DecayInsufficient("K_transform: decay exponent must exceed 2");
    const cd ic(0.0, contour_shift);
    auto tail_ok = [&](double T) {
        const double mag = std::abs(h(cd(T, 0.0) + ic)) * std::pow(1.0 + T, 2.5);
        return mag / std::max(D - 2.5, 0.25) < 1e-14;
    };
    double T = 8.0;
    while (!tail_ok(T)) {
        T *= 1.25;
        if (T > 190.0) throw DecayInsufficient("K_transform: h does not decay fast enough");
    }
    auto integrand = [&](double tau) {
        const cd t = cd(tau, 0.0) + ic;
        return kernel_plus(x, t) * h(t) * t * std::tanh(kPi * t);
    };
    QuadOptions opt;
    opt.abs_tol = 1e-16;
    opt.rel_tol = 1e-11;
    opt.initial_panels = 8 + static_cast<int>(T);
    cd v;
    if (contour_shift == 0.0)
        v = 2.0 * integrate(integrand, 0.0, T, opt).value;
    else
        v = integrate(integrand, -T, T, opt).value;
    return v / (2.0 * kPi * kPi);
}

cd K_transform(const TestFunctionPair& pair, double x) {
    if (!pair.h) return 0.0;
    return K_transform(pair.h, x, pair.decay_exponent);
}

cd Kstar(const TestFunctionPair& pair, double x) {
    cd total = K_transform(pair, x);
    if (!pair.h_hol) return total;
    const double y = 4.0 * kPi * x;
    const int k_cap = pair.hol_k_max > 0 ? pair.hol_k_max : 100000;
    for (int k = 2; k <= k_cap; k += 2) {
        double log_h;
        if (pair.log_h_hol) {
            const auto [sg, lh] = pair.log_h_hol(k);
            if (sg == 0) continue;
            log_h = lh;
        } else {
            const double m = std::abs(pair.h_hol(k));
            if (m == 0.0) continue;
            log_h = std::log(m);
        }
        const double lb = log_j_bound(k - 1, y) + log_h + std::log(k - 1.0);
        if (lb < std::log(1e-20)) {
            if (k > y + 2.0 && pair.hol_k_max == 0) break;
            continue;
        }
        total += std::pow(kI, -k) * ((k - 1.0) / kPi) * pair.h_hol(k) * bessel_j(cd(k - 1, 0.0), y);
    }
    return total;
}

cd L_transform(const std::function<cd(double)>& H, KernelKind kind, double t_or_k, double beta) {
    auto kern = [&](double x) -> cd {
        switch (kind) {
            case KernelKind::Plus: return kernel_plus(x, t_or_k);
            case KernelKind::Minus: return kernel_minus(x, t_or_k);
            case KernelKind::Hol: return kernel_hol(x, static_cast<int>(std::lround(t_or_k)));
        }
        return 0.0;
    };
    QuadOptions opt;
    opt.abs_tol = 1e-16;
    opt.rel_tol = 1e-11;
    opt.initial_panels = 16;
    // near zero: x = exp(-v)
    cd total = integrate([&](double v) {
                   const double x = std::exp(-v);
                   return kern(x) * H(x);
               },
                         0.0, 40.0, opt)
                   .value;
    // integrand is O(x^{-beta-3/2}) at infinity
    const double p = beta + 0.5;
    if (p <= 0.5) throw DecayInsufficient("L_transform: H must decay faster than x^{-1/2}");
    const double X = std::min(5000.0, std::max(4.0, std::pow(1e13 / p, 1.0 / p)));
    opt.initial_panels = static_cast<int>(4.0 * X) + 8;
    total += integrate([&](double x) { return kern(x) * H(x) / x; }, 1.0, X, opt).value;
    return total;
}

void check_ab(int a, int b) {
    if (!(3 < b && b < a) || (a - b) % 2 != 0)
        throw ParityViolation("need integers 3 < b < a with a = b mod 2");
}

cd H_ab(int a, int b, double x) {
    check_ab(a, b);
    const double y = 4.0 * kPi * x;
    return std::pow(kI, b - a) * bessel_j(cd(a, 0.0), y) * std::pow(y, -b);
}

cd L_plus_Hab(int a, int b, cd t) {
    check_ab(a, b);
    cd v = std::exp(log_factorial(b) - b * std::log(2.0));
    const int m0 = (a + b) / 2;
    for (int j = 0; j <= b; ++j) v /= t * t + double(m0 - j) * double(m0 - j);
    return v;
}

double log_L_plus_Hab(int a, int b, double t) {
    check_ab(a, b);
    double v = log_factorial(b) - b * std::log(2.0);
    const int m0 = (a + b) / 2;
    for (int j = 0; j <= b; ++j) v -= std::log(t * t + double(m0 - j) * double(m0 - j));
    return v;
}

std::pair<int, double> log_L_hol_Hab(int a, int b, int k) {
    check_ab(a, b);
    double v = log_factorial(b) - b * std::log(2.0);
    int sign = 1;
    const int m0 = (a + b) / 2;
    const double h = (k - 1) / 2.0;
    for (int j = 0; j <= b; ++j) {
        const double f = double(m0 - j) * double(m0 - j) - h * h;
        if (f < 0) sign = -sign;
        v -= std::log(std::abs(f));
    }
    return {sign, v};
}

double L_hol_Hab(int a, int b, int k) {
    const auto [sg, lv] = log_L_hol_Hab(a, b, k);
    return sg * std::exp(lv);
}

double c_ab_constant(int a, int b) {
    check_ab(a, b);
    // sup over k > a-b of -L^hol H(k) k^{2b+1}; beyond k = 2(a+b)+2 all factors
    // share one sign and |L^hol H(k)| k^{2b+1} decreases, so a finite scan suffices.
    const int k_scan = std::max(400, 4 * (a + b) + 4);
    double best_log = -std::numeric_limits<double>::infinity();
    for (int k = a - b + 2; k <= k_scan; k += 2) {
        const auto [sg, lv] = log_L_hol_Hab(a, b, k);
        if (sg < 0) best_log = std::max(best_log, lv + (2.0 * b + 1.0) * std::log(double(k)));
    }
    if (!std::isfinite(best_log)) return 0.0;
    return std::exp(best_log) * (1.0 + 1e-9);
}

namespace {

double log_c_ab(int a, int b) {
    const int k_scan = std::max(400, 4 * (a + b) + 4);
    double best_log = -std::numeric_limits<double>::infinity();
    for (int k = a - b + 2; k <= k_scan; k += 2) {
        const auto [sg, lv] = log_L_hol_Hab(a, b, k);
        if (sg < 0) best_log = std::max(best_log, lv + (2.0 * b + 1.0) * std::log(double(k)));
    }
    return best_log + std::log1p(1e-9);
}

}  // namespace

TestFunctionPair inversion_pair(int a, int b) {
    check_ab(a, b);
    TestFunctionPair p;
    p.h = [a, b](cd t) { return L_plus_Hab(a, b, t); };
    p.h_hol = [a, b](int k) { return cd(L_hol_Hab(a, b, k), 0.0); };
    p.log_abs_h = [a, b](double t) { return log_L_plus_Hab(a, b, t); };
    p.log_h_hol = [a, b](int k) { return log_L_hol_Hab(a, b, k); };
    p.decay_exponent = 2.0 * b + 2.0;
    p.admissible_class = AdmissibleClass::Weakly;
    p.holomorphy_strip = (a - b) / 2.0;
    p.a = a;
    p.b = b;
    return p;
}

TestFunctionPair pos_pair(int a, int b) {
    TestFunctionPair p = inversion_pair(a, b);
    const double lc = log_c_ab(a, b);
    p.c_ab = std::exp(lc);
    auto log_hol = [a, b, lc](int k) -> std::pair<int, double> {
        auto [sg, lv] = log_L_hol_Hab(a, b, k);
        if (k <= a - b || !std::isfinite(lc)) return {sg, lv};
        const double lt = lc - (2.0 * b + 1.0) * std::log(double(k));
        // sg * e^lv + e^lt
        if (sg > 0) {
            const double m = std::max(lv, lt);
            return {1, m + std::log(std::exp(lv - m) + std::exp(lt - m))};
        }
        if (lt > lv) return {1, lt + std::log1p(-std::exp(lv - lt))};
        if (lt < lv) return {-1, lv + std::log1p(-std::exp(lt - lv))};
        return {0, -std::numeric_limits<double>::infinity()};
    };
    p.log_h_hol = log_hol;
    p.h_hol = [log_hol](int k) {
        const auto [sg, lv] = log_hol(k);
        return cd(sg * std::exp(lv), 0.0);
    };
    p.admissible_class = AdmissibleClass::SecondType;
    return p;
}

TestFunctionPair delta_pair(int k0) {
    TestFunctionPair p;
    p.h_hol = [k0](int k) { return cd(k == k0 ? 1.0 : 0.0, 0.0); };
    p.log_h_hol = [k0](int k) -> std::pair<int, double> {
        if (k == k0) return {1, 0.0};
        return {0, -std::numeric_limits<double>::infinity()};
    };
    p.hol_k_max = k0;
    p.decay_exponent = std::numeric_limits<double>::infinity();
    p.admissible_class = AdmissibleClass::SecondType;
    return p;
}

TestFunctionPair gaussian_zero_pair(int n_zeros) {
    TestFunctionPair p;
    p.h = [n_zeros](cd t) {
        cd v = std::exp(-t * t);
        for (int n = 0; n < n_zeros; ++n) v *= t * t + (n + 0.5) * (n + 0.5);
        return v;
    };
    p.log_abs_h = [n_zeros](double t) {
        double v = -t * t;
        for (int n = 0; n < n_zeros; ++n) v += std::log(t * t + (n + 0.5) * (n + 0.5));
        return v;
    };
    for (int n = 0; n < n_zeros; ++n) p.forced_zero_heights.push_back(n + 0.5);
    p.decay_exponent = 1e4;
    p.holomorphy_strip = std::numeric_limits<double>::infinity();
    p.admissible_class = AdmissibleClass::FirstType;
    return p;
}

cd pos_identity_rhs(int a, int b, double c, double x) {
    cd v = H_ab(a, b, x);
    const double y = 4.0 * kPi * x;
    const int k0 = a - b + 2;
    for (int k = k0 + (k0 % 2); k < 100000; k += 2) {
        if (log_j_bound(k - 1, y) + std::log(c * k) - (2.0 * b + 1.0) * std::log(double(k)) < std::log(1e-22) &&
            k > y)
            break;
        v += std::pow(kI, -k) * ((k - 1.0) / kPi) * c * std::pow(double(k), -2.0 * b - 1.0) *
             bessel_j(cd(k - 1, 0.0), y);
    }
    return v;
}

cd mellin_K_first_type(const std::function<cd(cd)>& h, cd u, double shift) {
    if (!(shift < u.real() / 2.0))
        throw OutsideStrip("mellin_K_first_type: contour must satisfy Im tau < Re u / 2");
    const cd ic(0.0, shift);
    auto f = [&](double x) {
        const cd tau = cd(x, 0.0) + ic;
        const cd ratio = std::exp(lgamma_ratio(kI * tau, u / 2.0, 1.0 - u / 2.0));
        return ratio * h(tau) * tau / std::cosh(kPi * tau);
    };
    double T = 4.0, peak = std::abs(f(0.0)) + 1e-300;
    while (T < 400.0) {
        const double edge = std::max(std::abs(f(T)), std::abs(f(-T)));
        peak = std::max(peak, std::max(std::abs(f(T / 2)), std::abs(f(-T / 2))));
        if (edge < 1e-18 * peak) break;
        T *= 1.3;
    }
    QuadOptions opt;
    opt.abs_tol = 1e-13 * peak * T;
    opt.rel_tol = 1e-12;
    opt.initial_panels = 8 + static_cast<int>(T);
    const cd integral = integrate(f, -T, T, opt).value;
    return kI / (2.0 * kPi) * std::exp(-u * std::log(2.0 * kPi)) * integral;
}

cd mellin_second_type(int a, int b, cd alpha0, const std::function<cd(int)>& alpha, int k_max,
                      cd u) {
    // int_0^inf J_nu(y) y^{m-1} dy = 2^{m-1} Gamma((nu+m)/2) / Gamma((nu-m)/2 + 1)
    const cd lead = std::exp(-u * std::log(2.0 * kPi) - (b + 1.0) * std::log(2.0)) *
                    gamma_quotient((double(a) + u - double(b)) / 2.0, (double(a) - u + double(b)) / 2.0 + 1.0);
    cd total = alpha0 * lead;
    if (alpha) {
        const int k0 = a - b + 2;
        for (int k = k0 + (k0 % 2); k <= k_max; k += 2) {
            const cd ak = alpha(k);
            if (ak == 0.0) continue;
            total += ak * std::exp(-u * std::log(2.0 * kPi)) *
                     gamma_quotient((double(k) - 1.0 + u) / 2.0, (1.0 + double(k) - u) / 2.0) / 2.0;
        }
    }
    return total;
}

Admissibility validate_admissible(const TestFunctionPair& p) {
    constexpr int A = 500;
    // (a) a single holomorphic weight beyond the threshold
    if (!p.h && p.h_hol && p.hol_k_max > 0) {
        const int k0 = p.hol_k_max;
        for (int k = 2; k <= k0 + 200; k += 2)
            if ((k == k0) != (p.h_hol(k) != 0.0))
                return {AdmissibleClass::SecondType, false, "holomorphic part is not a single weight"};
        if (k0 % 2) return {AdmissibleClass::None, false, "weight must be even"};
        if (k0 <= A) return {AdmissibleClass::SecondType, false, "weight must exceed 500"};
        return {AdmissibleClass::SecondType, true, "delta at a weight above 500"};
    }
    auto logh = [&](double t) {
        return p.log_abs_h ? p.log_abs_h(t) : std::log(std::abs(p.eval_h(t)));
    };
    // decay on the sampled grid t <= 1000
    auto decays_like = [&](double D) {
        double peak = -std::numeric_limits<double>::infinity(), peak_t = 0.0;
        for (double t = 0.0; t <= 1000.0; t += 0.5) {
            const double v = logh(t) + D * std::log1p(t);
            if (v > peak) {
                peak = v;
                peak_t = t;
            }
        }
        return peak_t < 1000.0;
    };
    auto even = [&] {
        for (double t = 0.25; t <= 50.0; t += 0.75)
            if (std::abs(logh(t) - logh(-t)) > 1e-10) return false;
        return true;
    };
    // (b) first type: forced zeros, wide holomorphy, fast decay
    if (p.h && !p.h_hol && p.admissible_class == AdmissibleClass::FirstType) {
        if (!even()) return {AdmissibleClass::None, false, "h is not even"};
        if (p.holomorphy_strip < A) return {AdmissibleClass::FirstType, false, "holomorphy strip below 500"};
        if (!decays_like(A + 2.0)) return {AdmissibleClass::FirstType, false, "decay below (1+|t|)^-502"};
        for (int n = 0; n + 0.5 < A; ++n) {
            const double y = n + 0.5;
            if (std::find(p.forced_zero_heights.begin(), p.forced_zero_heights.end(), y) ==
                p.forced_zero_heights.end())
                return {AdmissibleClass::FirstType, false, "missing forced zero"};
        }
        if (p.forced_zero_heights.size() <= 8) {
            for (double y : p.forced_zero_heights)
                if (std::abs(p.h(cd(0.0, y))) > 1e-12)
                    return {AdmissibleClass::FirstType, false, "h does not vanish at a forced zero"};
        }
        return {AdmissibleClass::FirstType, true, "first type with forced zeros"};
    }
    // (c) the positive pair built from H_{a,b}
    if (p.admissible_class == AdmissibleClass::SecondType && p.a > 0) {
        if (p.a - p.b < A) return {AdmissibleClass::SecondType, false, "a - b below 500"};
        if (2 * p.b + 1 < A + 2) return {AdmissibleClass::SecondType, false, "coefficients decay too slowly"};
        const int k_scan = std::max(400, 4 * (p.a + p.b) + 4);
        for (int k = 2; k <= k_scan; k += 2)
            if (p.log_h_hol(k).first <= 0)
                return {AdmissibleClass::SecondType, false, "holomorphic part not positive"};
        // on t = iy every factor t^2 + m^2 = m^2 - y^2 must stay positive
        const double m_min = (p.a - p.b) / 2.0;
        for (double y = 0.0; y <= 7.0 / 64.0; y += 7.0 / 640.0)
            if (m_min * m_min - y * y <= 0.0)
                return {AdmissibleClass::SecondType, false, "h not positive on the imaginary segment"};
        if (!decays_like(A + 2.0)) return {AdmissibleClass::SecondType, false, "decay below (1+|t|)^-502"};
        return {AdmissibleClass::SecondType, true, "positive pair with a - b >= 500"};
    }
    if (p.h && decays_like(15.0) && (!p.h_hol || p.log_h_hol || p.hol_k_max > 0))
        return {AdmissibleClass::Weakly, false, "weakly admissible only"};
    return {AdmissibleClass::None, false, "not weakly admissible"};
}

namespace {

void check_V_conditions(const SpectralParams& mu, cd s, cd w, const MellinData& Hhat, cd u) {
    if (!((3.0 * s - w + u - 11.0 / 5.0).real() > Hhat.holomorphic_left))
        throw ConditionViolated("first condition: Re(3s - w + u - 11/5) must exceed -A");
    const double v = (s + u / 2.0).real();
    if (!(mu.theta < v && v < 0.5))
        throw ConditionViolated("second condition: theta < Re(s + u/2) < 1/2");
    if (!((u / 2.0 + w).real() > 0.0))
        throw ConditionViolated("third condition: Re(u/2 + w) > 0");
}

// calG evaluated with the exponential factors of the trigonometric products
// folded into the exponent, so that large |Im s| neither overflows nor
// underflows.
cd calG_scaled(const SpectralParams& p, cd s, int sign) {
    if (std::abs(s.imag()) < 20.0) return calG(p, s, sign);
    cd lg = std::log(4.0) - 3.0 * s * std::log(2.0 * kPi);
    cd cprod = 1.0, sprod = 1.0;
    for (const cd& m : p.mu) {
        const cd z = s + m;
        lg += lgamma_c(z);
        if (z.imag() > 0) {
            const cd e = std::exp(kI * kPi * z);
            lg += -kI * kPi * z / 2.0;
            cprod *= (1.0 + e) / 2.0;
            sprod *= (e - 1.0) / (2.0 * kI);
        } else {
            const cd e = std::exp(-kI * kPi * z);
            lg += kI * kPi * z / 2.0;
            cprod *= (1.0 + e) / 2.0;
            sprod *= (1.0 - e) / (2.0 * kI);
        }
    }
    const double e = sign >= 0 ? 1.0 : -1.0;
    return std::exp(lg) * (cprod + e * sprod / kI);
}

}  // namespace

cd V_integrand(const SpectralParams& mu, cd s, cd w, const MellinData& Hhat, cd u, int sign, cd xi) {
    const SpectralParams neg = mu.negated();
    const cd v = s + u / 2.0;
    const cd gm = calG_scaled(mu, v, -sign), gp = calG_scaled(mu, v, sign);
    const cd bracket = G_pm(xi, +1) * calG_scaled(neg, 1.0 - v - xi, -1) * gm +
                       G_pm(xi, -1) * calG_scaled(neg, 1.0 - v - xi, +1) * gp;
    return Hhat.Hhat(3.0 * s - w - 1.0 + u + 2.0 * xi) * bracket / (2.0 * kPi * kI);
}

cd V_residue(const SpectralParams& mu, cd s, cd w, const MellinData& Hhat, cd u, int sign, int n) {
    if (sign > 0) return 0.0;
    const cd v = s + u / 2.0;
    cd prod = std::exp(-2.0 * n * std::log(2.0 * kPi) - log_factorial(n));
    for (int j = 1; j <= n; ++j)
        for (const cd& m : mu.mu) prod *= v + m - double(j);
    return Hhat.Hhat(3.0 * s - w - 1.0 + u - 2.0 * n) * prod;
}

cd V_transform(const SpectralParams& mu, cd s, cd w, const MellinData& Hhat, cd u, int sign,
               const ContourSpec& contour) {
    check_V_conditions(mu, s, w, Hhat, u);
    auto f = [&](cd xi) { return V_integrand(mu, s, w, Hhat, u, sign, xi); };
    const double T = ray_height((u / 2.0 + w).real(), contour.height_cap);
    QuadOptions opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-12;
    opt.initial_panels = 8;
    if (contour.kind == ContourSpec::Kind::Vertical) {
        const cd start(contour.sigma, 0.0);
        const double n = std::round(contour.sigma);
        if (n <= 0 && std::abs(contour.sigma - n) < kPoleTol)
            throw ConditionViolated("vertical contour passes through a pole of G");
        return ray_integral(f, start, +1, T) - ray_integral(f, start, -1, T);
    }
    const auto& vs = contour.vertices;
    if (vs.size() < 2) throw PreconditionViolated("polygonal contour needs at least two vertices");
    cd total = -ray_integral(f, vs.front(), -1, T - std::abs(vs.front().imag()));
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) total += integrate_segment(f, vs[i], vs[i + 1], opt).value;
    total += ray_integral(f, vs.back(), +1, T - std::abs(vs.back().imag()));
    return total;
}

}  // namespace specrec
