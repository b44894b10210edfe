// verify: batch runner for the numerical identity checks.
//
//   verify <suite> [--tol X] [--trunc N] [--seed S] [--out PATH] [--format json|csv]
//
// Exit status: 0 when no check FAILs, 1 when at least one does, 2 on a
// configuration or I/O error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "specrec/errors.hpp"
#include "specrec/euler_local.hpp"
#include "specrec/series.hpp"
#include "specrec/special.hpp"
#include "specrec/spectral_check.hpp"
#include "specrec/transforms.hpp"

using namespace specrec;
using Json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Config {
    std::string suite;
    std::optional<double> tol;
    u64 trunc = 10000000;
    u64 seed = 42;
    std::string out;
    std::string format = "json";
    bool timings = false;
};

// What a check returns: the largest error seen, the parameters it ran with,
// and optionally a reason it could not certify its own truncation.
struct Outcome {
    double err = 0.0;
    Json params = Json::object();
    std::optional<std::string> skip;
    double certified_tail = 0.0;  // must not exceed the tolerance
};

struct Check {
    std::string suite, name, paper_ref;
    double tolerance;
    std::function<Outcome(const Config&)> run;
};

struct Record {
    std::string name, paper_ref, status;
    double max_abs_err, tolerance;
    Json params;
    double runtime_ms;
};

void track(double& worst, double e) {
    if (std::isnan(e)) worst = NAN;
    else if (!std::isnan(worst)) worst = std::max(worst, e);
}

std::mt19937_64 rng_for(const Config& c, u64 salt) { return std::mt19937_64(c.seed * 0x9E3779B97F4A7C15ULL + salt); }

SpectralParams draw_mu(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(-5.0 / 14.0, 5.0 / 14.0), im(-3.0, 3.0);
    SpectralParams p;
    for (;;) {
        p.mu[0] = cd(re(rng), im(rng));
        p.mu[1] = cd(re(rng), im(rng));
        p.mu[2] = -p.mu[0] - p.mu[1];
        if (std::abs(p.mu[2].real()) <= 5.0 / 14.0) return p;
    }
}

// ---------------------------------------------------------------- arith

Outcome kloosterman_direct(const Config&) {
    Outcome o;
    for (u64 c = 1; c <= 60; ++c)
        for (i64 m = -4; m <= 4; ++m)
            for (i64 n = -4; n <= 4; ++n) {
                cd s = 0.0;
                for (u64 d = 1; d <= c; ++d)
                    if (gcd(i64(d), i64(c)) == 1) {
                        const i64 db = mod_inverse(i64(d), i64(c));
                        s += std::polar(1.0, 2.0 * kPi * double(m * i64(d) + n * db) / double(c));
                    }
                track(o.err, std::abs(kloosterman(m, n, c) - s.real()) + std::abs(s.imag()));
            }
    o.params = {{"c_max", 60}, {"mn_range", 4}};
    return o;
}

Outcome kloosterman_weil(const Config&) {
    Outcome o;
    for (u64 c = 1; c <= 300; ++c)
        for (i64 m : {1, 2, 3, 6, 12})
            for (i64 n : {1, 5, 7, 9, 10}) {
                const double bound = double(divisor_count(c)) * std::sqrt(double(gcd(gcd(m, n), i64(c)))) *
                                     std::sqrt(double(c));
                track(o.err, std::max(0.0, std::abs(kloosterman(m, n, c)) - bound));
            }
    o.params = {{"c_max", 300}};
    return o;
}

Outcome ramanujan(const Config&) {
    Outcome o;
    for (u64 M = 1; M <= 80; ++M)
        for (i64 n = -20; n <= 40; ++n) {
            double s = 0.0;
            for (u64 d : divisors(M))
                if (n % i64(d) == 0) s += double(d) * mobius(M / d);
            track(o.err, std::abs(double(ramanujan_sum(M, n)) - s));
            track(o.err, std::abs(kloosterman(0, n, M) - s));
        }
    o.params = {{"M_max", 80}};
    return o;
}

Outcome tau3_mult(const Config&) {
    Outcome o;
    for (u64 m = 1; m <= 120; ++m)
        for (u64 n = 1; n <= 120; ++n)
            if (gcd(i64(m), i64(n)) == 1) track(o.err, std::abs(double(tau3(m * n)) - double(tau3(m) * tau3(n))));
    o.params = {{"range", 120}};
    return o;
}

Outcome gl3_hecke(const Config& c) {
    Outcome o;
    const auto F = Gl3Form::satake(c.seed);
    for (u64 n = 1; n <= 40; ++n)
        for (u64 m = 1; m <= 40; ++m) {
            cd s = 0.0;
            for (u64 d : divisors(gcd(i64(n), i64(m)))) s += F.A(n / d, m / d);
            track(o.err, std::abs(F.A(n, 1) * F.A(1, m) - s));
            track(o.err, std::abs(F.A(n, m) - F.A_multiplicative(n, m)));
        }
    o.params = {{"form_seed", c.seed}, {"range", 40}};
    return o;
}

// ---------------------------------------------------------------- special

Outcome scattering(const Config& c) {
    Outcome o;
    auto rng = rng_for(c, 1);
    std::uniform_real_distribution<double> vr(-0.3, 0.8), vi(-4.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        const SpectralParams p = draw_mu(rng);
        const cd v(vr(rng), vi(rng));
        for (int n = 0; n <= 2; ++n)
            for (int e : {+1, -1})
                track(o.err, std::abs(scattering_product(p, v, n, e) - scattering_closed_form(p, v, n, e)));
    }
    o.params = {{"draws", 200}, {"n", "0..2"}, {"eps2", "+-1"}};
    return o;
}

Outcome hyper(const Config& c) {
    Outcome o;
    track(o.err, std::abs(hyper_integral(1.0, 1.0, 2.0, 2.0, 0.0).quadrature - 0.5));
    auto rng = rng_for(c, 2);
    std::uniform_real_distribution<double> ra(0.2, 1.4), ri(-1.0, 1.0), rs(0.6, 1.8), u01(0.1, 0.9);
    int points = 1;
    while (points < 20) {
        const cd a(ra(rng), ri(rng)), b(ra(rng), ri(rng));
        const cd cc = a + cd(rs(rng), ri(rng)), d = b + cd(rs(rng), ri(rng));
        if ((cc + d - 1.0 - a - b).real() < 0.5) continue;
        const double sigma = -a.real() + u01(rng) * (a.real() + b.real());
        const auto r = hyper_integral(a, b, cc, d, sigma);
        track(o.err, std::abs(r.quadrature - r.closed_form));
        ++points;
    }
    o.params = {{"points", 20}};
    return o;
}

Outcome mellin_kernels(const Config&) {
    Outcome o;
    for (double t : {0.25, 0.5, 1.0, 1.5, 2.0})
        for (cd u : {cd(0.3, 0.5), cd(0.2, -1.0)})
            track(o.err, std::abs(mellin_hat([&](double x) { return kernel_plus(x, t); }, u, {0.0, 0.5}, 0.25) -
                                  mellin_kernel(KernelKind::Plus, u, t)));
    for (double t : {0.0, 0.5, 1.0, 2.0, 3.0})
        for (cd u : {cd(0.8, 0.4), cd(1.5, 0.0)})
            track(o.err, std::abs(mellin_hat([&](double x) { return kernel_minus(x, t); }, u, {0.0, INFINITY}) -
                                  mellin_kernel(KernelKind::Minus, u, t)));
    for (int k : {2, 4, 6, 8, 12})
        for (cd u : {cd(0.3, 0.2), cd(1.0, 0.0)})
            track(o.err, std::abs(mellin_hat([&](double x) { return kernel_hol(x, k); }, u, {1.0 - k, 1.5}, 0.25) -
                                  mellin_kernel(KernelKind::Hol, u, k)));
    o.params = {{"kinds", "plus,minus,hol"}, {"points_per_kind", 10}};
    return o;
}

Outcome gamma_reflection(const Config& c) {
    Outcome o;
    auto rng = rng_for(c, 3);
    std::uniform_real_distribution<double> re(-4.5, 4.5), im(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const cd z(re(rng), im(rng));
        const cd lhs = gamma_c(z) * gamma_c(1.0 - z) * std::sin(kPi * z) / kPi;
        track(o.err, std::abs(lhs - 1.0));
    }
    o.params = {{"draws", 100}};
    return o;
}

// ---------------------------------------------------------------- transforms

Outcome sears_titchmarsh(const Config&) {
    Outcome o;
    for (auto [a, b] : {std::pair{10, 4}, {12, 6}}) {
        const TestFunctionPair p = inversion_pair(a, b);
        for (double x : {0.1, 0.3, 1.0, 3.0}) track(o.err, std::abs(Kstar(p, x) - H_ab(a, b, x)));
    }
    o.params = {{"ab", "(10,4),(12,6)"}, {"x", "0.1,0.3,1,3"}};
    return o;
}

Outcome positive_pair(const Config&) {
    Outcome o;
    const TestFunctionPair p = pos_pair(10, 4);
    for (double x : {0.2, 1.0, 2.5}) track(o.err, std::abs(Kstar(p, x) - pos_identity_rhs(10, 4, p.c_ab, x)));
    o.params = {{"ab", "(10,4)"}};
    return o;
}

// ---------------------------------------------------------------- series

Outcome hurwitz_avg(const Config&) {
    Outcome o;
    for (int m = 1; m <= 12; ++m)
        for (cd s : {cd(2.0), cd(3.5), cd(0.5, 3.0), cd(-1.5), cd(1.2, -7.0)}) {
            cd sum = 0.0;
            for (int b = 1; b <= m; ++b) sum += hurwitz(s, double(b) / m);
            track(o.err, std::abs(sum - std::pow(double(m), s) * zeta(s)));
        }
    o.params = {{"m_max", 12}, {"s_points", 5}};
    return o;
}

Outcome digamma_avg(const Config&) {
    Outcome o;
    for (int m = 1; m <= 12; ++m) {
        double psi = 0.0;
        for (int b = 1; b <= m; ++b) psi += hurwitz_laurent(double(b) / m).psi_val;
        track(o.err, std::abs(psi + m * (kEulerGamma + std::log(double(m)))));
    }
    o.params = {{"m_max", 12}};
    return o;
}

Outcome d_series(const Config& c) {
    Outcome o;
    const auto F = Gl3Form::satake(c.seed);
    for (auto [q, ell] : {std::pair<u64, u64>{1, 1}, {2, 3}, {4, 3}})
        for (int sign : {1, -1})
            track(o.err, std::abs(D_series_def(F, q, ell, 3.0, -1.0, 3.0, sign).value -
                                  D_series_alt(F, q, ell, 3.0, -1.0, 3.0, sign).value));
    const DBox box;
    o.params = {{"s", 3}, {"u", -1}, {"w", 3}, {"form_seed", c.seed}, {"box", {box.C, box.N1, box.N2, box.R}}};
    return o;
}

Outcome bijection(const Config&) {
    Outcome o;
    u64 quint = 0;
    for (auto [q, ell] : {std::pair<u64, u64>{1, 1}, {2, 3}, {4, 3}}) {
        const auto r = bijection_check(q, ell, 30);
        track(o.err, double(r.failures));
        quint += r.quintuples;
    }
    o.params = {{"bound", 30}, {"quintuples", quint}};
    return o;
}

Outcome bump(const Config& c) {
    Outcome o;
    const u64 N = std::min<u64>(u64(std::sqrt(double(c.trunc))), 3000);
    for (u64 ell : {1, 2, 3}) {
        const auto r = bump_check(Gl3Form::e0(), ell, 2.0, 2.0, N);
        track(o.err, std::abs(r.lhs - r.rhs));
        o.certified_tail = std::max(o.certified_tail, r.tail);
        if (ell == 1) {
            const double z4 = std::pow(kPi, 4) / 90.0, z8 = std::pow(kPi, 8) / 9450.0;
            track(o.err, std::abs(r.rhs - std::pow(z4, 6) / z8));
        }
    }
    o.params = {{"N", N}, {"s", 2}, {"w", 2}, {"ell", "1,2,3"}};
    return o;
}

// ---------------------------------------------------------------- local

Outcome lemma(const Config& c) {
    Outcome o;
    const u64 primes[] = {2, 3, 5, 7, 11};
    for (u64 i = 0; i < 100; ++i) {
        const auto f = Gl2Form::satake(c.seed * 1000 + i);
        const auto F = Gl3Form::satake(c.seed * 1000 + 500 + i);
        const auto e = euler_lemma_check(f, F, primes[i % 5], cd(0.7, 0.3 * double(i % 7)), 12);
        track(o.err, std::max({e.first, e.second, e.third}));
    }
    o.params = {{"draws", 100}, {"order", 12}};
    return o;
}

Outcome laurent_factors(const Config&) {
    Outcome o;
    const Shifts xs[] = {{0.0, 0.0, 0.0}, {0.01, -0.02, 0.015}, {cd(0.0, 0.1), cd(0.02, 0.0), cd(-0.01, 0.05)}};
    const std::pair<cd, cd> zpts[] = {{0.8, 1.2}, {1.1, 1.6}, {cd(0.9, 1.0), cd(1.4, -0.5)}, {1.0, 2.0}, {0.9, 1.8}};
    const std::pair<cd, cd> tpts[] = {{0.9, 2.2}, {1.2, 2.5}, {1.0, 2.5}, {0.7, 2.5}, {cd(1.1, 1.0), cd(2.4, 0.5)}};
    for (u64 p : {2, 3})
        for (const auto& x : xs)
            for (int k = 0; k < 5; ++k) {
                const auto bz = laurent_factor_Z_brute(p, zpts[k].first, zpts[k].second, x, 40);
                track(o.err, std::abs(bz.value - laurent_factor_Z(p, zpts[k].first, zpts[k].second, x)));
                const auto bt = laurent_factor_Ztilde_brute(p, tpts[k].first, tpts[k].second, x, 40);
                track(o.err, std::abs(bt.value - laurent_factor_Ztilde(p, tpts[k].first, tpts[k].second, x)));
                o.certified_tail = std::max({o.certified_tail, bz.tail, bt.tail});
            }
    o.params = {{"E", 40}, {"p", "2,3"}, {"shifts", 3}, {"points", 5}};
    return o;
}

Outcome w_independence(const Config& c) {
    Outcome o;
    const auto f = Gl2Form::satake(c.seed + 1);
    const auto F = Gl3Form::satake(c.seed + 2);
    for (u64 q : {2, 3, 5, 6, 10}) {
        const cd s(0.9, 0.2);
        const cd closed = local_Lq_cusp_newform(f, F, q, s);
        for (double w : {0.5, 1.0, 2.3}) track(o.err, std::abs(local_Lq_cusp(f, F, q, q, s, w) - closed));
    }
    o.params = {{"w", "0.5,1,2.3"}, {"q", "2,3,5,6,10"}};
    return o;
}

Outcome central_value(const Config& c) {
    Outcome o;
    const auto f = Gl2Form::satake(c.seed + 3);
    const auto F = Gl3Form::satake(c.seed + 4);
    for (u64 q : {2, 3, 6, 10})
        for (u64 d0 : divisors(q))
            track(o.err, std::abs(local_Lq_cusp(f, F, q, d0, 0.5, 0.5) - local_Lq_cusp_half(f, F, q, d0)));
    o.params = {{"q", "2,3,6,10"}};
    return o;
}

Outcome oldform_gram(const Config& c) {
    Outcome o;
    const auto f = Gl2Form::satake(c.seed + 5);
    auto loc = [&](u64 p, int e1, int e2) {
        cd s = 0.0;
        double pk = 1.0;
        for (int k = 0; k < 200; ++k, pk /= double(p))
            s += f.lambda_local(p, k - e1) * std::conj(f.lambda_local(p, k - e2)) * pk;
        return s;
    };
    for (u64 M1 : divisors(36))
        for (u64 M2 : divisors(36)) {
            cd G = 0.0;
            for (u64 d1 : divisors(M1))
                for (u64 d2 : divisors(M2)) {
                    cd r = 1.0;
                    for (auto [p, e] : factor(M1 * M2).factors)
                        r *= loc(p, valuation(d1, p), valuation(d2, p)) / loc(p, 0, 0);
                    G += xi_f(f, 1, M1, d1) * std::conj(xi_f(f, 1, M2, d2)) * double(d1 * d2) /
                         std::sqrt(double(M1 * M2)) * r;
                }
            track(o.err, std::abs(G - (M1 == M2 ? 1.0 : 0.0)));
        }
    o.params = {{"M", "divisors of 36"}};
    return o;
}

Outcome lambda_inversion(const Config& c) {
    Outcome o;
    const auto f = Gl2Form::satake(c.seed + 6);
    for (u64 ell = 1; ell <= 100; ++ell) {
        cd s = 0.0;
        for (u64 a : divisors(ell)) s += lambda_capital(f, a, 0.5) / std::sqrt(double(ell / a));
        track(o.err, std::abs(s - f.lambda(ell)));
    }
    o.params = {{"ell_max", 100}};
    return o;
}

Outcome e2e(const Config& c, bool cusp) {
    Outcome o;
    const u64 P = std::min<u64>(c.trunc, 1000000);
    const auto f = Gl2Form::satake(c.seed + 7);
    const auto F = Gl3Form::satake(c.seed + 8);
    const LocalE2E e(F, cd(2.0, 0.5), cd(2.5, -0.3), P, &f);
    int configs = 0;
    for (u64 q = 1; q <= 12; ++q)
        for (u64 ell = 1; ell <= 12; ++ell) {
            if (gcd(i64(q), i64(ell)) != 1) continue;
            std::vector<E2EResult> rs;
            if (cusp) {
                for (u64 d0 : divisors(q))
                    if (gcd(i64(d0), i64(q / d0)) == 1) rs.push_back(e.cusp(q, ell, d0));
            } else {
                for (double t : {0.0, 0.7}) rs.push_back(e.eis(q, ell, t));
            }
            for (const auto& r : rs) {
                const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
                if (scale == 0.0) continue;  // both sides vanish identically
                track(o.err, std::abs(r.lhs - r.rhs) / scale);
                o.certified_tail = std::max(o.certified_tail, r.tail / scale);
                ++configs;
            }
        }
    o.params = {{"P", P}, {"configs", configs}, {"s", "2+0.5i"}, {"w", "2.5-0.3i"}, {"error", "relative"}};
    return o;
}

// ---------------------------------------------------------------- spectral

Outcome petersson_rank(const Config&) {
    Outcome o;
    std::vector<std::vector<double>> r(21, std::vector<double>(21));
    for (u64 n = 1; n <= 20; ++n)
        for (u64 m = 1; m <= 20; ++m) r[n][m] = petersson_rhs(n, m, 12, 1);
    for (u64 n = 1; n <= 20; ++n)
        for (u64 m = 1; m <= 20; ++m) track(o.err, std::abs(r[n][m] * r[1][1] - r[n][1] * r[1][m]));
    if (!(r[1][1] > 0.0)) o.err = NAN;
    o.params = {{"k0", 12}, {"q", 1}, {"nm_max", 20}};
    return o;
}

Outcome petersson_eigen(const Config&) {
    Outcome o;
    const auto q = delta_coeffs(20);
    const double r11 = petersson_rhs(1, 1, 12, 1);
    for (u64 n = 1; n <= 20; ++n) track(o.err, std::abs(petersson_rhs(n, 1, 12, 1) / r11 - q.lambda[n]));
    o.params = {{"k0", 12}, {"n_max", 20}};
    return o;
}

Outcome eisenstein_forms(const Config&) {
    Outcome o;
    for (auto [D, N] : {std::pair<i64, u64>{1, 12}, {1, 18}, {-4, 32}, {-3, 18}, {5, 50}}) {
        const auto chi = D == 1 ? DirichletChar::trivial() : DirichletChar::kronecker(D);
        const u64 cc = chi.conductor();
        for (u64 M : divisors(N)) {
            if (M % (cc * cc)) continue;
            for (i64 n : {1, 2, 3, 4, 6, 12, 18, 30, -12})
                track(o.err, std::abs(std::abs(eisenstein_rho(chi, M, N, n, 0.4)) -
                                      std::abs(eisenstein_rho_expsum(chi, M, N, n, 0.4))));
        }
    }
    o.params = {{"t", 0.4}, {"characters", "1,-4,-3,5"}};
    return o;
}

Outcome main_term(const Config&) {
    Outcome o;
    track(o.err, std::abs(main_term_N(delta_pair(12)) - 11.0 / (2.0 * kPi * kPi)));
    o.params = {{"pair", "delta_12"}};
    return o;
}

std::vector<Check> all_checks() {
    using namespace std::placeholders;
    return {
        {"arith", "kloosterman_exponential_sum", "Kloosterman sum definition", 1e-9, kloosterman_direct},
        {"arith", "kloosterman_weil_bound", "Weil bound", 1e-9, kloosterman_weil},
        {"arith", "ramanujan_sum", "Ramanujan sum divisor formula", 1e-9, ramanujan},
        {"arith", "tau3_multiplicative", "ternary divisor function", 0.0, tau3_mult},
        {"arith", "gl3_hecke_relation", "GL(3) Hecke relations", 1e-10, gl3_hecke},
        {"special", "scattering_identity", "gamma-factor scattering identity", 1e-10, scattering},
        {"special", "hyper_contour", "Barnes-type contour integral", 1e-8, hyper},
        {"special", "mellin_kernels", "Mellin transforms of Bessel kernels", 1e-8, mellin_kernels},
        {"special", "gamma_reflection", "Gamma reflection formula", 1e-12, gamma_reflection},
        {"transforms", "sears_titchmarsh_inversion", "Sears-Titchmarsh inversion", 1e-6, sears_titchmarsh},
        {"transforms", "positive_pair_identity", "positive test function construction", 1e-8, positive_pair},
        {"series", "hurwitz_averaging", "Hurwitz zeta averaging", 1e-10, hurwitz_avg},
        {"series", "digamma_average", "digamma averaging", 1e-8, digamma_avg},
        {"series", "d_series_representations", "multiple Dirichlet series, two representations", 1e-6, d_series},
        {"series", "quintuple_bijection", "quintuple/triple correspondence", 0.0, bijection},
        {"series", "bump_identity", "double Dirichlet series at the bump", 1e-8, bump},
        {"local", "rankin_selberg_lemma", "local Rankin-Selberg identities", 1e-10, lemma},
        {"local", "laurent_euler_factors", "Laurent coefficient Euler factors", 1e-8, laurent_factors},
        {"local", "newform_w_independence", "newform local factor", 1e-9, w_independence},
        {"local", "central_value_local_factor", "local factor at the central point", 1e-10, central_value},
        {"local", "oldform_gram_matrix", "oldform orthonormal basis", 1e-12, oldform_gram},
        {"local", "lambda_inversion", "Lambda_f inversion", 1e-12, lambda_inversion},
        {"local", "e2e_cusp", "spectral rearrangement, cusp forms", 1e-6, std::bind(e2e, _1, true)},
        {"local", "e2e_eisenstein", "spectral rearrangement, Eisenstein series", 1e-6, std::bind(e2e, _1, false)},
        {"spectral", "petersson_rank_one", "Petersson formula, level 1 weight 12", 1e-8, petersson_rank},
        {"spectral", "petersson_eigenvalues", "Petersson formula, level 1 weight 12", 1e-7, petersson_eigen},
        {"spectral", "eisenstein_coefficients", "Eisenstein Fourier coefficients", 1e-12, eisenstein_forms},
        {"spectral", "main_term_delta", "diagonal term of the spectral formula", 1e-15, main_term},
    };
}

Record run_one(const Check& c, const Config& cfg) {
    Record r{c.name, c.paper_ref, "", 0.0, cfg.tol.value_or(c.tolerance), Json::object(), 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Outcome o = c.run(cfg);
        r.max_abs_err = o.err;
        r.params = std::move(o.params);
        if (!o.skip && o.certified_tail > c.tolerance)
        {
            std::ostringstream os;
            os << "truncation tail " << std::setprecision(3) << o.certified_tail << " exceeds tolerance "
               << c.tolerance;
            o.skip = os.str();
        }
        if (o.skip) {
            r.status = "SKIP";
            r.params["skip_reason"] = *o.skip;
        } else {
            r.status = (r.max_abs_err <= r.tolerance) ? "PASS" : "FAIL";  // NaN fails
        }
    } catch (const TailNotCertified& e) {
        r.status = "SKIP";
        r.max_abs_err = NAN;
        r.params["skip_reason"] = e.what();
    } catch (const std::exception& e) {
        r.status = "FAIL";
        r.max_abs_err = NAN;
        r.params["error"] = e.what();
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SPECREC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v < 1) throw ConfigInvalid("SPECREC_THREADS must be a positive integer");
        n = unsigned(std::min(v, 64L));
    }
    return n;
}

std::vector<Record> run_suite(const std::vector<Check>& checks, const Config& cfg) {
    std::vector<Record> out(checks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < checks.size(); i = next++) out[i] = run_one(checks[i], cfg);
    };
    const unsigned n = std::min<unsigned>(worker_count(), unsigned(std::max<std::size_t>(1, checks.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string to_json(const std::vector<Record>& recs, const Config& cfg) {
    Json j;
    j["schema"] = 1;
    j["suite"] = cfg.suite;
    j["seed"] = cfg.seed;
    if (cfg.timings) j["timestamp"] = utc_timestamp();
    j["checks"] = Json::array();
    for (const auto& r : recs)
        j["checks"].push_back({{"name", r.name},
                               {"paper_ref", r.paper_ref},
                               {"status", r.status},
                               {"max_abs_err", number_or_null(r.max_abs_err)},
                               {"tolerance", r.tolerance},
                               {"params", r.params},
                               {"runtime_ms", cfg.timings ? number_or_null(r.runtime_ms) : Json(nullptr)}});
    return j.dump(2) + "\n";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

std::string to_csv(const std::vector<Record>& recs, const Config& cfg) {
    std::ostringstream os;
    os << "schema,suite,seed,name,paper_ref,status,max_abs_err,tolerance,params,runtime_ms\n";
    for (const auto& r : recs) {
        os << 1 << ',' << cfg.suite << ',' << cfg.seed << ',' << csv_field(r.name) << ',' << csv_field(r.paper_ref)
           << ',' << r.status << ',' << number_or_null(r.max_abs_err).dump() << ',' << Json(r.tolerance).dump() << ','
           << csv_field(r.params.dump()) << ',' << (cfg.timings ? number_or_null(r.runtime_ms).dump() : "") << '\n';
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    Config cfg;
    CLI::App app{"Run numerical verification suites and write a report."};
    const std::vector<std::string> suites{"arith", "special", "transforms", "series", "local", "spectral", "all"};
    app.add_option("suite", cfg.suite, "Suite to run")->required()->check(CLI::IsMember(suites));
    app.add_option("--tol", cfg.tol, "Override every tolerance")->check(CLI::NonNegativeNumber);
    app.add_option("--trunc", cfg.trunc, "Truncation cap in total terms (<= 1e7)");
    app.add_option("--seed", cfg.seed, "Seed for random draws");
    app.add_option("--out", cfg.out, "Output file (default: stdout)");
    app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--timings", cfg.timings, "Record a timestamp and per-check runtimes (reports are then not reproducible)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cfg.trunc == 0 || cfg.trunc > 10000000) throw ConfigInvalid("--trunc must be in [1, 1e7]");
        std::vector<Check> checks;
        for (auto& c : all_checks())
            if (cfg.suite == "all" || c.suite == cfg.suite) checks.push_back(std::move(c));

        const auto recs = run_suite(checks, cfg);
        const std::string text = cfg.format == "json" ? to_json(recs, cfg) : to_csv(recs, cfg);
        if (cfg.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
            if (!f || !(f << text) || !f.flush()) throw IoError("cannot write " + cfg.out);
        }
        const bool any_fail = std::any_of(recs.begin(), recs.end(), [](const Record& r) { return r.status == "FAIL"; });
        return any_fail ? 1 : 0;
    } catch (const ConfigInvalid& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}
