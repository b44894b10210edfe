#include "specrec/euler_local.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

#include "specrec/errors.hpp"

namespace specrec {

namespace {

u64 mix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

cd cpow_real(double base, cd e) { return std::exp(e * std::log(base)); }

u64 g64(u64 a, u64 b) { return gcd(static_cast<i64>(a), static_cast<i64>(b)); }

double nu_index(u64 N) {
    double v = 1.0;
    for (auto [p, e] : factor(N).factors) v *= 1.0 + 1.0 / static_cast<double>(p);
    return v;
}

// Smallest K with (K+1)^6 r^K below 1e-18: the local sums have polynomially
// growing coefficients times a geometric ratio r.
int exponent_cap(double r) {
    if (!(r < 1.0)) throw OutsideConvergence("local sum: geometric ratio >= 1");
    int K = 1;
    while (K < 3000 && 6.0 * std::log(K + 1.0) + K * std::log(r) > std::log(1e-18)) ++K;
    if (K >= 3000) throw OutsideConvergence("local sum: ratio too close to 1");
    return K;
}

double max_abs(const Triple& a) {
    return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

// A(p^nu, p^mu) with the Satake triple fetched once.
struct Gl3Local {
    const Gl3Form& F;
    u64 p;
    Triple a;
    double amax;
    Gl3Local(const Gl3Form& F_, u64 p_) : F(F_), p(p_), a(F_.satake_at(p_)), amax(max_abs(a)) {}
    cd operator()(int nu, int mu) const {
        if (nu < 0 || mu < 0) return 0.0;
        if (F.is_e0()) return F.local(p, nu, mu);
        return satake_gl3_coeff(a, nu, mu);
    }
};

// lambda(p^k) for k = 0..K via the Hecke recursion.
std::vector<cd> lambda_powers(const Gl2Form::Pair& ab, int K) {
    std::vector<cd> v(K + 1);
    v[0] = 1.0;
    if (K >= 1) v[1] = ab.first + ab.second;
    for (int k = 2; k <= K; ++k) v[k] = v[1] * v[k - 1] - ab.first * ab.second * v[k - 2];
    return v;
}

double pair_max(const Gl2Form::Pair& ab) { return std::max(std::abs(ab.first), std::abs(ab.second)); }

}  // namespace

// ---------------------------------------------------------------- Gl2Form

Gl2Form Gl2Form::satake(u64 seed, std::map<u64, Pair> overrides, int parity) {
    if (parity != 1 && parity != -1) throw PreconditionViolated("Gl2Form: parity must be +-1");
    Gl2Form f;
    f.seed_ = seed;
    f.parity_ = parity;
    f.overrides_ = std::move(overrides);
    return f;
}

Gl2Form::Pair Gl2Form::satake_at(u64 p) const {
    auto it = overrides_.find(p);
    if (it != overrides_.end()) return it->second;
    return tempered_gl2_draw(seed_, p);
}

cd Gl2Form::lambda_local(u64 p, int k) const {
    if (k < 0) return 0.0;
    return lambda_powers(satake_at(p), k)[k];
}

cd Gl2Form::lambda(u64 n) const {
    if (n == 0) return 0.0;
    cd v = 1.0;
    for (auto [p, e] : factor(n).factors) v *= lambda_local(p, e);
    return v;
}

cd Gl2Form::mu_f(u64 n) const {
    if (n == 0) return 0.0;
    cd v = 1.0;
    for (auto [p, e] : factor(n).factors) {
        const Pair ab = satake_at(p);
        if (e == 1) v *= -(ab.first + ab.second);
        else if (e == 2) v *= ab.first * ab.second;
        else return 0.0;
    }
    return v;
}

u64 Gl2Form::id() const {
    u64 h = mix64(seed_ ^ 0x5a5a5a5aULL) ^ static_cast<u64>(parity_ + 2);
    for (const auto& [p, ab] : overrides_) {
        h = mix64(h ^ p);
        for (double x : {ab.first.real(), ab.first.imag(), ab.second.real(), ab.second.imag()})
            h = mix64(h ^ std::hash<double>{}(x));
    }
    return h;
}

// ---------------------------------------------------------------- local RS

cd rs_local(const Gl2Form& f, const Gl3Form& F, u64 p, cd X) {
    const Triple a = F.satake_at(p);
    const auto [b1, b2] = f.satake_at(p);
    cd v = 1.0;
    for (const cd& aj : a)
        for (const cd& bn : {b1, b2}) {
            const cd z = aj * bn * X;
            if (std::abs(z) >= 1.0) throw OutsideDisk("rs_local: |alpha_F alpha_f X| >= 1");
            v /= 1.0 - z;
        }
    return v;
}

LemmaErrors euler_lemma_check(const Gl2Form& f, const Gl3Form& F, u64 p, cd s, int order) {
    if (order < 0) throw PreconditionViolated("euler_lemma_check: negative order");
    const Triple a = F.satake_at(p);
    const auto ab = f.satake_at(p);
    const double bound = max_abs(a) * pair_max(ab) * std::pow(double(p), -s.real());
    if (bound >= 1.0) throw OutsideConvergence("euler_lemma_check: Re s too small");
    const int N = order;
    // power series of L_p(X): product of six geometric series
    std::vector<cd> L(N + 1, 0.0);
    L[0] = 1.0;
    for (const cd& aj : a)
        for (const cd& bn : {ab.first, ab.second}) {
            const cd z = aj * bn;
            for (int k = 1; k <= N; ++k) L[k] += z * L[k - 1];
        }
    auto times = [&](const std::vector<cd>& poly) {
        std::vector<cd> out(N + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i)
            for (int k = 0; k + static_cast<int>(i) <= N; ++k) out[k + i] += poly[i] * L[k];
        return out;
    };
    const Gl3Local A(F, p);
    const auto lam = lambda_powers(ab, N + 2);
    const cd A10 = A(1, 0), A01 = A(0, 1);
    const auto r1 = times({1.0, 0.0, -A01, lam[1]});
    const auto r2 = times({A10, -A01 * lam[1], lam[2]});
    const auto r3 = times({A01, -lam[1]});
    LemmaErrors err;
    for (int k = 0; k <= N; ++k) {
        const cd l1 = A(k, 0) * lam[k];
        const cd l2 = A(k + 1, 0) * lam[k];
        cd l3 = 0.0;
        for (int nu1 = 0; 2 * nu1 <= k; ++nu1) l3 += A(k - 2 * nu1, nu1 + 1) * lam[k - 2 * nu1];
        err.first = std::max(err.first, std::abs(l1 - r1[k]));
        err.second = std::max(err.second, std::abs(l2 - r2[k]));
        err.third = std::max(err.third, std::abs(l3 - r3[k]));
    }
    return err;
}

// ---------------------------------------------------------------- Lambda

cd lambda_capital(const Gl2Form& f, u64 ell, cd w) {
    if (ell == 0) throw PreconditionViolated("lambda_capital: ell = 0");
    cd s = 0.0;
    for (u64 a : divisors(ell)) {
        const int m = mobius(a);
        if (m) s += double(m) * cpow_real(double(a), -w) * f.lambda(ell / a);
    }
    return s;
}

cd lambda_eis(double t, u64 n) {
    if (n == 0) return 0.0;
    cd s = 0.0;
    for (u64 a : divisors(n)) s += std::polar(1.0, t * std::log(double(a) * a / double(n)));
    return s;
}

cd lambda_capital_eis(double t, u64 ell, cd w) {
    if (ell == 0) throw PreconditionViolated("lambda_capital_eis: ell = 0");
    cd s = 0.0;
    for (u64 a : divisors(ell)) {
        const int m = mobius(a);
        if (m) s += double(m) * cpow_real(double(a), -w) * lambda_eis(t, ell / a);
    }
    return s;
}

// ---------------------------------------------------------------- oldform basis

double r_f(const Gl2Form& f, u64 N0, u64 c) {
    double s = 0.0;
    for (u64 b : divisors(c)) {
        const int m = mobius(b);
        if (!m) continue;
        double inv = 0.0;
        for (u64 d : divisors(b))
            if (g64(d, N0) == 1) inv += 1.0 / double(d);
        const cd l = f.lambda(b);
        s += m * (l * l).real() / (double(b) * inv * inv);
    }
    return s;
}

double alpha_N0(u64 N0, u64 c) {
    double s = 0.0;
    for (u64 b : divisors(c))
        if (g64(b, N0) == 1) s += mobius(b) / (double(b) * double(b));
    return s;
}

double beta_N0(u64 N0, u64 c) {
    double s = 0.0;
    for (u64 b : divisors(c))
        if (g64(b, N0) == 1 && mobius(b) != 0) s += 1.0 / double(b);
    return s;
}

cd xi_f(const Gl2Form& f, u64 N0, u64 M, u64 d) {
    if (M == 0 || d == 0 || M % d) throw DivisibilityViolated("xi_f: need d | M");
    u64 M1 = 1;
    for (auto [p, e] : factor(M).factors)
        if (e == 1) M1 *= p;
    const u64 M2 = M / M1;
    const u64 d1 = g64(M1, d), d2 = g64(M2, d);
    const u64 k1 = M1 / d1, k2 = M2 / d2;
    const double r1 = r_f(f, N0, M1), r2 = r_f(f, N0, M2);
    // unramified eigenvalues at p | (M, N0) can push r_f below zero
    if (!(r1 > 0.0 && r2 > 0.0)) throw PreconditionViolated("xi_f: r_f is not positive");
    const cd xi1 = double(mobius(k1)) * f.lambda(k1) / (std::sqrt(r1) * beta_N0(N0, k1));
    const cd xi2 = f.mu_f(k2) / (std::sqrt(r2) * std::sqrt(alpha_N0(N0, M2)));
    return xi1 * xi2;
}

cd rho_cusp(const Gl2Form& f, u64 N0, u64 M, u64 N, u64 n, double L1_ad2) {
    if (N0 == 0 || N % N0 || (N / N0) % M) throw DivisibilityViolated("rho_cusp: need M | N/N0");
    double pre = 1.0 / std::sqrt(L1_ad2 * double(N) * nu_index(N));
    for (auto [p, e] : factor(N0).factors) pre *= std::sqrt(1.0 - 1.0 / (double(p) * double(p)));
    cd s = 0.0;
    for (u64 d : divisors(M))
        if (n % d == 0) s += xi_f(f, N0, M, d) * (double(d) / std::sqrt(double(M))) * f.lambda(n / d);
    return pre * s;
}

double eis_norm_sq(u64 M, u64 N) {
    if (M == 0 || N % M) throw DivisibilityViolated("eis_norm_sq: need M | N");
    const u64 g = g64(M, N / M);
    double v = 1.0;
    for (auto [p, e] : factor(N).factors) {
        const double pd = double(p);
        v *= (g % p == 0) ? (pd - 1.0) / (pd + 1.0) : pd / (pd + 1.0);
    }
    return v;
}

// ---------------------------------------------------------------- L~_q, cusp

cd local_Lq_cusp(const Gl2Form& f, const Gl3Form& F, u64 q, u64 d0, cd s, cd w) {
    if (q == 0 || d0 == 0 || q % d0) throw DivisibilityViolated("local_Lq_cusp: need d0 | q");
    const auto qf = factor(q).factors;
    cd pref = 1.0 / double(q);
    for (auto [p, e] : qf) pref /= rs_local(f, F, p, cpow_real(double(p), -s));
    for (auto [p, e] : factor(d0).factors) pref *= 1.0 - 1.0 / (double(p) * double(p));

    struct PrimeData {
        u64 p;
        int vq;
        Gl3Local A;
        std::vector<cd> lam;
        cd Y, Z;
        int K;
    };
    std::vector<PrimeData> pd;
    for (auto [p, e] : qf) {
        Gl3Local A(F, p);
        const auto ab = f.satake_at(p);
        const cd Y = cpow_real(double(p), -s), Z = cpow_real(double(p), -2.0 * s);
        const int K = exponent_cap(std::max(A.amax * pair_max(ab) * std::abs(Y), A.amax * A.amax * std::abs(Z)));
        pd.push_back({p, e, A, lambda_powers(ab, K), Y, Z, K});
    }
    // prod_{p | q} sum_{a, b} A(p^{b + v(delta2)}, p^{a + v(d1)}) lambda(p^b) Y^b Z^a, a = 0 at p | d2
    auto T = [&](u64 d1, u64 d2, u64 delta2) {
        cd v = 1.0;
        for (const auto& P : pd) {
            const int e1 = valuation(d1, P.p), ed = valuation(delta2, P.p);
            const int amax = (d2 % P.p == 0) ? 0 : P.K;
            cd loc = 0.0, Za = 1.0;
            for (int a = 0; a <= amax; ++a, Za *= P.Z) {
                cd Yb = 1.0;
                for (int b = 0; b <= P.K; ++b, Yb *= P.Y) loc += P.A(b + ed, a + e1) * P.lam[b] * Yb * Za;
            }
            v *= loc;
        }
        return v;
    };
    cd total = 0.0;
    for (u64 d2 : divisors(q)) {
        if (d2 % d0) continue;
        const u64 d1 = q / d2;
        const cd d1f = cpow_real(double(d1), 1.0 - 2.0 * s);
        for (u64 M : divisors(d2 / d0)) {
            const double w8 = 1.0 / (double(M) * nu_index(d2));
            for (u64 del1 : divisors(M)) {
                const cd x1 = xi_f(f, d0, M, del1) * cpow_real(double(del1), 1.0 - w);
                for (u64 del2 : divisors(M)) {
                    const cd x2 = xi_f(f, d0, M, del2) * cpow_real(double(del2), 1.0 - s);
                    total += x1 * x2 * d1f * w8 * T(d1, d2, del2);
                }
            }
        }
    }
    return pref * total;
}

cd local_Lq_cusp_newform(const Gl2Form& f, const Gl3Form& F, u64 q, cd s) {
    cd v = double(euler_phi(q)) / (double(q) * double(q));
    for (auto [p, e] : factor(q).factors) {
        const double pd = double(p);
        v *= 1.0 - F.local(p, 0, 1) * cpow_real(pd, -2.0 * s) + f.lambda_local(p, 1) * cpow_real(pd, -3.0 * s);
    }
    return v;
}

cd local_Lq_cusp_half(const Gl2Form& f, const Gl3Form& F, u64 q, u64 d0) {
    if (!is_squarefree(q)) throw PreconditionViolated("local_Lq_cusp_half: q must be squarefree");
    if (d0 == 0 || q % d0) throw DivisibilityViolated("local_Lq_cusp_half: need d0 | q");
    cd v = 1.0 / double(q);
    for (auto [p, e] : factor(q).factors) {
        const double pd = double(p);
        const cd A01 = F.local(p, 0, 1), A10 = F.local(p, 1, 0), lam = f.lambda_local(p, 1);
        if (d0 % p == 0)
            v *= (pd - 1.0) / pd * (1.0 - A01 / pd + lam / std::pow(pd, 1.5));
        else
            v *= (2.0 + A01 + A10) / (1.0 + lam / std::sqrt(pd) + 1.0 / pd) - 1.0;
    }
    return v;
}

// ---------------------------------------------------------------- L~_q, Eisenstein

namespace {

// sum over c + f = n of p^{it(c - f)}, with c = 0 forced when restricted
cd eis_divisor_weight(u64 p, double t, int n, bool restricted, bool conj_c) {
    const double lp = std::log(double(p));
    const double sgn = conj_c ? -1.0 : 1.0;
    if (restricted) return std::polar(1.0, -sgn * t * n * lp);
    cd v = 0.0;
    for (int c = 0; c <= n; ++c) v += std::polar(1.0, sgn * t * (2 * c - n) * lp);
    return v;
}

// |zeta(1+2it) / L^{(d2)}(1+2it)|^2 = prod_{p | d2} |1 - p^{-1-2it}|^{-2}
double eis_level_factor(u64 d2, double t) {
    double v = 1.0;
    for (auto [p, e] : factor(d2).factors) v /= std::norm(1.0 - cpow_real(double(p), cd(-1.0, -2.0 * t)));
    return v;
}

}  // namespace

cd local_Lq_eis(const Gl3Form& F, u64 q, double t, cd s, cd w) {
    if (q == 0) throw PreconditionViolated("local_Lq_eis: q = 0");
    const cd it(0.0, t);
    const auto qf = factor(q).factors;
    cd pref = 1.0 / double(q);
    for (auto [p, e] : qf) {
        const Triple a = F.satake_at(p);
        for (const cd& aj : a)
            pref *= (1.0 - aj * cpow_real(double(p), -s - it)) * (1.0 - aj * cpow_real(double(p), -s + it));
    }
    struct PrimeData {
        u64 p;
        Gl3Local A;
        cd Y, Z;
        int K;
    };
    std::vector<PrimeData> pd;
    for (auto [p, e] : qf) {
        Gl3Local A(F, p);
        const cd Y = cpow_real(double(p), -s), Z = cpow_real(double(p), -2.0 * s);
        const int K = exponent_cap(std::max(A.amax * std::abs(Y), A.amax * A.amax * std::abs(Z)));
        pd.push_back({p, A, Y, Z, K});
    }
    auto T = [&](u64 d1, u64 d2, u64 M, u64 delta1) {
        cd v = 1.0;
        for (const auto& P : pd) {
            const int e1 = valuation(d1, P.p), ed = valuation(delta1, P.p);
            const int amax = (d2 % P.p == 0) ? 0 : P.K;
            const bool restricted = (d2 / M) % P.p == 0;
            cd loc = 0.0, Za = 1.0;
            for (int a = 0; a <= amax; ++a, Za *= P.Z) {
                cd Yn = 1.0;
                for (int n = 0; n <= P.K; ++n, Yn *= P.Y)
                    loc += P.A(n + ed, a + e1) * eis_divisor_weight(P.p, t, n, restricted, false) * Yn * Za;
            }
            v *= loc;
        }
        return v;
    };
    cd total = 0.0;
    for (u64 d2 : divisors(q)) {
        const u64 d1 = q / d2;
        cd L_chi = 1.0;  // prod_{p | d2} ((1 - p^{-1-2it})(1 - p^{-1+2it}))^{-1}
        for (auto [p, e] : factor(d2).factors)
            L_chi /= (1.0 - cpow_real(double(p), -1.0 - 2.0 * it)) * (1.0 - cpow_real(double(p), -1.0 + 2.0 * it));
        const cd pre_d2 = cpow_real(double(d1), 1.0 - 2.0 * s) / nu_index(d2) * L_chi;
        for (u64 M : divisors(d2)) {
            cd ext = 1.0;
            for (auto [p, e] : factor(d2 / M).factors)
                ext *= (1.0 - cpow_real(double(p), -w - it));
            const double w8 = 1.0 / (eis_norm_sq(M, d2) * double(M));
            for (u64 del1 : divisors(M)) {
                const int m1 = mobius(M / del1);
                if (!m1) continue;
                for (u64 del2 : divisors(M)) {
                    const int m2 = mobius(M / del2);
                    if (!m2) continue;
                    const cd dd = cpow_real(double(del1), 1.0 - s - it) * cpow_real(double(del2), 1.0 - w + it);
                    total += pre_d2 * double(m1 * m2) * w8 * dd * ext * T(d1, d2, M, del1);
                }
            }
        }
    }
    return pref * total;
}

// ---------------------------------------------------------------- end to end

LocalE2E::LocalE2E(const Gl3Form& F, cd s, cd w, u64 P, const Gl2Form* f)
    : F_(F), f_(f), s_(s), w_(w), primes_(primes_up_to(P)) {
    if (primes_.empty()) throw PreconditionViolated("LocalE2E: cutoff below 2");
    const double Pd = static_cast<double>(primes_.back()), lP = std::log(Pd);
    const double ss = s.real(), ws = w.real();
    if (ss <= 1.0 || ws <= 1.0) throw OutsideConvergence("LocalE2E: need Re s, Re w > 1");
    // sum_{p > P} of the first-order local terms, with a 10% margin
    eps_ = 1.1 * (2.0 * std::pow(Pd, 1.0 - ws) / ((ws - 1.0) * lP) + 6.0 * std::pow(Pd, 1.0 - ss) / ((ss - 1.0) * lP));
}

std::size_t LocalE2E::prime_index(u64 p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) throw PreconditionViolated("LocalE2E: prime above the cutoff");
    return static_cast<std::size_t>(it - primes_.begin());
}

namespace {

// Left-side local sums at p. R: sum_{a >= lo} lam(a - shift) X^a.
// N: sum over allowed a of sum_{b >= shift} A(p^b, p^a) lamc(b - shift) Y^b Z^a.
struct LocalSums {
    std::function<cd(int)> lam;   // r-side coefficient at p^k
    std::function<cd(int)> lamc;  // n2-side coefficient at p^k (already conjugated)
    Gl3Local A;
    cd X, Y, Z;
    int KR, KN;

    cd R(int lo, int shift) const {
        cd v = 0.0, Xa = std::pow(X, lo);
        for (int a = lo; a <= lo + KR; ++a, Xa *= X) v += lam(a - shift) * Xa;
        return v;
    }
    // a_exact >= 0 fixes a; otherwise a >= a_min
    cd N(int a_exact, int a_min, int shift) const {
        cd v = 0.0;
        const int a0 = a_exact >= 0 ? a_exact : a_min;
        const int a1 = a_exact >= 0 ? a_exact : a_min + KN;
        cd Za = std::pow(Z, a0);
        for (int a = a0; a <= a1; ++a, Za *= Z) {
            cd Yb = std::pow(Y, shift);
            for (int b = shift; b <= shift + KN; ++b, Yb *= Y) v += A(b, a) * lamc(b - shift) * Yb * Za;
        }
        return v;
    }
};

}  // namespace

const LocalE2E::Generic& LocalE2E::generic_cusp() const {
    if (!cusp_.empty()) return cusp_.front();
    if (!f_) throw PreconditionViolated("LocalE2E: cusp check needs a GL(2) form");
    Generic g;
    g.R.reserve(primes_.size());
    g.N.reserve(primes_.size());
    for (u64 p : primes_) {
        const double pd = double(p);
        Gl3Local A(F_, p);
        const auto ab = f_->satake_at(p);
        const cd X = cpow_real(pd, -w_), Y = cpow_real(pd, -s_), Z = cpow_real(pd, -2.0 * s_);
        const double af = pair_max(ab);
        const int KR = exponent_cap(af * std::abs(X));
        const int KN = exponent_cap(std::max(A.amax * af * std::abs(Y), A.amax * A.amax * std::abs(Z)));
        const auto lam = lambda_powers(ab, std::max(KR, KN) + 1);
        LocalSums L{[&](int k) { return k < 0 ? cd(0.0) : lam[k]; },
                    [&](int k) { return k < 0 ? cd(0.0) : std::conj(lam[k]); }, A, X, Y, Z, KR, KN};
        const cd R = L.R(0, 0), N = L.N(-1, 0, 0);
        g.R.push_back(R);
        g.N.push_back(N);
        g.R_all *= R;
        g.N_all *= N;
        g.rhs_all *= rs_local(*f_, F_, p, Y) / ((1.0 - ab.first * X) * (1.0 - ab.second * X));
    }
    cusp_.push_back(std::move(g));
    return cusp_.front();
}

E2EResult LocalE2E::cusp(u64 q, u64 ell, u64 d0) const {
    if (q == 0 || ell == 0 || d0 == 0 || q % d0) throw DivisibilityViolated("cusp e2e: need d0 | q");
    const Gl2Form& f = *f_;
    const Generic& g = generic_cusp();

    std::map<u64, LocalSums> loc;
    std::deque<std::vector<cd>> lam_store;  // stable addresses for the closures
    for (auto [p, e] : factor(q * ell).factors) {
        const double pd = double(p);
        Gl3Local A(F_, p);
        const auto ab = f.satake_at(p);
        const cd X = cpow_real(pd, -w_), Y = cpow_real(pd, -s_), Z = cpow_real(pd, -2.0 * s_);
        const double af = pair_max(ab);
        const int KR = exponent_cap(af * std::abs(X));
        const int KN = exponent_cap(std::max(A.amax * af * std::abs(Y), A.amax * A.amax * std::abs(Z)));
        lam_store.push_back(lambda_powers(ab, std::max(KR, KN) + 1));
        const std::vector<cd>* lp = &lam_store.back();
        loc.emplace(p, LocalSums{[lp](int k) { return k < 0 ? cd(0.0) : (*lp)[k]; },
                                 [lp](int k) { return k < 0 ? cd(0.0) : std::conj((*lp)[k]); }, A, X, Y, Z,
                                 KR, KN});
    }
    const auto qf = factor(q).factors;
    // r-sum: ell | r, weighted by lambda(r / delta1)
    auto Rsum = [&](u64 del1) {
        cd v = g.R_all;
        for (auto [p, e] : factor(ell * del1).factors) {
            const int el = valuation(ell, p), ed = valuation(del1, p);
            v *= loc.at(p).R(std::max(el, ed), ed) / g.R[prime_index(p)];
        }
        return v;
    };
    // (n1, q) = d1 and n2 weighted by conj lambda(n2 / delta2)
    auto Nsum = [&](u64 d1, u64 del2) {
        cd v = g.N_all;
        for (auto [p, vq] : qf) {
            const int v1 = valuation(d1, p), ed = valuation(del2, p);
            const cd l = v1 < vq ? loc.at(p).N(v1, 0, ed) : loc.at(p).N(-1, vq, ed);
            v *= l / g.N[prime_index(p)];
        }
        return v;
    };
    cd lhs = 0.0;
    for (u64 d2 : divisors(q)) {
        if (d2 % d0) continue;
        const u64 d1 = q / d2;
        // |rho_{f,M,d2}(1)|^2 prefactor with L(1, Ad^2 f) = 1
        double c2 = 1.0 / (double(d2) * nu_index(d2));
        for (auto [p, e] : factor(d0).factors) c2 *= 1.0 - 1.0 / (double(p) * double(p));
        for (u64 M : divisors(d2 / d0))
            for (u64 del1 : divisors(M)) {
                const cd r = xi_f(f, d0, M, del1) * double(del1) * Rsum(del1);
                for (u64 del2 : divisors(M)) {
                    const cd n = std::conj(xi_f(f, d0, M, del2)) * double(del2) * Nsum(d1, del2);
                    lhs += c2 / double(M) * r * n;
                }
            }
    }
    const cd rhs = g.rhs_all * lambda_capital(f, ell, w_) * local_Lq_cusp(f, F_, q, d0, s_, w_) *
                   cpow_real(double(ell), -w_);
    return {lhs, rhs, eps_ * std::abs(rhs)};
}

const LocalE2E::Generic& LocalE2E::generic_eis(double t) const {
    auto it = eis_.find(t);
    if (it != eis_.end()) return it->second;
    Generic g;
    const cd itc(0.0, t);
    for (u64 p : primes_) {
        const double pd = double(p);
        Gl3Local A(F_, p);
        const cd X = cpow_real(pd, -w_), Y = cpow_real(pd, -s_), Z = cpow_real(pd, -2.0 * s_);
        const int KR = exponent_cap(std::abs(X));
        const int KN = exponent_cap(std::max(A.amax * std::abs(Y), A.amax * A.amax * std::abs(Z)));
        // r^{it} g(r) and n2^{-it} conj g(n2), both equal to the divisor weight sum (c/f)^{+-it}
        LocalSums L{[=](int k) { return k < 0 ? cd(0.0) : eis_divisor_weight(p, t, k, false, true); },
                    [=](int k) { return k < 0 ? cd(0.0) : eis_divisor_weight(p, t, k, false, false); }, A, X, Y,
                    Z, KR, KN};
        const cd R = L.R(0, 0), N = L.N(-1, 0, 0);
        g.R.push_back(R);
        g.N.push_back(N);
        g.R_all *= R;
        g.N_all *= N;
        cd rhs = 1.0 / ((1.0 - cpow_real(pd, -w_ - itc)) * (1.0 - cpow_real(pd, -w_ + itc)));
        for (const cd& aj : A.a)
            rhs /= (1.0 - aj * cpow_real(pd, -s_ - itc)) * (1.0 - aj * cpow_real(pd, -s_ + itc));
        g.rhs_all *= rhs;
    }
    return eis_.emplace(t, std::move(g)).first->second;
}

E2EResult LocalE2E::eis(u64 q, u64 ell, double t) const {
    if (q == 0 || ell == 0) throw PreconditionViolated("eis e2e: q, ell must be positive");
    const Generic& g = generic_eis(t);
    const auto qf = factor(q).factors;
    // local sums with and without the (c, d2/M) = 1 restriction
    auto make = [&](u64 p, bool restricted) {
        const double pd = double(p);
        Gl3Local A(F_, p);
        const cd X = cpow_real(pd, -w_), Y = cpow_real(pd, -s_), Z = cpow_real(pd, -2.0 * s_);
        const int KR = exponent_cap(std::abs(X));
        const int KN = exponent_cap(std::max(A.amax * std::abs(Y), A.amax * A.amax * std::abs(Z)));
        return LocalSums{[=](int k) { return k < 0 ? cd(0.0) : eis_divisor_weight(p, t, k, restricted, true); },
                         [=](int k) { return k < 0 ? cd(0.0) : eis_divisor_weight(p, t, k, restricted, false); },
                         A, X, Y, Z, KR, KN};
    };
    cd lhs = 0.0;
    for (u64 d2 : divisors(q)) {
        const u64 d1 = q / d2;
        const double c2 = eis_level_factor(d2, t) / (double(d2) * nu_index(d2));
        for (u64 M : divisors(d2)) {
            const u64 N1 = d2 / M;
            const double pre = c2 / (eis_norm_sq(M, d2) * double(M));
            auto Rsum = [&](u64 del1) {
                cd v = g.R_all;
                for (auto [p, e] : factor(ell * del1 * N1).factors) {
                    const int el = valuation(ell, p), ed = valuation(del1, p);
                    v *= make(p, N1 % p == 0).R(std::max(el, ed), ed) / g.R[prime_index(p)];
                }
                return v;
            };
            auto Nsum = [&](u64 del2) {
                cd v = g.N_all;
                for (auto [p, vq] : qf) {
                    const int v1 = valuation(d1, p), ed = valuation(del2, p);
                    const LocalSums L = make(p, N1 % p == 0);
                    v *= (v1 < vq ? L.N(v1, 0, ed) : L.N(-1, vq, ed)) / g.N[prime_index(p)];
                }
                return v;
            };
            for (u64 del1 : divisors(M)) {
                const int m1 = mobius(M / del1);
                if (!m1) continue;
                // r^{it} and n2^{-it} carry the delta factors outside the local weights
                const cd r = double(m1) * cpow_real(double(del1), cd(1.0, t)) * Rsum(del1);
                for (u64 del2 : divisors(M)) {
                    const int m2 = mobius(M / del2);
                    if (m2) lhs += pre * r * double(m2) * cpow_real(double(del2), cd(1.0, -t)) * Nsum(del2);
                }
            }
        }
    }
    const cd rhs = g.rhs_all * lambda_capital_eis(t, ell, w_) * local_Lq_eis(F_, q, t, s_, w_) *
                   cpow_real(double(ell), -w_);
    return {lhs, rhs, eps_ * std::abs(rhs)};
}

E2EResult local_identity_cusp_e2e(const Gl2Form& f, const Gl3Form& F, u64 q, u64 ell, u64 d0, cd s, cd w,
                                  u64 P) {
    return LocalE2E(F, s, w, P, &f).cusp(q, ell, d0);
}

E2EResult local_identity_eis_e2e(const Gl3Form& F, u64 q, u64 ell, double t, cd s, cd w, u64 P) {
    return LocalE2E(F, s, w, P).eis(q, ell, t);
}

// ---------------------------------------------------------------- Laurent factors

namespace {

cd one_minus(double p, cd e) { return 1.0 - cpow_real(p, -e); }

double tau3_local(int e) { return (e + 1.0) * (e + 2.0) / 2.0; }

double geometric_tail(double r, int E) {
    if (r >= 1.0) throw OutsideConvergence("brute factor: geometric ratio >= 1");
    return 16.0 * (E + 2.0) * (E + 2.0) * (E + 2.0) * std::pow(r, E + 1) / ((1.0 - r) * (1.0 - r));
}

}  // namespace

cd laurent_factor_Z(u64 p, cd s, cd w, const Shifts& x) {
    const double pd = double(p);
    const auto& [x1, x2, x3] = x;
    const cd num = std::pow(one_minus(pd, 2.0 * s), -3) / (one_minus(pd, 1.0 + w - s - x3) *
                                                          one_minus(pd, s + w - x1 - 2.0 * x3) *
                                                          one_minus(pd, s + w - x2 - 2.0 * x3));
    return num * one_minus(pd, 1.0 + s + w - 2.0 * x3) * one_minus(pd, 2.0 * s - x1 - x3) *
           one_minus(pd, 2.0 * s - x2 - x3);
}

BruteValue laurent_factor_Z_brute(u64 p, cd s, cd w, const Shifts& x, int E) {
    const double pd = double(p);
    const auto& [x1, x2, x3] = x;
    const double r1 = std::pow(pd, -2.0 * s.real());
    const double r2 = std::pow(pd, -(1.0 + w - s - x3).real());
    const double r3 = std::pow(pd, -std::min((s + w - x1 - 2.0 * x3).real(), (s + w - x2 - 2.0 * x3).real()));
    if (r1 >= 1.0 || r2 >= 1.0 || r3 >= 1.0) throw OutsideConvergence("laurent_factor_Z_brute: outside region");
    cd S1 = 0.0, Sr = 0.0;
    for (int n = 0; n <= E; ++n) {
        S1 += tau3_local(n) * cpow_real(pd, -2.0 * s * double(n));
        Sr += cpow_real(pd, -double(n) * (w + 1.0 - s - x3));
    }
    // alpha: exponent of a (unbounded), gamma, delta, a1, a2 in {0, 1}, b_i <= alpha + gamma - a_i
    cd tot = 0.0;
    for (int al = 0; al <= E; ++al)
        for (int ga = 0; ga <= 1; ++ga)
            for (int de = 0; de <= 1; ++de)
                for (int a1 = 0; a1 <= 1; ++a1)
                    for (int a2 = 0; a2 <= 1; ++a2)
                        for (int b1 = 0; b1 <= al + ga - a1; ++b1)
                            for (int b2 = 0; b2 <= al + ga - a2; ++b2) {
                                if (a1 + b1 + a2 + b2 > al + ga + de) continue;
                                const double sg = ((ga + de + a1 + a2) % 2) ? -1.0 : 1.0;
                                const cd e = double(b1) * (1.0 + x1) + double(b2) * (1.0 + x2) -
                                             double(ga + de) * (2.0 * s + 1.0) - double(al) * (1.0 + s + w) +
                                             x3 * double(de + 2 * al + ga);
                                tot += sg * cpow_real(pd, e);
                            }
    const cd value = S1 * Sr * tot;
    const double r = std::max({r1, r2, r3});
    return {value, geometric_tail(r, E) * std::max(1.0, std::abs(value))};
}

cd laurent_factor_Ztilde(u64 p, cd s, cd w, const Shifts& x) {
    const double pd = double(p);
    const auto& [x1, x2, x3] = x;
    const cd num = std::pow(one_minus(pd, s + w), -3) /
                   (one_minus(pd, w - s - x3) * one_minus(pd, 2.0 * s - x1 + 2.0 * x3) *
                    one_minus(pd, 2.0 * s - x2 + 2.0 * x3));
    return num * one_minus(pd, s + w + x3 - x1) * one_minus(pd, s + w + x3 - x2) * one_minus(pd, 2.0 * s + 1.0 + 2.0 * x3);
}

BruteValue laurent_factor_Ztilde_brute(u64 p, cd s, cd w, const Shifts& x, int E) {
    const double pd = double(p);
    const auto& [x1, x2, x3] = x;
    const double r1 = std::pow(pd, -(s + w).real());
    const double r2 = std::pow(pd, -(w - s - x3).real());
    const double r3 =
        std::pow(pd, -std::min((2.0 * s - x1 + 2.0 * x3).real(), (2.0 * s - x2 + 2.0 * x3).real()));
    if (r1 >= 1.0 || r2 >= 1.0 || r3 >= 1.0)
        throw OutsideConvergence("laurent_factor_Ztilde_brute: outside region");
    cd S2 = 0.0, Sd = 0.0;
    for (int n = 0; n <= E; ++n) {
        S2 += tau3_local(n) * cpow_real(pd, -(s + w) * double(n));
        Sd += cpow_real(pd, -double(n) * (w - s - x3));
    }
    // gamma: exponent of c (unbounded); bb, r1, a1, a2 in {0, 1}
    cd tot = 0.0;
    for (int ga = 0; ga <= E; ++ga)
        for (int bb = 0; bb <= 1; ++bb)
            for (int rr = 0; rr <= 1; ++rr)
                for (int a1 = 0; a1 <= 1; ++a1)
                    for (int a2 = 0; a2 <= 1; ++a2)
                        for (int b1 = 0; b1 <= bb + ga - a1; ++b1)
                            for (int b2 = 0; b2 <= bb + ga - a2; ++b2) {
                                if (a1 + b1 + a2 + b2 > bb + ga + rr) continue;
                                const double sg = ((rr + bb + a1 + a2) % 2) ? -1.0 : 1.0;
                                const cd e = double(b1) * (1.0 + x1) + double(b2) * (1.0 + x2) -
                                             double(rr) * (1.0 + w + s) - double(ga) * (1.0 + 2.0 * s) -
                                             double(bb) * (1.0 + w + s) + x3 * double(-bb - rr - 2 * ga);
                                tot += sg * cpow_real(pd, e);
                            }
    const cd value = S2 * Sd * tot;
    const double r = std::max({r1, r2, r3});
    return {value, geometric_tail(r, E) * std::max(1.0, std::abs(value))};
}

}  // namespace specrec
