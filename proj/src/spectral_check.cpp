#include "specrec/spectral_check.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specrec/errors.hpp"
#include "specrec/quadrature.hpp"
#include "specrec/series.hpp"
#include "specrec/special.hpp"

namespace specrec {

namespace {

constexpr double kPi = std::numbers::pi;

u64 g64(u64 a, u64 b) { return gcd(static_cast<i64>(a), static_cast<i64>(b)); }

double nu_index(u64 N) {
    double v = 1.0;
    for (auto [p, e] : factor(N).factors) v *= 1.0 + 1.0 / double(p);
    return v;
}

}  // namespace

// ---------------------------------------------------------------- Delta

std::string int128_to_string(__int128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

QExpansion delta_coeffs(u64 N) {
    if (N > 100000) throw PreconditionViolated("delta_coeffs: N <= 1e5");
    QExpansion out;
    out.tau.assign(N + 1, 0);
    out.lambda.assign(N + 1, 0.0);
    if (N == 0) return out;
    // prod (1 - q^n)^3 = sum_k (-1)^k (2k + 1) q^{k(k+1)/2}
    std::vector<std::pair<u64, i64>> jacobi;
    for (u64 k = 0; k * (k + 1) / 2 < N; ++k) jacobi.push_back({k * (k + 1) / 2, (k % 2 ? -1 : 1) * i64(2 * k + 1)});
    std::vector<__int128> P(N, 0);  // prod (1 - q^n)^24 up to q^{N-1}
    for (auto [e, c] : jacobi) P[e] = c;
    for (int rep = 1; rep < 8; ++rep) {
        std::vector<__int128> Q(N, 0);
        for (u64 i = 0; i < N; ++i) {
            if (P[i] == 0) continue;
            for (auto [e, c] : jacobi) {
                if (i + e >= N) break;
                Q[i + e] += P[i] * c;
            }
        }
        P.swap(Q);
    }
    for (u64 n = 1; n <= N; ++n) {
        out.tau[n] = P[n - 1];
        out.lambda[n] = static_cast<double>(static_cast<long double>(P[n - 1]) / std::pow((long double)n, 5.5L));
    }
    return out;
}

// ---------------------------------------------------------------- Petersson

namespace {

// log of the bound on the part of the c-sum beyond C, using |S(m,n,c)| <= c
// and |J_nu(x)| <= (x/2)^nu / nu!
double log_tail_bound(u64 n, u64 m, int k0, double C) {
    const int nu = k0 - 1;
    return std::log((k0 - 1.0) / kPi) + nu * std::log(2.0 * kPi * std::sqrt(double(n) * double(m))) -
           std::lgamma(double(nu) + 1.0) - (nu - 1.0) * std::log(C) - std::log(nu - 1.0);
}

}  // namespace

u64 petersson_cap(u64 n, u64 m, int k0, u64 q, double tol) {
    if (k0 < 4 || k0 % 2) throw TailNotCertified("petersson_cap: needs even k0 >= 4");
    if (n == 0 || m == 0 || q == 0) throw PreconditionViolated("petersson_cap: n, m, q >= 1");
    const double logA = log_tail_bound(n, m, k0, 1.0);
    const double C = std::exp((logA - std::log(tol)) / (k0 - 2.0));
    u64 cap = std::max<u64>(q, static_cast<u64>(std::ceil(C)));
    cap = (cap + q - 1) / q * q;
    while (log_tail_bound(n, m, k0, double(cap)) > std::log(tol)) cap += q;
    return cap;
}

double petersson_rhs(u64 n, u64 m, int k0, u64 q, u64 c_cap) {
    if (n == 0 || m == 0 || q == 0) throw PreconditionViolated("petersson_rhs: n, m, q >= 1");
    if (k0 < 2 || k0 % 2) throw PreconditionViolated("petersson_rhs: k0 must be even and positive");
    if (c_cap == 0) c_cap = petersson_cap(n, m, k0, q);
    if (k0 < 4 || log_tail_bound(n, m, k0, double(c_cap)) > std::log(1e-12))
        throw TailNotCertified("petersson_rhs: c_cap too small");
    const double x0 = 4.0 * kPi * std::sqrt(double(n) * double(m));
    double sum = 0.0;
    for (u64 c = q; c <= c_cap; c += q) {
        const double S = kloosterman(i64(m), i64(n), c);
        if (S == 0.0) continue;
        sum += S / double(c) * bessel_j(cd(k0 - 1.0), x0 / double(c)).real();
    }
    const double ik = (k0 % 4 == 0) ? 1.0 : -1.0;  // i^{-k0}
    return (k0 - 1.0) / (2.0 * kPi * kPi) * ((n == m ? 1.0 : 0.0) + 2.0 * kPi * ik * sum);
}

// ---------------------------------------------------------------- characters

int kronecker_symbol(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    int v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    if (v) {
        if (a % 2 == 0) return 0;
        const i64 r = ((a % 8) + 8) % 8;
        if ((v % 2) && (r == 3 || r == 5)) result = -result;
    }
    // Jacobi symbol (a / n), n odd positive
    i64 b = ((a % n) + n) % n;
    while (b) {
        while (b % 2 == 0) {
            b /= 2;
            const i64 r = n % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(b, n);
        if (b % 4 == 3 && n % 4 == 3) result = -result;
        b %= n;
    }
    return n == 1 ? result : 0;
}

DirichletChar DirichletChar::kronecker(i64 D) {
    const u64 a = static_cast<u64>(D < 0 ? -D : D);
    bool ok = false;
    const i64 r = ((D % 4) + 4) % 4;
    if (D == 1) ok = true;
    else if (r == 1) ok = is_squarefree(a);
    else if (r == 0) {
        const i64 m = D / 4;
        const i64 rm = ((m % 4) + 4) % 4;
        ok = (rm == 2 || rm == 3) && is_squarefree(static_cast<u64>(m < 0 ? -m : m));
    }
    if (!ok) throw PreconditionViolated("DirichletChar::kronecker: D must be a fundamental discriminant");
    return DirichletChar{D};
}

int DirichletChar::operator()(i64 n) const {
    if (D == 1) return 1;
    return kronecker_symbol(D, n);
}

cd l_function_sq(const DirichletChar& chi, u64 N, cd s) {
    // chi is real, so chi^2 is principal modulo its conductor
    cd v = zeta(s);
    for (auto [p, e] : factor(N * chi.conductor()).factors) v *= 1.0 - std::pow(double(p), -s);
    return v;
}

// ---------------------------------------------------------------- Eisenstein

namespace {

struct EisSetup {
    u64 M1 = 1, M2 = 1;
    double ntilde = 1.0;
    cd L;
};

EisSetup eis_setup(const DirichletChar& chi, u64 M, u64 N, double t) {
    const u64 cc = chi.conductor();
    if (M == 0 || N % M || M % (cc * cc)) throw DivisibilityViolated("eisenstein_rho: need c_chi^2 | M | N");
    EisSetup e;
    const u64 rest = M / cc;
    for (auto [p, k] : factor(rest).factors) {
        u64 pk = 1;
        for (int i = 0; i < k; ++i) pk *= p;
        if (cc % p == 0) e.M1 *= pk;
        else e.M2 *= pk;
    }
    const u64 g = g64(M, N / M);
    double n2 = 1.0;
    for (auto [p, k] : factor(N).factors) {
        const double pd = double(p);
        n2 *= (g % p == 0) ? (pd - 1.0) / (pd + 1.0) : pd / (pd + 1.0);
    }
    e.ntilde = std::sqrt(n2);
    e.L = l_function_sq(chi, N, cd(1.0, 2.0 * t));
    return e;
}

u64 uabs(i64 n) { return static_cast<u64>(n < 0 ? -n : n); }

}  // namespace

cd eisenstein_rho(const DirichletChar& chi, u64 M, u64 N, i64 n, double t) {
    if (n == 0) throw PreconditionViolated("eisenstein_rho: n != 0");
    if (t == 0.0) {
        eis_setup(chi, M, N, 1.0);  // divisibility checks only
        return 0.0;
    }
    const auto e = eis_setup(chi, M, N, t);
    const u64 an = uabs(n), NM = N / M;
    cd sum = 0.0;
    for (u64 delta : divisors(e.M2)) {
        const int mu = mobius(e.M2 / delta);
        if (!mu || an % (e.M1 * delta)) continue;
        const u64 rest = an / (e.M1 * delta);
        cd inner = 0.0;
        for (u64 c : divisors(rest)) {
            if (g64(c, NM) != 1) continue;
            const i64 f = (n < 0 ? -1 : 1) * i64(rest / c);
            inner += double(chi(i64(c)) * chi(f)) * std::pow(double(c), cd(0.0, -2.0 * t));
        }
        sum += double(delta) * mu * chi(i64(delta)) * inner;
    }
    const cd pre = std::pow(double(an), cd(0.0, t)) / (std::sqrt(double(N) * nu_index(N)) * e.ntilde * e.L) *
                   std::sqrt(double(e.M1) / double(e.M2));
    return pre * sum;
}

cd eisenstein_rho_expsum(const DirichletChar& chi, u64 M, u64 N, i64 n, double t) {
    if (n == 0) throw PreconditionViolated("eisenstein_rho_expsum: n != 0");
    if (t == 0.0) {
        eis_setup(chi, M, N, 1.0);
        return 0.0;
    }
    const auto e = eis_setup(chi, M, N, t);
    u64 N1 = 1;
    for (auto [p, k] : factor(N / M).factors)
        for (int i = 0; i < valuation(N, p); ++i) N1 *= p;
    const u64 an = uabs(n);
    cd sum = 0.0;
    for (u64 c : divisors(an)) {
        if (g64(c, N1) != 1) continue;
        const i64 nc = n / i64(c);
        cd ex = 0.0;
        for (u64 d = 1; d <= M; ++d) {
            if (g64(d, M) != 1) continue;
            const i64 r = ((nc % i64(M)) * i64(d % M) % i64(M) + i64(M)) % i64(M);
            ex += double(chi(i64(d))) * std::polar(1.0, 2.0 * kPi * double(r) / double(M));
        }
        sum += double(chi(i64(c))) * std::pow(double(c), cd(0.0, -2.0 * t)) * ex;
    }
    const double frak_n = e.ntilde / std::sqrt(double(M));
    const cd pre = std::pow(double(an), cd(0.0, t)) / (std::sqrt(double(N) * nu_index(N)) * frak_n * e.L) *
                   std::pow(double(M), cd(-1.0, -2.0 * t));
    return pre * sum;
}

// ---------------------------------------------------------------- main term

double main_term_N(const TestFunctionPair& pair) {
    double total = 0.0;
    if (pair.h) {
        // h is even: twice the integral over [0, inf), in dyadic pieces
        const auto g = [&](double t) { return pair.h(cd(t)) * t * std::tanh(kPi * t); };
        QuadOptions opt;
        opt.abs_tol = 1e-15;
        opt.rel_tol = 1e-13;
        double integral = integrate(g, 0.0, 1.0, opt).value.real();
        for (double a = 1.0; a < 1e6; a *= 2.0) {
            const double piece = integrate(g, a, 2.0 * a, opt).value.real();
            integral += piece;
            if (a >= 8.0 && std::abs(piece) < 1e-17 * std::max(1.0, std::abs(integral))) break;
        }
        total += 2.0 * integral / (2.0 * kPi * kPi);
    }
    if (pair.h_hol) {
        const int kmax = pair.hol_k_max > 0 ? pair.hol_k_max : 4000;
        int small = 0;
        for (int k = 2; k <= kmax; k += 2) {
            const double term = (k - 1.0) / (2.0 * kPi * kPi) * pair.h_hol(k).real();
            total += term;
            if (pair.hol_k_max == 0) {
                small = std::abs(term) < 1e-18 ? small + 1 : 0;
                if (small >= 20) break;
            }
        }
    }
    return total;
}

}  // namespace specrec
