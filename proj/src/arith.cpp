#include "specrec/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "specrec/errors.hpp"

namespace specrec {

FactoredInteger factor(u64 n) {
    if (n == 0) throw PreconditionViolated("factor(0)");
    FactoredInteger f;
    f.value = n;
    for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.factors.emplace_back(p, e);
    }
    if (n > 1) f.factors.emplace_back(n, 1);
    return f;
}

u64 gcd(i64 a, i64 b) {
    u64 x = static_cast<u64>(a < 0 ? -a : a);
    u64 y = static_cast<u64>(b < 0 ? -b : b);
    while (y) {
        u64 t = x % y;
        x = y;
        y = t;
    }
    return x;
}

i64 mod_inverse(i64 a, i64 c) {
    if (c == 1) return 0;
    i64 r0 = ((a % c) + c) % c, r1 = c;
    i64 s0 = 1, s1 = 0;
    while (r1) {
        i64 q = r0 / r1;
        i64 t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (r0 != 1) throw PreconditionViolated("mod_inverse: not a unit");
    return ((s0 % c) + c) % c;
}

int valuation(u64 n, u64 p) {
    if (n == 0) throw PreconditionViolated("valuation(0)");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

std::vector<u64> primes_up_to(u64 n) {
    std::vector<u64> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (u64 i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
}

int mobius(u64 n) {
    int mu = 1;
    for (auto [p, e] : factor(n).factors) {
        if (e > 1) return 0;
        mu = -mu;
    }
    return mu;
}

u64 euler_phi(u64 n) {
    u64 phi = n;
    for (auto [p, e] : factor(n).factors) phi = phi / p * (p - 1);
    return phi;
}

std::vector<u64> divisors(u64 n) {
    std::vector<u64> d{1};
    for (auto [p, e] : factor(n).factors) {
        const std::size_t k = d.size();
        u64 pk = 1;
        for (int j = 1; j <= e; ++j) {
            pk *= p;
            for (std::size_t i = 0; i < k; ++i) d.push_back(d[i] * pk);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

u64 divisor_count(u64 n) {
    u64 t = 1;
    for (auto [p, e] : factor(n).factors) t *= static_cast<u64>(e + 1);
    return t;
}

bool is_squarefree(u64 n) { return mobius(n) != 0; }

MultBasics mult_basics(u64 n) {
    return {mobius(n), euler_phi(n), divisors(n), factor(n)};
}

double kloosterman(i64 m, i64 n, u64 c) {
    if (c == 0) throw PreconditionViolated("kloosterman: c must be positive");
    const i64 cc = static_cast<i64>(c);
    const i64 mr = ((m % cc) + cc) % cc;
    const i64 nr = ((n % cc) + cc) % cc;
    const double w = 2.0 * std::numbers::pi / static_cast<double>(c);
    double s = 0.0;
    for (i64 x = 0; x < cc; ++x) {
        if (gcd(x, cc) != 1) continue;
        const i64 xi = mod_inverse(x, cc);
        const i64 k = (static_cast<__int128>(mr) * x + static_cast<__int128>(nr) * xi) % cc;
        s += std::cos(w * static_cast<double>(k));
    }
    return s;
}

i64 ramanujan_sum(u64 M, i64 n) {
    if (M == 0) throw PreconditionViolated("ramanujan_sum: M must be positive");
    const u64 g = gcd(static_cast<i64>(M), n);
    i64 s = 0;
    for (u64 d : divisors(g)) s += static_cast<i64>(d) * mobius(M / d);
    return s;
}

u64 tau3(u64 n) {
    u64 t = 1;
    for (auto [p, k] : factor(n).factors) t *= static_cast<u64>((k + 1) * (k + 2) / 2);
    return t;
}

namespace {

cd det3(const cd a[3], const cd b[3], const cd c[3]) {
    return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
           a[2] * (b[0] * c[1] - b[1] * c[0]);
}

cd ipow(cd z, int k) {
    cd r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

cd vandermonde(const Triple& a) {
    const cd r1[3] = {a[0] * a[0], a[1] * a[1], a[2] * a[2]};
    const cd r2[3] = {a[0], a[1], a[2]};
    const cd r3[3] = {1.0, 1.0, 1.0};
    return det3(r1, r2, r3);
}

u64 mix(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

cd satake_gl3_coeff(const Triple& alpha, int nu, int mu) {
    if (nu < -1 || mu < -1) throw PreconditionViolated("satake_gl3_coeff: exponent below -1");
    if (nu == -1 || mu == -1) return 0.0;
    const cd V = vandermonde(alpha);
    if (std::abs(V) < 1e-8) throw DegenerateSatake("Vandermonde denominator below 1e-8");
    cd r1[3], r2[3];
    const cd r3[3] = {1.0, 1.0, 1.0};
    for (int j = 0; j < 3; ++j) {
        r1[j] = ipow(alpha[j], nu + mu + 2);
        r2[j] = ipow(alpha[j], mu + 1);
    }
    return det3(r1, r2, r3) / V;
}

cd complete_homogeneous(const Triple& a, int k) {
    if (k < 0) return 0.0;
    cd s = 0.0;
    for (int i = 0; i <= k; ++i)
        for (int j = 0; i + j <= k; ++j) s += ipow(a[0], i) * ipow(a[1], j) * ipow(a[2], k - i - j);
    return s;
}

Triple tempered_gl3_draw(u64 seed, u64 p) {
    std::mt19937_64 rng(mix(seed ^ mix(p * 3 + 1)));
    std::uniform_real_distribution<double> U(0.0, 2.0 * std::numbers::pi);
    for (;;) {
        const double t1 = U(rng), t2 = U(rng);
        Triple a{std::polar(1.0, t1), std::polar(1.0, t2), std::polar(1.0, -t1 - t2)};
        // well-separated triples keep the determinant ratio accurate at high degree
        if (std::abs(vandermonde(a)) > 1e-2) return a;
    }
}

std::pair<cd, cd> tempered_gl2_draw(u64 seed, u64 p) {
    std::mt19937_64 rng(mix(seed ^ mix(p * 3 + 2)));
    std::uniform_real_distribution<double> U(0.0, 2.0 * std::numbers::pi);
    const double t = U(rng);
    return {std::polar(1.0, t), std::polar(1.0, -t)};
}

Gl3Form Gl3Form::e0() { return Gl3Form{}; }

Gl3Form Gl3Form::satake(u64 seed, std::map<u64, Triple> overrides) {
    Gl3Form F;
    F.e0_ = false;
    F.seed_ = seed;
    F.overrides_ = std::move(overrides);
    return F;
}

Triple Gl3Form::satake_at(u64 p) const {
    if (e0_) return {1.0, 1.0, 1.0};
    auto it = overrides_.find(p);
    if (it != overrides_.end()) return it->second;
    return tempered_gl3_draw(seed_, p);
}

cd Gl3Form::local(u64 p, int nu, int mu) const {
    if (nu < 0 || mu < 0) return 0.0;
    if (e0_) {
        auto t = [](int k) { return static_cast<double>((k + 1) * (k + 2) / 2); };
        double v = t(nu) * t(mu);
        if (nu > 0 && mu > 0) v -= t(nu - 1) * t(mu - 1);
        return v;
    }
    return satake_gl3_coeff(satake_at(p), nu, mu);
}

cd Gl3Form::A(u64 n, u64 m) const {
    auto row = [this](u64 k, bool first) {
        cd v = 1.0;
        for (auto [p, e] : factor(k).factors) v *= first ? local(p, e, 0) : local(p, 0, e);
        return v;
    };
    cd s = 0.0;
    for (u64 d : divisors(gcd(static_cast<i64>(n), static_cast<i64>(m)))) {
        const int mu = mobius(d);
        if (mu) s += static_cast<double>(mu) * row(n / d, true) * row(m / d, false);
    }
    return s;
}

cd Gl3Form::A_multiplicative(u64 n, u64 m) const {
    cd v = 1.0;
    for (auto [p, e] : factor(n * m / gcd(static_cast<i64>(n), static_cast<i64>(m))).factors)
        v *= local(p, valuation(n, p), valuation(m, p));
    return v;
}

u64 Gl3Form::id() const {
    if (e0_) return 0;
    u64 h = mix(seed_ + 1);
    for (const auto& [p, a] : overrides_) {
        h = mix(h ^ p);
        for (const cd& z : a) {
            h = mix(h ^ std::hash<double>{}(z.real()));
            h = mix(h ^ std::hash<double>{}(z.imag()));
        }
    }
    return h | 1;
}

cd gl3_coeff(const Gl3Form& F, u64 n, u64 m) { return F.A(n, m); }

std::vector<std::uint32_t> spf_sieve(u64 N) {
    std::vector<std::uint32_t> spf(N + 1, 0);
    for (u64 i = 2; i <= N; ++i) {
        if (spf[i]) continue;
        for (u64 j = i; j <= N; j += i)
            if (!spf[j]) spf[j] = static_cast<std::uint32_t>(i);
    }
    return spf;
}

std::vector<u64> tau3_table(u64 N) {
    std::vector<u64> tau(N + 1, 0), t3(N + 1, 0);
    for (u64 d = 1; d <= N; ++d)
        for (u64 k = d; k <= N; k += d) ++tau[k];
    for (u64 d = 1; d <= N; ++d)
        for (u64 k = d, j = 1; k <= N; k += d, ++j) t3[k] += tau[j];
    return t3;
}

CoeffEvaluator::CoeffEvaluator(const Gl3Form& F, u64 limit)
    : F_(F), limit_(limit), spf_(spf_sieve(limit)) {}

cd CoeffEvaluator::local(u64 p, int nu, int mu) {
    if (F_.is_e0()) return F_.local(p, nu, mu);
    auto it = triples_.find(p);
    if (it == triples_.end()) it = triples_.emplace(p, F_.satake_at(p)).first;
    return satake_gl3_coeff(it->second, nu, mu);
}

cd CoeffEvaluator::operator()(u64 n, u64 m) {
    if (n == 0 || m == 0 || n > limit_ || m > limit_)
        throw PreconditionViolated("CoeffEvaluator: index outside the sieve range");
    cd v = 1.0;
    while (n > 1 || m > 1) {
        const u64 pn = n > 1 ? spf_[n] : ~0ULL, pm = m > 1 ? spf_[m] : ~0ULL;
        const u64 p = std::min(pn, pm);
        int a = 0, b = 0;
        while (n % p == 0) n /= p, ++a;
        while (m % p == 0) m /= p, ++b;
        v *= local(p, a, b);
    }
    return v;
}

}  // namespace specrec
