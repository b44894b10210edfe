#include "specrec/series.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "specrec/errors.hpp"
#include "specrec/special.hpp"

namespace specrec {

namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} / (2k)! for k = 1..15
constexpr std::array<double, 15> kBernoulliScaled = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
    -236364091.0 / 2730.0 / 6.204484017332394e23,
    8553103.0 / 6.0 / 4.0329146112660565e26,
    -23749461029.0 / 870.0 / 3.0488834461171384e29,
    8615841276005.0 / 14322.0 / 2.6525285981219107e32,
};

// Euler-Maclaurin for zeta(s, alpha). With drop_pole the term 1/(s-1) is
// removed analytically, so values near s = 1 keep full precision.
cd hurwitz_em(cd s, double alpha, bool drop_pole) {
    const u64 N = 15 + static_cast<u64>(std::ceil(std::abs(s)));
    cd sum = 0.0;
    for (u64 n = 0; n < N; ++n) sum += std::exp(-s * std::log(static_cast<double>(n) + alpha));
    const double x = static_cast<double>(N) + alpha;
    const double lx = std::log(x);
    const cd sm1 = s - 1.0;
    cd head;
    if (drop_pole) {
        // (x^{1-s} - 1)/(s-1) = -lx * (exp(-(s-1) lx) - 1)/(-(s-1) lx)
        const cd z = -sm1 * lx;
        cd ratio;
        if (std::abs(z) < 1e-4)
            ratio = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
        else
            ratio = (std::exp(z) - 1.0) / z;
        head = -lx * ratio;
    } else {
        head = std::exp(-sm1 * lx) / sm1;
    }
    sum += head + 0.5 * std::exp(-s * lx);
    cd rising = s;  // s (s+1) ... (s+2k-2)
    cd xpow = std::exp(-(s + 1.0) * lx);
    for (std::size_t k = 0; k < kBernoulliScaled.size(); ++k) {
        const cd term = kBernoulliScaled[k] * rising * xpow;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        const double j = 2.0 * static_cast<double>(k) + 1.0;
        rising *= (s + j) * (s + j + 1.0);
        xpow /= x * x;
    }
    return sum;
}

// Kloosterman sums S(a, b; c) for all residues a, b mod c.
struct KloostermanTables {
    std::vector<std::vector<double>> table;  // table[c][a * c + b]

    explicit KloostermanTables(u64 C) : table(C + 1) {
        for (u64 c = 1; c <= C; ++c) {
            std::vector<double>& T = table[c];
            T.assign(c * c, 0.0);
            std::vector<std::pair<u64, u64>> units;
            for (u64 x = 0; x < c; ++x)
                if (gcd(static_cast<i64>(x), static_cast<i64>(c)) == 1)
                    units.emplace_back(x, c == 1 ? 0 : static_cast<u64>(mod_inverse(x, c)));
            std::vector<double> cosine(c);
            for (u64 k = 0; k < c; ++k) cosine[k] = std::cos(2.0 * kPi * static_cast<double>(k) / c);
            for (u64 a = 0; a < c; ++a)
                for (u64 b = 0; b < c; ++b) {
                    double s = 0.0;
                    for (auto [x, xb] : units) s += cosine[(a * x + b * xb) % c];
                    T[a * c + b] = s;
                }
        }
    }
    double operator()(i64 a, i64 b, u64 c) const {
        const i64 cc = static_cast<i64>(c);
        const u64 ar = static_cast<u64>(((a % cc) + cc) % cc), br = static_cast<u64>(((b % cc) + cc) % cc);
        return table[c][ar * c + br];
    }
};

double weil_bound(i64 a, u64 c) {
    return static_cast<double>(divisor_count(c)) *
           std::sqrt(static_cast<double>(gcd(a, static_cast<i64>(c))) * static_cast<double>(c));
}

cd cpow_real(double base, cd e) { return std::exp(e * std::log(base)); }

}  // namespace

cd hurwitz(cd s, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionViolated("hurwitz: alpha outside (0, 1]");
    if (std::abs(s - 1.0) == 0.0) throw PoleAtOne("zeta(s, alpha) at s = 1");
    return hurwitz_em(s, alpha, false);
}

cd zeta(cd s) {
    if (s.real() >= 0.0) return hurwitz(s, 1.0);
    // reflection avoids the cancellation of the Euler-Maclaurin head for Re s < 0
    return std::pow(2.0, s) * std::pow(kPi, s - 1.0) * std::sin(kPi * s / 2.0) * gamma_c(1.0 - s) *
           hurwitz_em(1.0 - s, 1.0, false);
}

HurwitzLaurent hurwitz_laurent(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw PreconditionViolated("hurwitz_laurent: alpha outside (0, 1]");
    // even and odd parts of zeta(1+h) - 1/h, extrapolated in h^2
    constexpr int L = 4;
    double even[L][L], odd[L][L];
    for (int j = 0; j < L; ++j) {
        const double h = 0.2 / static_cast<double>(1 << j);
        const double fp = hurwitz_em(1.0 + h, alpha, true).real();
        const double fm = hurwitz_em(1.0 - h, alpha, true).real();
        even[j][0] = 0.5 * (fp + fm);
        odd[j][0] = (fp - fm) / (2.0 * h);
    }
    for (int k = 1; k < L; ++k)
        for (int j = k; j < L; ++j) {
            const double f = std::pow(4.0, k);
            even[j][k] = (f * even[j][k - 1] - even[j - 1][k - 1]) / (f - 1.0);
            odd[j][k] = (f * odd[j][k - 1] - odd[j - 1][k - 1]) / (f - 1.0);
        }
    return {-even[L - 1][L - 1], -odd[L - 1][L - 1]};
}

double tau3_tail(double sigma, u64 N) {
    if (sigma <= 1.0) throw OutsideConvergence("tau3_tail: sigma <= 1");
    const auto t3 = tau3_table(N);
    double partial = 0.0;
    for (u64 n = N; n >= 1; --n) partial += static_cast<double>(t3[n]) * std::pow(static_cast<double>(n), -sigma);
    const double total = std::pow(zeta(sigma).real(), 3);
    return std::max(total - partial, 0.0) + 4e-16 * total;
}

// Tails below use |A(n, m)| <= tau3(n) tau3(m), valid for E0 and unitary Satake data.

SeriesValue phi_series(const Gl3Form& F, u64 c, u64 d, int sign, u64 m, cd v, u64 N) {
    if (v.real() <= 1.0 + 1e-3) throw OutsideConvergence("phi_series: Re v <= 1");
    if (c == 0 || gcd(static_cast<i64>(c), static_cast<i64>(d)) != 1)
        throw PreconditionViolated("phi_series: need (c, d) = 1");
    const i64 dbar = c == 1 ? 0 : mod_inverse(static_cast<i64>(d % c), static_cast<i64>(c));
    CoeffEvaluator A(F, std::max(N, m));
    cd sum = 0.0;
    for (u64 n = 1; n <= N; ++n) {
        const u64 k = ((n % c) * static_cast<u64>(dbar)) % c;
        const double ang = 2.0 * kPi * sign * static_cast<double>(k) / static_cast<double>(c);
        sum += A(m, n) * std::polar(1.0, ang) * cpow_real(static_cast<double>(n), -v);
    }
    const double tail = static_cast<double>(tau3(m)) * tau3_tail(v.real(), N);
    return {sum, tail, N};
}

SeriesValue xi_series(const Gl3Form& F, u64 c, u64 d, int sign, u64 m, cd v, u64 N) {
    if (v.real() <= 1e-3) throw OutsideConvergence("xi_series: Re v <= 0");
    if (c == 0 || m == 0) throw PreconditionViolated("xi_series: c and m must be positive");
    const u64 cm = c * m;
    const i64 a = sign * static_cast<i64>(m * d);
    const auto ns = divisors(cm);
    CoeffEvaluator A(F, std::max(N, cm));
    const double scale_re = std::log(static_cast<double>(c) * c * c * m);
    const cd scale = std::exp(v * scale_re);
    const double tail_n2 = tau3_tail(1.0 + v.real(), N);
    cd sum = 0.0;
    double tail = 0.0;
    for (u64 n1 : ns) {
        const u64 cp = cm / n1;
        std::vector<double> S(cp);
        for (u64 b = 0; b < cp; ++b) S[b] = kloosterman(a, static_cast<i64>(b), cp);
        const cd n1f = std::exp(-(1.0 + 2.0 * v) * std::log(static_cast<double>(n1)));
        cd inner = 0.0;
        for (u64 n2 = 1; n2 <= N; ++n2)
            inner += A(n2, n1) * S[n2 % cp] * cpow_real(static_cast<double>(n2), -1.0 - v);
        sum += inner * n1f;
        tail += std::abs(n1f) * static_cast<double>(tau3(n1)) * weil_bound(a, cp) * tail_n2;
    }
    const double c_d = static_cast<double>(c);
    return {c_d * scale * sum, c_d * std::abs(scale) * tail, N * ns.size()};
}

namespace {

struct BoxMajorant {
    double inside = 0.0, total = 0.0;
};

// Majorant of the D series via |A(n2, n1)| <= tau3(n2) tau3(n1) and Weil,
// inside the box and over all indices; their difference bounds the outside.
double box_tail_estimate(u64 ell, cd s, cd u, cd w, const DBox& box) {
    const double sa = (s + u / 2.0).real(), s1 = 2.0 * s.real(), sr = (w + u / 2.0).real();
    const double sc = (1.0 - u).real() - 0.5;
    const auto t3 = tau3_table(std::max(box.N1, box.N2));
    double n2_in = 0.0, n1_in = 0.0, r_in = 0.0, c_in = 0.0;
    for (u64 n = 1; n <= box.N2; ++n) n2_in += static_cast<double>(t3[n]) * std::pow(double(n), -sa);
    for (u64 n = 1; n <= box.N1; ++n) n1_in += static_cast<double>(t3[n]) * std::pow(double(n), -s1);
    for (u64 r = ell; r <= box.R; r += ell) r_in += std::pow(double(r), -sr);
    for (u64 c = 1; c <= box.C; ++c) c_in += static_cast<double>(divisor_count(c)) * std::pow(double(c), -sc);
    const double n2_all = std::pow(zeta(sa).real(), 3), n1_all = std::pow(zeta(s1).real(), 3);
    const double r_all = std::pow(double(ell), -sr) * zeta(sr).real();
    const double c_all = std::pow(zeta(sc).real(), 2);
    return n2_all * n1_all * r_all * c_all - n2_in * n1_in * r_in * c_in;
}

void check_D_region(cd s, cd u, cd w, bool def) {
    if ((w + u / 2.0).real() <= 1.0 || u.real() >= -0.5)
        throw OutsideConvergence("D series: need Re(w+u/2) > 1 and Re u < -1/2");
    if (def && ((3.0 * s + u / 2.0).real() <= 2.0 || (3.0 * s - u / 2.0).real() <= 4.0))
        throw OutsideConvergence("D series: need Re(3s+u/2) > 2 and Re(3s-u/2) > 4");
    if (!def && (s + u / 2.0).real() <= 1.0) throw OutsideConvergence("D series: need Re(s+u/2) > 1");
}

}  // namespace

DValue D_series_alt(const Gl3Form& F, u64 q, u64 ell, cd s, cd u, cd w, int sign, const DBox& box) {
    check_D_region(s, u, w, false);
    const KloostermanTables K(box.C);
    CoeffEvaluator A(F, std::max(box.N1, box.N2));
    const cd a = s + u / 2.0;
    std::vector<std::vector<cd>> B(box.N1 + 1, std::vector<cd>(box.N2 + 1));
    for (u64 n1 = 1; n1 <= box.N1; ++n1)
        for (u64 n2 = 1; n2 <= box.N2; ++n2) B[n1][n2] = A(n2, n1) * cpow_real(double(n2), -a);
    cd total = 0.0;
    u64 terms = 0;
    for (u64 c = 1; c <= box.C; ++c) {
        const cd cf = cpow_real(double(c), u - 1.0);
        for (u64 r = ell; r <= box.R; r += ell) {
            const cd rf = cpow_real(double(r), -(w + u / 2.0));
            for (u64 n1 = 1; n1 <= box.N1; ++n1) {
                if ((n1 * c) % q) continue;
                cd inner = 0.0;
                for (u64 n2 = 1; n2 <= box.N2; ++n2)
                    inner += B[n1][n2] * K(sign * static_cast<i64>(r), static_cast<i64>(n2), c);
                total += inner * cpow_real(double(n1), -2.0 * s) * cf * rf;
                terms += box.N2;
            }
        }
    }
    return {total, box_tail_estimate(ell, s, u, w, box), terms};
}

DValue D_series_def(const Gl3Form& F, u64 q, u64 ell, cd s, cd u, cd w, int sign, const DBox& box) {
    check_D_region(s, u, w, true);
    const KloostermanTables K(box.C);
    CoeffEvaluator A(F, std::max(box.N1, box.N2));
    const cd v = -1.0 + s + u / 2.0;
    std::vector<cd> n2pow(box.N2 + 1);
    for (u64 n2 = 1; n2 <= box.N2; ++n2) n2pow[n2] = cpow_real(double(n2), -1.0 - v);
    cd total = 0.0;
    u64 terms = 0;
    for (u64 m = 1; m <= box.R; ++m) {
        const cd mf = cpow_real(double(m), v - s - w);
        for (u64 d = 1; m * d <= box.R; ++d) {
            if ((m * d) % ell) continue;
            const cd df = cpow_real(double(d), -(w + u / 2.0));
            const i64 a = sign * static_cast<i64>(m * d);
            for (u64 c = 1; c * m <= box.C * box.N1; ++c) {
                if (gcd(static_cast<i64>(c), static_cast<i64>(d)) != 1 || (m * c) % q) continue;
                // Xi(c, +-d, m; v) restricted to the box, times the outer weights
                cd xi = 0.0;
                for (u64 n1 : divisors(c * m)) {
                    if (n1 > box.N1) break;
                    const u64 cp = c * m / n1;
                    if (cp > box.C) continue;
                    cd inner = 0.0;
                    for (u64 n2 = 1; n2 <= box.N2; ++n2)
                        inner += A(n2, n1) * n2pow[n2] * K(a, static_cast<i64>(n2), cp);
                    xi += inner * cpow_real(double(n1), -1.0 - 2.0 * v);
                    terms += box.N2;
                }
                if (xi == 0.0) continue;
                const double cd_ = static_cast<double>(c);
                xi *= cd_ * cpow_real(cd_ * cd_ * cd_, v);
                total += xi * cpow_real(cd_, -(3.0 * s + u / 2.0 - 1.0)) * mf * df;
            }
        }
    }
    return {total, box_tail_estimate(ell, s, u, w, box), terms};
}

IndexTriple quintuple_to_triple(const Quintuple& x) {
    return {x.nu1 * x.f, x.f * x.g * x.d, x.g * x.gamma};
}

Quintuple triple_to_quintuple(const IndexTriple& y) {
    auto g_ = [](u64 a, u64 b) { return gcd(static_cast<i64>(a), static_cast<i64>(b)); };
    const u64 f = g_(y.n1, y.r);
    const u64 h = g_(y.n1 * y.c, y.r);
    if (h % f || (y.c * f) % h) throw DivisibilityViolated("triple_to_quintuple: non-integral image");
    return {y.r / h, f, h / f, y.n1 / f, y.c * f / h};
}

BijectionReport bijection_check(u64 q, u64 ell, u64 bound) {
    auto g_ = [](u64 a, u64 b) { return gcd(static_cast<i64>(a), static_cast<i64>(b)); };
    auto quint_ok = [&](const Quintuple& x) {
        return x.d && x.f && x.g && x.nu1 && x.gamma && (x.f * x.g * x.d) % ell == 0 &&
               (x.f * x.g * x.nu1 * x.gamma) % q == 0 && g_(x.nu1, x.g) == 1 &&
               g_(x.nu1 * x.gamma, x.d) == 1;
    };
    auto triple_ok = [&](const IndexTriple& y) { return (y.n1 * y.c) % q == 0 && y.r % ell == 0; };
    BijectionReport rep;
    for (u64 d = 1; d <= bound; ++d)
        for (u64 f = 1; f <= bound; ++f)
            for (u64 g = 1; g <= bound; ++g) {
                if ((f * g * d) % ell) continue;
                for (u64 nu1 = 1; nu1 <= bound; ++nu1) {
                    if (g_(nu1, g) != 1) continue;
                    for (u64 ga = 1; ga <= bound; ++ga) {
                        const Quintuple x{d, f, g, nu1, ga};
                        if (!quint_ok(x)) continue;
                        ++rep.quintuples;
                        const IndexTriple y = quintuple_to_triple(x);
                        bool ok = triple_ok(y);
                        if (ok) {
                            const Quintuple z = triple_to_quintuple(y);
                            ok = z.d == d && z.f == f && z.g == g && z.nu1 == nu1 && z.gamma == ga;
                        }
                        if (!ok) ++rep.failures;
                    }
                }
            }
    for (u64 n1 = 1; n1 <= bound; ++n1)
        for (u64 r = ell; r <= bound; r += ell)
            for (u64 c = 1; c <= bound; ++c) {
                const IndexTriple y{n1, r, c};
                if (!triple_ok(y)) continue;
                ++rep.triples;
                bool ok = true;
                try {
                    const Quintuple x = triple_to_quintuple(y);
                    const IndexTriple z = quintuple_to_triple(x);
                    ok = quint_ok(x) && z.n1 == n1 && z.r == r && z.c == c;
                } catch (const DivisibilityViolated&) {
                    ok = false;
                }
                if (!ok) ++rep.failures;
            }
    return rep;
}

namespace {

// L(s, F) over primes p <= P, with a tempered tail estimate.
cd gl3_L_euler(const Gl3Form& F, cd s, bool dual, const std::vector<u64>& primes, double& tail) {
    cd prod = 1.0;
    for (u64 p : primes) {
        const Triple a = F.satake_at(p);
        const double ps = static_cast<double>(p);
        for (const cd& aj : a) prod /= 1.0 - (dual ? 1.0 / aj : aj) * cpow_real(ps, -s);
    }
    const double P = static_cast<double>(primes.back());
    const double sig = s.real();
    tail += std::abs(prod) * 3.0 * std::pow(P, 1.0 - sig) / ((sig - 1.0) * std::log(P));
    return prod;
}

}  // namespace

BumpResult bump_check(const Gl3Form& F, u64 ell, cd s, cd w, u64 N) {
    if ((s + w).real() <= 1.0 || s.real() <= 0.5) throw OutsideConvergence("bump_check: need Re(s+w) > 1, Re s > 1/2");
    CoeffEvaluator A(F, N);
    std::vector<cd> pw1(N + 1), pw2(N + 1);
    for (u64 n = 1; n <= N; ++n) {
        pw1[n] = cpow_real(double(n), -(s + w));
        pw2[n] = cpow_real(double(n), -2.0 * s);
    }
    // row sums, both levels compensated (about 1e8 terms at N = 1e4)
    auto neumaier = [](cd& sum, cd& comp, cd x) {
        auto step = [](double& s, double& c, double v) {
            const double t = s + v;
            c += (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
            s = t;
        };
        double sr = sum.real(), si = sum.imag(), cr = comp.real(), ci = comp.imag();
        step(sr, cr, x.real());
        step(si, ci, x.imag());
        sum = {sr, si};
        comp = {cr, ci};
    };
    cd lhs = 0.0, lhs_c = 0.0;
    for (u64 n2 = ell; n2 <= N; n2 += ell) {
        cd row = 0.0, row_c = 0.0;
        for (u64 n1 = 1; n1 <= N; ++n1) neumaier(row, row_c, A(n2, n1) * pw2[n1]);
        neumaier(lhs, lhs_c, (row + row_c) * pw1[n2]);
    }
    lhs += lhs_c;
    const double s1 = (s + w).real(), s2 = 2.0 * s.real();
    const double z1 = std::pow(zeta(s1).real(), 3), z2 = std::pow(zeta(s2).real(), 3);
    double tail = tau3_tail(s1, N) * z2 + z1 * tau3_tail(s2, N);

    const auto primes = primes_up_to(100000);
    double rtail = 0.0;
    const cd L1 = gl3_L_euler(F, s + w, false, primes, rtail);
    const cd L2 = gl3_L_euler(F, 2.0 * s, true, primes, rtail);
    cd rhs = L1 * L2 * cpow_real(double(ell), -(s + w)) / zeta(3.0 * s + w);
    constexpr int K = 60;
    for (auto [p, e] : factor(ell).factors) {
        const cd x = cpow_real(double(p), -(s + w)), y = cpow_real(double(p), -2.0 * s);
        cd num = 0.0, den = 0.0, xb = 1.0;
        for (int b = 0; b <= K; ++b, xb *= x) {
            cd ya = 1.0;
            for (int a = 0; a <= K; ++a, ya *= y) {
                num += F.local(p, b + e, a) * xb * ya;
                den += F.local(p, b, a) * xb * ya;
            }
        }
        rhs *= num / den;
    }
    tail += rtail;
    return {lhs, rhs, tail};
}

CoefficientCache::CoefficientCache(std::string directory) : dir_(std::move(directory)) {}

std::string CoefficientCache::path_for(const Gl3Form& F) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "A_%016llx.bin", static_cast<unsigned long long>(F.id()));
    return (std::filesystem::path(dir_) / buf).string();
}

namespace {

static_assert(std::endian::native == std::endian::little, "cache records are little-endian");

struct Record {
    u64 n, m;
    double re, im;
};

}  // namespace

CoefficientCache::FormTable& CoefficientCache::table(const Gl3Form& F) {
    FormTable& t = tables_[F.id()];
    if (t.loaded) return t;
    t.loaded = true;
    std::ifstream in(path_for(F), std::ios::binary);
    if (!in) return t;
    char raw[sizeof(Record)];
    while (in.read(raw, sizeof raw)) {
        Record r;
        std::memcpy(&r, raw, sizeof r);
        t.values[{r.n, r.m}] = cd(r.re, r.im);
    }
    return t;
}

cd CoefficientCache::get(const Gl3Form& F, u64 n, u64 m) {
    std::lock_guard<std::mutex> lock(mu_);
    FormTable& t = table(F);
    auto it = t.values.find({n, m});
    if (it != t.values.end()) return it->second;
    const cd v = F.A(n, m);
    t.values[{n, m}] = v;
    t.pending.push_back({{n, m}, v});
    return v;
}

void CoefficientCache::flush() {
    std::lock_guard<std::mutex> lock(mu_);
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    for (auto& [id, t] : tables_) {
        if (t.pending.empty()) continue;
        char buf[32];
        std::snprintf(buf, sizeof buf, "A_%016llx.bin", static_cast<unsigned long long>(id));
        const auto path = (std::filesystem::path(dir_) / buf).string();
        std::ofstream out(path, std::ios::binary | std::ios::app);
        if (!out) throw IoError("cannot write coefficient cache " + path);
        for (const auto& [key, v] : t.pending) {
            const Record r{key.first, key.second, v.real(), v.imag()};
            out.write(reinterpret_cast<const char*>(&r), sizeof r);
        }
        if (!out) throw IoError("short write to coefficient cache " + path);
        t.pending.clear();
    }
}

}  // namespace specrec
