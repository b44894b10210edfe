#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace specrec {

using cd = std::complex<double>;
using i64 = std::int64_t;
using u64 = std::uint64_t;

struct FactoredInteger {
    u64 value = 1;
    std::vector<std::pair<u64, int>> factors;  // increasing primes, exponents >= 1
};

FactoredInteger factor(u64 n);
u64 gcd(i64 a, i64 b);
i64 mod_inverse(i64 a, i64 c);  // requires gcd(a, c) == 1
int valuation(u64 n, u64 p);
bool is_prime(u64 n);
std::vector<u64> primes_up_to(u64 n);

int mobius(u64 n);
u64 euler_phi(u64 n);
std::vector<u64> divisors(u64 n);  // sorted ascending
u64 divisor_count(u64 n);
bool is_squarefree(u64 n);

struct MultBasics {
    int mu;
    u64 phi;
    std::vector<u64> divisors;
    FactoredInteger factorization;
};
MultBasics mult_basics(u64 n);

double kloosterman(i64 m, i64 n, u64 c);
i64 ramanujan_sum(u64 M, i64 n);
u64 tau3(u64 n);

using Triple = std::array<cd, 3>;

/// Local GL(3) coefficient A(p^nu, p^mu) from Satake parameters via the
/// ratio of 3x3 determinants. Vanishes when nu or mu is -1.
/// Throws DegenerateSatake when the Vandermonde denominator is below 1e-8.
cd satake_gl3_coeff(const Triple& alpha, int nu, int mu);

/// Complete homogeneous symmetric polynomial h_k of a triple.
cd complete_homogeneous(const Triple& alpha, int k);

// Deterministic per-prime draws: identical (seed, p) always yields the same
// parameters, so forms can be shared between threads without state.
Triple tempered_gl3_draw(u64 seed, u64 p);
std::pair<cd, cd> tempered_gl2_draw(u64 seed, u64 p);

/// GL(3) coefficient data. Either the minimal-parabolic Eisenstein series
/// with A(n,1) = A(1,n) = tau3(n), or Satake-backed data with explicit
/// parameters at some primes and seeded tempered draws elsewhere.
class Gl3Form {
public:
    static Gl3Form e0();
    static Gl3Form satake(u64 seed, std::map<u64, Triple> overrides = {});

    bool is_e0() const { return e0_; }
    Triple satake_at(u64 p) const;
    cd local(u64 p, int nu, int mu) const;  // A(p^nu, p^mu)
    cd A(u64 n, u64 m) const;               // via the Hecke relation
    cd A_multiplicative(u64 n, u64 m) const;  // product of local factors
    u64 id() const;

private:
    bool e0_ = true;
    u64 seed_ = 0;
    std::map<u64, Triple> overrides_;
};

cd gl3_coeff(const Gl3Form& F, u64 n, u64 m);

/// Smallest prime factor for 0..N (entries 0 and 1 are 0).
std::vector<std::uint32_t> spf_sieve(u64 N);
/// tau3(n) for 0..N.
std::vector<u64> tau3_table(u64 N);

/// Fast multiplicative evaluation of A(n, m) for n, m <= limit, with the
/// Satake data cached per prime. Not thread safe; use one per thread.
class CoeffEvaluator {
public:
    CoeffEvaluator(const Gl3Form& F, u64 limit);
    cd operator()(u64 n, u64 m);
    u64 limit() const { return limit_; }

private:
    cd local(u64 p, int nu, int mu);

    const Gl3Form& F_;
    u64 limit_;
    std::vector<std::uint32_t> spf_;
    std::map<u64, Triple> triples_;
};

}  // namespace specrec
