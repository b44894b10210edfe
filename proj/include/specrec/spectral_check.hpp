#pragma once

#include <complex>
#include <string>
#include <vector>

#include "specrec/arith.hpp"
#include "specrec/transforms.hpp"

namespace specrec {

/// q-expansion of Delta: tau[n] exact for 1 <= n <= N, lambda[n] = tau(n) / n^{11/2}.
/// Index 0 is unused.
struct QExpansion {
    std::vector<__int128> tau;
    std::vector<double> lambda;
    u64 size() const { return tau.empty() ? 0 : tau.size() - 1; }
};
QExpansion delta_coeffs(u64 N);  // N <= 1e5
std::string int128_to_string(__int128 v);

/// Smallest multiple of q for which the Kloosterman-Bessel tail of the
/// Petersson sum is certified below tol.
u64 petersson_cap(u64 n, u64 m, int k0, u64 q, double tol = 1e-12);

/// (k0 - 1)/(2 pi^2) [delta_{n,m} + 2 pi i^{-k0} sum_{q | c <= c_cap} S(m, n, c)/c J_{k0-1}(4 pi sqrt(mn)/c)].
/// c_cap = 0 picks petersson_cap; throws TailNotCertified when the supplied
/// cap leaves a tail above 1e-12.
double petersson_rhs(u64 n, u64 m, int k0, u64 q, u64 c_cap = 0);

/// Primitive Dirichlet character: trivial, or the Kronecker symbol (D / .)
/// for a fundamental discriminant D.
struct DirichletChar {
    i64 D = 1;
    static DirichletChar trivial() { return {}; }
    static DirichletChar kronecker(i64 D);  // throws PreconditionViolated unless D is fundamental
    u64 conductor() const { return static_cast<u64>(D < 0 ? -D : D); }
    int operator()(i64 n) const;
};
int kronecker_symbol(i64 a, i64 n);

/// L(s, chi^2) with the Euler factors at p | N removed; Re s >= 1, s != 1.
cd l_function_sq(const DirichletChar& chi, u64 N, cd s);

/// Fourier coefficient rho_{chi, M, N}(n, t) of the normalised Eisenstein
/// series, with the unimodular constant set to 1. Returns 0 at t = 0 when
/// chi^2 is principal (the L-value has a pole).
cd eisenstein_rho(const DirichletChar& chi, u64 M, u64 N, i64 n, double t);

/// Same coefficient from the exponential-sum form before the Ramanujan sum
/// is opened; agrees with eisenstein_rho up to a unimodular constant.
cd eisenstein_rho_expsum(const DirichletChar& chi, u64 M, u64 N, i64 n, double t);

/// int h(t) t tanh(pi t) dt / (2 pi^2) + sum_k (k - 1)/(2 pi^2) h_hol(k).
double main_term_N(const TestFunctionPair& pair);

}  // namespace specrec
