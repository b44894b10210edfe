#pragma once

#include <array>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "specrec/arith.hpp"

namespace specrec {

/// GL(2) Hecke data from Satake pairs. Primes without an override get a
/// seeded tempered draw {e^{it}, e^{-it}}. Parity only matters for n < 0.
class Gl2Form {
public:
    using Pair = std::pair<cd, cd>;
    static Gl2Form satake(u64 seed, std::map<u64, Pair> overrides = {}, int parity = 1);

    Pair satake_at(u64 p) const;
    cd lambda_local(u64 p, int k) const;  // lambda(p^k), zero for k < 0
    cd lambda(u64 n) const;               // multiplicative; lambda(0) = 0
    cd mu_f(u64 n) const;                 // coefficients of 1/L(s, f)
    int parity() const { return parity_; }
    u64 id() const;

private:
    u64 seed_ = 0;
    int parity_ = 1;
    std::map<u64, Pair> overrides_;
};

/// prod_{j, nu} (1 - alpha_{F,j} alpha_{f,nu} X)^{-1}; throws OutsideDisk when a factor vanishes
/// or |alpha_F alpha_f X| >= 1.
cd rs_local(const Gl2Form& f, const Gl3Form& F, u64 p, cd X);

struct LemmaErrors {
    double first = 0, second = 0, third = 0;
};
/// Coefficient-wise comparison of the three local Rankin-Selberg identities
/// as power series in X = p^{-s} up to X^order.
LemmaErrors euler_lemma_check(const Gl2Form& f, const Gl3Form& F, u64 p, cd s, int order);

/// sum_{ab = ell} mu(a) a^{-w} lambda_f(b).
cd lambda_capital(const Gl2Form& f, u64 ell, cd w);
/// Eisenstein analogue with lambda_t(n) = sum_{ab = n} (a/b)^{it}.
cd lambda_capital_eis(double t, u64 ell, cd w);
cd lambda_eis(double t, u64 n);

// Gram-Schmidt data for the oldforms f(Mz), f of level N0.
double r_f(const Gl2Form& f, u64 N0, u64 c);
double alpha_N0(u64 N0, u64 c);
double beta_N0(u64 N0, u64 c);
cd xi_f(const Gl2Form& f, u64 N0, u64 M, u64 d);
/// Fourier coefficient of the (f, M) basis element at level N, with
/// L(1, Ad^2 f) supplied by the caller. Requires M | N/N0.
cd rho_cusp(const Gl2Form& f, u64 N0, u64 M, u64 N, u64 n, double L1_ad2 = 1.0);

/// tilde-n(M)^2 at level N for the trivial character.
double eis_norm_sq(u64 M, u64 N);

/// Local correction factor for f of level d0 | q.
cd local_Lq_cusp(const Gl2Form& f, const Gl3Form& F, u64 q, u64 d0, cd s, cd w);
/// Closed form for the newform case d0 = q.
cd local_Lq_cusp_newform(const Gl2Form& f, const Gl3Form& F, u64 q, cd s);
/// Closed form at s = w = 1/2 for squarefree q.
cd local_Lq_cusp_half(const Gl2Form& f, const Gl3Form& F, u64 q, u64 d0);

/// Local correction factor for E_t with the trivial character, t real.
cd local_Lq_eis(const Gl3Form& F, u64 q, double t, cd s, cd w);

struct E2EResult {
    cd lhs, rhs;
    double tail;  // effect of the primes above the Euler-product cutoff, shared by both sides
};

/// Both sides of the spectral rearrangement for one cusp form or one
/// Eisenstein parameter. The left side evaluates the defining sum over
/// (r, n1, n2) with Fourier coefficients inserted, each index sum done as
/// exact local sums at every prime <= P. The right side is the product of
/// L-functions (Euler products over the same primes), Lambda and L~_q.
/// L(1, Ad^2 f) is set to 1 on both sides.
/// The forms are held by reference and must outlive the object; f may be
/// null when only Eisenstein checks are run.
class LocalE2E {
public:
    LocalE2E(const Gl3Form& F, cd s, cd w, u64 P = 1000000, const Gl2Form* f = nullptr);
    E2EResult cusp(u64 q, u64 ell, u64 d0) const;
    E2EResult eis(u64 q, u64 ell, double t) const;

    struct Generic {
        std::vector<cd> R, N;      // left-side local factors, one per prime <= P
        cd R_all = 1.0, N_all = 1.0;
        cd rhs_all = 1.0;          // right-side Euler products
    };

private:
    const Generic& generic_cusp() const;
    const Generic& generic_eis(double t) const;
    std::size_t prime_index(u64 p) const;

    const Gl3Form& F_;
    const Gl2Form* f_;
    cd s_, w_;
    std::vector<u64> primes_;
    double eps_;
    mutable std::map<double, Generic> eis_;
    mutable std::vector<Generic> cusp_;  // empty until first use
};

E2EResult local_identity_cusp_e2e(const Gl2Form& f, const Gl3Form& F, u64 q, u64 ell, u64 d0,
                                  cd s, cd w, u64 P = 1000000);
E2EResult local_identity_eis_e2e(const Gl3Form& F, u64 q, u64 ell, double t, cd s, cd w,
                                 u64 P = 1000000);

using Shifts = std::array<cd, 3>;
struct BruteValue {
    cd value;
    double tail;  // geometric bound on the terms beyond the exponent cap
};
/// Local Euler factor of the Laurent-coefficient series, closed form.
cd laurent_factor_Z(u64 p, cd s, cd w, const Shifts& x);
/// Same factor by enumerating the constrained exponent tuples up to cap E.
BruteValue laurent_factor_Z_brute(u64 p, cd s, cd w, const Shifts& x, int E = 40);
cd laurent_factor_Ztilde(u64 p, cd s, cd w, const Shifts& x);
BruteValue laurent_factor_Ztilde_brute(u64 p, cd s, cd w, const Shifts& x, int E = 40);

}  // namespace specrec
