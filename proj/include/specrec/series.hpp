#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "specrec/arith.hpp"

namespace specrec {

cd zeta(cd s);                    // throws PoleAtOne at s = 1
cd hurwitz(cd s, double alpha);   // 0 < alpha <= 1

/// Laurent data of zeta(s, alpha) at s = 1:
/// zeta(s, alpha) = 1/(s-1) - psi_val - gamma_val (s-1) + O((s-1)^2).
struct HurwitzLaurent {
    double psi_val;
    double gamma_val;
};
HurwitzLaurent hurwitz_laurent(double alpha);

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// A truncated series value with a bound on the discarded part.
struct SeriesValue {
    cd value;
    double tail;
    u64 terms;
};

/// sum_{n > N} tau3(n) n^{-sigma} = zeta(sigma)^3 - partial sum, sigma > 1.
double tau3_tail(double sigma, u64 N);

/// Twisted GL(3) Dirichlet series sum_n A(m, n) e(sign n dbar / c) n^{-v},
/// truncated at n <= N. Requires Re v > 1 + 1e-3.
SeriesValue phi_series(const Gl3Form& F, u64 c, u64 d, int sign, u64 m, cd v, u64 N = 10000);

/// Dual series c sum_{n1 | cm} sum_{n2} A(n2, n1)/(n2 n1) S(sign m d, n2, mc/n1)
/// (n2 n1^2 / (c^3 m))^{-v}, truncated at n2 <= N. Requires Re v > 1e-3.
SeriesValue xi_series(const Gl3Form& F, u64 c, u64 d, int sign, u64 m, cd v, u64 N = 10000);

/// Truncation box shared by the two representations of the multiple
/// Dirichlet series. Both sums range over the same variables
/// n1 <= N1, n2 <= N2, r <= R and Kloosterman modulus <= C.
struct DBox {
    u64 C = 40;
    u64 N1 = 8;
    u64 N2 = 600;
    u64 R = 60;
};

struct DValue {
    cd value;
    double box_tail;  // Weil-bound estimate of the mass outside the box
    u64 terms;
};

/// Definition through the dual series; requires the region
/// Re(w+u/2) > 1, Re(3s+u/2) > 2, Re(3s-u/2) > 4, Re u < -1/2.
DValue D_series_def(const Gl3Form& F, u64 q, u64 ell, cd s, cd u, cd w, int sign,
                    const DBox& box = {});
/// Kloosterman-sum form; requires Re(w+u/2) > 1, Re(s+u/2) > 1, Re u < -1/2.
DValue D_series_alt(const Gl3Form& F, u64 q, u64 ell, cd s, cd u, cd w, int sign,
                    const DBox& box = {});

struct Quintuple {
    u64 d, f, g, nu1, gamma;
};
struct IndexTriple {
    u64 n1, r, c;
};
IndexTriple quintuple_to_triple(const Quintuple& x);
Quintuple triple_to_quintuple(const IndexTriple& y);

struct BijectionReport {
    u64 quintuples = 0;       // admissible quintuples with entries <= bound
    u64 triples = 0;          // admissible triples with entries <= bound
    u64 failures = 0;         // round trips or side conditions that failed
};
/// Exhaustive check of the quintuple/triple correspondence for entries <= bound.
BijectionReport bijection_check(u64 q, u64 ell, u64 bound = 30);

struct BumpResult {
    cd lhs, rhs;
    double tail;
};
/// Double Dirichlet series over ell | n2 against its closed form.
/// Truncation N per index on the left; Euler products on the right.
BumpResult bump_check(const Gl3Form& F, u64 ell, cd s, cd w, u64 N = 2000);

/// On-disk memo of A(n, m), one file per form: little-endian records
/// (u64 n, u64 m, f64 re, f64 im).
class CoefficientCache {
public:
    explicit CoefficientCache(std::string directory);
    cd get(const Gl3Form& F, u64 n, u64 m);
    void flush();  // writes records added since the last load or flush
    std::string path_for(const Gl3Form& F) const;

private:
    struct FormTable {
        std::map<std::pair<u64, u64>, cd> values;
        std::vector<std::pair<std::pair<u64, u64>, cd>> pending;
        bool loaded = false;
    };
    FormTable& table(const Gl3Form& F);

    std::string dir_;
    std::map<u64, FormTable> tables_;
    std::mutex mu_;
};

}  // namespace specrec
