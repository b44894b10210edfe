#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specrec/special.hpp"

namespace specrec {

enum class AdmissibleClass { None, Weakly, FirstType, SecondType };

/// A spectral test function pair (h, h_hol).
///
/// Families whose values under- or overflow in double precision (large a, b
/// or long products of forced zeros) additionally provide log-magnitude
/// callables; the validator prefers those when present.
struct TestFunctionPair {
    std::function<cd(cd)> h;       // empty means h == 0
    std::function<cd(int)> h_hol;  // empty means h_hol == 0
    double decay_exponent = 15.0;
    AdmissibleClass admissible_class = AdmissibleClass::Weakly;

    // metadata for the validator and the transforms
    double holomorphy_strip = 0.5;  // h holomorphic in |Im t| < strip
    int hol_k_max = 0;              // largest k with h_hol(k) != 0, or 0 if unbounded
    int a = 0, b = 0;               // second type parameters
    double c_ab = 0.0;
    std::function<double(double)> log_abs_h;            // log|h(t)| for real t
    std::function<std::pair<int, double>(int)> log_h_hol;  // (sign, log|h_hol(k)|)
    std::vector<double> forced_zero_heights;            // h(+-i y) == 0 for these y

    cd eval_h(cd t) const { return h ? h(t) : cd(0.0); }
    cd eval_h_hol(int k) const { return h_hol ? h_hol(k) : cd(0.0); }
};

struct ContourSpec {
    enum class Kind { Vertical, Polygonal } kind = Kind::Polygonal;
    double sigma = 0.0;               // vertical line Re xi = sigma
    std::vector<cd> vertices;         // interior vertices; rays leave the ends vertically
    double height_cap = 0.0;          // 0 means choose from the decay
    static ContourSpec default_polygon();
    static ContourSpec vertical(double sigma);
};

/// Mellin transform int_0^inf H(x) x^(s-1) dx for a declared decay
/// H(x) << min(x^-a, x^-b), a < Re s < b. A positive half period selects
/// the accelerated treatment of an oscillatory tail.
cd mellin_hat(const std::function<cd(double)>& H, cd s, std::pair<double, double> tail_bounds,
              double oscillation_half_period = 0.0);

/// Inverse Mellin transform along Re s = sigma.
cd mellin_inverse(const std::function<cd(cd)>& What, double x, double sigma);

cd K_transform(const TestFunctionPair& pair, double x);
cd K_transform(const std::function<cd(cd)>& h, double x, double decay_exponent,
               double contour_shift = 0.0);
cd Kstar(const TestFunctionPair& pair, double x);

/// L-transform of H against one of the three kernels. beta is the decay
/// exponent of H at infinity.
cd L_transform(const std::function<cd(double)>& H, KernelKind kind, double t_or_k,
               double beta = 1.5);

cd H_ab(int a, int b, double x);
void check_ab(int a, int b);  // throws ParityViolation

// Closed forms of the two L-transforms of H_{a,b}, and their logarithms
// (sign, log|.|) for parameters where the values leave double range.
cd L_plus_Hab(int a, int b, cd t);
double L_hol_Hab(int a, int b, int k);
std::pair<int, double> log_L_hol_Hab(int a, int b, int k);
double log_L_plus_Hab(int a, int b, double t);

/// Smallest constant (up to a relative margin of 1e-9) making the
/// holomorphic part of the positive pair strictly positive.
double c_ab_constant(int a, int b);
TestFunctionPair pos_pair(int a, int b);
TestFunctionPair inversion_pair(int a, int b);  // (L+ H, L^hol H)
TestFunctionPair delta_pair(int k0);
TestFunctionPair gaussian_zero_pair(int n_zeros);  // e^{-t^2} prod (t^2 + (n+1/2)^2)

/// Right side of the positivity identity, H_{a,b}(x) plus the K* image of
/// the correction c k^{-2b-1}, k > a-b (each term weighted i^{-k}(k-1)/pi).
cd pos_identity_rhs(int a, int b, double c, double x);

/// Mellin transform of K h for h of first type, via the tau integral with
/// the contour moved to Im tau = shift (shift < Re u / 2 and within the
/// zero set of h).
cd mellin_K_first_type(const std::function<cd(cd)>& h, cd u, double shift);

/// Closed-form Mellin transform of a second-type function
/// alpha0 J_a(4 pi x)(4 pi x)^-b + sum_k alpha_k J_{k-1}(4 pi x).
cd mellin_second_type(int a, int b, cd alpha0, const std::function<cd(int)>& alpha, int k_max,
                      cd u);

struct Admissibility {
    AdmissibleClass cls;
    bool admissible;  // passes the construction-specific criteria
    std::string reason;
};
Admissibility validate_admissible(const TestFunctionPair& pair);

/// A Mellin transform together with the left edge of its holomorphy strip.
struct MellinData {
    std::function<cd(cd)> Hhat;
    double holomorphic_left = 0.0;  // holomorphic for Re u > this
};

/// The transform V^{sign}_{s,w} evaluated at u over the supplied contour.
/// Throws ConditionViolated naming the failing convergence condition.
cd V_transform(const SpectralParams& mu, cd s, cd w, const MellinData& Hhat, cd u, int sign,
               const ContourSpec& contour = ContourSpec::default_polygon());

/// The V-integrand (including the 1/(2 pi i) normalisation) at xi.
cd V_integrand(const SpectralParams& mu, cd s, cd w, const MellinData& Hhat, cd u, int sign,
               cd xi);

/// Residue of the V-integrand at xi = -n.
cd V_residue(const SpectralParams& mu, cd s, cd w, const MellinData& Hhat, cd u, int sign, int n);

}  // namespace specrec
