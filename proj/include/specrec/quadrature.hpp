#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace specrec {

using cd = std::complex<double>;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_evaluations = 400000;
    int initial_panels = 8;
};

struct QuadResult {
    cd value;
    double error_estimate;
    std::size_t evaluations;
};

using ComplexFn = std::function<cd(double)>;

/// Globally adaptive Gauss-Legendre on [a, b]: the panel whose two halves
/// disagree most is split until the summed disagreement meets the tolerance
/// or the evaluation budget is spent.
QuadResult integrate(const ComplexFn& f, double a, double b, const QuadOptions& opt = {});

/// Integral over a straight segment z0 -> z1 in the complex plane of g(z) dz.
QuadResult integrate_segment(const std::function<cd(cd)>& g, cd z0, cd z1,
                             const QuadOptions& opt = {});

/// Limit of a sequence of partial sums via Wynn's epsilon algorithm.
cd wynn_epsilon(const std::vector<cd>& partial_sums);

/// Integral over [a, infinity) of an oscillatory integrand with the given
/// half period: pieces [a + kP, a + (k+1)P] are summed and the partial sums
/// accelerated.
QuadResult integrate_oscillatory_tail(const ComplexFn& f, double a, double half_period,
                                      int pieces = 60, const QuadOptions& opt = {});

}  // namespace specrec
