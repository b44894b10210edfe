#include "specrec/quadrature.hpp"

#include <map>
#include <mutex>
#include <queue>
#include <numbers>

namespace specrec {

namespace {

GaussRule build_rule(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x[i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

constexpr int kOrder = 20;

cd panel(const ComplexFn& f, double a, double b, const GaussRule& g, std::size_t& evals) {
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    cd s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(m + h * g.x[i]);
    evals += g.x.size();
    return s * h;
}

struct Panel {
    double a, b;
    cd value;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

QuadResult integrate(const ComplexFn& f, double a, double b, const QuadOptions& opt) {
    const GaussRule& g = gauss_legendre(kOrder);
    QuadResult out{0.0, 0.0, 0};
    if (a == b) return out;
    const int n = std::max(1, opt.initial_panels);
    std::priority_queue<Panel> heap;
    cd total = 0.0;
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x0 = a + (b - a) * i / n, x1 = a + (b - a) * (i + 1) / n;
        const double m = 0.5 * (x0 + x1);
        const cd whole = panel(f, x0, x1, g, out.evaluations);
        const cd l = panel(f, x0, m, g, out.evaluations), r = panel(f, m, x1, g, out.evaluations);
        heap.push({x0, m, l, 0.5 * std::abs(l + r - whole)});
        heap.push({m, x1, r, 0.5 * std::abs(l + r - whole)});
        total += l + r;
        err += std::abs(l + r - whole);
    }
    // globally adaptive: split the panel with the largest error until the
    // total estimate meets the tolerance or the budget runs out
    const std::size_t budget = static_cast<std::size_t>(opt.max_evaluations);
    // rounding noise shows up as an error estimate that stops shrinking;
    // give up after 500 splits without halving it
    double checkpoint = err;
    int since = 0;
    while (!heap.empty() && out.evaluations < budget) {
        const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
        if (err <= tol) break;
        if (err < 0.5 * checkpoint) {
            checkpoint = err;
            since = 0;
        } else if (++since > 500) {
            break;
        }
        Panel p = heap.top();
        const double m = 0.5 * (p.a + p.b);
        if (m == p.a || m == p.b || p.b - p.a < 1e-14 * (std::abs(p.a) + std::abs(p.b))) break;
        heap.pop();
        const cd l = panel(f, p.a, m, g, out.evaluations), r = panel(f, m, p.b, g, out.evaluations);
        const double e = std::abs(l + r - p.value);
        total += l + r - p.value;
        err += e - p.err;
        heap.push({p.a, m, l, 0.5 * e});
        heap.push({m, p.b, r, 0.5 * e});
    }
    out.value = 0.0;
    while (!heap.empty()) {
        out.value += heap.top().value;
        heap.pop();
    }
    out.error_estimate = std::max(err, 0.0);
    return out;
}

QuadResult integrate_segment(const std::function<cd(cd)>& g, cd z0, cd z1,
                             const QuadOptions& opt) {
    const cd dz = z1 - z0;
    QuadResult r = integrate([&](double u) { return g(z0 + u * dz); }, 0.0, 1.0, opt);
    r.value *= dz;
    r.error_estimate *= std::abs(dz);
    return r;
}

cd wynn_epsilon(const std::vector<cd>& s) {
    const std::size_t n = s.size();
    if (n == 0) return 0.0;
    if (n < 3) return s.back();
    // prev and cur are columns k-1 and k of the epsilon table; even columns
    // approximate the limit.
    std::vector<cd> prev(n + 1, 0.0), cur(s);
    cd best = s.back();
    double best_gap = std::abs(s[n - 1] - s[n - 2]);
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<cd> next(n - k);
        bool ok = true;
        for (std::size_t j = 0; j + k < n; ++j) {
            const cd d = cur[j + 1] - cur[j];
            if (std::abs(d) < 1e-300) {
                ok = false;
                break;
            }
            next[j] = prev[j + 1] + 1.0 / d;
        }
        if (!ok) break;
        if (k % 2 == 0 && next.size() >= 2) {
            const double gap = std::abs(next[next.size() - 1] - next[next.size() - 2]);
            if (gap < best_gap) {
                best_gap = gap;
                best = next.back();
            }
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return best;
}

QuadResult integrate_oscillatory_tail(const ComplexFn& f, double a, double half_period,
                                      int pieces, const QuadOptions& opt) {
    QuadResult out{0.0, 0.0, 0};
    std::vector<cd> partial;
    partial.reserve(pieces);
    cd acc = 0.0;
    QuadOptions po = opt;
    po.initial_panels = 1;
    for (int k = 0; k < pieces; ++k) {
        QuadResult r = integrate(f, a + k * half_period, a + (k + 1) * half_period, po);
        acc += r.value;
        out.evaluations += r.evaluations;
        out.error_estimate += r.error_estimate;
        partial.push_back(acc);
    }
    out.value = wynn_epsilon(partial);
    std::vector<cd> shorter(partial.begin(), partial.end() - 2);
    out.error_estimate += std::abs(out.value - wynn_epsilon(shorter));
    return out;
}

}  // namespace specrec
