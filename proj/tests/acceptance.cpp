// Acceptance criteria: one PASS/FAIL line each, exit 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "specrec/euler_local.hpp"
#include "specrec/series.hpp"
#include "specrec/special.hpp"
#include "specrec/spectral_check.hpp"
#include "specrec/transforms.hpp"

using namespace specrec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool ok = true;
    double err = 0.0;
    std::string detail;
};

void worst(double& w, double e) { w = std::isnan(e) ? NAN : (std::isnan(w) ? w : std::max(w, e)); }

int failures = 0;

void criterion(int id, const char* title, double tol, double budget_s, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, NAN, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = v.ok && v.err <= tol && secs < budget_s;
    failures += !pass;
    std::printf("%s  [%2d] %-44s err=%.3e tol=%.0e time=%.1fs/%.0fs%s%s\n", pass ? "PASS" : "FAIL", id, title, v.err,
                tol, secs, budget_s, v.detail.empty() ? "" : "  ", v.detail.c_str());
    std::fflush(stdout);
}

int run_verify(const std::string& args) {
    const std::string cmd = std::string(VERIFY_EXE) + " " + args + " 2>/dev/null";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

Verdict scattering() {
    Verdict v;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> re(-5.0 / 14.0, 5.0 / 14.0), im(-3.0, 3.0), vr(-0.3, 0.8), vi(-4.0, 4.0);
    int draws = 0;
    while (draws < 200) {
        SpectralParams p;
        p.mu[0] = cd(re(rng), im(rng));
        p.mu[1] = cd(re(rng), im(rng));
        p.mu[2] = -p.mu[0] - p.mu[1];
        if (std::abs(p.mu[2].real()) > 5.0 / 14.0) continue;
        const cd s(vr(rng), vi(rng));
        for (int n = 0; n <= 2; ++n)
            for (int e : {1, -1}) worst(v.err, std::abs(scattering_product(p, s, n, e) - scattering_closed_form(p, s, n, e)));
        ++draws;
    }
    return v;
}

Verdict hyper() {
    Verdict v;
    const HyperResult base = hyper_integral(1.0, 1.0, 2.0, 2.0, 0.0);
    worst(v.err, std::abs(base.quadrature - 0.5));
    worst(v.err, std::abs(base.closed_form - 0.5));
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ra(0.2, 1.4), ri(-1.0, 1.0), rs(0.6, 1.8), u01(0.1, 0.9);
    int points = 1;
    while (points < 20) {
        const cd a(ra(rng), ri(rng)), b(ra(rng), ri(rng));
        const cd c = a + cd(rs(rng), ri(rng)), d = b + cd(rs(rng), ri(rng));
        if ((c + d - 1.0 - a - b).real() < 0.5) continue;
        const double sigma = -a.real() + u01(rng) * (a.real() + b.real());
        const HyperResult r = hyper_integral(a, b, c, d, sigma);
        worst(v.err, std::abs(r.quadrature - r.closed_form));
        ++points;
    }
    v.detail = "20 points";
    return v;
}

Verdict mellin() {
    Verdict v;
    int n[3] = {0, 0, 0};
    for (double t : {0.25, 0.5, 1.0, 1.5, 2.0})
        for (cd u : {cd(0.3, 0.5), cd(0.2, -1.0)}) {
            worst(v.err, std::abs(mellin_hat([&](double x) { return kernel_plus(x, t); }, u, {0.0, 0.5}, 0.25) -
                                  mellin_kernel(KernelKind::Plus, u, t)));
            ++n[0];
        }
    for (double t : {0.0, 0.5, 1.0, 2.0, 3.0})
        for (cd u : {cd(0.8, 0.4), cd(1.5, 0.0)}) {
            worst(v.err, std::abs(mellin_hat([&](double x) { return kernel_minus(x, t); }, u, {0.0, INFINITY}) -
                                  mellin_kernel(KernelKind::Minus, u, t)));
            ++n[1];
        }
    for (int k : {2, 4, 6, 8, 12})
        for (cd u : {cd(0.3, 0.2), cd(1.0, 0.0)}) {
            worst(v.err, std::abs(mellin_hat([&](double x) { return kernel_hol(x, k); }, u, {1.0 - k, 1.5}, 0.25) -
                                  mellin_kernel(KernelKind::Hol, u, k)));
            ++n[2];
        }
    v.ok = n[0] == 10 && n[1] == 10 && n[2] == 10;
    return v;
}

Verdict sears_titchmarsh() {
    Verdict v;
    for (auto [a, b] : {std::pair{10, 4}, {12, 6}}) {
        const TestFunctionPair p = inversion_pair(a, b);
        for (double x : {0.1, 0.3, 1.0, 3.0}) worst(v.err, std::abs(Kstar(p, x) - H_ab(a, b, x)));
    }
    return v;
}

Verdict bijection_and_d() {
    Verdict v;
    u64 quint = 0, fails = 0;
    for (auto [q, ell] : {std::pair<u64, u64>{1, 1}, {2, 3}, {4, 3}}) {
        const auto r = bijection_check(q, ell, 30);
        quint += r.quintuples;
        fails += r.failures;
        for (int sign : {1, -1})
            worst(v.err, std::abs(D_series_def(Gl3Form::e0(), q, ell, 3.0, -1.0, 3.0, sign).value -
                                  D_series_alt(Gl3Form::e0(), q, ell, 3.0, -1.0, 3.0, sign).value));
    }
    v.ok = fails == 0 && quint > 0;
    v.detail = std::to_string(quint) + " quintuples, " + std::to_string(fails) + " bijection failures";
    return v;
}

Verdict laurent() {
    Verdict v;
    const Shifts x{0.01, -0.02, 0.015};
    const std::pair<cd, cd> zpts[] = {{0.8, 1.2}, {1.1, 1.6}, {cd(0.9, 1.0), cd(1.4, -0.5)}, {1.0, 2.0}, {0.9, 1.8}};
    const std::pair<cd, cd> tpts[] = {{0.9, 2.2}, {1.2, 2.5}, {1.0, 2.5}, {0.7, 2.5}, {cd(1.1, 1.0), cd(2.4, 0.5)}};
    double tail = 0.0;
    for (u64 p : {2, 3})
        for (int k = 0; k < 5; ++k) {
            const auto bz = laurent_factor_Z_brute(p, zpts[k].first, zpts[k].second, x, 40);
            worst(v.err, std::abs(bz.value - laurent_factor_Z(p, zpts[k].first, zpts[k].second, x)));
            const auto bt = laurent_factor_Ztilde_brute(p, tpts[k].first, tpts[k].second, x, 40);
            worst(v.err, std::abs(bt.value - laurent_factor_Ztilde(p, tpts[k].first, tpts[k].second, x)));
            tail = std::max({tail, bz.tail, bt.tail});
        }
    v.ok = tail <= 1e-8;
    char buf[64];
    std::snprintf(buf, sizeof buf, "max certified tail %.1e", tail);
    v.detail = buf;
    return v;
}

Verdict rankin_selberg() {
    Verdict v;
    const u64 primes[] = {2, 3, 5, 7, 11};
    for (u64 i = 0; i < 100; ++i) {
        const auto f = Gl2Form::satake(5000 + i);
        const auto F = Gl3Form::satake(6000 + i);
        const auto e = euler_lemma_check(f, F, primes[i % 5], cd(0.7, 0.3 * double(i % 7)), 12);
        worst(v.err, std::max({e.first, e.second, e.third}));
    }
    return v;
}

Verdict end_to_end() {
    Verdict v;
    const auto f = Gl2Form::satake(3);
    const auto F = Gl3Form::satake(5);
    const LocalE2E e(F, cd(2.0, 0.4), cd(2.5, -0.2), 1000000, &f);
    int configs = 0, oldform = 0;
    double rel_tail = 0.0;
    auto take = [&](const E2EResult& r) {
        const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
        if (scale == 0.0) return;
        const double diff = std::abs(r.lhs - r.rhs) / scale, tail = r.tail / scale;
        rel_tail = std::max(rel_tail, tail);
        if (diff > tail + 1e-10) v.ok = false;
        worst(v.err, diff);
        ++configs;
    };
    for (u64 q = 1; q <= 12; ++q)
        for (u64 ell = 1; ell <= 12; ++ell) {
            if (gcd(i64(q), i64(ell)) != 1) continue;
            for (u64 d0 : divisors(q)) {
                if (gcd(i64(d0), i64(q / d0)) != 1) continue;
                take(e.cusp(q, ell, d0));
                oldform += d0 < q;
            }
            for (double t : {0.0, 0.7, 3.1}) take(e.eis(q, ell, t));
        }
    if (rel_tail > 1e-6 || oldform == 0) v.ok = false;
    double wind = 0.0;
    const auto g = Gl2Form::satake(31);
    const auto G = Gl3Form::satake(32);
    for (u64 q : {2, 3, 5, 6, 10, 4, 12}) {
        const cd first = local_Lq_cusp(g, G, q, q, cd(0.9, 0.2), 0.5);
        for (double w : {1.0, 2.3, 4.0}) wind = std::max(wind, std::abs(local_Lq_cusp(g, G, q, q, cd(0.9, 0.2), w) - first));
        if (is_squarefree(q))
            wind = std::max(wind, std::abs(local_Lq_cusp_newform(g, G, q, cd(0.9, 0.2)) - first));
    }
    if (wind >= 1e-9) v.ok = false;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d configs (%d oldform), rel tail %.1e, w-independence %.1e", configs, oldform,
                  rel_tail, wind);
    v.detail = buf;
    return v;
}

Verdict bump() {
    Verdict v;
    const double z4 = std::pow(kPi, 4) / 90.0, z8 = std::pow(kPi, 8) / 9450.0;
    double tail = 0.0;
    for (u64 ell : {1, 2, 3}) {
        const auto r = bump_check(Gl3Form::e0(), ell, 2.0, 2.0, 3000);
        worst(v.err, std::abs(r.lhs - r.rhs));
        tail = std::max(tail, r.tail);
        if (ell == 1) worst(v.err, std::abs(r.rhs - std::pow(z4, 6) / z8));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "N = 3000, tail %.1e", tail);
    v.detail = buf;
    return v;
}

Verdict petersson() {
    Verdict v;
    double r[21][21];
    for (u64 n = 1; n <= 20; ++n)
        for (u64 m = 1; m <= 20; ++m) r[n][m] = petersson_rhs(n, m, 12, 1);
    double rank = 0.0;
    for (u64 n = 1; n <= 20; ++n)
        for (u64 m = 1; m <= 20; ++m) rank = std::max(rank, std::abs(r[n][m] * r[1][1] - r[n][1] * r[1][m]));
    const auto q = delta_coeffs(2);
    const double tau2 = double(q.tau[2]);
    const double ratio = std::abs(r[2][1] / r[1][1] - tau2 / std::pow(2.0, 5.5));
    v.ok = rank < 1e-8 && q.tau[2] == -24 && r[1][1] > 0.0;
    v.err = ratio;
    char buf[96];
    std::snprintf(buf, sizeof buf, "rank-1 residual %.1e, tau(2) = %s", rank, int128_to_string(q.tau[2]).c_str());
    v.detail = buf;
    return v;
}

Verdict hurwitz_avg() {
    Verdict v;
    double psi_err = 0.0;
    for (int m = 1; m <= 12; ++m) {
        for (cd s : {cd(2.0), cd(3.5), cd(0.5, 3.0), cd(-1.5), cd(1.2, -7.0)}) {
            cd sum = 0.0;
            for (int b = 1; b <= m; ++b) sum += hurwitz(s, double(b) / m);
            worst(v.err, std::abs(sum - std::pow(double(m), s) * zeta(s)));
        }
        double psi = 0.0;
        for (int b = 1; b <= m; ++b) psi += hurwitz_laurent(double(b) / m).psi_val;
        psi_err = std::max(psi_err, std::abs(psi + m * (kEulerGamma + std::log(double(m)))));
    }
    v.ok = psi_err < 1e-8;
    char buf[64];
    std::snprintf(buf, sizeof buf, "digamma average err %.1e", psi_err);
    v.detail = buf;
    return v;
}

Verdict determinism() {
    Verdict v;
    namespace fs = std::filesystem;
    const fs::path a = fs::temp_directory_path() / "specrec_acc_a.json";
    const fs::path b = fs::temp_directory_path() / "specrec_acc_b.json";
    const int ea = run_verify("all --seed 42 --out " + a.string());
    const int eb = run_verify("all --seed 42 --out " + b.string());
    const std::string sa = slurp(a), sb = slurp(b);
    const bool has_fail = sa.find("\"status\": \"FAIL\"") != std::string::npos;
    const int et = run_verify("arith --tol 0 --out " + b.string());
    const bool tol_fail = slurp(b).find("\"status\": \"FAIL\"") != std::string::npos;
    fs::remove(a);
    fs::remove(b);
    v.ok = !sa.empty() && sa == sb && ea == eb && ea == (has_fail ? 1 : 0) && tol_fail && et == 1;
    v.err = v.ok ? 0.0 : 1.0;
    v.detail = std::to_string(sa.size()) + " bytes, exit " + std::to_string(ea) + "/" + std::to_string(eb) +
               ", --tol 0 exit " + std::to_string(et);
    return v;
}

}  // namespace

int main() {
    criterion(1, "scattering identity", 1e-10, 5, scattering);
    criterion(2, "hypergeometric contour identity", 1e-8, 30, hyper);
    criterion(3, "Mellin kernel pairs", 1e-8, 60, mellin);
    criterion(4, "Sears-Titchmarsh inversion", 1e-6, 120, sears_titchmarsh);
    criterion(5, "quintuple bijection and D representations", 1e-6, 120, bijection_and_d);
    criterion(6, "Laurent Euler factors", 1e-8, 60, laurent);
    criterion(7, "local Rankin-Selberg identities", 1e-10, 20, rankin_selberg);
    criterion(8, "spectral rearrangement end to end", 1e-6, 600, end_to_end);
    criterion(9, "bump double Dirichlet series", 1e-8, 60, bump);
    criterion(10, "Petersson consistency", 1e-7, 60, petersson);
    criterion(11, "Hurwitz averaging", 1e-10, 10, hurwitz_avg);
    criterion(12, "determinism and exit codes", 0.0, 600, determinism);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures ? 1 : 0;
}
