// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <bethe3/bethe3.hpp>

using namespace bethe3;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<QuantumLabel> traced_labels()
{
    std::vector<QuantumLabel> out;
    for (int n1 = 0; n1 <= 3; ++n1)
        for (int n2 = 0; n2 <= 4; ++n2) out.push_back({n1, n2});
    return out;
}

Outcome critical_couplings()
{
    const double c11 = find_critical({1, 1}).C, c12 = find_critical({1, 2}).C;
    bool ok = std::abs(c11 + 6) < 1e-8 && std::abs(c12 + 4.163) < 5e-4;
    double prev = -6;
    for (int n2 = 2; n2 <= 40; ++n2) {
        const double c = find_critical({1, n2}).C;
        ok = ok && c > prev && c > -6 && c < -4;
        prev = c;
    }
    return {ok, fmt("C(1,1)=%.12g C(1,2)=%.8g C(1,40)=%.8g", c11, c12, prev)};
}

Outcome reference_values()
{
    double worst = 0;
    bool np_ok = true;
    for (const auto& l : traced_labels()) {
        const Trajectory tr = trace_root(l, -1, 1, 0.05);
        const auto& r = std::get<RealCoords>(tr.at(0).state.coords);
        worst = std::max({worst, std::abs(r.delta1 - two_pi * l.n1), std::abs(r.delta2 - two_pi * l.n2)});
        const int want = ((l.n1 - l.n2) % 3 + 3) % 3 == 0 ? 0 : ((l.n1 - l.n2) % 3 + 3) % 3 == 1 ? -1 : 1;
        np_ok = np_ok && l.np() == want && std::abs(r.p - two_pi * want) < 1e-15;
    }
    return {worst < 1e-12 && np_ok, fmt("max |delta_j(0) - 2 pi n_j| = %.3g over 20 labels", worst)};
}

Outcome asymptotic_agreement()
{
    std::ostringstream d;
    const double a11 = std::get<ComplexCoords>(solve_at({1, 1}, -40).coords).alpha;
    const double a00 = std::get<ComplexCoords>(solve_at({0, 0}, -30).coords).alpha;
    const double e11 = std::abs(a11 - (20 + 3 * (-40) * std::exp(-20.0)));
    const double e00 = std::abs(a00 - (30 + 180 * std::exp(-30.0)));
    double e22 = 0;
    for (double c : {-200.0, 200.0}) {
        const RealCoords r = std::get<RealCoords>(solve_at({2, 2}, c, 0.5).coords);
        e22 = std::max(e22, rel(r.delta1, delta_large_c(2, c)));
    }
    // small-c slopes: delta shifts for n1 >= 1, squared gaps for the n1 = 0 fold
    double es = 0;
    const double h = 1e-3;
    for (const QuantumLabel l : {QuantumLabel{1, 1}, QuantumLabel{1, 2}, QuantumLabel{2, 3}}) {
        for (double c : {h, -h}) {
            const RealCoords r = std::get<RealCoords>(solve_at(l, c, h).coords);
            const auto [d1, d2] = delta_small_c(l, c);
            es = std::max({es, rel(r.delta1 - two_pi * l.n1, d1 - two_pi * l.n1), rel(r.delta2 - two_pi * l.n2, d2 - two_pi * l.n2)});
        }
    }
    for (const QuantumLabel l : {QuantumLabel{0, 0}, QuantumLabel{0, 2}}) {
        const RealCoords r = std::get<RealCoords>(solve_at(l, h, h).coords);
        es = std::max(es, rel(r.delta1 * r.delta1, std::pow(delta_small_c(l, h).first, 2)));
        const ComplexCoords q = std::get<ComplexCoords>(solve_at(l, -h, h).coords);
        es = std::max(es, rel(q.alpha * q.alpha, std::pow(complex_small_c(l, -h).first, 2)));
    }
    const bool ok = e11 < 1e-6 && e00 < 1e-6 && e22 < 5e-3 && es < 0.02;
    d << fmt("(1,1) %.2g, (0,0) %.2g, (2,2) rel %.2g", e11, e00, e22) << fmt(", small-c rel %.2g", es);
    return {ok, d.str()};
}

Outcome boundary_identities()
{
    const std::vector<std::pair<QuantumLabel, double>> states{{{0, 0}, -3}, {{1, 1}, -8}, {{1, 2}, -6},  {{0, 1}, -2},
                                                              {{0, 2}, -5}, {{2, 2}, -2}, {{2, 3}, 3},   {{1, 3}, 1.5},
                                                              {{0, 3}, -1}, {{1, 0}, -4}};
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    int complex_count = 0;
    for (const auto& [l, c] : states) {
        const StateSolution s = solve_at(l, c);
        complex_count += s.branch() == Branch::ComplexK;
        const WaveFunction wf(s);
        for (int i = 0; i < 50; ++i) {
            const double a = u(rng), b = u(rng);
            worst = std::max({worst, jump_residual(wf, a, b), periodicity_residual(wf, std::min(a, b), std::max(a, b))});
        }
    }
    return {worst < 1e-9 && complex_count > 0 && complex_count < 10,
            fmt("max residual %.3g over 500 probes, %g complex-branch states", worst, complex_count)};
}

Outcome conservation_symmetry()
{
    double psum = 0, eq = 0, partner = 0;
    for (const auto& l : traced_labels()) {
        const Trajectory tr = trace_root(l, -20, 20, 0.05);
        for (const auto& s : tr.samples) {
            psum = std::max(psum, std::abs(momentum_sum(s.state.momenta) - l.p()));
            if (l.n1 != l.n2) continue;
            if (auto r = std::get_if<RealCoords>(&s.state.coords)) eq = std::max(eq, std::abs(r->delta1 - r->delta2));
            else eq = std::max(eq, std::abs(std::get<ComplexCoords>(s.state.coords).gamma));
        }
    }
    for (const QuantumLabel l : {QuantumLabel{0, 1}, QuantumLabel{1, 2}, QuantumLabel{0, 3}, QuantumLabel{2, 4}}) {
        for (int i = 0; i < 20; ++i) {
            const double c = -19 + 2 * i; // 20 values in [-19, 19]
            partner = std::max(partner, std::abs(solve_at(l, c).energy - solve_at({l.n2, l.n1}, c).energy));
        }
    }
    return {psum < 1e-10 && partner < 1e-10 && eq < 1e-12,
            fmt("|sum k - p| %.2g, |E - E_partner| %.2g, equal-label asymmetry %.2g", psum, partner, eq)};
}

Outcome fold_continuity()
{
    bool ok = true;
    std::ostringstream d;
    for (const QuantumLabel l : {QuantumLabel{0, 0}, QuantumLabel{0, 2}, QuantumLabel{1, 1}, QuantumLabel{1, 2}, QuantumLabel{1, 3}}) {
        const double C = critical_point(l)->C;
        double k[2];
        int i = 0;
        for (double eps : {1e-3, 1e-4}) k[i++] = std::abs(solve_at(l, C - eps).energy - solve_at(l, C + eps).energy) / eps;
        ok = ok && std::isfinite(k[0]) && std::isfinite(k[1]) && k[0] / k[1] < 10 && k[1] / k[0] < 10;
        d << l.str() << fmt(" K=%.4g/%.4g ", k[0], k[1]);
    }
    return {ok, d.str()};
}

Outcome appendix_oracles()
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-10, 10);
    double ws = 0;
    int cases[3] = {0, 0, 0};
    for (int i = 0; i < 200; ++i) {
        cplx a1(u(rng), 0.4 * u(rng)), a2(u(rng), 0.4 * u(rng));
        if (i % 3 == 1) a2 = 0;
        if (i % 3 == 2) a1 = a2 = 0;
        const auto key = make_simplex_key(a1, a2);
        ++cases[static_cast<int>(key.tag)];
        const cplx a3 = key.alpha[2];
        const cplx q = simplex3_quadrature(
            [&](double x1, double x2, double x3) { return std::exp(cplx(0, 1) * (a1 * x1 + a2 * x2 + a3 * x3)); }, 40);
        ws = std::max(ws, std::abs(simplex_integral(key) - q) / std::abs(q));
    }
    const std::vector<std::pair<QuantumLabel, double>> states{{{0, 0}, -2}, {{1, 1}, -7}, {{1, 2}, -2},
                                                              {{0, 2}, -3}, {{2, 2}, -2}, {{2, 3}, 3}};
    double wn = 0, wv = 0;
    bool sign_ok = true;
    for (const auto& [l, c] : states) {
        const StateSolution s = solve_at(l, c);
        const WaveFunction wf(s);
        const double n = norm_squared(s), v = potential_expectation(s, n);
        const double nq =
            6 * simplex3_quadrature([&](double x1, double x2, double x3) { return cplx(std::norm(wf.region_value(x1, x2, x3))); }, 64).real();
        const double fq = triangle_quadrature(
                              [&](double a, double b) {
                                  return cplx(std::norm(wf.region_value(a, a, b)) + std::norm(wf.region_value(a, b, b)));
                              },
                              64)
                              .real();
        wn = std::max(wn, rel(n, nq));
        wv = std::max(wv, rel(v, 6 * c * fq / nq));
        sign_ok = sign_ok && (v > 0) == (c > 0) && v != 0;
    }
    const bool zero = potential_expectation(solve_at({1, 2}, 0.0)) == 0.0 && potential_expectation(solve_at({2, 2}, 0.0)) == 0.0;
    const double v8 = potential_expectation(solve_at({2, 2}, -8)), v50 = potential_expectation(solve_at({2, 2}, -50));
    const bool ok = ws < 1e-8 && cases[0] > 0 && cases[1] > 0 && cases[2] > 0 && wn < 1e-4 && wv < 1e-4 && zero && sign_ok && v50 > v8;
    std::ostringstream d;
    d << fmt("simplex rel %.2g, norm rel %.2g, <V> rel %.2g", ws, wn, wv) << fmt(", <V>(2,2): %.5g at -8, %.5g at -50", v8, v50);
    return {ok, d.str()};
}

Outcome density_structure()
{
    const TernaryGrid g00 = density_grid(solve_at({0, 0}, -9), 24);
    const auto top = std::max_element(g00.cells.begin(), g00.cells.end(), [](auto& a, auto& b) { return a.density < b.density; });
    const TernaryGrid g02 = density_grid(solve_at({0, 2}, -9), 24);
    double edge = 0, inner = 0;
    int ne = 0, ni = 0;
    for (const auto& c : g02.cells) {
        if (c.kind == CellKind::Edge) edge += c.density, ++ne;
        if (c.kind == CellKind::Interior) inner += c.density, ++ni;
    }
    const double p00 = dimer_prefactor(solve_at({0, 0}, -40)), p11 = dimer_prefactor(solve_at({1, 1}, -40));
    const bool ok = top->kind == CellKind::Vertex && edge / ne > inner / ni && std::abs(p00 - 3) < 0.03 && std::abs(p11) > 100;
    std::ostringstream d;
    d << "(0,0) max in " << to_string(top->kind) << " cell" << fmt(", (0,2) edge/interior mean %.3g", (edge / ne) / (inner / ni))
      << fmt(", prefactor (0,0) %.5g, (1,1) %.3g", p00, p11);
    return {ok, d.str()};
}

Outcome energy_shapes()
{
    bool mono = true;
    for (const QuantumLabel l : {QuantumLabel{0, 0}, QuantumLabel{1, 1}}) {
        const Trajectory tr = trace_root(l, -10, 0, 0.05);
        for (std::size_t i = 1; i < tr.samples.size(); ++i) mono = mono && tr.samples[i].state.energy > tr.samples[i - 1].state.energy;
    }
    const double e10 = solve_at({0, 0}, -10).energy;
    bool limits = true;
    std::ostringstream d;
    double lim[2][2];
    for (int n : {2, 3}) {
        for (int side = 0; side < 2; ++side) {
            const double sgn = side ? 1 : -1;
            const double a = solve_at({n, n}, 180 * sgn, 0.5).energy, b = solve_at({n, n}, 200 * sgn, 0.5).energy;
            limits = limits && std::isfinite(b) && rel(a, b) < 0.01;
            lim[n - 2][side] = b;
        }
    }
    limits = limits && rel(lim[0][0], lim[1][0]) > 0.1 && rel(lim[0][1], lim[1][1]) > 0.1;
    d << fmt("E(0,0)(-10)=%.6g vs -200", e10) << fmt(", E(2,2)(-200)=%.6g, E(3,3)(-200)=%.6g", lim[0][0], lim[1][0])
      << fmt(", E(2,2)(200)=%.6g, E(3,3)(200)=%.6g", lim[0][1], lim[1][1]);
    return {mono && rel(e10, -200) < 0.1 && limits, d.str()};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 critical couplings", critical_couplings},       {"2 reference values", reference_values},
        {"3 asymptotic agreement", asymptotic_agreement},   {"4 boundary-condition identities", boundary_identities},
        {"5 conservation and symmetry", conservation_symmetry}, {"6 energy continuity at folds", fold_continuity},
        {"7 integral oracles", appendix_oracles},           {"8 density structure", density_structure},
        {"9 energy curve shapes", energy_shapes}};
    int failed = 0;
    for (const auto& [name, f] : criteria) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    }
    return failed ? 1 : 0;
}
