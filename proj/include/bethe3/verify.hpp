#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "asymptotics.hpp"
#include "continuation.hpp"
#include "observables.hpp"
#include "quadrature.hpp"
#include "transcendental.hpp"
#include "wavefunction.hpp"

namespace bethe3::verify {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    std::string detail;
};

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"core", "transcendental", "continuation", "asymptotics", "wavefunction",
                                                "observables"};
    return names;
}

namespace detail {

class Collector {
public:
    explicit Collector(std::string suite) : suite_(std::move(suite)) {}

    void expect(std::string name, bool ok, const std::string& detail = {}) { out_.push_back({suite_, std::move(name), ok, detail}); }

    // Runs f and records a failure instead of propagating solver errors.
    void guarded(const std::string& name, const std::function<void()>& f)
    {
        try {
            f();
        } catch (const std::exception& e) {
            expect(name, false, std::string("exception: ") + e.what());
        }
    }

    std::vector<CheckResult> take() { return std::move(out_); }

private:
    std::string suite_;
    std::vector<CheckResult> out_;
};

inline std::string num(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline const std::vector<QuantumLabel>& sample_labels()
{
    static const std::vector<QuantumLabel> l{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}};
    return l;
}

struct Probe {
    QuantumLabel label;
    double c;
};

// Ten states on both branches and both sides of c = 0, including a non-canonical partner.
inline const std::vector<Probe>& probe_states()
{
    static const std::vector<Probe> p{{{0, 0}, -3},  {{1, 1}, -8}, {{1, 2}, -6},  {{0, 1}, -2}, {{0, 2}, -5},
                                      {{2, 2}, -2},  {{2, 3}, 3},  {{1, 3}, 1.5}, {{0, 3}, -1}, {{1, 0}, -4}};
    return p;
}

} // namespace detail

inline std::vector<CheckResult> check_core()
{
    detail::Collector col("core");
    col.guarded("np rule", [&] {
        bool ok = np_from_label(0, 0) == 0 && np_from_label(1, 0) == -1 && np_from_label(0, 1) == 1 &&
                  np_from_label(2, 0) == 1 && np_from_label(3, 0) == 0;
        col.expect("np rule", ok);
    });
    col.guarded("canonicalize", [&] {
        const auto a = canonicalize({2, 1}), b = canonicalize({-2, -1});
        bool ok = a.partner && a.label == QuantumLabel{1, 2} && !b.partner && b.label == QuantumLabel{1, 2};
        bool mixed = false;
        try {
            canonicalize({-1, 2});
        } catch (const SolverError&) {
            mixed = true;
        }
        col.expect("canonicalize", ok && mixed);
    });
    col.guarded("delta round trip", [&] {
        const Momenta k = k_from_deltas(two_pi, 1.25, 2.5);
        const RealCoords r = deltas_from_k(k);
        const double err = std::max({std::abs(r.delta1 - 1.25), std::abs(r.delta2 - 2.5), std::abs(r.p - two_pi)});
        col.expect("delta round trip", err < 1e-12, detail::num(err));
    });
    col.guarded("reference values at c = 0", [&] {
        double worst = 0;
        for (const auto& l : detail::sample_labels()) {
            const StateSolution s = solve_at(l, 0.0);
            const auto& r = std::get<RealCoords>(s.coords);
            worst = std::max({worst, std::abs(r.delta1 - two_pi * l.n1), std::abs(r.delta2 - two_pi * l.n2),
                              std::abs(r.p - l.p())});
        }
        col.expect("reference values at c = 0", worst < 1e-12, detail::num(worst));
    });
    col.guarded("partner symmetry", [&] {
        double worst = 0;
        for (double c : {-5.0, -1.0, 2.0}) {
            const auto a = solve_at({1, 2}, c), b = solve_at({2, 1}, c);
            worst = std::max(worst, std::abs(a.energy - b.energy));
            worst = std::max(worst, std::abs(momentum_sum(a.momenta) + momentum_sum(b.momenta)));
        }
        col.expect("partner symmetry", worst < 1e-10, detail::num(worst));
    });
    return col.take();
}

inline std::vector<CheckResult> check_transcendental()
{
    detail::Collector col("transcendental");
    col.guarded("tracked log around the unit circle", [&] {
        WindingState w;
        double worst = 0;
        for (int i = 0; i <= 400; ++i) {
            const double t = 3 * two_pi * i / 400.0;
            worst = std::max(worst, std::abs(tracked_log(std::polar(2.0, t), w, 0).imag() - t));
        }
        col.expect("tracked log around the unit circle", worst < 1e-12 && w.winding(0) == 3, detail::num(worst));
    });
    col.guarded("theta sum agrees with tracked logs", [&] {
        double worst = 0;
        for (const QuantumLabel l : {QuantumLabel{1, 2}, QuantumLabel{2, 3}, QuantumLabel{0, 2}}) {
            const Trajectory tr = trace_root(l, -3, 10, 0.05);
            for (const auto& s : tr.samples) {
                const auto* r = std::get_if<RealCoords>(&s.state.coords);
                if (!r || s.state.c == 0) continue;
                const auto th = residual_real_theta_sum(r->delta1, r->delta2, s.state.c, l);
                worst = std::max({worst, std::abs(th[0]), std::abs(th[1])});
            }
        }
        col.expect("theta sum agrees with tracked logs", worst < 1e-9, detail::num(worst));
    });
    col.guarded("product-form Bethe equations", [&] {
        double worst = 0;
        for (const auto& l : detail::sample_labels()) {
            const Trajectory tr = trace_root(l, -12, 12, 0.1);
            for (const auto& s : tr.samples)
                if (s.state.c != 0) worst = std::max(worst, bethe_product_residual(s.state.momenta, s.state.c));
        }
        col.expect("product-form Bethe equations", worst < 1e-9, detail::num(worst));
    });
    col.guarded("equal-delta residual", [&] {
        const auto s = solve_at({2, 2}, -2.0);
        const auto& r = std::get<RealCoords>(s.coords);
        const double e = std::abs(residual_equal_delta(r.delta1, -2.0, 2));
        col.expect("equal-delta residual", e < 1e-10, detail::num(e));
    });
    return col.take();
}

inline std::vector<CheckResult> check_continuation()
{
    detail::Collector col("continuation");
    col.guarded("critical couplings", [&] {
        const double c11 = find_critical({1, 1}).C, c12 = find_critical({1, 2}).C;
        bool ok = std::abs(c11 + 6) < 1e-8 && std::abs(c12 + 4.163) < 5e-4;
        double prev = c12;
        for (int n2 = 3; n2 <= 12; ++n2) {
            const double cn = find_critical({1, n2}).C;
            ok = ok && cn > prev && cn > -6 && cn < -4;
            prev = cn;
        }
        col.expect("critical couplings", ok, "C(1,2)=" + detail::num(c12));
    });
    col.guarded("momentum conservation", [&] {
        double worst = 0;
        for (const auto& l : detail::sample_labels()) {
            const Trajectory tr = trace_root(l, -15, 15, 0.05);
            for (const auto& s : tr.samples) worst = std::max(worst, std::abs(momentum_sum(s.state.momenta) - l.p()));
        }
        col.expect("momentum conservation", worst < 1e-10, detail::num(worst));
    });
    col.guarded("equal-label symmetry", [&] {
        double worst = 0;
        for (const QuantumLabel l : {QuantumLabel{0, 0}, QuantumLabel{1, 1}, QuantumLabel{2, 2}}) {
            const Trajectory tr = trace_root(l, -15, 15, 0.05);
            for (const auto& s : tr.samples) {
                if (auto r = std::get_if<RealCoords>(&s.state.coords)) worst = std::max(worst, std::abs(r->delta1 - r->delta2));
                else worst = std::max(worst, std::abs(std::get<ComplexCoords>(s.state.coords).gamma));
            }
        }
        col.expect("equal-label symmetry", worst < 1e-12, detail::num(worst));
    });
    col.guarded("energy continuity at folds", [&] {
        bool ok = true;
        std::string detail;
        for (const QuantumLabel l : {QuantumLabel{1, 1}, QuantumLabel{1, 2}}) {
            const double C = find_critical(l).C;
            double k[2];
            int i = 0;
            for (double eps : {1e-3, 1e-4}) {
                const double e = std::abs(solve_at(l, C - eps, 0.05).energy - solve_at(l, C + eps, 0.05).energy);
                k[i++] = e / eps;
            }
            ok = ok && std::isfinite(k[0]) && k[1] > 0 && k[0] / k[1] < 10 && k[1] / k[0] < 10;
            detail += l.str() + " K=" + detail::num(k[0]) + "," + detail::num(k[1]) + " ";
        }
        col.expect("energy continuity at folds", ok, detail);
    });
    col.guarded("branch switch at C(1,2)", [&] {
        const double C = find_critical({1, 2}).C;
        const auto below = solve_at({1, 2}, C - 0.01), above = solve_at({1, 2}, C + 0.01);
        col.expect("branch switch at C(1,2)", below.branch() == Branch::ComplexK && above.branch() == Branch::RealK);
    });
    return col.take();
}

inline std::vector<CheckResult> check_asymptotics()
{
    detail::Collector col("asymptotics");
    auto alpha_at = [](QuantumLabel l, double c) { return std::get<ComplexCoords>(solve_at(l, c).coords).alpha; };
    col.guarded("(1,1) dimer at c = -40", [&] {
        const double e = std::abs(alpha_at({1, 1}, -40) - (20 - 120 * std::exp(-20.0)));
        col.expect("(1,1) dimer at c = -40", e < 1e-6, detail::num(e));
    });
    col.guarded("(0,0) trimer at c = -30", [&] {
        const double e = std::abs(alpha_at({0, 0}, -30) - (30 + 180 * std::exp(-30.0)));
        col.expect("(0,0) trimer at c = -30", e < 1e-6, detail::num(e));
    });
    col.guarded("(2,2) large |c|", [&] {
        double worst = 0;
        for (double c : {-200.0, 200.0}) {
            const auto s = solve_at({2, 2}, c, 0.5);
            worst = std::max(worst, detail::rel(std::get<RealCoords>(s.coords).delta1, delta_large_c(2, c)));
        }
        col.expect("(2,2) large |c|", worst < 5e-3, detail::num(worst));
    });
    col.guarded("small-c series", [&] {
        double worst = 0;
        for (const QuantumLabel l : {QuantumLabel{0, 2}, QuantumLabel{1, 2}, QuantumLabel{2, 2}}) {
            const double c = 1e-3;
            const auto s = solve_at(l, c, 1e-3);
            const auto& r = std::get<RealCoords>(s.coords);
            const auto [d1, d2] = delta_small_c(l, c);
            worst = std::max({worst, detail::rel(r.delta1 - two_pi * l.n1, d1 - two_pi * l.n1),
                              detail::rel(r.delta2 - two_pi * l.n2, d2 - two_pi * l.n2)});
        }
        col.expect("small-c series", worst < 0.02, detail::num(worst));
    });
    return col.take();
}

inline std::vector<CheckResult> check_wavefunction()
{
    detail::Collector col("wavefunction");
    col.guarded("jump and periodicity residuals", [&] {
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> u(0, 1);
        double worst = 0;
        for (const auto& pr : detail::probe_states()) {
            const WaveFunction wf(solve_at(pr.label, pr.c));
            for (int i = 0; i < 50; ++i) {
                const double a = u(rng), b = u(rng);
                worst = std::max({worst, jump_residual(wf, a, b), periodicity_residual(wf, std::min(a, b), std::max(a, b))});
            }
        }
        col.expect("jump and periodicity residuals", worst < 1e-9, detail::num(worst));
    });
    col.guarded("dimer prefactor limits", [&] {
        const double p00 = dimer_prefactor(solve_at({0, 0}, -40)), p11 = dimer_prefactor(solve_at({1, 1}, -40));
        col.expect("dimer prefactor limits", std::abs(p00 - 3) < 0.03 && std::abs(p11) > 100,
                   "(0,0) " + detail::num(p00) + ", (1,1) " + detail::num(p11));
    });
    return col.take();
}

inline std::vector<CheckResult> check_observables()
{
    detail::Collector col("observables");
    col.guarded("simplex integral vs quadrature", [&] {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-8, 8);
        double worst = 0;
        for (int i = 0; i < 60; ++i) {
            cplx a1(u(rng), 0.3 * u(rng)), a2(u(rng), 0.3 * u(rng));
            if (i % 3 == 1) a2 = 0;
            if (i % 3 == 2) a1 = a2 = 0;
            const auto key = make_simplex_key(a1, a2);
            const cplx a3 = key.alpha[2];
            const cplx q = simplex3_quadrature(
                [&](double x1, double x2, double x3) { return std::exp(cplx(0, 1) * (a1 * x1 + a2 * x2 + a3 * x3)); }, 24);
            worst = std::max(worst, std::abs(simplex_integral(key) - q) / std::abs(q));
        }
        col.expect("simplex integral vs quadrature", worst < 1e-8, detail::num(worst));
    });
    col.guarded("potential vanishes at c = 0", [&] {
        col.expect("potential vanishes at c = 0", potential_expectation(solve_at({1, 2}, 0.0)) == 0.0);
    });
    col.guarded("sign of the potential", [&] {
        bool ok = true;
        for (const auto& pr : detail::probe_states()) {
            const double v = potential_expectation(solve_at(pr.label, pr.c));
            ok = ok && std::isfinite(v) && (v > 0) == (pr.c > 0);
        }
        col.expect("sign of the potential", ok);
    });
    col.guarded("Hellmann-Feynman", [&] {
        double worst = 0;
        const double h = 1e-4;
        for (const auto& pr : detail::probe_states()) {
            const double c = pr.c;
            const double de = (solve_at(pr.label, c + h, h).energy - solve_at(pr.label, c - h, h).energy) / (2 * h);
            worst = std::max(worst, std::abs(de - potential_expectation(solve_at(pr.label, c)) / c) / std::max(1.0, std::abs(de)));
        }
        col.expect("Hellmann-Feynman", worst < 1e-5, detail::num(worst));
    });
    col.guarded("partner norm and potential", [&] {
        const auto a = solve_at({1, 2}, -3), b = solve_at({2, 1}, -3);
        const double e = std::max(detail::rel(norm_squared(a), norm_squared(b)),
                                  detail::rel(potential_expectation(a), potential_expectation(b)));
        col.expect("partner norm and potential", e < 1e-9, detail::num(e));
    });
    return col.take();
}

inline std::vector<CheckResult> run_suite(std::string_view name)
{
    if (name == "core") return check_core();
    if (name == "transcendental") return check_transcendental();
    if (name == "continuation") return check_continuation();
    if (name == "asymptotics") return check_asymptotics();
    if (name == "wavefunction") return check_wavefunction();
    if (name == "observables") return check_observables();
    if (name == "all") {
        std::vector<CheckResult> all;
        for (const auto& s : suite_names()) {
            auto r = run_suite(s);
            all.insert(all.end(), r.begin(), r.end());
        }
        return all;
    }
    throw SolverError(ErrorKind::InvalidArgument, "unknown suite '" + std::string(name) + "'");
}

} // namespace bethe3::verify
