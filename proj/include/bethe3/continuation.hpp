#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "asymptotics.hpp"
#include "core_model.hpp"
#include "errors.hpp"
#include "newton.hpp"
#include "tolerances.hpp"
#include "transcendental.hpp"

namespace bethe3 {

enum class CriticalClass { AtZero, Window, None };

inline const char* to_string(CriticalClass k)
{
    switch (k) {
    case CriticalClass::AtZero: return "at-zero";
    case CriticalClass::Window: return "window";
    case CriticalClass::None: return "none";
    }
    return "unknown";
}

struct CriticalPoint {
    double C = 0;
    std::optional<double> u0; // critical value of delta2 / c, (1,n2) family only
};

struct TrajectorySample {
    StateSolution state;
    std::array<int, 2> winding{}; // accumulated windings of the two real-branch log arguments
    double residual = 0;          // raw residual norm at the accepted root
};

struct Trajectory {
    QuantumLabel label;
    std::vector<TrajectorySample> samples; // ascending in c
    std::optional<CriticalPoint> critical;

    const TrajectorySample& at(double c) const
    {
        auto it = std::min_element(samples.begin(), samples.end(), [c](const auto& a, const auto& b) {
            return std::abs(a.state.c - c) < std::abs(b.state.c - c);
        });
        if (it == samples.end()) throw SolverError(ErrorKind::InvalidArgument, "empty trajectory");
        return *it;
    }
};

struct TraceOptions {
    double residual_tol = tol::residual;
    double fold_zone = 1e-3;   // seeds within this distance of a fold come from the local model
    double min_step = 1e-9;
};

inline CriticalClass critical_class(const QuantumLabel& label)
{
    if (!is_canonical(label)) throw SolverError(ErrorKind::InvalidArgument, "critical_class needs a canonical label");
    if (label.n1 == 0) return CriticalClass::AtZero;
    if (label.n1 == 1) return CriticalClass::Window;
    return CriticalClass::None;
}

/** @brief Left side of the transcendental equation fixing u0 = delta2/c at C(1,n2); increasing in u. */
inline double u0_equation(double u, int n2)
{
    return -6 * std::atan(u) + two_pi * (n2 - 1) + 4 * u + 2 * u / (1 + u * u);
}

inline CriticalPoint find_critical(const QuantumLabel& label)
{
    if (label.n1 != 1 || label.n2 < 1) throw SolverError(ErrorKind::InvalidArgument, "find_critical needs n1 = 1, n2 >= 1");
    if (label.n2 == 1) return {-6.0, 0.0};
    auto f = [n2 = label.n2](double u) { return u0_equation(u, n2); };
    double lo = -1;
    while (f(lo) > 0) {
        lo *= 2;
        if (lo < -1e8) throw SolverError(ErrorKind::NoConvergence, "find_critical: no bracket");
    }
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, 0.0, boost::math::tools::eps_tolerance<double>(52), iters);
    if (iters >= 200) throw SolverError(ErrorKind::NoConvergence, "find_critical: bracketing did not converge");
    const double u0 = 0.5 * (a + b);
    return {-4 - 2 / (1 + u0 * u0), u0};
}

inline std::optional<CriticalPoint> critical_point(const QuantumLabel& label)
{
    switch (critical_class(label)) {
    case CriticalClass::AtZero: return CriticalPoint{0.0, std::nullopt};
    case CriticalClass::Window: return find_critical(label);
    case CriticalClass::None: return std::nullopt;
    }
    return std::nullopt;
}

namespace detail {

// Coefficients of the local square-root model near C(1,n2): c = C + K u1^2, u2 = u0 - u1/2 + B u1^2.
inline double fold_k(double u0)
{
    const double u2 = u0 * u0;
    return (21 + 24 * u2 + 8 * u2 * u2) / (6 * (1 + u2) * (1 + u2));
}

inline double fold_b(double u0)
{
    const double u2 = u0 * u0;
    return (3 + 6 * u2 + 2 * u2 * u2) / (6 * u0 * (1 + u2));
}

} // namespace detail

/** @brief Real-branch seed on the real side of the fold (c just above C). */
inline RealCoords real_fold_seed(const QuantumLabel& label, const CriticalPoint& cp, double c)
{
    const double p = label.p();
    if (label.n1 == 0) {
        auto [d1, d2] = delta_small_c(label, c);
        return {d1, d2, p};
    }
    if (label.n2 == 1) {
        const double d = std::sqrt(std::max(0.0, 6 * (c - cp.C)));
        return {d, d, p};
    }
    const double u0 = *cp.u0;
    const double u1 = -std::sqrt(std::max(0.0, (c - cp.C) / detail::fold_k(u0)));
    const double u2 = u0 - u1 / 2 + detail::fold_b(u0) * u1 * u1;
    return {u1 * c, u2 * c, p};
}

/** @brief Complex-branch seed just below the fold: delta1 -> -2i alpha with alpha >= 0. */
inline ComplexCoords branch_switch(const QuantumLabel& label, const CriticalPoint& cp, double c)
{
    if (!(c < cp.C)) throw SolverError(ErrorKind::InvalidArgument, "branch_switch needs c below the critical coupling");
    const double p = label.p();
    if (label.n1 == 0) {
        auto [a, g] = complex_small_c(label, c);
        return {a, g, p};
    }
    if (label.n1 != 1) throw SolverError(ErrorKind::NotApplicable, "label has no critical coupling");
    if (label.n2 == 1) return {std::sqrt(6 * (cp.C - c)), 0.0, p};
    const double u0 = *cp.u0, k = detail::fold_k(u0);
    const double alpha = std::sqrt((cp.C - c) / k) * std::abs(c) / 2;
    const double gamma = -(c * u0 + c * detail::fold_b(u0) * (c - cp.C) / k) / 3;
    return {alpha, gamma, p};
}

namespace detail {

using Vec2 = std::array<double, 2>;

// A parameterization of one branch of a label: unknowns <-> coordinates plus the residual to zero.
struct Chart {
    int dim = 2;
    std::function<Vec2(const Vec2&, double)> residual; // possibly deflated
    std::function<double(const Vec2&, double)> raw_norm;
    std::function<bool(const Vec2&, double)> feasible;
    std::function<BranchCoords(const Vec2&, double)> coords;
    std::function<Vec2(const BranchCoords&, double)> unknowns;
    std::function<void(const Vec2&, double)> accept = [](const Vec2&, double) {};
    std::function<double(const Vec2&, double)> step_cap = [](const Vec2&, double) { return 1e300; };
    std::function<std::array<int, 2>()> winding = [] { return std::array<int, 2>{0, 0}; };
};

inline std::string at_c(const char* what, const QuantumLabel& l, double c)
{
    std::ostringstream os;
    os.precision(17);
    os << what << " for " << l.str() << " at c=" << c;
    return os.str();
}

inline Chart real_chart(const QuantumLabel& label, std::shared_ptr<WindingState> w)
{
    Chart ch;
    const double p = label.p();
    if (label.n1 == label.n2) {
        const int n = label.n1;
        ch.dim = 1;
        ch.residual = [n](const Vec2& x, double c) {
            double r = residual_equal_delta(x[0], c, n);
            if (n == 1 && c < 0) r *= (1 + x[0]) / x[0];
            return Vec2{r, 0};
        };
        ch.raw_norm = [n](const Vec2& x, double c) { return std::abs(residual_equal_delta(x[0], c, n)); };
        ch.feasible = [n](const Vec2& x, double) { return n == 0 ? x[0] >= 0 : x[0] > 0; };
        ch.coords = [p](const Vec2& x, double) { return BranchCoords{RealCoords{x[0], x[0], p}}; };
        ch.unknowns = [](const BranchCoords& b, double) { return Vec2{std::get<RealCoords>(b).delta1, 0}; };
    } else {
        ch.residual = [label, w](const Vec2& x, double c) {
            auto r = residual_real(x[0], x[1], c, label, *w).residual;
            if ((label.n1 == 1 && c < 0) || (label.n1 == 0 && c > 0)) r[0] *= (1 + x[0]) / x[0];
            return r;
        };
        ch.raw_norm = [label, w](const Vec2& x, double c) {
            auto r = residual_real(x[0], x[1], c, label, *w).residual;
            return std::max(std::abs(r[0]), std::abs(r[1]));
        };
        ch.feasible = [](const Vec2& x, double) { return x[0] > 0 && x[1] > 0; };
        ch.coords = [p](const Vec2& x, double) { return BranchCoords{RealCoords{x[0], x[1], p}}; };
        ch.unknowns = [](const BranchCoords& b, double) {
            auto& r = std::get<RealCoords>(b);
            return Vec2{r.delta1, r.delta2};
        };
        ch.accept = [label, w](const Vec2& x, double c) {
            const auto rp = residual_real(x[0], x[1], c, label, *w);
            if (rp.imag > tol::imag_part) throw SolverError(ErrorKind::Inconsistency, at_c("imaginary residual part", label, c));
            const auto ts = residual_real_theta_sum(x[0], x[1], c, label);
            if (std::max(std::abs(ts[0]), std::abs(ts[1])) > 1e-10)
                throw SolverError(ErrorKind::Inconsistency, at_c("tracked-log and theta-sum residuals disagree", label, c));
            advance_real_winding(x[0], x[1], c, *w);
        };
        ch.winding = [w] { return std::array<int, 2>{w->winding(0), w->winding(1)}; };
    }
    ch.step_cap = [](const Vec2& x, double) {
        const double d = x[0] / 0.3;
        return d < 1 ? std::max(1e-7, d * d) : 1e300;
    };
    return ch;
}

// Complex-branch sheets, each solved in variables that resolve the smallest gap.
enum class Sheet { PairBelow, EqualPair, PairAbove, Trimer0, Trimer1 };

inline Sheet sheet_of(const QuantumLabel& l)
{
    if (l.n1 == 1) return l.n2 == 1 ? Sheet::EqualPair : Sheet::PairBelow;
    if (l.n1 == 0) {
        if (l.n2 == 0) return Sheet::Trimer0;
        return l.n2 == 1 ? Sheet::Trimer1 : Sheet::PairAbove;
    }
    throw SolverError(ErrorKind::NotApplicable, "label " + l.str() + " has no complex branch");
}

inline ComplexParts sheet_parts(Sheet sh, const Vec2& x, double c)
{
    ComplexParts q;
    switch (sh) {
    case Sheet::PairBelow:
    case Sheet::EqualPair: {
        const double gap = std::exp(x[0]);
        q.alpha = (-c - gap) / 2;
        q.gamma = sh == Sheet::EqualPair ? 0.0 : x[1];
        q.pair_gap = gap;
        q.log_abs_pair_gap = x[0];
        q.eta = (c - gap) / 2;
        q.log_tri = std::log(q.eta * q.eta + 9 * q.gamma * q.gamma);
        break;
    }
    case Sheet::PairAbove: {
        const double gap = std::exp(x[0]);
        q.alpha = (gap - c) / 2;
        q.gamma = x[1];
        q.pair_gap = -gap;
        q.log_abs_pair_gap = x[0];
        q.eta = (gap + c) / 2;
        q.log_tri = std::log(q.eta * q.eta + 9 * q.gamma * q.gamma);
        break;
    }
    case Sheet::Trimer0: {
        q.eta = std::exp(x[0]);
        q.alpha = -c + q.eta;
        q.gamma = 0;
        q.pair_gap = c - 2 * q.eta;
        q.log_abs_pair_gap = std::log(2 * q.eta - c);
        q.log_tri = 2 * x[0];
        break;
    }
    case Sheet::Trimer1: {
        const double rho = std::exp(x[0]);
        q.eta = rho * std::cos(x[1]);
        q.gamma = -rho * std::sin(x[1]) / 3;
        q.alpha = -c + q.eta;
        q.pair_gap = c - 2 * q.eta;
        q.log_abs_pair_gap = std::log(std::abs(q.pair_gap));
        q.log_tri = 2 * x[0];
        break;
    }
    }
    return q;
}

inline Vec2 sheet_unknowns(Sheet sh, double alpha, double gamma, double c)
{
    switch (sh) {
    case Sheet::PairBelow: return {std::log(-c - 2 * alpha), gamma};
    case Sheet::EqualPair: return {std::log(-c - 2 * alpha), 0};
    case Sheet::PairAbove: return {std::log(2 * alpha + c), gamma};
    case Sheet::Trimer0: return {std::log(alpha + c), 0};
    case Sheet::Trimer1: {
        const double eta = alpha + c, g = -3 * gamma;
        return {0.5 * std::log(eta * eta + g * g), std::atan2(g, eta)};
    }
    }
    return {0, 0};
}

inline Chart complex_chart(const QuantumLabel& label)
{
    Chart ch;
    const Sheet sh = sheet_of(label);
    const double p = label.p();
    ch.dim = (sh == Sheet::EqualPair || sh == Sheet::Trimer0) ? 1 : 2;
    ch.residual = [label, sh](const Vec2& x, double c) {
        const ComplexParts q = sheet_parts(sh, x, c);
        auto r = residual_complex_parts(q, c, label).residual;
        r[0] *= (1 + q.alpha) / q.alpha;
        return r;
    };
    ch.raw_norm = [label, sh, dim = ch.dim](const Vec2& x, double c) {
        auto r = residual_complex_parts(sheet_parts(sh, x, c), c, label).residual;
        return dim == 1 ? std::abs(r[0]) : std::max(std::abs(r[0]), std::abs(r[1]));
    };
    ch.feasible = [sh](const Vec2& x, double c) {
        if (!std::isfinite(x[0]) || !std::isfinite(x[1])) return false;
        const ComplexParts q = sheet_parts(sh, x, c);
        if (!(q.alpha > 0)) return false;
        if (sh == Sheet::Trimer1) return x[1] > 0 && x[1] < pi;
        return true;
    };
    ch.coords = [sh, p](const Vec2& x, double c) {
        const ComplexParts q = sheet_parts(sh, x, c);
        return BranchCoords{ComplexCoords{q.alpha, q.gamma, p}};
    };
    ch.unknowns = [sh](const BranchCoords& b, double c) {
        auto& q = std::get<ComplexCoords>(b);
        return sheet_unknowns(sh, q.alpha, q.gamma, c);
    };
    ch.accept = [label, sh](const Vec2& x, double c) {
        const ComplexParts q = sheet_parts(sh, x, c);
        const auto rp = residual_complex_parts(q, c, label);
        if (rp.imag > tol::imag_part * std::max(1.0, q.alpha))
            throw SolverError(ErrorKind::Inconsistency, at_c("imaginary residual part", label, c));
    };
    return ch;
}

struct Solved {
    Vec2 x{};
    double raw = 0;
    int iterations = 0;
};

inline Solved solve_chart(const Chart& ch, const Vec2& guess, double c, const TraceOptions& opt)
{
    NewtonOptions no;
    no.tol = opt.residual_tol;
    Solved s;
    if (ch.dim == 1) {
        auto res = newton_solve<1>([&](const std::array<double, 1>& x) { return std::array<double, 1>{ch.residual({x[0], 0}, c)[0]}; },
                                   std::array<double, 1>{guess[0]}, no,
                                   [&](const std::array<double, 1>& x) { return ch.feasible({x[0], 0}, c); });
        s.x = {res.x[0], 0};
        s.iterations = res.iterations;
    } else {
        auto res = newton_solve<2>([&](const Vec2& x) { return ch.residual(x, c); }, guess, no,
                                   [&](const Vec2& x) { return ch.feasible(x, c); });
        s.x = res.x;
        s.iterations = res.iterations;
    }
    s.raw = ch.raw_norm(s.x, c);
    return s;
}

class Marcher {
public:
    Marcher(Chart chart, const QuantumLabel& label, const TraceOptions& opt)
        : ch_(std::move(chart)), label_(label), opt_(opt) {}

    void start(double c, const Vec2& x, std::optional<std::pair<double, Vec2>> history = std::nullopt)
    {
        c_ = c;
        x_ = x;
        prev_ = history;
        ch_.accept(x_, c_);
        raw_ = ch_.raw_norm(x_, c_);
    }

    // Advance to c_target with adaptive steps no longer than base_step.
    void advance_to(double c_target, double base_step)
    {
        double h = std::min(base_step, h_ > 0 ? h_ : base_step);
        while (c_ != c_target) {
            const double dir = c_target > c_ ? 1.0 : -1.0;
            h = std::min({h, base_step, ch_.step_cap(x_, c_)});
            double cn = c_ + dir * std::min(h, std::abs(c_target - c_));
            if (std::abs(c_target - cn) < 1e-13 * std::max(1.0, std::abs(c_target))) cn = c_target;
            Vec2 pred = x_;
            if (prev_) {
                const double t = (cn - c_) / (c_ - prev_->first);
                for (int i = 0; i < 2; ++i) pred[i] = x_[i] + t * (x_[i] - prev_->second[i]);
            }
            bool ok = ch_.feasible(pred, cn);
            Solved s;
            if (ok) {
                try {
                    s = solve_chart(ch_, pred, cn, opt_);
                    double jump = 0, scale = 1;
                    for (int i = 0; i < ch_.dim; ++i) {
                        jump = std::max(jump, std::abs(s.x[i] - pred[i]));
                        scale = std::max(scale, std::abs(x_[i]));
                    }
                    ok = s.iterations <= 12 && jump <= 0.1 * scale;
                } catch (const SolverError& e) {
                    if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::ConstraintViolation &&
                        e.kind() != ErrorKind::SingularArgument)
                        throw;
                    ok = false;
                }
            }
            if (!ok) {
                h *= 0.5;
                if (h < opt_.min_step)
                    throw SolverError(ErrorKind::NoConvergence, at_c("continuation step collapsed; last good point", label_, c_));
                continue;
            }
            ch_.accept(s.x, cn);
            prev_ = std::make_pair(c_, x_);
            c_ = cn;
            x_ = s.x;
            raw_ = s.raw;
            h = std::min(base_step, h * 1.5);
        }
        h_ = h;
    }

    double c() const { return c_; }
    const Vec2& x() const { return x_; }
    const Chart& chart() const { return ch_; }

    TrajectorySample sample() const
    {
        return {make_state(label_, c_, ch_.coords(x_, c_)), ch_.winding(), raw_};
    }

private:
    Chart ch_;
    QuantumLabel label_;
    TraceOptions opt_;
    double c_ = 0;
    Vec2 x_{};
    double raw_ = 0;
    double h_ = 0;
    std::optional<std::pair<double, Vec2>> prev_;
};

inline void check_real_bounds(const TrajectorySample& s)
{
    auto* r = std::get_if<RealCoords>(&s.state.coords);
    if (!r || s.state.c == 0) return;
    const double c = s.state.c, slack = tol::bounds_slack;
    const int n[2] = {s.state.label.n1, s.state.label.n2};
    const double d[2] = {r->delta1, r->delta2};
    for (int j = 0; j < 2; ++j) {
        const bool ok = c > 0 ? (d[j] >= two_pi * n[j] - pi - slack && d[j] <= two_pi * (n[j] + 1) + slack)
                              : (d[j] > two_pi * (n[j] - 1) - slack && d[j] <= two_pi * n[j] + pi + slack);
        if (!ok) throw SolverError(ErrorKind::BoundsViolation, at_c("real-branch delta bound broken", s.state.label, c));
    }
}

inline std::vector<double> build_grid(double c_min, double c_max, double step)
{
    if (!(step > 0) || !(c_min <= c_max) || !std::isfinite(c_min) || !std::isfinite(c_max))
        throw SolverError(ErrorKind::InvalidArgument, "trace needs c_min <= c_max and step > 0");
    std::vector<double> g;
    const long lo = static_cast<long>(std::ceil(c_min / step - 1e-9));
    const long hi = static_cast<long>(std::floor(c_max / step + 1e-9));
    for (long i = lo; i <= hi; ++i) g.push_back(i == 0 ? 0.0 : i * step);
    g.push_back(c_min);
    g.push_back(c_max);
    std::sort(g.begin(), g.end());
    std::vector<double> out;
    for (double v : g)
        if (out.empty() || std::abs(v - out.back()) > 1e-12 * std::max(1.0, std::abs(v))) out.push_back(v);
    // the requested ends must appear exactly, not as a nearby multiple of step
    out.front() = c_min;
    out.back() = c_max;
    return out;
}

// Solve an isolated point of a chart from an explicit seed.
inline TrajectorySample solve_from_seed(const Chart& ch, const QuantumLabel& label, const BranchCoords& seed, double c,
                                        const TraceOptions& opt, ErrorKind on_fail)
{
    try {
        const Vec2 x0 = ch.unknowns(seed, c);
        Solved s = solve_chart(ch, x0, c, opt);
        if (s.iterations > 10 && on_fail == ErrorKind::SeedFailure)
            throw SolverError(ErrorKind::SeedFailure, at_c("local-model seed needed more than 10 Newton steps", label, c));
        ch.accept(s.x, c);
        return {make_state(label, c, ch.coords(s.x, c)), ch.winding(), s.raw};
    } catch (const SolverError& e) {
        if (e.kind() == ErrorKind::SeedFailure) throw;
        throw SolverError(on_fail, at_c(e.what(), label, c));
    }
}

inline Trajectory trace_canonical(const QuantumLabel& label, double c_min, double c_max, double step, const TraceOptions& opt)
{
    const auto grid = build_grid(c_min, c_max, step);
    Trajectory tr;
    tr.label = label;
    tr.critical = critical_point(label);
    const double p = label.p();
    const double zone = opt.fold_zone;
    std::map<double, TrajectorySample> out;

    const RealCoords ref{two_pi * label.n1, two_pi * label.n2, p};
    if (c_min <= 0 && c_max >= 0) out[0.0] = {make_state(label, 0.0, ref), {0, 0}, 0.0};

    // Positive couplings: real branch everywhere.
    std::vector<double> pos;
    for (double c : grid)
        if (c > 0) pos.push_back(c);
    if (!pos.empty()) {
        auto w = std::make_shared<WindingState>();
        Chart ch = real_chart(label, w);
        Marcher m(ch, label, opt);
        if (label.n1 == 0) {
            const CriticalPoint cp{0.0, std::nullopt};
            for (double c : pos)
                if (c <= zone) {
                    auto wl = std::make_shared<WindingState>();
                    out[c] = solve_from_seed(real_chart(label, wl), label, real_fold_seed(label, cp, c), c, opt, ErrorKind::SeedFailure);
                }
            if (pos.back() > zone) {
                auto s0 = solve_from_seed(ch, label, real_fold_seed(label, cp, zone), zone, opt, ErrorKind::SeedFailure);
                auto h = real_fold_seed(label, cp, zone / 2);
                m.start(zone, ch.unknowns(s0.state.coords, zone), std::make_pair(zone / 2, ch.unknowns(h, zone / 2)));
                for (double c : pos)
                    if (c > zone) {
                        m.advance_to(c, step);
                        out[c] = m.sample();
                    }
            }
        } else {
            auto h = delta_small_c(label, -1e-4);
            m.start(0.0, ch.unknowns(ref, 0.0),
                    std::make_pair(-1e-4, ch.unknowns(RealCoords{h.first, h.second, p}, -1e-4)));
            for (double c : pos) {
                m.advance_to(c, step);
                out[c] = m.sample();
            }
        }
    }

    // Negative couplings, traversed from 0 downwards.
    std::vector<double> neg;
    for (double c : grid)
        if (c < 0) neg.push_back(c);
    std::reverse(neg.begin(), neg.end());
    if (!neg.empty()) {
        const double C = tr.critical ? tr.critical->C : -1e300;
        std::vector<double> real_far, real_near, at_fold, cplx_near, cplx_far;
        for (double c : neg) {
            if (std::abs(c - C) <= 1e-9) at_fold.push_back(c);
            else if (c > C + zone) real_far.push_back(c);
            else if (c > C) real_near.push_back(c);
            else if (c >= C - zone) cplx_near.push_back(c);
            else cplx_far.push_back(c);
        }

        if (label.n1 >= 1) {
            auto w = std::make_shared<WindingState>();
            Marcher m(real_chart(label, w), label, opt);
            auto h = delta_small_c(label, 1e-4);
            m.start(0.0, m.chart().unknowns(ref, 0.0),
                    std::make_pair(1e-4, m.chart().unknowns(RealCoords{h.first, h.second, p}, 1e-4)));
            for (double c : real_far) {
                m.advance_to(c, step);
                out[c] = m.sample();
            }
            if (tr.critical && (!real_near.empty() || !at_fold.empty() || !cplx_near.empty() || !cplx_far.empty())) {
                // March up to the edge of the fold zone and confirm it meets the local model there.
                const double edge = C + zone;
                m.advance_to(edge, step);
                const WindingState w_edge = *w;
                auto local = solve_from_seed(real_chart(label, std::make_shared<WindingState>(w_edge)), label,
                                             real_fold_seed(label, *tr.critical, edge), edge, opt, ErrorKind::SeedFailure);
                const auto xm = m.x();
                const auto xl = m.chart().unknowns(local.state.coords, edge);
                if (std::max(std::abs(xm[0] - xl[0]), std::abs(xm[1] - xl[1])) > 1e-8)
                    throw SolverError(ErrorKind::Inconsistency, at_c("trajectory does not reach the located critical point", label, edge));
                for (double c : real_near)
                    out[c] = solve_from_seed(real_chart(label, std::make_shared<WindingState>(w_edge)), label,
                                             real_fold_seed(label, *tr.critical, c), c, opt, ErrorKind::SeedFailure);
            }
        }
        if (tr.critical) {
            const CriticalPoint cp = *tr.critical;
            for (double c : at_fold) {
                // Coinciding momenta: delta1 = 0, delta2 = u0 C.
                const double d2 = cp.u0 ? *cp.u0 * cp.C : two_pi * label.n2;
                out[c] = {make_state(label, c, RealCoords{0.0, d2, p}), {0, 0}, 0.0};
            }
            const Chart cc = complex_chart(label);
            for (double c : cplx_near)
                out[c] = solve_from_seed(cc, label, branch_switch(label, cp, c), c, opt, ErrorKind::SeedFailure);
            if (!cplx_far.empty()) {
                const double start = cp.C - zone;
                auto s0 = solve_from_seed(cc, label, branch_switch(label, cp, start), start, opt, ErrorKind::SeedFailure);
                auto s1 = solve_from_seed(cc, label, branch_switch(label, cp, cp.C - zone / 2), cp.C - zone / 2, opt,
                                          ErrorKind::SeedFailure);
                Marcher m(cc, label, opt);
                m.start(start, cc.unknowns(s0.state.coords, start),
                        std::make_pair(cp.C - zone / 2, cc.unknowns(s1.state.coords, cp.C - zone / 2)));
                for (double c : cplx_far) {
                    m.advance_to(c, step);
                    out[c] = m.sample();
                }
            }
        }
    }

    for (auto& [c, s] : out) {
        check_real_bounds(s);
        tr.samples.push_back(s);
    }
    return tr;
}

} // namespace detail

/**
 * @brief Follow the root of `label` over [c_min, c_max], starting from the exact c = 0 state.
 * Non-canonical labels are traced through their canonical partner and mapped back by symmetry.
 */
inline Trajectory trace_root(const QuantumLabel& label, double c_min, double c_max, double step = 0.05,
                             const TraceOptions& opt = {})
{
    const CanonicalLabel cl = canonicalize(label);
    Trajectory tr = detail::trace_canonical(cl.label, c_min, c_max, step, opt);
    if (!cl.partner) return tr;
    tr.label = {cl.label.n2, cl.label.n1};
    for (auto& s : tr.samples) s.state = partner_state(s.state);
    return tr;
}

/** @brief The state of `label` at coupling c, traced from c = 0. */
inline StateSolution solve_at(const QuantumLabel& label, double c, double step = 0.05, const TraceOptions& opt = {})
{
    const Trajectory tr = trace_root(label, std::min(c, 0.0), std::max(c, 0.0), step, opt);
    const auto& s = tr.at(c);
    if (s.state.c != c) throw SolverError(ErrorKind::Inconsistency, "solve_at: grid does not contain the requested c");
    return s.state;
}

struct SpectrumFailure {
    QuantumLabel label;
    std::string message;
};

struct SpectrumResult {
    std::vector<StateSolution> states; // ascending energy
    std::vector<SpectrumFailure> failures;
};

inline SpectrumResult spectrum(const std::vector<QuantumLabel>& labels, double c, bool include_partners = false,
                               double step = 0.05, const TraceOptions& opt = {})
{
    SpectrumResult res;
    std::vector<QuantumLabel> todo;
    for (const auto& l : labels) {
        todo.push_back(l);
        if (include_partners && l.n1 != l.n2) {
            QuantumLabel q{l.n2, l.n1};
            if (std::find(labels.begin(), labels.end(), q) == labels.end()) todo.push_back(q);
        }
    }
    for (const auto& l : todo) {
        try {
            res.states.push_back(solve_at(l, c, step, opt));
        } catch (const SolverError& e) {
            res.failures.push_back({l, e.what()});
        }
    }
    std::stable_sort(res.states.begin(), res.states.end(), [](const auto& a, const auto& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.label < b.label;
    });
    return res;
}

} // namespace bethe3
