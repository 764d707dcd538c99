#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

#include "core_model.hpp"
#include "errors.hpp"
#include "tolerances.hpp"

namespace bethe3 {

/** @brief Two-body phase -2 atan(dk/c) on the branch continuous across c = 0. */
inline double theta(double dk, double c)
{
    if (dk == 0 && c == 0) return -pi;
    return -2 * std::atan2(dk, c);
}

/** @brief Accumulated 2*pi winding of each tracked logarithm argument. */
class WindingState {
public:
    struct Slot {
        cplx prev{1, 0};
        int winding = 0;
        bool fresh = true;
    };

    const Slot& slot(int key) const
    {
        static const Slot empty{};
        auto it = slots_.find(key);
        return it == slots_.end() ? empty : it->second;
    }

    int winding(int key) const { return slot(key).winding; }

    /** @brief Log of z continued from the stored argument; does not modify the state. */
    cplx peek(cplx z, int key) const
    {
        if (z == cplx(0, 0)) throw SolverError(ErrorKind::SingularArgument, "log argument is zero");
        const Slot& s = slot(key);
        const double arg = std::arg(z);
        if (s.fresh) return {std::log(std::abs(z)), arg};
        const double continued = std::arg(s.prev) + two_pi * s.winding + std::arg(z / s.prev);
        const double w = std::round((continued - arg) / two_pi);
        return {std::log(std::abs(z)), arg + two_pi * w};
    }

    void commit(cplx z, int key)
    {
        const cplx l = peek(z, key);
        Slot& s = slots_[key];
        s.winding = static_cast<int>(std::round((l.imag() - std::arg(z)) / two_pi));
        s.prev = z;
        s.fresh = false;
    }

private:
    std::map<int, Slot> slots_;
};

/** @brief Principal log plus the tracked winding; advances the state to z. */
inline cplx tracked_log(cplx z, WindingState& state, int key)
{
    const cplx l = state.peek(z, key);
    state.commit(z, key);
    return l;
}

template <std::size_t N>
struct ResidualPoint {
    std::array<double, N> unknowns{};
    std::array<double, N> residual{};
    double imag = 0; // largest imaginary part discarded when forming the real residual
};

namespace detail {

// Arguments of the two coupled logarithmic equations on the real branch.
inline std::array<cplx, 2> real_log_arguments(double d1, double d2, double c)
{
    auto ratio = [c](double d) { return cplx(c, d) / cplx(c, -d); };
    const cplx a1 = ratio(d1), a2 = ratio(d2), a12 = ratio(d1 + d2);
    if (!std::isfinite(std::abs(a1)) || !std::isfinite(std::abs(a2)) || !std::isfinite(std::abs(a12)))
        throw SolverError(ErrorKind::SingularArgument, "coincident momenta at c = 0");
    return {a1 * a1 / a2 * a12, a2 * a2 / a1 * a12};
}

} // namespace detail

/**
 * @brief Real-branch residual r_j = delta_j - i Log z_j - 2 pi n_j with Log continued through `w`.
 * Keys 0 and 1 of `w` hold the two arguments; call advance_real_winding after accepting a root.
 */
inline ResidualPoint<2> residual_real(double d1, double d2, double c, const QuantumLabel& label, const WindingState& w)
{
    const auto z = detail::real_log_arguments(d1, d2, c);
    ResidualPoint<2> out;
    out.unknowns = {d1, d2};
    const double d[2] = {d1, d2};
    const int n[2] = {label.n1, label.n2};
    for (int j = 0; j < 2; ++j) {
        const cplx r = d[j] - cplx(0, 1) * w.peek(z[j], j) - two_pi * n[j];
        out.residual[j] = r.real();
        out.imag = std::max(out.imag, std::abs(r.imag()));
    }
    return out;
}

inline void advance_real_winding(double d1, double d2, double c, WindingState& w)
{
    const auto z = detail::real_log_arguments(d1, d2, c);
    w.commit(z[0], 0);
    w.commit(z[1], 1);
}

/** @brief Same equations written as sums of two-body phases; independent of any winding bookkeeping. */
inline std::array<double, 2> residual_real_theta_sum(double d1, double d2, double c, const QuantumLabel& label)
{
    const double t21 = theta(d1, c), t32 = theta(d2, c), t31 = theta(d1 + d2, c);
    return {d1 - (two_pi * (label.n1 + 1) + 2 * t21 + t31 - t32),
            d2 - (two_pi * (label.n2 + 1) + 2 * t32 + t31 - t21)};
}

inline double residual_equal_delta(double d, double c, int n0)
{
    if (d < 0) throw SolverError(ErrorKind::InvalidArgument, "equal-delta residual needs d >= 0");
    return d - (two_pi * (n0 + 1) + theta(d, c) + theta(2 * d, c));
}

/** @brief Implicit slope of the equal-delta root curve. */
inline double ddelta_dc(double delta, double c)
{
    const double d2 = delta * delta, c2 = c * c;
    const double den = c2 * (c2 + 5 * d2) + 4 * d2 * d2 + 6 * c * (2 * d2 + c2);
    if (den == 0) throw SolverError(ErrorKind::SingularArgument, "ddelta_dc: fold point");
    return 6 * delta * (c2 + 2 * d2) / den;
}

/**
 * @brief Complex-branch quantities with the small gaps carried explicitly, so the
 * equations stay accurate when -c-2 alpha or alpha+c are exponentially small.
 */
struct ComplexParts {
    double alpha = 0;
    double gamma = 0;
    double pair_gap = 0;         // -c - 2 alpha
    double log_abs_pair_gap = 0; // ln|-c - 2 alpha|
    double eta = 0;              // alpha + c
    double log_tri = 0;          // ln(eta^2 + 9 gamma^2)
};

inline ComplexParts parts_from_alpha_gamma(double alpha, double gamma, double c)
{
    ComplexParts q;
    q.alpha = alpha;
    q.gamma = gamma;
    q.pair_gap = -c - 2 * alpha;
    q.log_abs_pair_gap = std::log(std::abs(q.pair_gap));
    q.eta = alpha + c;
    q.log_tri = std::log(q.eta * q.eta + 9 * gamma * gamma);
    return q;
}

inline void check_complex_sheet(const ComplexParts& q, double c, const QuantumLabel& label)
{
    auto fail = [&](const char* what) {
        std::ostringstream os;
        os.precision(17);
        os << what << " for " << label.str() << " at c=" << c << " alpha=" << q.alpha << " gamma=" << q.gamma;
        throw SolverError(ErrorKind::ConstraintViolation, os.str());
    };
    if (!(c < 0)) fail("complex branch needs c < 0");
    if (label.n1 > 1 || label.n1 < 0 || label.n2 < label.n1) fail("complex branch needs a canonical label with n1 <= 1");
    if (!(q.alpha >= 0)) fail("alpha must be non-negative");
    if (label.n1 == 1 && !(q.pair_gap > 0)) fail("-c-2alpha must stay positive");
    if (label.n1 == 0 && !(q.pair_gap < 0)) fail("2alpha+c must stay positive");
    if (label.n1 == 0 && label.n2 > 0 && !(q.gamma < 0)) fail("gamma must stay negative");
    if (label.n1 == 0 && label.n2 == 0 && !(q.eta > 0)) fail("alpha+c must stay positive");
    if (!std::isfinite(q.log_tri) || !std::isfinite(q.log_abs_pair_gap)) fail("a logarithm factor vanished");
}

/**
 * @brief Consistency of the imaginary parts: alpha - ln|z2| where z2 is the delta2 log argument
 * assembled from complex factors. Vanishes at a root whenever the alpha equation holds.
 */
inline double complex_imaginary_part(const ComplexParts& q, double c)
{
    const cplx i(0, 1);
    const cplx d1(0, -2 * q.alpha), d2(-3 * q.gamma, q.alpha), d12 = d1 + d2;
    // c + i d1 = -pair_gap and |c - i d2|^2 = eta^2 + 9 gamma^2 can be tiny; use the carried values
    const double ln_abs_z2 = 2 * std::log(std::abs(c + i * d2)) - q.log_tri + std::log(std::abs(c - i * d1)) -
                             q.log_abs_pair_gap + 0.5 * q.log_tri - std::log(std::abs(c - i * d12));
    return q.alpha - ln_abs_z2;
}

/** @brief Alpha and gamma equations of the complex branch (canonical labels with n1 in {0,1}). */
inline ResidualPoint<2> residual_complex_parts(const ComplexParts& q, double c, const QuantumLabel& label)
{
    check_complex_sheet(q, c, label);
    const double a = q.alpha, g = q.gamma;
    ResidualPoint<2> out;
    out.unknowns = {a, g};
    out.residual[0] = 2 * a + 2 * q.log_abs_pair_gap - 2 * std::log(-c + 2 * a) + q.log_tri -
                      std::log((-c + a) * (-c + a) + 9 * g * g);
    if (label.n1 == 1) {
        out.residual[1] = -3 * (std::atan2(-3 * g, -c + a) + std::atan2(-3 * g, -q.eta)) - 3 * g -
                          two_pi * (label.n2 - 1);
    } else {
        const double gg = -3 * g;
        out.residual[1] = gg + 3 * std::atan2(a - c, gg) - 3 * std::atan2(q.eta, gg) - two_pi * label.n2;
    }
    out.imag = std::abs(complex_imaginary_part(q, c));
    return out;
}

inline ResidualPoint<2> residual_complex(double alpha, double gamma, double c, const QuantumLabel& label)
{
    return residual_complex_parts(parts_from_alpha_gamma(alpha, gamma, c), c, label);
}

/**
 * @brief Product form e^{i k_j} prod (k_j - k_s - ic) = prod (k_j - k_s + ic), cross-multiplied so it stays
 * finite at poles. Returns the largest relative mismatch over j; needs no logarithms or windings.
 */
inline double bethe_product_residual(const Momenta& k, double c)
{
    const cplx ic(0, c);
    double worst = 0;
    for (int j = 0; j < 3; ++j) {
        cplx num = 1, den = 1;
        for (int s = 0; s < 3; ++s) {
            if (s == j) continue;
            num *= k[j] - k[s] + ic;
            den *= k[j] - k[s] - ic;
        }
        const cplx lhs = std::exp(cplx(0, 1) * k[j]) * den;
        const double scale = std::abs(lhs) + std::abs(num);
        if (scale == 0) continue;
        worst = std::max(worst, std::abs(lhs - num) / scale);
    }
    return worst;
}

/** @brief gamma^2 eliminated from the alpha equation. */
inline double gamma_squared_from_alpha(double alpha, double c)
{
    if (!(c < 0) || alpha < 0) throw SolverError(ErrorKind::InvalidArgument, "gamma_squared_from_alpha needs c < 0, alpha >= 0");
    if (alpha < 1e-8) {
        if (c == -4) throw SolverError(ErrorKind::SingularArgument, "gamma^2 pole at c = -4");
        return c * c * (6 + c) / (-9 * (4 + c));
    }
    const double em = std::exp(-alpha), ep = std::exp(alpha);
    const double cm2 = (c - 2 * alpha) * (c - 2 * alpha), cp2 = (c + 2 * alpha) * (c + 2 * alpha);
    const double cm1 = (c - alpha) * (c - alpha), cp1 = (c + alpha) * (c + alpha);
    const double den = 9 * (ep * cp2 - em * cm2);
    if (std::abs(den) < 1e-300) throw SolverError(ErrorKind::SingularArgument, "gamma^2 pole");
    return (em * cm2 * cm1 - ep * cp2 * cp1) / den;
}

} // namespace bethe3
