#pragma once

#include <cmath>
#include <utility>

#include "core_model.hpp"
#include "errors.hpp"

namespace bethe3 {

enum class AsymptoticRegime { LargePositiveC, LargeNegativeC_Real, SmallC, Dimer, Trimer, EqualDeltaDimer };

enum class DimerFamily { N1Zero, N1One };

namespace asym {
inline constexpr double large_c_min = 20;     // |c| for the 1/c real-branch forms
inline constexpr double bound_c_max = -15;    // c at or below which dimer/trimer forms apply
inline constexpr double small_c_max = 0.05;   // |c| for the small-coupling series
} // namespace asym

/** @brief Whether the paper's case analysis assigns `regime` to the canonical `label`. */
inline bool regime_admissible(AsymptoticRegime regime, const QuantumLabel& l)
{
    switch (regime) {
    case AsymptoticRegime::LargePositiveC: return l.n1 >= 0;
    case AsymptoticRegime::LargeNegativeC_Real: return l.n1 >= 2;
    case AsymptoticRegime::SmallC: return true;
    case AsymptoticRegime::Dimer: return (l.n1 == 0 || l.n1 == 1) && l.n2 >= 2;
    case AsymptoticRegime::Trimer: return l.n1 == 0 && (l.n2 == 0 || l.n2 == 1);
    case AsymptoticRegime::EqualDeltaDimer: return l.n1 == 1 && l.n2 == 1;
    }
    return false;
}

/** @brief First-order large-|c| form of a real-branch delta with quantum number n. */
inline double delta_large_c(int n, double c)
{
    if (std::abs(c) < asym::large_c_min)
        throw SolverError(ErrorKind::InvalidArgument, "delta_large_c needs |c| >= 20");
    if (c > 0) return two_pi * (n + 1) * (1 - 6 / c);
    if (n <= 1) throw SolverError(ErrorKind::InvalidArgument, "delta_large_c for c < 0 needs n > 1");
    return two_pi * (n - 1) * (1 + 6 / -c);
}

inline void require_bound_regime(double c)
{
    if (c > asym::bound_c_max) throw SolverError(ErrorKind::InvalidArgument, "bound-state asymptotics need c <= -15");
}

/** @brief Dimer alpha; the n1=0 family approaches -c/2 from above, the n1=1 family from below. */
inline double alpha_dimer(double c, DimerFamily family = DimerFamily::N1One)
{
    require_bound_regime(c);
    const double beta = -3 * c * std::exp(c / 2) + 9 * c * c * std::exp(c);
    return family == DimerFamily::N1One ? -c / 2 - beta : -c / 2 + beta;
}

/** @brief (1,1) dimer alpha; one exponential order only. */
inline double alpha_equal_dimer(double c)
{
    require_bound_regime(c);
    return -c / 2 + 3 * c * std::exp(c / 2);
}

inline double gamma_dimer(int n2, double c, DimerFamily family)
{
    require_bound_regime(c);
    if (n2 < 2) throw SolverError(ErrorKind::InvalidArgument, "gamma_dimer needs n2 >= 2");
    if (family == DimerFamily::N1One) return -(two_pi / 3) * (n2 - 1) * (1 - 8 / c);
    return -((2.0 / 3) * n2 - 1) * pi * (1 - 8 / c);
}

/**
 * @brief Trimer (alpha, gamma) for (0,0) and (0,1). For (0,1) the pair (eta, -3 gamma) has
 * modulus -6c e^c and polar angle 2 pi / 3, i.e. eta = 3c e^c, gamma = sqrt(3) c e^c.
 */
inline std::pair<double, double> alpha_trimer(const QuantumLabel& l, double c)
{
    require_bound_regime(c);
    if (l.n1 != 0 || (l.n2 != 0 && l.n2 != 1))
        throw SolverError(ErrorKind::NotApplicable, "alpha_trimer applies to (0,0) and (0,1) only");
    const double ce = c * std::exp(c);
    if (l.n2 == 0) return {-c - 6 * ce - 36 * ce * ce, 0.0};
    return {-c + 3 * ce, std::sqrt(3.0) * ce};
}

namespace detail {
inline double k4_coefficient(int n2) { return 1.0 / 192 + 1.0 / (32 * pi * pi * n2 * n2); }
} // namespace detail

/** @brief Small-c series for (delta1, delta2) on the real branch; c >= 0 when n1 = 0. */
inline std::pair<double, double> delta_small_c(const QuantumLabel& l, double c)
{
    if (std::abs(c) > asym::small_c_max) throw SolverError(ErrorKind::InvalidArgument, "delta_small_c needs |c| <= 0.05");
    const int n1 = l.n1, n2 = l.n2;
    if (n1 >= 1 && n2 >= 1) {
        auto slope = [](double a, double b) { return (2 * a * b + 2 * b * b - a * a) / (a * b * (a + b) * pi); };
        return {two_pi * n1 + slope(n1, n2) * c, two_pi * n2 + slope(n2, n1) * c};
    }
    if (c < 0) throw SolverError(ErrorKind::InvalidArgument, "delta_small_c for n1 = 0 needs c >= 0");
    if (n1 == 0 && n2 == 0) {
        // c = x/3 + x^2/108 with x = delta^2
        const double x = 18 * (std::sqrt(1 + c / 3) - 1);
        const double d = std::sqrt(std::max(0.0, x));
        return {d, d};
    }
    if (n1 != 0) throw SolverError(ErrorKind::InvalidArgument, "delta_small_c needs a canonical label");
    // c = x/4 + K4 x^2 with x = delta1^2
    const double k4 = detail::k4_coefficient(n2);
    const double x = 2 * c / (0.25 + std::sqrt(0.0625 + 4 * k4 * c));
    const double d1 = std::sqrt(std::max(0.0, x));
    return {d1, two_pi * n2 - d1 / 2 + 3 * d1 * d1 / (4 * pi * n2)};
}

/** @brief Small-|c| complex-branch seed (alpha, gamma) for n1 = 0 labels at c < 0. */
inline std::pair<double, double> complex_small_c(const QuantumLabel& l, double c)
{
    if (l.n1 != 0 || c >= 0) throw SolverError(ErrorKind::InvalidArgument, "complex_small_c needs n1 = 0 and c < 0");
    if (l.n2 == 0) {
        // c = -a^2/3 + a^4/108
        const double a2 = -3 * c + c * c / 4;
        return {std::sqrt(a2), 0.0};
    }
    const double k4 = detail::k4_coefficient(l.n2);
    double a2 = -c;
    for (int i = 0; i < 4; ++i) a2 = -c + 16 * k4 * a2 * a2;
    return {std::sqrt(a2), -two_pi * l.n2 / 3 + a2 / (pi * l.n2)};
}

} // namespace bethe3
