#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>

#include "errors.hpp"
#include "tolerances.hpp"

namespace bethe3 {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/** @brief Total-momentum index from the free-particle quantum numbers. */
inline int np_from_label(int n1, int n2)
{
    int r = ((n1 - n2) % 3 + 3) % 3;
    if (r == 0) return 0;
    return r == 1 ? -1 : 1;
}

struct QuantumLabel {
    int n1 = 0;
    int n2 = 0;

    int np() const { return np_from_label(n1, n2); }
    double p() const { return two_pi * np(); }
    bool operator==(const QuantumLabel&) const = default;
    auto operator<=>(const QuantumLabel&) const = default;

    std::string str() const
    {
        std::ostringstream os;
        os << '(' << n1 << ',' << n2 << ')';
        return os.str();
    }
};

/** @brief Result of bringing a label into the cell n2 >= n1 >= 0. */
struct CanonicalLabel {
    QuantumLabel label;
    bool partner = false; // the requested state is the conjugate partner of `label`
};

inline CanonicalLabel canonicalize(QuantumLabel l)
{
    if (l.n1 <= 0 && l.n2 <= 0 && (l.n1 < 0 || l.n2 < 0))
        l = {-l.n2, -l.n1};
    if (l.n1 < 0 || l.n2 < 0)
        throw SolverError(ErrorKind::InvalidArgument, "label " + l.str() + " has mixed signs");
    if (l.n1 > l.n2) return {{l.n2, l.n1}, true};
    return {l, false};
}

inline bool is_canonical(const QuantumLabel& l) { return 0 <= l.n1 && l.n1 <= l.n2; }

using Momenta = std::array<cplx, 3>;

enum class Branch { RealK, ComplexK };

inline const char* to_string(Branch b) { return b == Branch::RealK ? "real" : "complex"; }

struct RealCoords {
    double delta1 = 0;
    double delta2 = 0;
    double p = 0;
};

struct ComplexCoords {
    double alpha = 0;
    double gamma = 0;
    double p = 0;
};

using BranchCoords = std::variant<RealCoords, ComplexCoords>;

inline Branch branch_of(const BranchCoords& b)
{
    return std::holds_alternative<RealCoords>(b) ? Branch::RealK : Branch::ComplexK;
}

struct StateSolution {
    QuantumLabel label;
    double c = 0;
    BranchCoords coords;
    Momenta momenta{};
    double energy = 0;

    Branch branch() const { return branch_of(coords); }
};

inline Momenta k_from_deltas(double p, double d1, double d2)
{
    return {cplx((p - 2 * d1 - d2) / 3), cplx((p + d1 - d2) / 3), cplx((p + d1 + 2 * d2) / 3)};
}

inline RealCoords deltas_from_k(const Momenta& m)
{
    for (const auto& k : m)
        if (k.imag() != 0)
            throw SolverError(ErrorKind::InvalidArgument, "deltas_from_k needs real momenta");
    if (m[0].real() > m[1].real() || m[1].real() > m[2].real())
        throw SolverError(ErrorKind::InvalidArgument, "deltas_from_k needs ordered momenta");
    return {m[1].real() - m[0].real(), m[2].real() - m[1].real(),
            m[0].real() + m[1].real() + m[2].real()};
}

inline Momenta k_from_alpha_gamma(double p, double alpha, double gamma)
{
    return {cplx(gamma + p / 3, alpha), cplx(gamma + p / 3, -alpha), cplx(-2 * gamma + p / 3)};
}

inline Momenta momenta_of(const BranchCoords& b)
{
    if (auto r = std::get_if<RealCoords>(&b)) return k_from_deltas(r->p, r->delta1, r->delta2);
    auto& q = std::get<ComplexCoords>(b);
    return k_from_alpha_gamma(q.p, q.alpha, q.gamma);
}

inline double energy_of_coords(const BranchCoords& b)
{
    if (auto r = std::get_if<RealCoords>(&b))
        return (r->p * r->p + 2 * (r->delta1 * r->delta1 + r->delta2 * r->delta2 + r->delta1 * r->delta2)) / 3;
    auto& q = std::get<ComplexCoords>(b);
    return -2 * q.alpha * q.alpha + 6 * q.gamma * q.gamma + q.p * q.p / 3;
}

/** @brief E = sum k^2, cross-checked against the coordinate form. */
inline double energy(const StateSolution& s)
{
    cplx sum = 0;
    double scale = 1;
    for (const auto& k : s.momenta) {
        sum += k * k;
        scale += std::norm(k);
    }
    const double from_coords = energy_of_coords(s.coords);
    if (std::abs(sum.imag()) > tol::identity * scale || std::abs(sum.real() - from_coords) > 1e-12 * scale) {
        std::ostringstream os;
        os.precision(17);
        os << "energy mismatch for " << s.label.str() << " at c=" << s.c << ": sum k^2=" << sum
           << " coords=" << from_coords;
        throw SolverError(ErrorKind::Inconsistency, os.str());
    }
    return sum.real();
}

inline StateSolution make_state(QuantumLabel label, double c, BranchCoords coords)
{
    StateSolution s{label, c, coords, momenta_of(coords), 0};
    s.energy = energy(s);
    return s;
}

inline Momenta strip_shift(const Momenta& m, int n0)
{
    Momenta out = m;
    for (auto& k : out) k += two_pi * n0;
    return out;
}

inline cplx momentum_sum(const Momenta& m) { return m[0] + m[1] + m[2]; }

/** @brief Degenerate partner: label (n2,n1), k -> -k, p -> -p. */
inline StateSolution partner_state(const StateSolution& s)
{
    if (s.label.n1 == s.label.n2) return s;
    QuantumLabel l{s.label.n2, s.label.n1};
    if (auto r = std::get_if<RealCoords>(&s.coords))
        return make_state(l, s.c, RealCoords{r->delta2, r->delta1, -r->p});
    auto& q = std::get<ComplexCoords>(s.coords);
    return make_state(l, s.c, ComplexCoords{q.alpha, -q.gamma, -q.p});
}

} // namespace bethe3
