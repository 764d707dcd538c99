#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "core_model.hpp"
#include "errors.hpp"
#include "tolerances.hpp"

namespace bethe3 {

/** @brief Permutations of the plane-wave terms; term (ijk) is exp(i(k_i x1 + k_j x2 + k_k x3)). */
enum class Perm { P123, P213, P132, P321, P312, P231 };

inline constexpr std::array<Perm, 6> all_perms{Perm::P123, Perm::P213, Perm::P132, Perm::P321, Perm::P312, Perm::P231};

inline constexpr std::array<int, 3> perm_indices(Perm p)
{
    switch (p) {
    case Perm::P123: return {0, 1, 2};
    case Perm::P213: return {1, 0, 2};
    case Perm::P132: return {0, 2, 1};
    case Perm::P321: return {2, 1, 0};
    case Perm::P312: return {2, 0, 1};
    case Perm::P231: return {1, 2, 0};
    }
    return {0, 1, 2};
}

inline constexpr bool is_trimer_term(Perm p) { return p == Perm::P123 || p == Perm::P231 || p == Perm::P312; }

inline const char* to_string(Perm p)
{
    constexpr const char* names[] = {"123", "213", "132", "321", "312", "231"};
    return names[static_cast<int>(p)];
}

struct BetheAmplitudes {
    std::array<cplx, 6> a{};

    cplx operator[](Perm p) const { return a[static_cast<int>(p)]; }
    cplx& operator[](Perm p) { return a[static_cast<int>(p)]; }
};

/** @brief e^{i theta_{jl}} = (c - i(k_j - k_l)) / (c + i(k_j - k_l)). */
inline cplx phase_factor(cplx kj, cplx kl, double c)
{
    const cplx d = kj - kl;
    const cplx den = c + cplx(0, 1) * d;
    if (std::abs(den) < 1e-13 * std::max(1.0, std::abs(c)))
        throw SolverError(ErrorKind::SingularArgument, "phase factor pole: c + i(k_j - k_l) is below working precision");
    return (c - cplx(0, 1) * d) / den;
}

inline BetheAmplitudes amplitudes(const Momenta& k, double c)
{
    BetheAmplitudes out;
    if (c == 0) {
        out.a.fill(1);
        return out;
    }
    for (int j = 0; j < 3; ++j)
        for (int l = j + 1; l < 3; ++l)
            if (std::abs(k[j] - k[l]) < tol::degenerate_momenta)
                throw SolverError(ErrorKind::DegenerateMomenta, "coinciding momenta: the Bethe ansatz vanishes");
    const cplx t21 = phase_factor(k[1], k[0], c), t31 = phase_factor(k[2], k[0], c), t32 = phase_factor(k[2], k[1], c);
    out[Perm::P123] = 1;
    out[Perm::P213] = -t21;
    out[Perm::P132] = -t32;
    out[Perm::P321] = -t21 * t31 * t32;
    out[Perm::P312] = t31 * t32;
    out[Perm::P231] = t21 * t31;
    return out;
}

/** @brief Six-term Bethe wavefunction with amplitudes prepared once per state. */
class WaveFunction {
public:
    explicit WaveFunction(const StateSolution& s) : k_(s.momenta), c_(s.c), a_(amplitudes(s.momenta, s.c)) {}

    const Momenta& momenta() const { return k_; }
    const BetheAmplitudes& amps() const { return a_; }
    double c() const { return c_; }

    cplx term(Perm p, double x1, double x2, double x3) const
    {
        const auto ix = perm_indices(p);
        return a_[p] * std::exp(cplx(0, 1) * (k_[ix[0]] * x1 + k_[ix[1]] * x2 + k_[ix[2]] * x3));
    }

    /** @brief Sum over the primary-region expansion, no wrapping or sorting. */
    cplx region_value(double x1, double x2, double x3) const
    {
        cplx s = 0;
        for (Perm p : all_perms) s += term(p, x1, x2, x3);
        return s;
    }

    /** @brief d/dx_m of the primary-region expansion (m = 0, 1, 2). */
    cplx region_derivative(int m, double x1, double x2, double x3) const
    {
        cplx s = 0;
        for (Perm p : all_perms) s += cplx(0, 1) * k_[perm_indices(p)[m]] * term(p, x1, x2, x3);
        return s;
    }

    cplx operator()(double x1, double x2, double x3) const
    {
        std::array<double, 3> x{wrap(x1), wrap(x2), wrap(x3)};
        std::sort(x.begin(), x.end());
        return region_value(x[0], x[1], x[2]);
    }

    static double wrap(double x)
    {
        double r = x - std::floor(x);
        return r >= 1 ? 0.0 : r;
    }

private:
    Momenta k_;
    double c_;
    BetheAmplitudes a_;
};

struct ConfigurationPoint {
    double x1 = 0, x2 = 0, x3 = 0;
};

inline cplx psi(const ConfigurationPoint& pt, const StateSolution& s) { return WaveFunction(s)(pt.x1, pt.x2, pt.x3); }

/**
 * @brief Jump-condition mismatch at a coincidence point. With x_third > x_pair the pair is
 * (x1, x2); otherwise it is (x2, x3) with x1 = x_third.
 */
inline double jump_residual(const WaveFunction& wf, double x_pair, double x_third)
{
    double x1, x2, x3;
    int lo;
    if (x_third >= x_pair) {
        x1 = x2 = x_pair;
        x3 = x_third;
        lo = 0;
    } else {
        x1 = x_third;
        x2 = x3 = x_pair;
        lo = 1;
    }
    const cplx d = wf.region_derivative(lo + 1, x1, x2, x3) - wf.region_derivative(lo, x1, x2, x3);
    const cplx cpsi = wf.c() * wf.region_value(x1, x2, x3);
    return std::abs(d - cpsi) / std::max(1.0, std::abs(cpsi));
}

inline double jump_residual(const StateSolution& s, double x_pair, double x_third)
{
    return jump_residual(WaveFunction(s), x_pair, x_third);
}

/** @brief psi(0,x2,x3) = psi(x2,x3,1) and the matching x-derivative condition. */
inline double periodicity_residual(const WaveFunction& wf, double x2, double x3)
{
    const cplx a = wf.region_value(0, x2, x3), b = wf.region_value(x2, x3, 1);
    const cplx da = wf.region_derivative(0, 0, x2, x3), db = wf.region_derivative(2, x2, x3, 1);
    const double rv = std::abs(a - b) / std::max(1.0, std::abs(a));
    const double rd = std::abs(da - db) / std::max(1.0, std::abs(da));
    return std::max(rv, rd);
}

inline double periodicity_residual(const StateSolution& s, double x2, double x3)
{
    return periodicity_residual(WaveFunction(s), x2, x3);
}

struct GroupWeights {
    double trimer = 0;
    double dimer = 0;
};

/** @brief Relative |a(P)| mass of the trimer terms (123),(231),(312) against the dimer terms. */
inline GroupWeights dimer_trimer_weights(const StateSolution& s)
{
    if (s.branch() != Branch::ComplexK)
        throw SolverError(ErrorKind::NotApplicable, "dimer/trimer split needs a complex-branch state");
    const BetheAmplitudes a = amplitudes(s.momenta, s.c);
    GroupWeights w;
    for (Perm p : all_perms) (is_trimer_term(p) ? w.trimer : w.dimer) += std::abs(a[p]);
    const double tot = w.trimer + w.dimer;
    return {w.trimer / tot, w.dimer / tot};
}

/** @brief (2 alpha - c)/(2 alpha + c), the relative weight of the dimer terms for gamma = 0 states. */
inline double dimer_prefactor(const StateSolution& s)
{
    auto* q = std::get_if<ComplexCoords>(&s.coords);
    if (!q) throw SolverError(ErrorKind::NotApplicable, "dimer prefactor needs a complex-branch state");
    return (2 * q->alpha - s.c) / (2 * q->alpha + s.c);
}

} // namespace bethe3
