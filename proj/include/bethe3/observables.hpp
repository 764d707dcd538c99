#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "core_model.hpp"
#include "errors.hpp"
#include "tolerances.hpp"
#include "wavefunction.hpp"

namespace bethe3 {

/** @brief phi_k(z) = (e^z - sum_{j<k} z^j/j!) / z^k, i.e. the divided difference of exp on (0,...,0,z). */
inline cplx phi(int k, cplx z)
{
    if (std::abs(z) < 1) {
        double fact = 1;
        for (int j = 2; j <= k; ++j) fact *= j;
        cplx term = 1.0 / fact, sum = term;
        for (int n = 1; n < 60; ++n) {
            term *= z / double(n + k);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    cplx f = std::exp(z);
    double fact = 1;
    for (int j = 0; j < k; ++j) {
        if (j > 0) fact *= j;
        f = (f - 1.0 / fact) / z;
    }
    return f;
}

/** @brief Derivative of phi_2, equal to the divided difference of exp on (0,0,z,z). */
inline cplx phi2_prime(cplx z)
{
    if (std::abs(z) < 1) {
        cplx sum = 0, zp = 1;
        double fact = 6; // (n+2)! at n = 1
        for (int n = 1; n < 60; ++n) {
            const cplx term = double(n) * zp / fact;
            sum += term;
            if (n > 2 && std::abs(term) < 1e-18 * std::abs(sum)) break;
            zp *= z;
            fact *= n + 3;
        }
        return sum;
    }
    return (phi(1, z) - 2.0 * phi(2, z)) / z;
}

enum class SimplexCase { AllZero, OnePairZero, AllNonzero };

inline const char* to_string(SimplexCase k)
{
    switch (k) {
    case SimplexCase::AllZero: return "all-zero";
    case SimplexCase::OnePairZero: return "one-pair-zero";
    case SimplexCase::AllNonzero: return "all-nonzero";
    }
    return "unknown";
}

struct SimplexIntegralKey {
    std::array<cplx, 3> alpha{};
    SimplexCase tag = SimplexCase::AllZero;
};

/** @brief Key for exponents (a1, a2, -a1-a2); the third exponent is fixed by the zero-sum rule. */
inline SimplexIntegralKey make_simplex_key(cplx a1, cplx a2)
{
    SimplexIntegralKey key{{a1, a2, -a1 - a2}, SimplexCase::AllZero};
    int zeros = 0;
    for (const auto& a : key.alpha) zeros += std::abs(a) < tol::simplex_zero;
    key.tag = zeros >= 2 ? SimplexCase::AllZero : zeros == 1 ? SimplexCase::OnePairZero : SimplexCase::AllNonzero;
    return key;
}

/**
 * @brief Integral of exp(i(a1 x1 + a2 x2 + a3 x3)) over 0 <= x1 <= x2 <= x3 <= 1.
 *
 * With u = -i a1 and v = i a3 the integral is the divided difference exp[0,0,u,v]:
 * 1/6, phi3(v) or phi3(u) when a1 or a3 vanish, phi2'(u) when a2 vanishes (u = v), and
 * (phi2(u) - phi2(v))/(u - v) otherwise. Exponents below 1e-6 use the first-order expansion
 * about the limiting case.
 */
inline cplx simplex_integral(const SimplexIntegralKey& key)
{
    const cplx i(0, 1);
    const cplx u = -i * key.alpha[0], v = i * key.alpha[2];
    const double near = tol::simplex_near;
    const bool s1 = std::abs(key.alpha[0]) < near, s2 = std::abs(key.alpha[1]) < near, s3 = std::abs(key.alpha[2]) < near;
    if ((s1 && s2) || (s1 && s3) || (s2 && s3)) {
        // complete homogeneous sums h_n(u, v) / (n+3)!
        cplx sum = 0;
        double fact = 6;
        for (int n = 0; n <= 3; ++n) {
            cplx h = 0;
            for (int j = 0; j <= n; ++j) h += std::pow(u, j) * std::pow(v, n - j);
            sum += h / fact;
            fact *= n + 4;
        }
        return sum;
    }
    if (s1) return phi(3, v) + u * phi(4, v);
    if (s3) return phi(3, u) + v * phi(4, u);
    if (s2) return phi2_prime(0.5 * (u + v));
    return (phi(2, u) - phi(2, v)) / (u - v);
}

/** @brief Integral of exp(i(b1 s + b3 t)) over 0 <= s <= t <= 1 with b1 + b3 = 0. */
inline cplx triangle_integral(cplx b3)
{
    if (std::abs(b3) < tol::simplex_zero) return 0.5;
    return phi(2, cplx(0, 1) * b3);
}

namespace detail {

inline std::array<cplx, 3> ordered_k(const Momenta& k, Perm p)
{
    const auto ix = perm_indices(p);
    return {k[ix[0]], k[ix[1]], k[ix[2]]};
}

inline void check_real(cplx v, const char* what)
{
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw SolverError(ErrorKind::Inconsistency, std::string(what) + " is not finite");
    if (std::abs(v.imag()) > 1e-9 * std::max(1e-300, std::abs(v.real()))) {
        std::ostringstream os;
        os.precision(3);
        os << what << " has imaginary part " << v.imag() << " against " << v.real();
        throw SolverError(ErrorKind::Inconsistency, os.str());
    }
}

} // namespace detail

/** @brief <psi|psi> over the unit box as 36 closed-form simplex integrals. */
inline double norm_squared(const StateSolution& s)
{
    const BetheAmplitudes a = amplitudes(s.momenta, s.c);
    cplx sum = 0;
    for (Perm p : all_perms) {
        const auto kp = detail::ordered_k(s.momenta, p);
        for (Perm q : all_perms) {
            const auto kq = detail::ordered_k(s.momenta, q);
            const cplx a1 = kp[0] - std::conj(kq[0]), a2 = kp[1] - std::conj(kq[1]);
            sum += a[p] * std::conj(a[q]) * simplex_integral(make_simplex_key(a1, a2));
        }
    }
    sum *= 6.0;
    detail::check_real(sum, "norm");
    if (!(sum.real() > 0)) throw SolverError(ErrorKind::Inconsistency, "norm is not positive");
    return sum.real();
}

/**
 * @brief <V> = (6c/N) [ integral |psi(x1,x1,x3)|^2 + integral |psi(x1,x3,x3)|^2 ] over x1 <= x3,
 * i.e. both coincidence faces of the primary region.
 */
inline double potential_expectation(const StateSolution& s, double norm)
{
    if (s.c == 0) return 0.0;
    const BetheAmplitudes a = amplitudes(s.momenta, s.c);
    cplx sum = 0;
    for (Perm p : all_perms) {
        const auto kp = detail::ordered_k(s.momenta, p);
        for (Perm q : all_perms) {
            const auto kq = detail::ordered_k(s.momenta, q);
            const cplx w = a[p] * std::conj(a[q]);
            sum += w * triangle_integral(kp[2] - std::conj(kq[2]));
            sum += w * triangle_integral(kp[1] + kp[2] - std::conj(kq[1] + kq[2]));
        }
    }
    detail::check_real(sum, "coincidence integral");
    return 6 * s.c * sum.real() / norm;
}

inline double potential_expectation(const StateSolution& s) { return potential_expectation(s, norm_squared(s)); }

enum class CellKind { Vertex, Edge, Interior };

inline const char* to_string(CellKind k)
{
    switch (k) {
    case CellKind::Vertex: return "vertex";
    case CellKind::Edge: return "edge";
    case CellKind::Interior: return "interior";
    }
    return "unknown";
}

struct TernaryCell {
    double r12 = 0, r23 = 0, r31 = 0;
    double density = 0;
    CellKind kind = CellKind::Interior;
    int row = 0, col = 0;
    bool upward = true;
};

/** @brief Density at the centroids of the R^2 sub-triangles; rows follow r12, cells within a row follow r23. */
struct TernaryGrid {
    int resolution = 0;
    std::vector<TernaryCell> cells;
};

inline TernaryGrid density_grid(const StateSolution& s, int resolution)
{
    if (resolution < 8) throw SolverError(ErrorKind::InvalidArgument, "density grid needs resolution >= 8");
    const WaveFunction wf(s);
    const double norm = norm_squared(s);
    const int R = resolution;
    TernaryGrid g;
    g.resolution = R;
    g.cells.reserve(static_cast<std::size_t>(R) * R);
    auto add = [&](int i, int j, bool up) {
        const double off = up ? 1.0 / 3 : 2.0 / 3;
        TernaryCell cell;
        cell.r12 = (i + off) / R;
        cell.r23 = (j + off) / R;
        cell.r31 = 1 - cell.r12 - cell.r23;
        cell.row = i;
        cell.col = j;
        cell.upward = up;
        const bool corner = up && ((i == 0 && j == 0) || (i == R - 1 && j == 0) || (i == 0 && j == R - 1));
        const bool side = up && (i == 0 || j == 0 || i + j == R - 1);
        cell.kind = corner ? CellKind::Vertex : side ? CellKind::Edge : CellKind::Interior;
        cell.density = std::norm(wf.region_value(0, cell.r12, cell.r12 + cell.r23)) / norm;
        g.cells.push_back(cell);
    };
    for (int i = 0; i < R; ++i)
        for (int j = 0; i + j < R; ++j) {
            add(i, j, true);
            if (i + j < R - 1) add(i, j, false);
        }
    return g;
}

} // namespace bethe3
